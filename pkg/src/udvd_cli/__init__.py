"""udvd-cli - unified dynamic convolution super-resolution for multiple degradations."""

__version__ = "0.1.0"
