"""Allow running the CLI as a module: python -m udvd_cli"""

from udvd_cli.main import cli

if __name__ == "__main__":
    cli()
