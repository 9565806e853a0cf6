"""Commands that run a trained model: infer, viz-kernels and sweep."""

from pathlib import Path
from typing import Optional

import typer

from ..degrade import DegradationParams, encode_degradation, gaussian_kernel
from ..errors import ConfigError
from ..formatters import OutputFormat, get_formatter
from ..images import list_pngs, read_png, write_png
from ..model import load_model
from ..tensor import Tensor
from ..train import export_kernel_viz, infer, infer_spatial, sweep
from .common import (
    console,
    handle_errors,
    progress,
    range_option,
    resolve_basis,
    write_output,
)


def infer_command(
    model_path: Path = typer.Option(..., "--model", help="Model checkpoint (.ckpt)"),
    in_path: Path = typer.Option(..., "--in", help="LR PNG image"),
    out: Path = typer.Option(..., "--out", help="SR PNG to write"),
    eps: Optional[float] = typer.Option(None, "--eps", min=0.2, max=3.0, help="Kernel width"),
    sigma: Optional[float] = typer.Option(None, "--sigma", min=0.0, max=75.0, help="Noise level"),
    scale: Optional[int] = typer.Option(
        None, "--scale", min=2, max=4, help="Expected upscaling factor (must match the model)"
    ),
    spatial_eps: str = range_option(None, "--spatial-eps", "Kernel width ramp 'lo,hi'"),
    spatial_sigma: str = range_option(None, "--spatial-sigma", "Noise level ramp 'lo,hi'"),
    basis_path: Optional[Path] = typer.Option(None, "--basis", help="PCA basis checkpoint"),
):
    """Super-resolve an LR image given its (known or guessed) degradation."""
    spatial = spatial_eps is not None or spatial_sigma is not None
    if not spatial and (eps is None or sigma is None):
        raise typer.BadParameter(
            "--eps and --sigma are required unless --spatial-eps/--spatial-sigma are given"
        )

    with handle_errors():
        model = load_model(model_path)
        if scale is not None and scale != model.config.scale:
            raise ConfigError(f"model upscales x{model.config.scale}, --scale asks for x{scale}")
        basis = resolve_basis(basis_path, model.config.pca_dim)
        lr = read_png(in_path)
        if spatial:
            sr = infer_spatial(
                model, lr, spatial_eps or (eps, eps), spatial_sigma or (sigma, sigma), basis
            )
        else:
            params = DegradationParams(
                kernel_width=eps, noise_level=sigma, scale=model.config.scale
            )
            sr = infer(model, lr, params, basis)
        write_png(out, sr)
    console.print(f"[green]Wrote {out} ({sr.shape[3]}x{sr.shape[2]})[/green]")


def viz_kernels_command(
    model_path: Path = typer.Option(..., "--model", help="Model checkpoint (.ckpt)"),
    in_path: Path = typer.Option(..., "--in", help="LR PNG image"),
    out: Path = typer.Option(..., "--out", help="Grayscale PNG to write"),
    block: int = typer.Option(0, "--block", min=0, help="Dynamic block index"),
    eps_a: float = typer.Option(0.2, "--eps-a", min=0.2, max=3.0),
    sigma_a: float = typer.Option(0.0, "--sigma-a", min=0.0, max=75.0),
    eps_b: float = typer.Option(1.6, "--eps-b", min=0.2, max=3.0),
    sigma_b: float = typer.Option(10.0, "--sigma-b", min=0.0, max=75.0),
    basis_path: Optional[Path] = typer.Option(None, "--basis", help="PCA basis checkpoint"),
):
    """Render a block's per-pixel kernels under two degradation maps and their difference."""
    with handle_errors():
        model = load_model(model_path)
        basis = resolve_basis(basis_path, model.config.pca_dim)
        lr = read_png(in_path)
        h, w = lr.shape[2:]

        def encode(eps: float, sigma: float) -> Tensor:
            return encode_degradation(gaussian_kernel(eps), sigma, basis, h, w)

        panels = export_kernel_viz(
            model, lr, encode(eps_a, sigma_a), encode(eps_b, sigma_b), block, out
        )
    console.print(
        f"[green]Wrote {out}[/green] "
        f"(mean absolute kernel difference {panels.difference.mean():.3e})"
    )


def sweep_command(
    model_path: Path = typer.Option(..., "--model", help="Model checkpoint (.ckpt)"),
    hr_dir: Path = typer.Option(..., "--hr-dir", help="Directory of HR PNG test images"),
    border: Optional[int] = typer.Option(None, "--border", min=0, help="PSNR border crop"),
    seed: int = typer.Option(0, "--seed", min=0, help="Noise seed"),
    output: OutputFormat = typer.Option(OutputFormat.TABLE, "--output", "-o", help="Output format"),
    output_file: Optional[Path] = typer.Option(
        None, "--output-file", "-f", help="Write output to file"
    ),
    basis_path: Optional[Path] = typer.Option(None, "--basis", help="PCA basis checkpoint"),
):
    """Compare the model with bicubic upsampling over the standard degradation settings."""
    with handle_errors():
        model = load_model(model_path)
        basis = resolve_basis(basis_path, model.config.pca_dim)
        paths = list_pngs(hr_dir)
        if not paths:
            raise FileNotFoundError(2, "no PNG images", str(hr_dir))
        with progress() as bar:
            bar.add_task(f"Sweeping {len(paths)} images...", total=None)
            report = sweep(model, basis, [read_png(p) for p in paths], border=border, seed=seed)
    write_output(get_formatter(output).format_sweep(report), output_file)
