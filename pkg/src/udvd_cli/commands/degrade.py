"""Degradation commands: single images, spatially variant ramps, whole datasets, PCA."""

from pathlib import Path
from typing import Optional

import numpy as np
import typer

from ..config import worker_count
from ..degrade import (
    DegradationParams,
    degrade,
    degrade_spatial,
    encode_degradation,
    encode_degradation_spatial,
    gaussian_kernel,
    pca_fit,
    save_basis,
    spatial_schedule,
    synthesize_dataset,
)
from ..degrade.pca import DEFAULT_GRID_SIZE, PCA_DIM
from ..images import mod_crop, read_png, write_png
from ..tensor import save_tensor
from .common import console, handle_errors, progress, range_option, resolve_basis

WIDTH_RANGE_DEFAULT = "0.2,3.0"
NOISE_RANGE_DEFAULT = "0,75"


def _map_path(out: Path, map_out: Optional[Path]) -> Path:
    return map_out or out.with_suffix(".map.ten")


def degrade_command(
    in_path: Path = typer.Option(..., "--in", help="HR PNG image"),
    out: Path = typer.Option(..., "--out", help="LR PNG to write"),
    eps: float = typer.Option(..., "--eps", min=0.2, max=3.0, help="Gaussian kernel width"),
    sigma: float = typer.Option(
        ..., "--sigma", min=0.0, max=75.0, help="Noise level on the 0-255 scale"
    ),
    scale: int = typer.Option(..., "--scale", min=2, max=4, help="Downsampling factor"),
    seed: int = typer.Option(0, "--seed", min=0, help="Noise seed"),
    map_out: Optional[Path] = typer.Option(
        None, "--map", help="Degradation map output (default: <out>.map.ten)"
    ),
    basis_path: Optional[Path] = typer.Option(None, "--basis", help="PCA basis checkpoint"),
):
    """Blur, bicubic-downsample and add noise to one HR image."""
    with handle_errors():
        params = DegradationParams(kernel_width=eps, noise_level=sigma, scale=scale)
        hr = mod_crop(read_png(in_path), scale)
        lr = degrade(hr, params, seed)
        basis = resolve_basis(basis_path, PCA_DIM)
        dmap = encode_degradation(gaussian_kernel(eps), sigma, basis, lr.shape[2], lr.shape[3])
        write_png(out, lr)
        save_tensor(_map_path(out, map_out), dmap)
    console.print(f"[green]Wrote {out} ({lr.shape[3]}x{lr.shape[2]})[/green]")


def degrade_spatial_command(
    in_path: Path = typer.Option(..., "--in", help="HR PNG image"),
    out: Path = typer.Option(..., "--out", help="LR PNG to write"),
    eps_range: str = range_option("0.2,2.0", "--eps-range", "Kernel width ramp 'lo,hi'"),
    sigma_range: str = range_option("5,50", "--sigma-range", "Noise level ramp 'lo,hi'"),
    scale: int = typer.Option(..., "--scale", min=2, max=4, help="Downsampling factor"),
    seed: int = typer.Option(0, "--seed", min=0, help="Noise seed"),
    map_out: Optional[Path] = typer.Option(
        None, "--map", help="Degradation map output (default: <out>.map.ten)"
    ),
    basis_path: Optional[Path] = typer.Option(None, "--basis", help="PCA basis checkpoint"),
):
    """Degrade with kernel width and noise level increasing across the columns."""
    with handle_errors():
        hr = mod_crop(read_png(in_path), scale)
        lr = degrade_spatial(hr, eps_range, sigma_range, scale, seed)
        schedule = spatial_schedule(lr.shape[3], eps_range, sigma_range)
        basis = resolve_basis(basis_path, PCA_DIM)
        dmap = encode_degradation_spatial(
            schedule.widths, schedule.noise_levels, basis, lr.shape[2]
        )
        write_png(out, lr)
        save_tensor(_map_path(out, map_out), dmap)
    console.print(f"[green]Wrote {out} ({lr.shape[3]}x{lr.shape[2]})[/green]")


def synthesize_command(
    hr_dir: Path = typer.Option(..., "--hr-dir", help="Directory of HR PNG images"),
    out_dir: Path = typer.Option(..., "--out-dir", help="Destination directory"),
    eps_range: str = range_option(WIDTH_RANGE_DEFAULT, "--eps-range", "Kernel width range 'lo,hi'"),
    sigma_range: str = range_option(NOISE_RANGE_DEFAULT, "--sigma-range", "Noise range 'lo,hi'"),
    scale: int = typer.Option(..., "--scale", min=2, max=4, help="Downsampling factor"),
    seed: int = typer.Option(0, "--seed", min=0, help="Master seed"),
    workers: Optional[int] = typer.Option(None, "--workers", min=1, help="Worker threads"),
    basis_path: Optional[Path] = typer.Option(None, "--basis", help="PCA basis checkpoint"),
):
    """Degrade every image of a directory and write a JSON manifest."""
    with handle_errors():
        if not hr_dir.is_dir():
            raise FileNotFoundError(2, "no such directory", str(hr_dir))
        basis = resolve_basis(basis_path, PCA_DIM)
        with progress() as bar:
            task = bar.add_task("Synthesizing...", total=None)
            entries = synthesize_dataset(
                hr_dir,
                out_dir,
                eps_range,
                sigma_range,
                scale,
                seed,
                basis=basis,
                workers=worker_count(workers),
                progress_callback=lambda e: bar.update(task, description=Path(e.lr_path).name),
            )
    console.print(f"[green]Synthesized {len(entries)} pairs into {out_dir}[/green]")


def pca_fit_command(
    out: Path = typer.Option(..., "--out", help="Basis checkpoint to write"),
    dim: int = typer.Option(PCA_DIM, "--dim", min=1, help="Number of principal components"),
    grid_size: int = typer.Option(
        DEFAULT_GRID_SIZE, "--grid-size", min=2, help="Number of kernel widths"
    ),
    width_range: str = range_option(WIDTH_RANGE_DEFAULT, "--width-range", "Kernel widths 'lo,hi'"),
):
    """Fit the PCA basis of Gaussian blur kernels."""
    with handle_errors():
        basis = pca_fit(np.linspace(width_range[0], width_range[1], grid_size), dim)
        save_basis(out, basis)
    console.print(f"[green]Wrote {dim}-component basis to {out}[/green]")
