"""The train command."""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

import typer

from ..config import load_train_config, worker_count
from ..model import UdvdConfig, parameter_count
from ..train import TrainConfig, TrainingEvent, train
from ..train.trainer import log_path_for
from .common import console, handle_errors, progress, range_option, resolve_basis

logger = logging.getLogger(__name__)


def _given(**flags: Any) -> Dict[str, Any]:
    return {name: value for name, value in flags.items() if value is not None}


def build_train_config(
    config_file: Optional[Path],
    desk: bool,
    model_flags: Dict[str, Any],
    train_flags: Dict[str, Any],
) -> TrainConfig:
    """Defaults, then the config file, then explicit flags; UDVD_THREADS caps the workers."""
    if config_file is not None:
        base = load_train_config(config_file)
    else:
        base = TrainConfig.desk() if desk else TrainConfig()
    train_flags = dict(train_flags)
    file_workers = base.workers if config_file is not None else None
    workers = worker_count(train_flags.pop("workers", file_workers))
    model = UdvdConfig.checked(**{**base.model.model_dump(), **model_flags})
    return TrainConfig.checked(
        **{**base.model_dump(), **train_flags, "workers": workers, "model": model}
    )


def train_command(
    data: Path = typer.Option(..., "--data", help="Directory of HR PNG training images"),
    out: Path = typer.Option(..., "--out", help="Checkpoint to write (<name>.ckpt)"),
    config_file: Optional[Path] = typer.Option(None, "--config", help="TrainConfig JSON file"),
    desk: bool = typer.Option(False, "--desk", help="Start from the small desk-scale defaults"),
    resume: bool = typer.Option(False, "--resume", help="Continue from the checkpoint at --out"),
    steps: Optional[int] = typer.Option(None, "--steps", min=1, help="Total optimizer steps"),
    batch: Optional[int] = typer.Option(None, "--batch", min=1, help="Mini-batch size"),
    lr: Optional[float] = typer.Option(None, "--lr", min=0.0, help="Initial learning rate"),
    halve_every: Optional[int] = typer.Option(
        None, "--halve-every", min=1, help="Halve the learning rate every N steps"
    ),
    patch: Optional[int] = typer.Option(None, "--patch", min=1, help="LR patch size"),
    scale: Optional[int] = typer.Option(None, "--scale", min=2, max=4, help="Upscaling factor"),
    block_seq: Optional[str] = typer.Option(
        None, "--block-seq", help="Dynamic blocks, e.g. UDD or UUDD ('' for the baseline)"
    ),
    trunk_channels: Optional[int] = typer.Option(None, "--trunk-channels", min=1),
    res_blocks: Optional[int] = typer.Option(None, "--res-blocks", min=0),
    k: Optional[int] = typer.Option(None, "--k", min=1, help="Per-pixel kernel size (odd)"),
    multistage: Optional[bool] = typer.Option(
        None, "--multistage/--no-multistage", help="Supervise every dynamic block's output"
    ),
    eps_range: str = range_option(None, "--eps-range", "Kernel width sampling range 'lo,hi'"),
    sigma_range: str = range_option(None, "--sigma-range", "Noise level sampling range 'lo,hi'"),
    fixed_patches: Optional[int] = typer.Option(
        None, "--fixed-patches", min=0, help="Train on this many fixed patches (overfit mode)"
    ),
    checkpoint_every: Optional[int] = typer.Option(None, "--checkpoint-every", min=0),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Master seed"),
    workers: Optional[int] = typer.Option(None, "--workers", min=1, help="Worker threads"),
    basis_path: Optional[Path] = typer.Option(None, "--basis", help="PCA basis checkpoint"),
):
    """Train a UDVD network on synthetically degraded patches."""
    with handle_errors():
        cfg = build_train_config(
            config_file,
            desk,
            _given(
                scale=scale, block_seq=block_seq, trunk_channels=trunk_channels,
                n_res_blocks=res_blocks, k=k, multistage=multistage,
            ),
            _given(
                total_steps=steps, batch=batch, lr0=lr, halve_every=halve_every, patch_lr=patch,
                eps_range=eps_range, sigma_range=sigma_range, fixed_patches=fixed_patches,
                checkpoint_every=checkpoint_every, seed=seed,
                workers=workers,
            ),
        )
        basis = resolve_basis(basis_path, cfg.model.pca_dim)
        console.print(
            f"Training {cfg.model.block_seq or 'baseline'} x{cfg.scale} "
            f"({parameter_count(cfg.model):,} parameters) for {cfg.total_steps} steps"
        )

        with progress() as bar:
            task = bar.add_task("Training...", total=cfg.total_steps)

            def on_step(event: TrainingEvent) -> None:
                bar.update(
                    task,
                    completed=event.step,
                    description=f"step {event.step} loss {event.loss:.5f}",
                )

            events = train(cfg, data, out, resume=resume, basis=basis, progress_callback=on_step)

    if events:
        last = events[-1]
        console.print(f"[green]Finished at step {last.step}, loss {last.loss:.6f}[/green]")
    console.print(f"Checkpoint: {out}  Log: {log_path_for(out)}")
