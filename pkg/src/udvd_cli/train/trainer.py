"""The training loop: synthesize, forward, multistage loss, backward, Adam."""

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Sequence

from ..degrade import PcaBasis
from ..errors import NonFiniteError, TrainingDivergedError
from ..model import Udvd, build_udvd, multistage_loss, save_model
from ..model.checkpoint import load_extra, load_model
from ..tensor import Adam, AdamState, Graph, Tensor
from .config import TrainConfig, learning_rate
from .data import Batch, BatchSynthesizer, load_training_images

logger = logging.getLogger(__name__)

LOG_HEADER = ("step", "loss", "lr")


@dataclass
class TrainingEvent:
    """One row of the training log."""
    step: int
    loss: float
    lr: float


def log_path_for(checkpoint: Path) -> Path:
    return Path(checkpoint).with_suffix(".log.csv")


class Trainer:
    """Owns the model and optimizer of one run."""

    def __init__(
        self,
        cfg: TrainConfig,
        images: Sequence[Tensor],
        basis: Optional[PcaBasis] = None,
        model: Optional[Udvd] = None,
        state: Optional[AdamState] = None,
        progress_callback: Optional[Callable[[TrainingEvent], None]] = None,
    ):
        self.cfg = cfg
        self.model = model or build_udvd(cfg.model, seed=cfg.seed)
        self.optimizer = Adam(self.model.parameters(), state)
        self.synthesizer = BatchSynthesizer(images, cfg, basis)
        self.progress_callback = progress_callback

    @property
    def step(self) -> int:
        """Number of completed optimizer steps."""
        return self.optimizer.state.step

    def train_step(self, batch: Batch) -> TrainingEvent:
        lr = learning_rate(self.cfg.lr0, self.cfg.halve_every, batch.step)
        with Graph() as graph:
            outputs = self.model.forward(batch.lr, batch.dmap)
            loss = multistage_loss(outputs.images, batch.hr, self.cfg.model.multistage)
        value = loss.item()
        if not math.isfinite(value):
            raise TrainingDivergedError(
                f"loss is {value} at step {batch.step}", batch.step, batch.streams
            )
        graph.backward(loss, self.model.parameters())
        try:
            self.optimizer.step(lr)
        except NonFiniteError as e:
            raise TrainingDivergedError(f"step {batch.step}: {e}", batch.step, batch.streams)
        return TrainingEvent(batch.step, value, lr)

    def run(
        self,
        steps: Optional[int] = None,
        checkpoint: Optional[Path] = None,
        log_path: Optional[Path] = None,
    ) -> List[TrainingEvent]:
        """
        Train until ``steps`` (default ``total_steps``) optimizer steps are done.

        Args:
            steps: Final step number; resumed runs continue from ``self.step``
            checkpoint: Written every ``checkpoint_every`` steps and at the end
            log_path: CSV log with header ``step,loss,lr`` (appended on resume)

        Returns:
            Events of the steps run by this call
        """
        last = steps if steps is not None else self.cfg.total_steps
        first = self.step + 1
        events: List[TrainingEvent] = []
        writer_file = None
        try:
            if log_path is not None:
                log_path = Path(log_path)
                log_path.parent.mkdir(parents=True, exist_ok=True)
                fresh = first == 1 or not log_path.exists()
                writer_file = log_path.open("w" if fresh else "a", newline="")
                writer = csv.writer(writer_file)
                if fresh:
                    writer.writerow(LOG_HEADER)

            for batch in self.synthesizer.iterate(first, last):
                try:
                    event = self.train_step(batch)
                except TrainingDivergedError as e:
                    if checkpoint is not None:
                        self.dump_divergence(Path(checkpoint), e)
                    raise
                events.append(event)
                if writer_file is not None:
                    writer.writerow((event.step, repr(event.loss), repr(event.lr)))
                if event.step % self.cfg.log_every == 0:
                    logger.info("step %d loss %.6f lr %.3g", event.step, event.loss, event.lr)
                if self.progress_callback:
                    self.progress_callback(event)
                every = self.cfg.checkpoint_every
                if checkpoint is not None and every and event.step % every == 0:
                    self.save(checkpoint)
        finally:
            if writer_file is not None:
                writer_file.close()

        if checkpoint is not None:
            self.save(checkpoint)
        return events

    def save(self, checkpoint: Path) -> None:
        save_model(checkpoint, self.model, extra=self.optimizer.state.to_arrays())

    def dump_divergence(self, checkpoint: Path, error: TrainingDivergedError) -> Path:
        """Write the step and item streams of the failing batch next to the checkpoint."""
        path = Path(checkpoint).with_suffix(".diverged.json")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(
                {"step": error.step, "seed": self.cfg.seed, "batch_streams": error.batch_seeds},
                indent=2,
            )
        )
        logger.error("training diverged at step %d; batch seeds written to %s", error.step, path)
        return path

    @classmethod
    def resume(
        cls,
        cfg: TrainConfig,
        images: Sequence[Tensor],
        checkpoint: Path,
        basis: Optional[PcaBasis] = None,
        progress_callback: Optional[Callable[[TrainingEvent], None]] = None,
    ) -> "Trainer":
        """Continue from a checkpoint written by :meth:`save`."""
        model = load_model(checkpoint)
        state = AdamState.from_arrays(load_extra(checkpoint, "adam."))
        cfg = cfg.model_copy(update={"model": model.config})
        return cls(cfg, images, basis, model, state, progress_callback)


def train(
    cfg: TrainConfig,
    data_dir: Path,
    out_checkpoint: Path,
    resume: bool = False,
    basis: Optional[PcaBasis] = None,
    progress_callback: Optional[Callable[[TrainingEvent], None]] = None,
) -> List[TrainingEvent]:
    """Train on the PNGs of ``data_dir`` and write ``out_checkpoint`` plus its CSV log."""
    images = load_training_images(Path(data_dir))
    if resume:
        trainer = Trainer.resume(cfg, images, out_checkpoint, basis, progress_callback)
        logger.info("resuming from step %d", trainer.step)
    else:
        trainer = Trainer(cfg, images, basis, progress_callback=progress_callback)
    return trainer.run(checkpoint=out_checkpoint, log_path=log_path_for(out_checkpoint))
