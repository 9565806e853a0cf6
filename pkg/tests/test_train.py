"""Tests for the training configuration, batch synthesis and the training loop."""

import csv
import dataclasses
import json

import numpy as np
import pytest

from udvd_cli.errors import ConfigError, ImageTooSmallError, ParameterError, TrainingDivergedError
from udvd_cli.model import load_model
from udvd_cli.tensor import Tensor
from udvd_cli.train import (
    BatchSynthesizer,
    TrainConfig,
    Trainer,
    apply_augment,
    compose_augment,
    invert_augment,
    learning_rate,
    sample_patch,
    train,
)
from udvd_cli.train.trainer import log_path_for


@pytest.fixture
def train_config(tiny_config):
    return TrainConfig(model=tiny_config, batch=2, patch_lr=8, total_steps=3, seed=5)


# =============================================================================
# Configuration
# =============================================================================


class TestTrainConfig:
    def test_learning_rate_halves(self):
        assert learning_rate(1e-4, 200_000, 1) == 1e-4
        assert learning_rate(1e-4, 200_000, 200_000) == 1e-4
        assert learning_rate(1e-4, 200_000, 200_001) == 5e-5
        assert learning_rate(1e-4, 10, 25) == 2.5e-5

    def test_patch_hr(self, tiny_config):
        assert TrainConfig(model=tiny_config, patch_lr=8).patch_hr == 16

    @pytest.mark.parametrize(
        "fields",
        [
            {"eps_range": (0.1, 1.0)},
            {"eps_range": (2.0, 1.0)},
            {"sigma_range": (0.0, 80.0)},
            {"batch": 0},
            {"lr0": 0.0},
        ],
    )
    def test_invalid(self, fields):
        with pytest.raises(ConfigError):
            TrainConfig.checked(**fields)

    def test_scale_must_be_trainable(self):
        from udvd_cli.model import UdvdConfig

        with pytest.raises(ConfigError, match="training scale"):
            TrainConfig.checked(model=UdvdConfig(block_seq="DD", scale=1))

    def test_desk_overrides(self):
        cfg = TrainConfig.desk(batch=2)
        assert cfg.batch == 2
        assert cfg.model.trunk_channels == 32


# =============================================================================
# Augmentation
# =============================================================================


class TestAugment:
    def test_eight_distinct_results(self):
        probe = np.arange(16).reshape(4, 4)
        results = {apply_augment(probe, a).tobytes() for a in range(8)}
        assert len(results) == 8

    def test_inverse(self, rng):
        arr = rng.random((3, 5, 5))
        for a in range(8):
            assert np.array_equal(invert_augment(apply_augment(arr, a), a), arr)

    def test_closed_under_composition(self, rng):
        arr = rng.random((4, 4))
        for first in range(8):
            for second in range(8):
                c = compose_augment(first, second)
                expected = apply_augment(apply_augment(arr, first), second)
                assert np.array_equal(apply_augment(arr, c), expected)

    def test_index_out_of_range(self):
        with pytest.raises(ParameterError):
            apply_augment(np.zeros((2, 2)), 8)


# =============================================================================
# Patch sampling
# =============================================================================


class TestSamplePatch:
    def test_deterministic(self, hr_images):
        a = sample_patch(hr_images[0], 2, seed=3, patch_lr=8, stream=11)
        b = sample_patch(hr_images[0], 2, seed=3, patch_lr=8, stream=11)
        assert np.array_equal(a[0].data, b[0].data)
        assert a[1:] == b[1:]

    def test_aligned_to_lr_grid(self, hr_images):
        for stream in range(20):
            patch, region, augment = sample_patch(
                hr_images[0], 3, seed=0, patch_lr=5, stream=stream
            )
            assert patch.shape == (1, 3, 15, 15)
            assert region.top % 3 == 0 and region.left % 3 == 0
            assert region.top + 15 <= 32 and region.left + 15 <= 32
            assert 0 <= augment < 8
            crop = region.crop(hr_images[0].data)
            assert np.array_equal(invert_augment(patch.data, augment), crop)

    def test_lr_region(self, hr_images):
        _, region, _ = sample_patch(hr_images[0], 2, seed=0, patch_lr=8)
        lr_region = region.lr_region(2)
        assert (lr_region.top, lr_region.left, lr_region.size) == (
            region.top // 2,
            region.left // 2,
            8,
        )

    def test_image_too_small(self, make_image):
        with pytest.raises(ImageTooSmallError):
            sample_patch(make_image(10, 40, seed=0), 2, seed=0, patch_lr=8)


# =============================================================================
# Batch synthesis
# =============================================================================


class TestBatchSynthesizer:
    def test_shapes(self, hr_images, train_config):
        batch = BatchSynthesizer(hr_images, train_config).batch(1)
        assert batch.hr.shape == (2, 3, 16, 16)
        assert batch.lr.shape == (2, 3, 8, 8)
        assert batch.dmap.shape == (2, 16, 8, 8)
        assert len(batch.streams) == len(batch.params) == 2

    def test_pure_function_of_step(self, hr_images, train_config):
        a = BatchSynthesizer(hr_images, train_config)
        b = BatchSynthesizer(hr_images, train_config)
        first, again = a.batch(7), b.batch(7)
        assert np.array_equal(first.lr.data, again.lr.data)
        assert np.array_equal(first.hr.data, again.hr.data)
        assert not np.array_equal(first.lr.data, a.batch(8).lr.data)

    def test_params_within_ranges(self, hr_images, train_config):
        cfg = train_config.model_copy(update={"eps_range": (1.0, 1.5), "sigma_range": (10.0, 20.0)})
        for p in BatchSynthesizer(hr_images, cfg).batch(3).params:
            assert 1.0 <= p.kernel_width <= 1.5
            assert 10.0 <= p.noise_level <= 20.0
            assert p.scale == 2

    def test_fixed_patches_repeat(self, hr_images, train_config):
        cfg = train_config.model_copy(update={"fixed_patches": 2})
        synth = BatchSynthesizer(hr_images, cfg)
        assert np.array_equal(synth.batch(1).lr.data, synth.batch(2).lr.data)
        assert synth.batch(1).streams == synth.batch(5).streams

    def test_worker_count_does_not_change_batches(self, hr_images, train_config):
        serial = BatchSynthesizer(hr_images, train_config).batch(4)
        threaded_cfg = train_config.model_copy(update={"workers": 3})
        threaded = BatchSynthesizer(hr_images, threaded_cfg).batch(4)
        assert np.array_equal(serial.lr.data, threaded.lr.data)
        assert np.array_equal(serial.dmap.data, threaded.dmap.data)

    def test_iterate(self, hr_images, train_config):
        synth = BatchSynthesizer(hr_images, train_config)
        steps = [b.step for b in synth.iterate(3, 5)]
        assert steps == [3, 4, 5]
        assert list(synth.iterate(5, 4)) == []

    def test_all_images_too_small(self, make_image, train_config):
        with pytest.raises(ImageTooSmallError):
            BatchSynthesizer([make_image(8, 8, seed=0)], train_config)

    def test_small_images_are_skipped(self, hr_images, make_image, train_config):
        synth = BatchSynthesizer([make_image(8, 8, seed=0)] + hr_images, train_config)
        assert synth.usable == [1, 2]


# =============================================================================
# Training loop
# =============================================================================


class TestTrainer:
    def test_run_writes_log_and_checkpoint(self, tmp_path, hr_images, train_config):
        checkpoint = tmp_path / "run" / "model.ckpt"
        log = log_path_for(checkpoint)
        events = Trainer(train_config, hr_images).run(checkpoint=checkpoint, log_path=log)
        assert [e.step for e in events] == [1, 2, 3]
        assert all(np.isfinite(e.loss) for e in events)
        assert checkpoint.exists()
        assert (tmp_path / "run" / "model.json").exists()
        with log.open() as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["step", "loss", "lr"]
        assert [int(r[0]) for r in rows[1:]] == [1, 2, 3]

    def test_step_changes_parameters(self, hr_images, train_config):
        trainer = Trainer(train_config, hr_images)
        before = {k: v.copy() for k, v in trainer.model.named_arrays().items()}
        trainer.train_step(trainer.synthesizer.batch(1))
        after = trainer.model.named_arrays()
        assert trainer.step == 1
        assert any(not np.array_equal(before[k], after[k]) for k in before)

    def test_progress_callback(self, hr_images, train_config):
        seen = []
        Trainer(train_config, hr_images, progress_callback=seen.append).run(steps=2)
        assert [e.step for e in seen] == [1, 2]

    def test_resume_matches_uninterrupted_run(self, tmp_path, hr_images, train_config):
        checkpoint = tmp_path / "model.ckpt"
        Trainer(train_config, hr_images).run(steps=2, checkpoint=checkpoint)
        resumed = Trainer.resume(train_config, hr_images, checkpoint)
        assert resumed.step == 2
        resumed.run(steps=4)

        straight = Trainer(train_config, hr_images)
        straight.run(steps=4)
        for name, arr in straight.model.named_arrays().items():
            resumed_arr = resumed.model.named_arrays()[name]
            np.testing.assert_allclose(resumed_arr, arr, rtol=1e-6, atol=1e-6)

    def test_non_finite_loss_diverges(self, tmp_path, hr_images, train_config):
        trainer = Trainer(train_config, hr_images)
        batch = trainer.synthesizer.batch(1)
        poisoned = np.array(batch.hr.data)
        poisoned[0, 0, 0, 0] = np.nan
        batch = dataclasses.replace(batch, hr=Tensor(poisoned))
        with pytest.raises(TrainingDivergedError) as info:
            trainer.train_step(batch)
        assert info.value.step == 1
        assert info.value.batch_seeds == batch.streams
        assert trainer.step == 0

        path = trainer.dump_divergence(tmp_path / "model.ckpt", info.value)
        data = json.loads(path.read_text())
        assert path.name == "model.diverged.json"
        assert data == {"step": 1, "seed": 5, "batch_streams": batch.streams}

    def test_train_entry_point(self, tmp_path, hr_dir, train_config):
        checkpoint = tmp_path / "out.ckpt"
        events = train(train_config.model_copy(update={"total_steps": 2}), hr_dir, checkpoint)
        assert len(events) == 2
        assert load_model(checkpoint).config == train_config.model
        assert log_path_for(checkpoint).exists()

    def test_train_without_images(self, tmp_path, train_config):
        (tmp_path / "empty").mkdir()
        with pytest.raises(FileNotFoundError):
            train(train_config, tmp_path / "empty", tmp_path / "m.ckpt")
