"""PCA encoding of blur kernels and the stretched degradation map."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import ParameterError, RankError, ShapeError
from ..tensor import Tensor, load_checkpoint, save_checkpoint
from .kernels import KERNEL_SIZE, BlurKernel, gaussian_kernel
from .params import NOISE_RANGE, WIDTH_RANGE

logger = logging.getLogger(__name__)

PCA_DIM = 15
DEFAULT_GRID_SIZE = 1000


@dataclass(frozen=True)
class PcaBasis:
    """Mean kernel vector and t orthonormal principal directions (rows)."""
    mean: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def project(self, kernel: BlurKernel) -> np.ndarray:
        vec = kernel.vector()
        if vec.shape != self.mean.shape:
            raise ShapeError(f"kernel has {vec.size} entries, basis expects {self.mean.size}")
        return self.basis @ (vec - self.mean)

    def reconstruct(self, coefficients: np.ndarray) -> np.ndarray:
        return self.mean + self.basis.T @ coefficients


def default_width_grid(count: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    return np.linspace(WIDTH_RANGE[0], WIDTH_RANGE[1], count)


def pca_fit(
    width_grid: Sequence[float], dim: int = PCA_DIM, kernel_size: int = KERNEL_SIZE
) -> PcaBasis:
    """Eigendecomposition of the covariance of vectorized kernels over ``width_grid``.

    Rows are sorted by decreasing eigenvalue; each row's first non-negligible
    component is made positive so the result is deterministic.
    """
    widths = np.asarray(list(width_grid), dtype=np.float64)
    if widths.size < 2 or np.ptp(widths) == 0:
        raise RankError("kernel width grid is degenerate: need at least two distinct widths")
    samples = np.stack([gaussian_kernel(float(w), kernel_size).vector() for w in widths])
    mean = samples.mean(axis=0)
    centered = samples - mean
    covariance = centered.T @ centered / (len(widths) - 1)
    eigvals, eigvecs = np.linalg.eigh(covariance)
    if eigvals[-1] <= 1e-20:
        raise RankError("kernel covariance has no usable rank")
    if dim > eigvecs.shape[1]:
        raise RankError(f"cannot extract {dim} components from {eigvecs.shape[1]}-dim kernels")

    order = np.argsort(eigvals)[::-1][:dim]
    basis = eigvecs[:, order].T.copy()
    for row in basis:
        lead = np.flatnonzero(np.abs(row) > 1e-12)
        if lead.size and row[lead[0]] < 0:
            row *= -1.0
    logger.debug("pca_fit: %d widths, top eigenvalue %.3e", widths.size, eigvals[-1])
    return PcaBasis(mean, basis)


@lru_cache(maxsize=4)
def default_basis(dim: int = PCA_DIM) -> PcaBasis:
    """Basis fitted on 1000 widths evenly spaced over the training range."""
    return pca_fit(default_width_grid(), dim)


def save_basis(path: Path, basis: PcaBasis) -> None:
    save_checkpoint(path, {"pca.mean": basis.mean, "pca.basis": basis.basis})


def load_basis(path: Path) -> PcaBasis:
    tensors = load_checkpoint(path)
    try:
        return PcaBasis(
            tensors["pca.mean"].astype(np.float64), tensors["pca.basis"].astype(np.float64)
        )
    except KeyError as e:
        raise ShapeError(f"{path}: missing PCA entry {e}")


def _check_noise(sigma: float) -> None:
    if not NOISE_RANGE[0] <= sigma <= NOISE_RANGE[1]:
        raise ParameterError(f"noise level {sigma} outside {NOISE_RANGE}")


def encode_degradation(
    kernel: BlurKernel, sigma: float, basis: PcaBasis, height: int, width: int
) -> Tensor:
    """(1+t, H, W) map: t PCA coefficients then sigma / 75, each spatially constant."""
    _check_noise(sigma)
    vector = np.append(basis.project(kernel), sigma / NOISE_RANGE[1])
    stretched = np.broadcast_to(vector[:, None, None], (vector.size, height, width))
    return Tensor(stretched)


def encode_degradation_spatial(
    widths: Sequence[float], noise_levels: Sequence[float], basis: PcaBasis, height: int
) -> Tensor:
    """Map whose column j encodes (widths[j], noise_levels[j]); constant down each column."""
    widths = list(widths)
    noise_levels = list(noise_levels)
    if len(widths) != len(noise_levels):
        raise ShapeError(f"{len(widths)} widths but {len(noise_levels)} noise levels")
    columns = []
    for width, sigma in zip(widths, noise_levels):
        _check_noise(sigma)
        coefficients = basis.project(gaussian_kernel(float(width)))
        columns.append(np.append(coefficients, sigma / NOISE_RANGE[1]))
    table = np.stack(columns, axis=1)  # (1+t, W)
    return Tensor(np.broadcast_to(table[:, None, :], (table.shape[0], height, table.shape[1])))
