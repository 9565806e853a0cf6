"""Central finite-difference checks of analytic gradients in float64."""

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .tensor import Graph, Tensor


@dataclass
class GradCheckResult:
    """Outcome of one finite-difference comparison."""
    name: str
    checked: int
    passed_fraction: float
    max_rel_error: float
    ok: bool
    skipped: int = 0


def relative_errors(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-7) -> np.ndarray:
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return np.abs(analytic - numeric) / scale


def _relu_pattern(graph: Graph) -> List[np.ndarray]:
    return [rec.inputs[0].data > 0 for rec in graph.records if rec.kind == "relu"]


def _same_pattern(a: List[np.ndarray], b: List[np.ndarray]) -> bool:
    return len(a) == len(b) and all(np.array_equal(x, y) for x, y in zip(a, b))


def gradient_check(
    name: str,
    fn: Callable[..., Tensor],
    inputs: Sequence[np.ndarray],
    step: float = 1e-3,
    rtol: float = 1e-3,
    min_pass: float = 0.99,
    max_entries: Optional[int] = None,
    seed: int = 0,
    differentiable: Optional[Sequence[bool]] = None,
) -> GradCheckResult:
    """
    Compare reverse-mode gradients of ``fn`` against central differences.

    Entries whose perturbation moves any ReLU input across zero are skipped:
    the function is not differentiable there and the difference quotient is
    meaningless.

    Args:
        name: Label for the report
        fn: Maps float64 tensors to a scalar tensor
        inputs: Point at which to check; evaluated as float64
        step: Finite-difference step
        rtol: Per-entry relative error tolerance
        min_pass: Fraction of entries that must be within ``rtol``
        max_entries: Check at most this many randomly chosen entries per input
        seed: Seed for entry sub-sampling
        differentiable: Per-input flag; ``False`` inputs are held constant

    Returns:
        GradCheckResult
    """
    arrays = [np.array(a, dtype=np.float64) for a in inputs]
    flags = list(differentiable) if differentiable is not None else [True] * len(arrays)
    rng = np.random.default_rng(seed)

    with Graph() as graph:
        leaves = [Tensor(a, dtype=np.float64) for a in arrays]
        loss = fn(*leaves)
    grads = graph.gradients(loss, leaves)
    base_pattern = _relu_pattern(graph)

    errors: List[np.ndarray] = []
    skipped = 0
    for idx, (arr, leaf) in enumerate(zip(arrays, leaves)):
        if not flags[idx]:
            continue
        analytic = grads.get(leaf.uid, np.zeros_like(arr)).reshape(-1)
        positions = np.arange(arr.size)
        if max_entries is not None and arr.size > max_entries:
            positions = np.sort(rng.choice(arr.size, size=max_entries, replace=False))
        kept, numeric = [], []
        for flat in positions:
            value, smooth = _central_difference(fn, arrays, idx, int(flat), step, base_pattern)
            if not smooth:
                skipped += 1
                continue
            kept.append(int(flat))
            numeric.append(value)
        if kept:
            errors.append(relative_errors(analytic[kept], np.array(numeric)))

    flat_errors = np.concatenate(errors) if errors else np.zeros(0)
    checked = int(flat_errors.size)
    passed = float(np.mean(flat_errors <= rtol)) if checked else 1.0
    worst = float(flat_errors.max()) if checked else 0.0
    return GradCheckResult(name, checked, passed, worst, passed >= min_pass, skipped)


def _evaluate(
    fn: Callable[..., Tensor], arrays: List[np.ndarray]
) -> Tuple[float, List[np.ndarray]]:
    with Graph() as graph:
        value = fn(*[Tensor(a, dtype=np.float64) for a in arrays]).item()
    return value, _relu_pattern(graph)


def _central_difference(
    fn: Callable[..., Tensor],
    arrays: List[np.ndarray],
    which: int,
    flat: int,
    step: float,
    base_pattern: List[np.ndarray],
) -> Tuple[float, bool]:
    target = arrays[which].reshape(-1)
    original = target[flat]
    try:
        target[flat] = original + step
        plus, plus_pattern = _evaluate(fn, arrays)
        target[flat] = original - step
        minus, minus_pattern = _evaluate(fn, arrays)
    finally:
        target[flat] = original
    smooth = _same_pattern(base_pattern, plus_pattern) and _same_pattern(
        base_pattern, minus_pattern
    )
    return (plus - minus) / (2.0 * step), smooth
