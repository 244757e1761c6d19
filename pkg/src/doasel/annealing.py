"""Global maximization over box-constrained test points: simulated annealing plus a grid fallback.

The bound surfaces being maximized can be undefined at degenerate test points;
objectives signal that by returning None (scalar form) or NaN (batched form),
and such points are simply never accepted as the incumbent best.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class NoValidBoundError(RuntimeError):
    """The objective was undefined at every point the search visited."""


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric cooling schedule with a fixed proposal budget per temperature."""

    n_temps: int = 100
    moves_per_temp: int = 20
    t_initial: float = 1.0
    t_final: float = 1e-3
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_temps < 1:
            raise ValueError("n_temps must be >= 1")
        if self.moves_per_temp < 1:
            raise ValueError("moves_per_temp must be >= 1")
        if not 0.0 < self.t_final < self.t_initial:
            raise ValueError("require 0 < t_final < t_initial")

    def temperatures(self) -> np.ndarray:
        ratio = (self.t_final / self.t_initial) ** (1.0 / self.n_temps)
        return self.t_initial * ratio ** np.arange(1, self.n_temps + 1)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.rng_seed))


def _reflect(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Fold points back into [lo, hi] by mirror reflection at the boundaries."""
    span = hi - lo
    y = np.mod(x - lo, 2.0 * span)
    return lo + np.where(y > span, 2.0 * span - y, y)


def _box_arrays(box: Sequence[tuple[float, float]]) -> tuple[np.ndarray, np.ndarray]:
    lo = np.array([b[0] for b in box], dtype=float)
    hi = np.array([b[1] for b in box], dtype=float)
    if np.any(hi <= lo):
        raise ValueError("box must be non-degenerate (lo < hi per dimension)")
    return lo, hi


def anneal_max_batch(objective: Callable[[np.ndarray], np.ndarray],
                     box: Sequence[tuple[float, float]], sched: AnnealSchedule,
                     rng: np.random.Generator, n_chains: int) -> tuple[np.ndarray, np.ndarray]:
    """Run n_chains independent annealing chains driven by one random stream.

    objective maps an (n_chains, dim) array of points to (n_chains,) values with
    NaN marking undefined points. Proposals are Gaussian steps of scale
    0.1*(hi-lo) per dimension, reflected into the box; acceptance follows the
    Metropolis rule exp(delta/T). Returns the best point ever visited per chain
    and its value (-inf for chains that never saw a defined objective).
    """
    lo, hi = _box_arrays(box)
    dim = lo.size
    scale = 0.1 * (hi - lo)
    x = rng.uniform(lo, hi, size=(n_chains, dim))
    v = np.nan_to_num(objective(x), nan=-np.inf)
    best_x, best_v = x.copy(), v.copy()
    for temp in sched.temperatures():
        for _ in range(sched.moves_per_temp):
            prop = _reflect(x + rng.normal(0.0, 1.0, size=(n_chains, dim)) * scale, lo, hi)
            pv = np.nan_to_num(objective(prop), nan=-np.inf)
            u = rng.random(n_chains)
            with np.errstate(invalid="ignore"):
                delta = pv - v
            worse = np.where(np.isnan(delta), -np.inf, delta)
            accept = (pv >= v) | (u < np.exp(np.clip(worse / temp, -700.0, 0.0)))
            x = np.where(accept[:, None], prop, x)
            v = np.where(accept, pv, v)
            improved = v > best_v
            best_x = np.where(improved[:, None], x, best_x)
            best_v = np.where(improved, v, best_v)
    return best_x, best_v


def anneal_max(objective: Callable[[tuple[float, ...]], float | None],
               box: Sequence[tuple[float, float]], sched: AnnealSchedule,
               rng: np.random.Generator) -> tuple[tuple[float, ...], float]:
    """Maximize a scalar objective over the box; returns (argmax point, value).

    Raises NoValidBoundError when the objective was None at every visited point.
    """

    def batched(points: np.ndarray) -> np.ndarray:
        out = np.empty(points.shape[0])
        for i, row in enumerate(points):
            val = objective(tuple(row))
            out[i] = np.nan if val is None else val
        return out

    best_x, best_v = anneal_max_batch(batched, box, sched, rng, n_chains=1)
    if not np.isfinite(best_v[0]):
        raise NoValidBoundError("objective undefined at every sampled test point")
    return tuple(best_x[0]), float(best_v[0])


def grid_axes(box: Sequence[tuple[float, float]], points_per_dim: int) -> list[np.ndarray]:
    lo, hi = _box_arrays(box)
    return [np.linspace(a, b, points_per_dim) for a, b in zip(lo, hi)]


def grid_points(box: Sequence[tuple[float, float]], points_per_dim: int) -> np.ndarray:
    """Uniform grid over the box including the corners, as an (n_points, dim) array."""
    if points_per_dim < 2:
        raise ValueError("points_per_dim must be >= 2")
    axes = grid_axes(box, points_per_dim)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def grid_max(objective: Callable[[tuple[float, ...]], float | None],
             box: Sequence[tuple[float, float]],
             points_per_dim: int) -> tuple[tuple[float, ...], float]:
    """Deterministic exhaustive maximization on a uniform grid; undefined points are skipped."""
    points = grid_points(box, points_per_dim)
    best_point, best_val = None, -np.inf
    for row in points:
        val = objective(tuple(row))
        if val is not None and val > best_val:
            best_point, best_val = tuple(row), float(val)
    if best_point is None:
        raise NoValidBoundError("objective undefined at every grid point")
    return best_point, best_val
