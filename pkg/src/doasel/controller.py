"""Channel-selection policies: enumerate candidate subsets, bound each, pick the minimizer.

For every candidate subset the tightest conditional bound on the current
belief is found by maximizing over the test-point domain (simulated annealing
fused with a deterministic coarse grid); the policy then selects the candidate
with the smallest sup-bound. The ECRB needs no test point and reduces to a
closed form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import bounds
from .annealing import AnnealSchedule, anneal_max_batch, grid_points
from .bounds import PosteriorRepr, SignalModel, TestPoint
from .geometry import ArrayGeometry, ChannelSelection, _check_mode, effective_positions

#: Test-point search domain: s in [0.1, 0.9], h in [1e-4, 2].
S_DOMAIN = (0.1, 0.9)
H_DOMAIN = (1e-4, 2.0)

#: Coarse-grid resolutions fused with annealing (2-D sup and 1-D sup).
GRID_2D = 16
GRID_1D = 64


class NoPolicyError(RuntimeError):
    """Every candidate selection was degenerate for the requested bound."""


class BoundKind(Enum):
    """Which Bayesian bound drives the selection, and over what the sup runs."""

    WWB = "wwb"          # 2-D sup over (s, h)
    WWB_S05 = "wwb_s05"  # s fixed at 0.5, sup over h
    BZB = "bzb"          # s fixed at 0.95 (stable stand-in for s=1), sup over h
    ECRB = "ecrb"        # closed form, no test point

    @property
    def fixed_s(self) -> float | None:
        return {"wwb_s05": 0.5, "bzb": 0.95}.get(self.value)

    @property
    def needs_test_point(self) -> bool:
        return self is not BoundKind.ECRB


@dataclass(frozen=True)
class PolicyDecision:
    """Winning selection with its sup bound and the test point that achieved it."""

    selection: ChannelSelection
    test_point: TestPoint | None
    bound_value: float
    candidates_evaluated: int


def enumerate_selections(n_rx: int, n_tx: int = 1, i_rx: int = 1, i_tx: int = 1,
                         fix_first: bool = True) -> list[ChannelSelection]:
    """All candidate channel subsets in lexicographic (tx_idx, rx_idx) order.

    With fix_first, channel 1 of each line is always active and the remaining
    slots range over the other channels.
    """
    if not (1 <= i_rx <= n_rx and 1 <= i_tx <= n_tx):
        raise ValueError("selection sizes must satisfy 1 <= i <= n for both lines")

    def subsets(n: int, i: int) -> list[tuple[int, ...]]:
        if fix_first:
            return [(1,) + rest for rest in itertools.combinations(range(2, n + 1), i - 1)]
        return list(itertools.combinations(range(1, n + 1), i))

    return [ChannelSelection(tx_idx=tx, rx_idx=rx)
            for tx in subsets(n_tx, i_tx) for rx in subsets(n_rx, i_rx)]


def _sup_bound_batch(positions: np.ndarray, post: PosteriorRepr, model: SignalModel,
                     kind: BoundKind, wavelength: float, sched: AnnealSchedule,
                     ) -> tuple[np.ndarray, list[TestPoint | None]]:
    """Sup of the bound over test points, for a (C, I) batch of candidate position rows.

    Fuses a batched annealing run (one chain per candidate, common stream) with
    the deterministic coarse grid, so the reported sup is at least the grid max.
    Returns per-candidate values (-inf where degenerate everywhere) and the
    argmax test points.
    """
    n_cand = positions.shape[0]

    if kind is BoundKind.ECRB:
        vals = np.array([
            v if (v := bounds.ecrb_value(None, row, model, wavelength)) is not None else -np.inf
            for row in positions
        ])
        return vals, [None] * n_cand

    fixed_s = kind.fixed_s

    def surface(s: np.ndarray, h: np.ndarray) -> np.ndarray:
        return bounds.wwb_values(s, h, post, positions, model, wavelength)

    if fixed_s is None:
        box = [S_DOMAIN, H_DOMAIN]
        objective = lambda pts: surface(pts[:, 0], pts[:, 1])
        grid = grid_points(box, GRID_2D)
    else:
        box = [H_DOMAIN]
        objective = lambda pts: surface(np.full(pts.shape[0], fixed_s), pts[:, 0])
        grid = grid_points(box, GRID_1D)

    best_x, best_v = anneal_max_batch(objective, box, sched, sched.rng(), n_cand)

    # Exhaustive coarse grid, vectorized over candidates x grid points.
    g = grid.shape[0]
    pos_tiled = np.repeat(positions, g, axis=0)
    s_flat = np.repeat(grid[:, 0][None, :] if fixed_s is None else np.full((1, g), fixed_s),
                       n_cand, axis=0).ravel()
    h_flat = np.tile(grid[:, -1], n_cand)
    grid_vals = bounds.wwb_values(s_flat, h_flat, post, pos_tiled, model, wavelength)
    grid_vals = np.nan_to_num(grid_vals.reshape(n_cand, g), nan=-np.inf)
    grid_arg = np.argmax(grid_vals, axis=1)
    grid_best = grid_vals[np.arange(n_cand), grid_arg]

    values = np.maximum(best_v, grid_best)
    test_points: list[TestPoint | None] = []
    for c in range(n_cand):
        if not np.isfinite(values[c]):
            test_points.append(None)
            continue
        if best_v[c] >= grid_best[c]:
            point = best_x[c]
        else:
            point = grid[grid_arg[c]]
        s_val = point[0] if fixed_s is None else fixed_s
        test_points.append(TestPoint(s=float(s_val), h=float(point[-1])))
    return values, test_points


def evaluate_candidate(sel: ChannelSelection, post: PosteriorRepr, geom: ArrayGeometry,
                       model: SignalModel, kind: BoundKind, mode: str,
                       sched: AnnealSchedule) -> tuple[float, TestPoint | None] | None:
    """Tightest bound for one candidate on the current belief; None if degenerate everywhere."""
    _check_mode(mode)
    positions = effective_positions(geom, sel, mode)[None, :]
    values, tps = _sup_bound_batch(positions, post, model, kind, geom.wavelength, sched)
    if not np.isfinite(values[0]):
        return None
    return float(values[0]), tps[0]


def select_policy(candidates: list[ChannelSelection], post: PosteriorRepr,
                  geom: ArrayGeometry, model: SignalModel, kind: BoundKind, mode: str,
                  sched: AnnealSchedule) -> PolicyDecision:
    """Pick the candidate whose sup bound is smallest (ties: lexicographic on indices).

    All candidates share one annealing stream (one chain each), so the decision
    is deterministic given (posterior, schedule seed, candidate list).
    """
    if not candidates:
        raise ValueError("candidate list must be non-empty")
    _check_mode(mode)
    positions = np.stack([effective_positions(geom, sel, mode) for sel in candidates])
    values, tps = _sup_bound_batch(positions, post, model, kind, geom.wavelength, sched)

    best = None
    for i, sel in enumerate(candidates):
        if not np.isfinite(values[i]):
            continue
        key = (values[i], sel.tx_idx, sel.rx_idx)
        if best is None or key < best[0]:
            best = (key, i)
    if best is None:
        raise NoPolicyError("no candidate admits a valid bound on this posterior")
    i = best[1]
    return PolicyDecision(selection=candidates[i], test_point=tps[i],
                          bound_value=float(values[i]), candidates_evaluated=len(candidates))
