"""Sequential Bayesian belief over the electronic azimuth: weighting, resampling, moments.

The belief is a fixed-size weighted particle cloud on [-1, 1]. Each measurement
multiplies the weights by the snapshot likelihood (in the log domain, shifted
by the maximum for stability); residual resampling then equalizes the weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import GaussianPosterior, GridPosterior, PosteriorRepr, SignalModel
from .geometry import ArrayGeometry, ChannelSelection, effective_positions, tdm_phases

#: Variance floor applied when fitting a Gaussian to a collapsed particle cloud.
VAR_FLOOR = 1e-8


class DegeneratePosteriorError(RuntimeError):
    """All particle weights vanished after a measurement update."""


@dataclass(frozen=True)
class ParticleSet:
    """Weighted particles; weights are normalized to sum to 1."""

    positions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "weights", weights)
        if positions.shape != weights.shape or positions.ndim != 1 or positions.size == 0:
            raise ValueError("positions and weights must be matching non-empty 1-d arrays")
        if np.any(weights < 0):
            raise ValueError("weights must be non-negative")
        if abs(float(np.sum(weights)) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")

    @property
    def size(self) -> int:
        return self.positions.size


@dataclass(frozen=True)
class Measurement:
    """J snapshots across the active channels, as a (J, I) complex array."""

    snapshots: np.ndarray
    step_index: int = 0

    def __post_init__(self):
        snapshots = np.atleast_2d(np.asarray(self.snapshots, dtype=complex))
        object.__setattr__(self, "snapshots", snapshots)


def init_uniform(p: int, lo: float = -1.0, hi: float = 1.0,
                 rng: np.random.Generator | None = None) -> ParticleSet:
    """Particles drawn i.i.d. uniform on [lo, hi] with equal weights."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if not lo < hi:
        raise ValueError("require lo < hi")
    rng = np.random.default_rng() if rng is None else rng
    return ParticleSet(rng.uniform(lo, hi, p), np.full(p, 1.0 / p))


def _log_likelihoods(meas: Measurement, thetas: np.ndarray, sel: ChannelSelection,
                     geom: ArrayGeometry, model: SignalModel, mode: str) -> np.ndarray:
    """-(1/noise_var) * sum_j ||x_j - m(theta)*s_j||^2 for each theta (constant dropped)."""
    x = meas.snapshots
    positions = effective_positions(geom, sel, mode)
    if x.shape[1] != positions.size:
        raise ValueError(
            f"snapshot length {x.shape[1]} does not match the {positions.size} active channels")
    phase = geom.wavenumber * np.outer(np.asarray(thetas, dtype=float), positions)
    if mode == "mimo":
        phase = phase + tdm_phases(sel, geom.inter_pulse) * model.f_d
    steer = np.exp(1j * phase)                       # (P, I)
    resid = x[None, :, :] - steer[:, None, :] * model.signal_value
    return -np.sum(np.abs(resid) ** 2, axis=(1, 2)) / model.noise_var


def log_likelihood(meas: Measurement, theta: float, sel: ChannelSelection,
                   geom: ArrayGeometry, model: SignalModel, mode: str = "simo") -> float:
    """Snapshot log-likelihood at a single azimuth, up to an additive constant."""
    return float(_log_likelihoods(meas, np.array([theta]), sel, geom, model, mode)[0])


def update(ps: ParticleSet, meas: Measurement, sel: ChannelSelection, geom: ArrayGeometry,
           model: SignalModel, mode: str = "simo") -> ParticleSet:
    """Bayes update: reweight every particle by the measurement likelihood at its position."""
    loglik = _log_likelihoods(meas, ps.positions, sel, geom, model, mode)
    weights = ps.weights * np.exp(loglik - np.max(loglik))
    total = float(np.sum(weights))
    if total <= 0.0:
        raise DegeneratePosteriorError(
            f"all particle weights vanished at step {meas.step_index}")
    return ParticleSet(ps.positions, weights / total)


def residual_resample(ps: ParticleSet, rng: np.random.Generator) -> ParticleSet:
    """Residual resampling: copy floor(P*w) of each particle, draw the rest multinomially.

    Output weights are exactly 1/P; particle count is preserved.
    """
    p = ps.size
    scaled = p * ps.weights
    copies = np.floor(scaled).astype(int)
    k = int(np.sum(copies))
    indices = np.repeat(np.arange(p), copies)
    if k < p:
        residual = scaled - copies
        residual /= residual.sum()
        extra = rng.choice(p, size=p - k, p=residual)
        indices = np.concatenate([indices, extra])
    return ParticleSet(ps.positions[indices], np.full(p, 1.0 / p))


def effective_sample_size(ps: ParticleSet) -> float:
    return 1.0 / float(np.sum(ps.weights**2))


def moments(ps: ParticleSet) -> tuple[float, float]:
    """Weighted mean and (biased) weighted variance of the particle positions."""
    mean = float(np.sum(ps.weights * ps.positions))
    var = float(np.sum(ps.weights * (ps.positions - mean) ** 2))
    return mean, var


def to_posterior_repr(ps: ParticleSet, kind: str = "gauss", bins: int = 1024,
                      lo: float = -1.0, hi: float = 1.0) -> PosteriorRepr:
    """Condense the particle cloud into a belief usable by the bound computations.

    gauss: Gaussian with the cloud's mean and (floored) variance.
    grid: weighted histogram on [lo, hi], smoothed by a discrete Gaussian kernel
    with Silverman's bandwidth 1.06 * std * P^(-1/5), renormalized to mass 1.
    """
    mean, var = moments(ps)
    if kind == "gauss":
        return GaussianPosterior(mean, max(var, VAR_FLOOR))
    if kind != "grid":
        raise ValueError(f"kind must be 'gauss' or 'grid', got {kind!r}")
    if bins < 2:
        raise ValueError("bins must be >= 2")
    edges = np.linspace(lo, hi, bins + 1)
    width = edges[1] - edges[0]
    mass, _ = np.histogram(ps.positions, bins=edges, weights=ps.weights)
    density = mass / width
    bandwidth = 1.06 * np.sqrt(var) * ps.size ** (-0.2)
    sigma_bins = bandwidth / width
    if sigma_bins > 1e-3:
        radius = max(1, int(np.ceil(4.0 * sigma_bins)))
        kernel = np.exp(-0.5 * (np.arange(-radius, radius + 1) / sigma_bins) ** 2)
        kernel /= kernel.sum()
        # Divide by the in-range kernel mass so the boundary bins are not biased low.
        density = np.convolve(density, kernel, mode="same") / \
            np.convolve(np.ones_like(density), kernel, mode="same")
    total = float(np.sum(density) * width)
    return GridPosterior(edges, density / total)
