"""Bayesian lower bounds on DoA mean-square error, conditioned on the current belief.

The Weiss-Weinstein family for a scalar parameter is driven by a moment
generating function ``mgf(alpha, beta)``. For the known-signal complex-Gaussian
snapshot model the observation integral has a closed form that depends only on
the array ambiguity surface, so the mgf factors into

    mgf(alpha, beta) = ambiguity_factor(alpha, beta) * overlap_integral(alpha, beta)

where the first factor carries the likelihood and the second carries the
belief (prior or posterior) over the electronic azimuth. The bound values
(WWB / BZB / ECRB) are assembled from these two pieces.

All bound evaluations return ``None`` when the defining denominator is
degenerate (no information at that test point); optimizers skip such points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

# Exponents are clipped before exp() so degenerate posteriors or very high SNR
# saturate at ~1e304 instead of overflowing to inf.
_EXP_CLIP = 700.0

#: Denominators at or below this threshold signal a degenerate test point.
DENOM_EPS = 1e-12

#: Grid densities at or below this threshold are treated as outside the support.
SUPPORT_EPS = 1e-12


@dataclass(frozen=True)
class SignalModel:
    """Known-signal snapshot model: noise variance, snapshot count, per-snapshot signal.

    noise_var is the total variance per complex observation entry (real and
    imaginary parts each carry half). signal_value is the constant transmitted
    amplitude s, so the pulse energy over J snapshots is J*|s|^2.
    """

    noise_var: float
    snapshots: int = 2
    signal_value: complex = 1.0 + 0.0j
    f_d: float = 0.0

    def __post_init__(self):
        if self.noise_var <= 0:
            raise ValueError("noise_var must be positive")
        if self.snapshots < 1:
            raise ValueError("snapshots must be >= 1")

    @property
    def signal_energy(self) -> float:
        return self.snapshots * abs(self.signal_value) ** 2

    @classmethod
    def from_snr_db(cls, snr_db: float, snapshots: int = 2,
                    signal_value: complex = 1.0 + 0.0j, f_d: float = 0.0) -> "SignalModel":
        """Build a model from per-element per-snapshot SNR = 10*log10(|s|^2 / noise_var)."""
        noise_var = abs(signal_value) ** 2 * 10.0 ** (-snr_db / 10.0)
        return cls(noise_var=noise_var, snapshots=snapshots, signal_value=signal_value, f_d=f_d)


@dataclass(frozen=True)
class TestPoint:
    """Free parameters (s, h) of the Weiss-Weinstein bound family."""

    s: float
    h: float

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")
        if self.h <= 0.0:
            raise ValueError(f"h must be positive, got {self.h}")


@dataclass(frozen=True)
class UniformPosterior:
    """Uniform belief over [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("require lo < hi")

    def overlap(self, alpha, beta):
        width = self.hi - self.lo
        return np.maximum(0.0, width - np.abs(np.asarray(beta, dtype=float))) / width

    @property
    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def var(self) -> float:
        return (self.hi - self.lo) ** 2 / 12.0


@dataclass(frozen=True)
class GaussianPosterior:
    """Gaussian belief with the given mean and variance."""

    mean: float
    var: float

    def __post_init__(self):
        if self.var <= 0:
            raise ValueError("var must be positive")

    def overlap(self, alpha, beta):
        alpha = np.asarray(alpha, dtype=float)
        beta = np.asarray(beta, dtype=float)
        logval = alpha * (alpha - 1.0) * beta**2 / (2.0 * self.var)
        return np.exp(np.minimum(logval, _EXP_CLIP))


@dataclass(frozen=True)
class GridPosterior:
    """Piecewise-constant belief on bins spanning [edges[0], edges[-1]].

    density holds the per-bin probability density; it must integrate to 1.
    """

    edges: np.ndarray
    density: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        density = np.asarray(self.density, dtype=float)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "density", density)
        if edges.ndim != 1 or density.ndim != 1 or edges.size != density.size + 1:
            raise ValueError("need B+1 edges for B density values")
        if density.size < 2:
            raise ValueError("need at least 2 bins")
        if np.any(density < 0):
            raise ValueError("density must be non-negative")
        widths = np.diff(edges)
        if np.any(widths <= 0):
            raise ValueError("edges must be strictly increasing")
        mass = float(np.sum(density * widths))
        if abs(mass - 1.0) > 1e-9:
            raise ValueError(f"density must integrate to 1, got {mass}")

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def overlap(self, alpha, beta):
        scalar_in = np.ndim(alpha) == 0 and np.ndim(beta) == 0
        alpha_b, beta_b = np.broadcast_arrays(np.asarray(alpha, dtype=float),
                                              np.asarray(beta, dtype=float))
        a = np.atleast_1d(alpha_b).ravel()
        b = np.atleast_1d(beta_b).ravel()
        centers = self.centers
        widths = np.diff(self.edges)
        supported = self.density > SUPPORT_EPS
        rho = self.density[supported]
        w = widths[supported]
        c = centers[supported]
        # Shifted density at c + beta by linear interpolation, 0 outside the grid.
        queries = (c[None, :] + b[:, None]).ravel()
        shifted = np.interp(queries, centers, self.density, left=0.0, right=0.0)
        shifted = shifted.reshape(b.size, c.size)
        out = np.sum(shifted ** a[:, None] * rho ** (1.0 - a[:, None]) * w, axis=1)
        if scalar_in:
            return float(out[0])
        return out.reshape(alpha_b.shape)

    @property
    def mean(self) -> float:
        widths = np.diff(self.edges)
        return float(np.sum(self.centers * self.density * widths))

    @property
    def var(self) -> float:
        widths = np.diff(self.edges)
        m = self.mean
        return float(np.sum((self.centers - m) ** 2 * self.density * widths))


PosteriorRepr = Union[UniformPosterior, GaussianPosterior, GridPosterior]


def _ambiguity_term(positions: np.ndarray, beta, k0: float):
    """||m(theta+beta) - m(theta)||^2 = 2*I - 2*sum_i cos(k0*d_i*beta); theta-free."""
    beta = np.asarray(beta, dtype=float)
    n = positions.shape[-1]
    phases = k0 * positions * beta[..., None]
    return 2.0 * n - 2.0 * np.sum(np.cos(phases), axis=-1)


def _log_ambiguity_factor(positions: np.ndarray, model: SignalModel, alpha, beta, k0: float):
    alpha = np.asarray(alpha, dtype=float)
    snr_scale = model.signal_energy / model.noise_var
    return alpha * (alpha - 1.0) * snr_scale * _ambiguity_term(positions, beta, k0)


def ambiguity_factor(effective_positions, model: SignalModel, alpha: float, beta: float,
                     wavelength: float = 1.0) -> float:
    """Observation part of the bound mgf for the complex-Gaussian snapshot model.

    Closed form exp(alpha*(alpha-1) * (s_energy/noise_var) * ||m(theta+beta)-m(theta)||^2)
    where the steering difference norm reduces to the array ambiguity term
    2*I - 2*sum cos(k0*d_i*beta) over the effective positions (selected Rx
    positions in SIMO, virtual positions in MIMO).
    """
    positions = np.asarray(effective_positions, dtype=float)
    if positions.size == 0:
        raise ValueError("effective_positions must be non-empty")
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    k0 = 2.0 * np.pi / wavelength
    logval = _log_ambiguity_factor(positions, model, alpha, beta, k0)
    return float(np.exp(np.minimum(logval, _EXP_CLIP)))


def overlap_integral(post: PosteriorRepr, alpha: float, beta: float) -> float:
    """Belief part of the bound mgf: integral of p(theta+beta)^alpha * p(theta)^(1-alpha).

    The integration domain is the support of p. Closed forms for uniform and
    Gaussian beliefs; gridded beliefs integrate bin-wise with the shifted
    density linearly interpolated (0 outside the grid).
    """
    return float(np.asarray(post.overlap(alpha, beta)).reshape(()))


def bound_mgf(post: PosteriorRepr, effective_positions, model: SignalModel,
              alpha: float, beta: float, wavelength: float = 1.0) -> float:
    """Moment generating function of the bound family on the given belief.

    Because the observation factor is theta-free it multiplies the belief
    overlap exactly; no sampling is involved. bound_mgf(alpha, 0) == 1.
    """
    return ambiguity_factor(effective_positions, model, alpha, beta, wavelength) * \
        overlap_integral(post, alpha, beta)


def _mgf_array(post: PosteriorRepr, positions: np.ndarray, model: SignalModel,
               alpha: np.ndarray, beta: np.ndarray, k0: float) -> np.ndarray:
    """Vectorized mgf over paired (alpha, beta) rows; positions is (I,) or (N, I)."""
    logxi = _log_ambiguity_factor(positions, model, alpha, beta, k0)
    xi = np.exp(np.minimum(logxi, _EXP_CLIP))
    # Saturated factors may multiply to inf; downstream ratios then correctly go to 0.
    with np.errstate(over="ignore"):
        return xi * post.overlap(alpha, beta)


def wwb_values(s, h, post: PosteriorRepr, positions, model: SignalModel,
               wavelength: float = 1.0) -> np.ndarray:
    """Weiss-Weinstein bound surface, vectorized over paired (s, h) arrays.

    positions may be a single effective-position vector (I,) or one row per
    test point (N, I). Degenerate test points come back as NaN.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    h = np.atleast_1d(np.asarray(h, dtype=float))
    positions = np.asarray(positions, dtype=float)
    k0 = 2.0 * np.pi / wavelength
    m1 = _mgf_array(post, positions, model, s, h, k0)
    ma = _mgf_array(post, positions, model, 2.0 * s, h, k0)
    mb = _mgf_array(post, positions, model, 2.0 - 2.0 * s, -h, k0)
    mc = _mgf_array(post, positions, model, s, 2.0 * h, k0)
    denom = ma + mb - 2.0 * mc
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        vals = h**2 * m1**2 / denom
    vals = np.where(denom > DENOM_EPS, vals, np.nan)
    return vals


def wwb_value(tp: TestPoint, post: PosteriorRepr, effective_positions,
              model: SignalModel, wavelength: float = 1.0) -> float | None:
    """Weiss-Weinstein bound at one test point: h^2*mgf(s,h)^2 / (mgf(2s,h) + mgf(2-2s,-h) - 2*mgf(s,2h)).

    Returns None when the denominator is degenerate (<= DENOM_EPS): the test
    point carries no information and must be skipped by the sup search.
    """
    val = wwb_values(tp.s, tp.h, post, effective_positions, model, wavelength)[0]
    return None if np.isnan(val) else float(val)


def bzb_values(h, post: PosteriorRepr, positions, model: SignalModel,
               wavelength: float = 1.0) -> np.ndarray:
    """Bobrovsky-Zakai bound h^2 / (mgf(2,h) - 1), vectorized over h; NaN when degenerate."""
    h = np.atleast_1d(np.asarray(h, dtype=float))
    positions = np.asarray(positions, dtype=float)
    k0 = 2.0 * np.pi / wavelength
    denom = _mgf_array(post, positions, model, np.full_like(h, 2.0), h, k0) - 1.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        vals = h**2 / denom
    return np.where(denom > DENOM_EPS, vals, np.nan)


def bzb_value(h: float, post: PosteriorRepr, effective_positions,
              model: SignalModel, wavelength: float = 1.0) -> float | None:
    """Bobrovsky-Zakai bound (the s=1 edge of the family) at test point h > 0."""
    if h <= 0:
        raise ValueError("h must be positive")
    val = bzb_values(h, post, effective_positions, model, wavelength)[0]
    return None if np.isnan(val) else float(val)


def fisher_information(effective_positions, model: SignalModel, wavelength: float = 1.0) -> float:
    """Fisher information of theta for the known-signal model: (2*s_energy/noise_var)*k0^2*sum d_i^2."""
    positions = np.asarray(effective_positions, dtype=float)
    k0 = 2.0 * np.pi / wavelength
    return 2.0 * model.signal_energy / model.noise_var * k0**2 * float(np.sum(positions**2))


def ecrb_value(post: PosteriorRepr, effective_positions, model: SignalModel,
               wavelength: float = 1.0) -> float | None:
    """Expected Cramer-Rao bound E[1/J(theta)] on the belief.

    The Fisher information of the linear far-field model is theta-free, so the
    expectation collapses to noise_var / (2*s_energy*k0^2*sum d_i^2) for any
    belief. Returns None when all effective positions sit at 0 (no aperture).
    """
    info = fisher_information(effective_positions, model, wavelength)
    if info <= 0.0:
        return None
    return 1.0 / info


def _wwb_from_mgf(mgf, s: float, h: float) -> float | None:
    """Assemble the family value from an mgf callable; None on a degenerate denominator."""
    denom = mgf(2.0 * s, h) + mgf(2.0 - 2.0 * s, -h) - 2.0 * mgf(s, 2.0 * h)
    if denom <= DENOM_EPS:
        return None
    return h**2 * mgf(s, h) ** 2 / denom


def _bzb_from_mgf(mgf, h: float) -> float | None:
    denom = mgf(2.0, h) - 1.0
    if denom <= DENOM_EPS:
        return None
    return h**2 / denom
