"""Closed-loop experiments: synthetic measurements, perception-action trajectories, MSE curves.

Each trajectory alternates select -> measure -> filter. All randomness flows
from one master seed through keyed substreams (particle init, per-step noise,
annealing, resampling), so runs are bit-reproducible and trials/steps use
independent streams.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from joblib import Parallel, delayed

from . import particle_filter as pf
from .annealing import AnnealSchedule
from .bounds import SignalModel, TestPoint, UniformPosterior
from .controller import BoundKind, enumerate_selections, select_policy
from .geometry import (ArrayGeometry, ChannelSelection, steering_vector,
                       uniform_geometry, virtual_positions)

BASELINE_POLICIES = ("stair", "fixed_uniform", "random")

#: Tolerance for treating two virtual positions as coincident.
_POS_TOL = 1e-9


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the given master seed and integer key path."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def derive_seed(seed: int, *key: int) -> int:
    """Deterministic integer seed derived from a master seed and key path."""
    return int(np.random.SeedSequence(seed, spawn_key=key).generate_state(1)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a closed-loop run needs; defaults follow the standard desk-scale setup."""

    n_rx: int = 8
    n_tx: int = 4
    i_rx: int = 4
    i_tx: int = 2
    fix_first: bool = True
    spacing_factor: float = 0.9
    wavelength: float = 1.0
    inter_pulse: float = 0.0
    mode: str = "mimo"
    snapshots: int = 2
    signal_value: complex = 1.0 + 0.0j
    snr_db: tuple[float, ...] = (-5.0,)
    f_d: float = 0.0
    particles: int = 500
    resample_mode: str = "always"
    posterior_repr: str | None = None
    grid_bins: int = 1024
    bound: tuple[BoundKind, ...] = (BoundKind.WWB,)
    sa_temps: int | None = None
    sa_moves: int = 20
    steps: int = 8
    theta_true: float = 0.3
    n_real: int = 300
    n_traj: int = 20
    eval_step: int = 8
    seed: int = 1

    def __post_init__(self):
        if isinstance(self.snr_db, (int, float)):
            object.__setattr__(self, "snr_db", (float(self.snr_db),))
        if isinstance(self.bound, BoundKind):
            object.__setattr__(self, "bound", (self.bound,))
        for name in ("n_rx", "n_tx", "i_rx", "i_tx", "snapshots", "particles",
                     "grid_bins", "sa_moves", "steps", "n_real", "n_traj", "eval_step"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not (self.i_rx <= self.n_rx and self.i_tx <= self.n_tx):
            raise ValueError("selection sizes cannot exceed array sizes")
        if self.mode not in ("simo", "mimo"):
            raise ValueError("mode must be 'simo' or 'mimo'")
        if self.resample_mode not in ("always", "ess"):
            raise ValueError("resample_mode must be 'always' or 'ess'")
        if self.posterior_repr not in (None, "gauss", "grid"):
            raise ValueError("posterior_repr must be 'gauss' or 'grid'")
        if abs(self.theta_true) > 1:
            raise ValueError("theta_true must lie in [-1, 1]")

    @property
    def single_snr_db(self) -> float:
        if len(self.snr_db) != 1:
            raise ValueError("this operation needs exactly one configured snr_db")
        return self.snr_db[0]

    @property
    def posterior_kind(self) -> str:
        # Gaussian fit is the fast default for MIMO; the empirical grid for SIMO.
        if self.posterior_repr is not None:
            return self.posterior_repr
        return "gauss" if self.mode == "mimo" else "grid"

    def geometry(self) -> ArrayGeometry:
        return uniform_geometry(self.n_rx, self.n_tx, self.spacing_factor,
                                self.wavelength, self.inter_pulse)

    def signal_model(self, snr_db: float | None = None) -> SignalModel:
        snr = self.single_snr_db if snr_db is None else snr_db
        return SignalModel.from_snr_db(snr, snapshots=self.snapshots,
                                       signal_value=self.signal_value, f_d=self.f_d)

    def schedule(self, rng_seed: int, snr_db: float | None = None) -> AnnealSchedule:
        snr = self.single_snr_db if snr_db is None else snr_db
        n_temps = self.sa_temps if self.sa_temps is not None else (100 if snr < 0 else 50)
        return AnnealSchedule(n_temps=n_temps, moves_per_temp=self.sa_moves, rng_seed=rng_seed)

    def candidates(self) -> list[ChannelSelection]:
        if self.mode == "simo":
            return enumerate_selections(self.n_rx, 1, self.i_rx, 1, self.fix_first)
        return enumerate_selections(self.n_rx, self.n_tx, self.i_rx, self.i_tx, self.fix_first)


@dataclass(frozen=True)
class TrajectoryRecord:
    """One closed-loop step: what was selected, what the bound said, what was estimated."""

    step: int
    policy: str
    selection: ChannelSelection
    test_point: TestPoint | None
    bound_value: float
    post_mean: float
    post_var: float
    estimate: float
    sq_err: float


@dataclass(frozen=True)
class Trajectory:
    """Records plus the filter states needed to re-realize any step's measurement."""

    records: list[TrajectoryRecord]
    states: list[pf.ParticleSet]       # belief before each step's update
    geom: ArrayGeometry
    model: SignalModel
    mode: str
    theta_true: float
    seed: int


def synthesize_measurement(theta_true: float, sel: ChannelSelection, geom: ArrayGeometry,
                           model: SignalModel, mode: str, rng: np.random.Generator,
                           step_index: int = 0) -> pf.Measurement:
    """Draw J snapshots x_j = m(theta)*s + n with circular complex Gaussian noise."""
    steer = steering_vector(geom, sel, theta_true, f_d=model.f_d, mode=mode)
    shape = (model.snapshots, steer.size)
    noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) \
        * np.sqrt(model.noise_var / 2.0)
    return pf.Measurement(snapshots=steer * model.signal_value + noise, step_index=step_index)


def _stair_selection(k: int, cfg: ExperimentConfig) -> ChannelSelection:
    tx = tuple(range(1, cfg.i_tx + 1))
    if cfg.fix_first and cfg.i_rx > 1:
        # Channel 1 stays on; the remaining window slides over channels 2..n_rx.
        start = (k - 1) % (cfg.n_rx - cfg.i_rx + 1) + 2
        rx = (1,) + tuple(range(start, start + cfg.i_rx - 1))
    else:
        start = (k - 1) % (cfg.n_rx - cfg.i_rx + 1) + 1
        rx = tuple(range(start, start + cfg.i_rx))
    return ChannelSelection(tx_idx=tx, rx_idx=rx)


@lru_cache(maxsize=None)
def _fixed_uniform_cached(n_rx: int, n_tx: int, i_rx: int, i_tx: int, fix_first: bool,
                          spacing_factor: float, wavelength: float) -> ChannelSelection:
    geom = uniform_geometry(n_rx, n_tx, spacing_factor, wavelength)
    candidates = enumerate_selections(n_rx, n_tx, i_rx, i_tx, fix_first)
    uniform, fallback = [], []
    for sel in candidates:
        virt = np.sort(virtual_positions(geom, sel))
        gaps = np.diff(virt)
        n_distinct = 1 + int(np.sum(gaps > _POS_TOL))
        if n_distinct == virt.size and (gaps.size == 0 or np.ptp(gaps) < _POS_TOL):
            gap = float(gaps[0]) if gaps.size else 0.0
            uniform.append((gap, sel.tx_idx, sel.rx_idx, sel))
        else:
            spread = float(np.std(gaps)) if gaps.size else 0.0
            fallback.append((-n_distinct, spread, sel.tx_idx, sel.rx_idx, sel))
    pool = uniform if uniform else fallback
    return min(pool)[-1]


def baseline_policy(kind: str, k: int, cfg: ExperimentConfig,
                    rng: np.random.Generator | None = None) -> ChannelSelection:
    """Non-adaptive reference policies: sliding 'stair' window, fixed uniform virtual array, random."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if kind == "stair":
        return _stair_selection(k, cfg)
    if kind == "fixed_uniform":
        return _fixed_uniform_cached(cfg.n_rx, cfg.n_tx, cfg.i_rx, cfg.i_tx,
                                     cfg.fix_first, cfg.spacing_factor, cfg.wavelength)
    if kind == "random":
        rng = np.random.default_rng() if rng is None else rng
        candidates = cfg.candidates()
        return candidates[int(rng.integers(len(candidates)))]
    raise ValueError(f"unknown baseline policy {kind!r}")


def run_closed_loop(cfg: ExperimentConfig, seed: int,
                    policy: BoundKind | str | None = None,
                    snr_db: float | None = None) -> Trajectory:
    """Run one perception-action trajectory of cfg.steps steps; bit-reproducible given seed.

    policy is a BoundKind (adaptive argmin selection) or a baseline name from
    BASELINE_POLICIES; default is the single configured bound kind.
    """
    if policy is None:
        if len(cfg.bound) != 1:
            raise ValueError("pass policy= explicitly when several bound kinds are configured")
        policy = cfg.bound[0]
    snr = cfg.single_snr_db if snr_db is None else snr_db
    geom = cfg.geometry()
    model = cfg.signal_model(snr)
    candidates = cfg.candidates()
    adaptive = isinstance(policy, BoundKind)
    label = policy.value if adaptive else str(policy)
    if not adaptive and policy not in BASELINE_POLICIES:
        raise ValueError(f"unknown policy {policy!r}")

    ps = pf.init_uniform(cfg.particles, -1.0, 1.0, substream(seed, 0))
    records: list[TrajectoryRecord] = []
    states: list[pf.ParticleSet] = []
    for k in range(1, cfg.steps + 1):
        states.append(ps)
        if adaptive:
            if k == 1:
                post = UniformPosterior(-1.0, 1.0)
            else:
                post = pf.to_posterior_repr(ps, cfg.posterior_kind, cfg.grid_bins)
            sched = cfg.schedule(rng_seed=derive_seed(seed, 3, k), snr_db=snr)
            decision = select_policy(candidates, post, geom, model, policy, cfg.mode, sched)
            sel, tp, bval = decision.selection, decision.test_point, decision.bound_value
        else:
            sel = baseline_policy(policy, k, cfg, rng=substream(seed, 4, k))
            tp, bval = None, float("nan")
        try:
            meas = synthesize_measurement(cfg.theta_true, sel, geom, model, cfg.mode,
                                          substream(seed, 1, k), step_index=k)
            ps = pf.update(ps, meas, sel, geom, model, cfg.mode)
        except pf.DegeneratePosteriorError as err:
            raise pf.DegeneratePosteriorError(f"step {k}: {err}") from err
        mean, var = pf.moments(ps)
        if cfg.resample_mode == "always" or \
                pf.effective_sample_size(ps) < cfg.particles / 2.0:
            ps = pf.residual_resample(ps, substream(seed, 2, k))
        records.append(TrajectoryRecord(
            step=k, policy=label, selection=sel, test_point=tp, bound_value=bval,
            post_mean=mean, post_var=var, estimate=mean,
            sq_err=(mean - cfg.theta_true) ** 2))
    return Trajectory(records=records, states=states, geom=geom, model=model,
                      mode=cfg.mode, theta_true=cfg.theta_true, seed=seed)


def mse_at_step(traj: Trajectory, step: int, n_real: int, theta_true: float,
                rng: np.random.Generator) -> float:
    """Monte Carlo MSE of the conditional-mean estimate at one step of a trajectory.

    Re-realizes only step's measurement: n_real independent draws under the
    trajectory's selected policy, each filtered from the common step-1 state.
    """
    if not 1 <= step <= len(traj.records):
        raise ValueError(f"step must lie in 1..{len(traj.records)}")
    state = traj.states[step - 1]
    sel = traj.records[step - 1].selection
    errs = np.empty(n_real)
    for i in range(n_real):
        meas = synthesize_measurement(theta_true, sel, traj.geom, traj.model,
                                      traj.mode, rng, step_index=step)
        updated = pf.update(state, meas, sel, traj.geom, traj.model, traj.mode)
        mean, _ = pf.moments(updated)
        errs[i] = (mean - theta_true) ** 2
    return float(np.mean(errs))


def mse_at_step_rerun(cfg: ExperimentConfig, step: int, n_real: int,
                      policy: BoundKind | str, seed: int,
                      snr_db: float | None = None) -> float:
    """Whole-trajectory MSE variant: every realization re-runs the loop from step 1.

    Much more expensive than mse_at_step (n_real full closed loops) and a
    different statistic: selections and filter history vary per realization
    instead of being conditioned on one shared history.
    """
    errs = np.empty(n_real)
    for i in range(n_real):
        traj = run_closed_loop(cfg, derive_seed(seed, 30, i), policy=policy, snr_db=snr_db)
        errs[i] = traj.records[step - 1].sq_err
    return float(np.mean(errs))


@dataclass(frozen=True)
class SweepRow:
    snr_db: float
    bound_kind: str
    eval_step: int
    n_traj: int
    mse: float


def _sweep_trial(cfg: ExperimentConfig, snr: float, kind: BoundKind | str,
                 trial_seed: int, eval_step: int) -> float:
    traj = run_closed_loop(cfg, trial_seed, policy=kind, snr_db=snr)
    return mse_at_step(traj, eval_step, cfg.n_real, cfg.theta_true,
                       substream(trial_seed, 9))


def snr_sweep(cfg: ExperimentConfig, snr_list=None, n_traj: int | None = None,
              eval_step: int | None = None, kinds=None, jobs: int = 1) -> list[SweepRow]:
    """Average trajectory MSE at eval_step for every (SNR, bound kind) pair.

    Trials are independently seeded from cfg.seed, so the result is identical
    for any jobs count.
    """
    snr_list = list(cfg.snr_db) if snr_list is None else list(snr_list)
    n_traj = cfg.n_traj if n_traj is None else n_traj
    eval_step = cfg.eval_step if eval_step is None else eval_step
    kinds = list(cfg.bound) if kinds is None else list(kinds)
    if not 1 <= eval_step <= cfg.steps:
        raise ValueError("eval_step must lie in 1..steps")

    tasks = [(si, ki, t) for si in range(len(snr_list))
             for ki in range(len(kinds)) for t in range(n_traj)]
    runner = Parallel(n_jobs=jobs) if jobs != 1 else None
    calls = [
        delayed(_sweep_trial)(cfg, snr_list[si], kinds[ki],
                              derive_seed(cfg.seed, 10, si, ki, t), eval_step)
        for si, ki, t in tasks
    ]
    if runner is None:
        results = [f(*args, **kwargs) for f, args, kwargs in calls]
    else:
        results = runner(calls)

    rows = []
    for si, snr in enumerate(snr_list):
        for ki, kind in enumerate(kinds):
            mses = [results[i] for i, (s, k, _) in enumerate(tasks) if s == si and k == ki]
            label = kind.value if isinstance(kind, BoundKind) else str(kind)
            rows.append(SweepRow(snr_db=snr, bound_kind=label, eval_step=eval_step,
                                 n_traj=n_traj, mse=float(np.mean(mses))))
    return rows
