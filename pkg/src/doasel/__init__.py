"""Adaptive Tx/Rx channel selection for DoA estimation with linear SIMO and TDM-MIMO arrays.

A closed-loop simulator and numerics library: at each step the controller
evaluates a conditional Bayesian lower bound (Weiss-Weinstein, Bobrovsky-Zakai,
or Expected Cramer-Rao) on the current belief for every candidate channel
subset and activates the minimizer; a particle filter folds the resulting
measurement back into the belief.
"""

__version__ = "0.1.0"

from .annealing import AnnealSchedule, NoValidBoundError, anneal_max, grid_max
from .bounds import (GaussianPosterior, GridPosterior, SignalModel, TestPoint,
                     UniformPosterior, ambiguity_factor, bound_mgf, bzb_value,
                     ecrb_value, fisher_information, overlap_integral, wwb_value)
from .controller import (BoundKind, NoPolicyError, PolicyDecision,
                         enumerate_selections, evaluate_candidate, select_policy)
from .geometry import (ArrayGeometry, ChannelSelection, effective_positions,
                       selected_rx_positions, selected_tx_positions, steering_vector,
                       tdm_phases, uniform_geometry, virtual_positions)
from .particle_filter import (DegeneratePosteriorError, Measurement, ParticleSet,
                              init_uniform, log_likelihood, moments, residual_resample,
                              to_posterior_repr, update)
from .simulator import (ExperimentConfig, SweepRow, Trajectory, TrajectoryRecord,
                        baseline_policy, mse_at_step, mse_at_step_rerun,
                        run_closed_loop, snr_sweep, synthesize_measurement)

__all__ = [name for name in dir() if not name.startswith("_")]
