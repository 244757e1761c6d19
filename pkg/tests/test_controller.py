import numpy as np
import pytest

import doasel.controller as controller
from doasel import (AnnealSchedule, BoundKind, ChannelSelection, GaussianPosterior,
                    NoPolicyError, SignalModel, TestPoint, UniformPosterior,
                    ecrb_value, enumerate_selections, evaluate_candidate,
                    select_policy, uniform_geometry, wwb_value)
from doasel.bounds import wwb_values
from doasel.geometry import effective_positions
from oracles import aperture_metric

MODEL = SignalModel.from_snr_db(-5.0)
PRIOR = UniformPosterior(-1.0, 1.0)
FAST_SCHED = AnnealSchedule(n_temps=30, moves_per_temp=10, rng_seed=0)


def test_enumerate_simo_fix_first():
    sels = enumerate_selections(n_rx=4, n_tx=1, i_rx=2, i_tx=1, fix_first=True)
    assert [s.rx_idx for s in sels] == [(1, 2), (1, 3), (1, 4)]
    assert all(s.tx_idx == (1,) for s in sels)


def test_enumerate_full_selection_is_single():
    sels = enumerate_selections(n_rx=3, n_tx=1, i_rx=3, i_tx=1)
    assert len(sels) == 1
    assert sels[0].rx_idx == (1, 2, 3)


def test_enumerate_mimo_count():
    sels = enumerate_selections(n_rx=8, n_tx=4, i_rx=4, i_tx=2, fix_first=True)
    assert len(sels) == 35 * 3
    assert len(set((s.tx_idx, s.rx_idx) for s in sels)) == 105


def test_enumerate_without_fix_first_count():
    sels = enumerate_selections(n_rx=5, n_tx=3, i_rx=2, i_tx=2, fix_first=False)
    assert len(sels) == 10 * 3


def test_enumerate_lexicographic_order():
    sels = enumerate_selections(n_rx=5, n_tx=3, i_rx=2, i_tx=2, fix_first=True)
    keys = [(s.tx_idx, s.rx_idx) for s in sels]
    assert keys == sorted(keys)


def test_enumerate_rejects_oversized_selection():
    with pytest.raises(ValueError):
        enumerate_selections(n_rx=3, n_tx=1, i_rx=4, i_tx=1)


def test_evaluate_candidate_ecrb_delegates_to_closed_form():
    geom = uniform_geometry(5, 2, 0.9, 1.0)
    sel = ChannelSelection(tx_idx=(1,), rx_idx=(1, 3, 5))
    value, tp = evaluate_candidate(sel, PRIOR, geom, MODEL, BoundKind.ECRB, "simo", FAST_SCHED)
    assert tp is None
    positions = effective_positions(geom, sel, "simo")
    assert value == pytest.approx(ecrb_value(PRIOR, positions, MODEL, geom.wavelength))
    narrow = GaussianPosterior(0.2, 0.01)
    value2, _ = evaluate_candidate(sel, narrow, geom, MODEL, BoundKind.ECRB, "simo", FAST_SCHED)
    assert value2 == value


def test_evaluate_candidate_bzb_finds_interior_argmax():
    geom = uniform_geometry(4, 1, 0.9, 1.0)
    sel = ChannelSelection(tx_idx=(1,), rx_idx=(1, 2, 3, 4))
    positions = effective_positions(geom, sel, "simo")
    sched = AnnealSchedule(n_temps=100, moves_per_temp=20, rng_seed=1)
    value, tp = evaluate_candidate(sel, PRIOR, geom, MODEL, BoundKind.BZB, "simo", sched)
    assert tp.s == 0.95

    h_dense = np.linspace(1e-4, 2.0, 4001)
    dense = wwb_values(np.full_like(h_dense, 0.95), h_dense, PRIOR, positions, MODEL)
    h_star = h_dense[np.nanargmax(dense)]
    grid_resolution = (2.0 - 1e-4) / 63
    assert abs(tp.h - h_star) <= grid_resolution
    assert value >= np.nanmax(dense) * 0.98


def test_evaluate_candidate_wwb_sup_dominates_sample_point():
    geom = uniform_geometry(6, 1, 0.9, 1.0)
    sel = ChannelSelection(tx_idx=(1,), rx_idx=(1, 2, 6))
    positions = effective_positions(geom, sel, "simo")
    value, _ = evaluate_candidate(sel, PRIOR, geom, MODEL, BoundKind.WWB, "simo",
                                  AnnealSchedule(n_temps=100, moves_per_temp=20, rng_seed=2))
    sample = wwb_value(TestPoint(0.5, 1.0), PRIOR, positions, MODEL)
    assert value >= sample


def test_select_policy_single_candidate():
    geom = uniform_geometry(3, 1, 0.9, 1.0)
    only = [ChannelSelection(tx_idx=(1,), rx_idx=(1, 3))]
    for kind in BoundKind:
        decision = select_policy(only, PRIOR, geom, MODEL, kind, "simo", FAST_SCHED)
        assert decision.selection == only[0]
        assert decision.candidates_evaluated == 1


def test_select_policy_ecrb_matches_aperture_oracle_spot_checks():
    for n_rx, n_tx, i_rx, i_tx in [(5, 2, 3, 1), (4, 3, 2, 2), (6, 1, 3, 1)]:
        geom = uniform_geometry(n_rx, n_tx, 0.9, 1.0)
        candidates = enumerate_selections(n_rx, n_tx, i_rx, i_tx, fix_first=True)
        decision = select_policy(candidates, PRIOR, geom, MODEL, BoundKind.ECRB,
                                 "mimo", FAST_SCHED)
        best = max(candidates,
                   key=lambda s: (aperture_metric(geom, s), ),
                   default=None)
        best_metric = aperture_metric(geom, best)
        winners = [s for s in candidates
                   if abs(aperture_metric(geom, s) - best_metric) < 1e-12]
        oracle = min(winners, key=lambda s: (s.tx_idx, s.rx_idx))
        assert decision.selection == oracle


def test_select_policy_tie_breaks_lexicographically():
    # Two selections with identical virtual arrays: {p, 2p} both ways.
    geom = uniform_geometry(3, 2, 0.9, 1.0)
    a = ChannelSelection(tx_idx=(1,), rx_idx=(2, 3))
    b = ChannelSelection(tx_idx=(2,), rx_idx=(1, 2))
    for ordering in ([a, b], [b, a]):
        decision = select_policy(ordering, PRIOR, geom, MODEL, BoundKind.ECRB,
                                 "mimo", FAST_SCHED)
        assert decision.selection == a


def test_select_policy_deterministic():
    geom = uniform_geometry(6, 1, 0.9, 1.0)
    candidates = enumerate_selections(6, 1, 3, 1)
    sched = AnnealSchedule(n_temps=40, moves_per_temp=10, rng_seed=11)
    runs = [select_policy(candidates, GaussianPosterior(0.1, 0.05), geom, MODEL,
                          BoundKind.WWB, "simo", sched) for _ in range(2)]
    assert runs[0] == runs[1]


def test_select_policy_winner_minimizes_stubbed_values(monkeypatch):
    geom = uniform_geometry(4, 1, 0.9, 1.0)
    candidates = enumerate_selections(4, 1, 2, 1)
    values = np.array([0.4, 0.2, 0.9])

    def fake_sup(positions, post, model, kind, wavelength, sched):
        return values.copy(), [TestPoint(0.5, 1.0)] * len(values)

    monkeypatch.setattr(controller, "_sup_bound_batch", fake_sup)
    decision = select_policy(candidates, PRIOR, geom, MODEL, BoundKind.WWB,
                             "simo", FAST_SCHED)
    assert decision.selection == candidates[1]
    assert decision.bound_value == 0.2


def test_select_policy_excludes_invalid_candidates(monkeypatch):
    geom = uniform_geometry(4, 1, 0.9, 1.0)
    candidates = enumerate_selections(4, 1, 2, 1)

    def fake_sup(positions, post, model, kind, wavelength, sched):
        # The smallest value is invalid and must not win the argmin.
        return np.array([-np.inf, 0.7, 0.5]), [None, TestPoint(0.5, 1), TestPoint(0.5, 1)]

    monkeypatch.setattr(controller, "_sup_bound_batch", fake_sup)
    decision = select_policy(candidates, PRIOR, geom, MODEL, BoundKind.WWB,
                             "simo", FAST_SCHED)
    assert decision.selection == candidates[2]


def test_select_policy_all_invalid_raises():
    geom = uniform_geometry(1, 1, 0.9, 1.0)
    candidates = enumerate_selections(1, 1, 1, 1)
    with pytest.raises(NoPolicyError):
        select_policy(candidates, PRIOR, geom, MODEL, BoundKind.ECRB, "mimo", FAST_SCHED)


def test_ecrb_argmin_invariant_to_model_and_posterior():
    geom = uniform_geometry(5, 2, 0.9, 1.0)
    candidates = enumerate_selections(5, 2, 2, 1)
    picks = set()
    for model in (SignalModel.from_snr_db(-10), SignalModel.from_snr_db(15),
                  SignalModel(noise_var=0.3, snapshots=7, signal_value=2.0)):
        for post in (PRIOR, GaussianPosterior(-0.4, 0.02)):
            decision = select_policy(candidates, post, geom, model, BoundKind.ECRB,
                                     "mimo", FAST_SCHED)
            picks.add((decision.selection.tx_idx, decision.selection.rx_idx))
    assert len(picks) == 1


def test_ecrb_ranking_invariant_to_position_scaling():
    candidates = enumerate_selections(5, 2, 3, 1)
    winners = []
    for spacing in (0.9, 1.8, 0.45):
        geom = uniform_geometry(5, 2, spacing, 1.0)
        decision = select_policy(candidates, PRIOR, geom, MODEL, BoundKind.ECRB,
                                 "mimo", FAST_SCHED)
        winners.append((decision.selection.tx_idx, decision.selection.rx_idx))
    assert len(set(winners)) == 1
