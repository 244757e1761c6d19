import numpy as np
import pytest

import doasel.particle_filter as pf
from doasel import (ChannelSelection, DegeneratePosteriorError, GaussianPosterior,
                    Measurement, ParticleSet, SignalModel, init_uniform, log_likelihood,
                    moments, residual_resample, steering_vector, to_posterior_repr,
                    uniform_geometry, update)

GEOM = uniform_geometry(4, 1, 0.9, 1.0)
SEL = ChannelSelection(tx_idx=(1,), rx_idx=(1, 2, 3))
MODEL = SignalModel(noise_var=1.0, snapshots=2, signal_value=1.0)


def exact_measurement(theta, model=MODEL, sel=SEL, geom=GEOM, mode="simo", step=0):
    steer = steering_vector(geom, sel, theta, model.f_d, mode)
    return Measurement(np.tile(steer * model.signal_value, (model.snapshots, 1)), step)


def test_init_uniform_weights_and_range():
    ps = init_uniform(500, -1.0, 1.0, np.random.default_rng(0))
    assert ps.size == 500
    assert np.all(ps.weights == 1.0 / 500)
    assert np.all((ps.positions >= -1) & (ps.positions <= 1))


def test_init_single_particle():
    ps = init_uniform(1, -1.0, 1.0, np.random.default_rng(0))
    assert ps.weights.tolist() == [1.0]


def test_init_uniform_seeded_determinism():
    a = init_uniform(100, -1, 1, np.random.default_rng(123))
    b = init_uniform(100, -1, 1, np.random.default_rng(123))
    assert np.array_equal(a.positions, b.positions)


def test_init_uniform_rejects_zero_particles():
    with pytest.raises(ValueError):
        init_uniform(0, -1, 1, np.random.default_rng(0))


def test_particle_set_requires_normalized_weights():
    with pytest.raises(ValueError):
        ParticleSet(np.array([0.0, 1.0]), np.array([0.5, 0.4]))


def test_log_likelihood_zero_residual_is_max():
    meas = exact_measurement(0.3)
    assert log_likelihood(meas, 0.3, SEL, GEOM, MODEL) == pytest.approx(0.0, abs=1e-12)
    for theta in (-0.5, 0.0, 0.6):
        assert log_likelihood(meas, theta, SEL, GEOM, MODEL) <= 1e-12


def test_log_likelihood_unit_residual():
    geom = uniform_geometry(1, 1, 0.9, 1.0)
    sel = ChannelSelection(tx_idx=(1,), rx_idx=(1,))
    model = SignalModel(noise_var=1.0, snapshots=1, signal_value=1.0)
    meas = Measurement(np.zeros((1, 1), dtype=complex))
    assert log_likelihood(meas, 0.0, sel, geom, model) == pytest.approx(-1.0)


def test_log_likelihood_differences_match_full_density_oracle():
    rng = np.random.default_rng(8)
    x = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    meas = Measurement(x)
    model = SignalModel(noise_var=0.7, snapshots=2, signal_value=1.0)

    def full_log_density(theta):
        steer = steering_vector(GEOM, SEL, theta, 0.0, "simo")
        resid = x - steer * model.signal_value
        n = x.size
        return float(-n * np.log(np.pi * model.noise_var)
                     - np.sum(np.abs(resid) ** 2) / model.noise_var)

    thetas = rng.uniform(-1, 1, 10)
    for t1 in thetas:
        for t2 in thetas:
            got = log_likelihood(meas, t1, SEL, GEOM, model) \
                - log_likelihood(meas, t2, SEL, GEOM, model)
            want = full_log_density(t1) - full_log_density(t2)
            assert got == pytest.approx(want, abs=1e-12)


def test_log_likelihood_rejects_dimension_mismatch():
    meas = Measurement(np.zeros((2, 5), dtype=complex))
    with pytest.raises(ValueError):
        log_likelihood(meas, 0.0, SEL, GEOM, MODEL)


def test_update_softmax_of_log_likelihoods(monkeypatch):
    ps = ParticleSet(np.array([0.1, 0.2]), np.array([0.5, 0.5]))
    monkeypatch.setattr(pf, "_log_likelihoods",
                        lambda meas, thetas, *a, **k: np.array([1.0, 0.0]))
    out = pf.update(ps, exact_measurement(0.0), SEL, GEOM, MODEL)
    assert out.weights == pytest.approx([np.e / (1 + np.e), 1 / (1 + np.e)])
    assert np.array_equal(out.positions, ps.positions)


def test_update_uninformative_measurement_keeps_weights(monkeypatch):
    ps = ParticleSet(np.array([-0.5, 0.0, 0.5]), np.array([0.2, 0.3, 0.5]))
    monkeypatch.setattr(pf, "_log_likelihoods",
                        lambda meas, thetas, *a, **k: np.full(3, -4.2))
    out = pf.update(ps, exact_measurement(0.0), SEL, GEOM, MODEL)
    assert out.weights == pytest.approx(ps.weights)


def test_update_invariant_to_constant_log_likelihood_shift(monkeypatch):
    ps = init_uniform(64, -1, 1, np.random.default_rng(5))
    meas = exact_measurement(0.3)
    base = pf.update(ps, meas, SEL, GEOM, MODEL)
    original = pf._log_likelihoods
    monkeypatch.setattr(pf, "_log_likelihoods",
                        lambda *a, **k: original(*a, **k) + 987.5)
    shifted = pf.update(ps, meas, SEL, GEOM, MODEL)
    assert shifted.weights == pytest.approx(base.weights, rel=1e-9)


def test_update_normalizes_weights():
    rng = np.random.default_rng(2)
    ps = init_uniform(200, -1, 1, rng)
    noisy = exact_measurement(0.3).snapshots + 0.3 * (
        rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3)))
    out = update(ps, Measurement(noisy), SEL, GEOM, MODEL)
    assert abs(out.weights.sum() - 1.0) < 1e-9
    assert np.all(out.weights >= 0)


def test_update_high_snr_shrinks_posterior_variance():
    sharp = SignalModel(noise_var=0.01, snapshots=2, signal_value=1.0)
    shrunk = 0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        ps = init_uniform(300, -1, 1, rng)
        noise = (rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))) \
            * np.sqrt(sharp.noise_var / 2)
        meas = Measurement(exact_measurement(0.3, sharp).snapshots + noise)
        _, var0 = moments(ps)
        _, var1 = moments(update(ps, meas, SEL, GEOM, sharp))
        if var1 < var0:
            shrunk += 1
    assert shrunk == 50


def test_update_degenerate_posterior_raises():
    ps = ParticleSet(np.array([0.3, -0.9]), np.array([0.0, 1.0]))
    sharp = SignalModel(noise_var=1e-4, snapshots=2, signal_value=1.0)
    with pytest.raises(DegeneratePosteriorError):
        update(ps, exact_measurement(0.3, sharp), SEL, GEOM, sharp)


def test_residual_resample_integer_weights_deterministic():
    ps = ParticleSet(np.array([0.0, 1.0, 2.0, 3.0]), np.array([0.5, 0.25, 0.25, 0.0]))
    out = residual_resample(ps, np.random.default_rng(0))
    counts = [int(np.sum(out.positions == p)) for p in ps.positions]
    assert counts == [2, 1, 1, 0]
    assert np.all(out.weights == 0.25)


def test_residual_resample_uniform_weights_identity():
    ps = init_uniform(32, -1, 1, np.random.default_rng(1))
    out = residual_resample(ps, np.random.default_rng(2))
    assert np.array_equal(np.sort(out.positions), np.sort(ps.positions))


def test_residual_resample_floor_counts_property():
    rng = np.random.default_rng(9)
    for _ in range(30):
        p = int(rng.integers(4, 40))
        w = rng.dirichlet(np.ones(p))
        ps = ParticleSet(np.arange(p, dtype=float), w)
        out = residual_resample(ps, rng)
        assert out.size == p
        assert np.all(out.weights == 1.0 / p)
        for i in range(p):
            assert np.sum(out.positions == i) >= int(np.floor(p * w[i]))


def residual_draw_frequencies(n_seeds=10**4):
    """Empirical pick frequencies of the single residual slot for w = [0.6, 0.4, 0, 0]."""
    ps = ParticleSet(np.array([0.0, 1.0, 2.0, 3.0]), np.array([0.6, 0.4, 0.0, 0.0]))
    counts = np.zeros(2)
    for seed in range(n_seeds):
        out = residual_resample(ps, np.random.default_rng(seed))
        occupancy = [int(np.sum(out.positions == p)) for p in ps.positions]
        assert occupancy[2] == 0 and occupancy[3] == 0
        # Deterministic part is [2, 1]; exactly one extra slot lands on 0 or 1.
        if occupancy[0] == 3:
            counts[0] += 1
        else:
            assert occupancy[1] == 2
            counts[1] += 1
    return counts


def test_residual_resample_draw_frequencies_chi_squared():
    from scipy.stats import chisquare
    n = 2000
    counts = residual_draw_frequencies(n)
    stat = chisquare(counts, f_exp=np.array([0.4, 0.6]) * n)
    assert stat.pvalue > 0.01


def test_moments_symmetric_pair():
    ps = ParticleSet(np.array([-1.0, 1.0]), np.array([0.5, 0.5]))
    assert moments(ps) == pytest.approx((0.0, 1.0))


def test_moments_single_particle():
    ps = ParticleSet(np.array([0.3]), np.array([1.0]))
    assert moments(ps) == pytest.approx((0.3, 0.0))


def test_moments_match_direct_sums():
    rng = np.random.default_rng(12)
    for _ in range(20):
        p = int(rng.integers(2, 60))
        pos = rng.uniform(-1, 1, p)
        w = rng.dirichlet(np.ones(p))
        ps = ParticleSet(pos, w)
        mean, var = moments(ps)
        direct_mean = sum(wi * xi for wi, xi in zip(w, pos))
        direct_var = sum(wi * (xi - direct_mean) ** 2 for wi, xi in zip(w, pos))
        assert mean == pytest.approx(direct_mean, abs=1e-12)
        assert var == pytest.approx(direct_var, abs=1e-12)


def test_gauss_repr_variance_floor():
    ps = ParticleSet(np.zeros(10), np.full(10, 0.1))
    post = to_posterior_repr(ps, "gauss")
    assert isinstance(post, GaussianPosterior)
    assert post.mean == 0.0
    assert post.var == pf.VAR_FLOOR


def test_grid_repr_of_uniform_cloud_is_flat():
    ps = init_uniform(10**5, -1, 1, np.random.default_rng(3))
    post = to_posterior_repr(ps, "grid", bins=1024)
    assert np.abs(post.density - 0.5).max() < 0.05


def test_grid_repr_integrates_to_one():
    rng = np.random.default_rng(4)
    for _ in range(10):
        p = int(rng.integers(5, 2000))
        ps = ParticleSet(rng.uniform(-1, 1, p), rng.dirichlet(np.ones(p)))
        post = to_posterior_repr(ps, "grid", bins=256)
        widths = np.diff(post.edges)
        assert abs(float(np.sum(post.density * widths)) - 1.0) < 1e-9
