import math

import numpy as np
import pytest
from scipy import stats

from ehcoop.analytic import NetworkModel, TierConfig, interference_laplace, kth_neighbor_cdf, link_ccdf_theorem2
from ehcoop.energy import EnergyProfile, transmission_probability
from ehcoop.geometry import ClusterGeometry, InClusterAvailability
from ehcoop.mcsim import (
    SimConfig,
    block_rng,
    empirical_laplace,
    realize_field,
    sample_kth_distance,
    sample_ppp,
    simulate_cluster_access,
    simulate_link_ccdf,
    simulate_overall_success,
    wilson_interval,
)
from ehcoop.mcsim import kernels
from ehcoop.mcsim.fields import auto_window, mean_kth_distance, window_for_guard


def test_ppp_count_and_void():
    lam, R = 0.02, 20.0
    mean = lam * math.pi * R * R
    counts = np.array([sample_ppp(lam, R, s).count for s in range(4000)])
    assert abs(counts.mean() - mean) < 4 * math.sqrt(mean / counts.size)
    # Poisson dispersion
    assert counts.var(ddof=1) / counts.mean() == pytest.approx(1.0, abs=0.1)
    assert np.mean(counts == 0) == pytest.approx(math.exp(-mean), abs=0.01)
    pts = sample_ppp(lam, R, 1)
    assert np.all(pts.r <= R)
    with pytest.raises(ValueError):
        sample_ppp(-1.0, R, 0)


def test_ppp_radial_uniformity():
    r = np.concatenate([sample_ppp(0.05, 10.0, s).r for s in range(300)])
    # r**2 / R**2 is uniform for a homogeneous disk
    assert stats.kstest((r / 10.0) ** 2, "uniform").pvalue > 1e-3


def test_realize_field_shapes():
    model = NetworkModel(0.01, 0.02, 4.0, out_cluster_tx_prob=0.5, tiers=(TierConfig(0.01, 0.5, 2.0),))
    f = realize_field(model, 30.0, 3)
    assert f.tx_active.shape == f.tx_fading.shape == (f.tx_xy.shape[0],)
    assert len(f.tier_xy) == 1


def test_block_rng_independent_streams():
    a = block_rng(1, 0).random(4)
    assert np.array_equal(a, block_rng(1, 0).random(4))
    assert not np.array_equal(a, block_rng(1, 1).random(4))
    assert not np.array_equal(a, block_rng(1, 0, stream=1).random(4))


def test_wilson():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0 < hi < 0.1
    lo, hi = wilson_interval(np.array([50]), 100)
    assert lo[0] < 0.5 < hi[0]


def test_window_rule():
    R = window_for_guard(5.0, 4.0)
    tail = R ** -2
    inside = 5.0 ** -2 - R ** -2
    assert tail / inside == pytest.approx(1e-3, rel=1e-9)
    assert auto_window(1.0, 4.0, 100.0) == 500.0


# -- Laplace and d_K ------------------------------------------------------------


@pytest.mark.parametrize("guard", [0.0, 3.0])
def test_empirical_laplace_matches_closed_form(guard):
    sim = SimConfig(trials=40_000, master_seed=5)
    for s in (0.0, 1.0, 20.0):
        emp, se = empirical_laplace(0.01, 1.0, guard, 4.0, s, sim, return_stderr=True)
        exact = interference_laplace(s, 0.01, 1.0, guard, 4.0)
        assert abs(emp - exact) <= 4 * se + 2e-4
    assert empirical_laplace(0.01, 1.0, 3.0, 4.0, 0.0, sim) == 1.0


def test_kth_distance_distribution():
    sim = SimConfig(trials=20_000, master_seed=2)
    d = sample_kth_distance(0.01, 3, sim)
    res = stats.kstest(d, lambda r: np.array([kth_neighbor_cdf(x, 0.01, 3) for x in np.atleast_1d(r)]))
    assert res.pvalue > 1e-3
    assert d.mean() == pytest.approx(mean_kth_distance(0.01, 3), rel=0.02)


# -- link simulator ---------------------------------------------------------------


def _fixed_case(K=2):
    model = NetworkModel(
        0.01, 0.01, 4.0, out_cluster_tx_prob=0.5, in_cluster=InClusterAvailability([0.3, 0.6][:K])
    )
    return model, ClusterGeometry([5.0, 10.0][:K], 4.0)


def test_low_threshold_equals_one_minus_outage():
    model, g = _fixed_case()
    sim = SimConfig(trials=20_000, theta_grid=(1e-12,), master_seed=4)
    est = simulate_link_ccdf(model, g, sim)
    assert est.contains([1 - 0.3 * 0.6])[0]


def test_no_interference_no_noise():
    model = NetworkModel(0.01, 0.01, 4.0, out_cluster_tx_prob=1e-12, in_cluster=InClusterAvailability([0.25]))
    sim = SimConfig(trials=20_000, theta_grid=(0.1, 1.0, 10.0), master_seed=8)
    est = simulate_link_ccdf(model, ClusterGeometry([4.0], 4.0), sim)
    # only availability matters; all thresholds succeed together
    assert np.all(est.contains([0.75, 0.75, 0.75]))


def test_worker_and_numba_invariance():
    model, g = _fixed_case()
    base = SimConfig(trials=3000, theta_grid=(0.5, 2.0), master_seed=9, block_size=400)
    a = simulate_link_ccdf(model, g, base)
    b = simulate_link_ccdf(model, g, SimConfig(**{**base.__dict__, "workers": 3}))
    assert np.array_equal(a.successes, b.successes)
    c = simulate_link_ccdf(model, [0.5, 1.0], SimConfig(**{**base.__dict__, "workers": 2}))
    d = simulate_link_ccdf(model, [0.5, 1.0], base)
    assert np.array_equal(c.successes, d.successes)


def test_window_doubling_stable():
    model, g = _fixed_case()
    R = auto_window(10.0, 4.0, 10.0)
    kw = dict(trials=30_000, theta_grid=(1.0,), master_seed=12)
    a = simulate_link_ccdf(model, g, SimConfig(window_radius=R, **kw))
    b = simulate_link_ccdf(model, g, SimConfig(window_radius=2 * R, **kw))
    se = math.hypot(a.std_error[0], b.std_error[0])
    assert abs(a.success_freq[0] - b.success_freq[0]) <= 4 * se


def test_trajectory_indicators_tx_freq():
    prof = EnergyProfile(0.5, 2, 0.8)
    p = transmission_probability(prof)
    model = NetworkModel(0.01, 0.01, 4.0, out_cluster_tx_prob=p, in_cluster=InClusterAvailability([1 - p]))
    sim = SimConfig(trials=20_000, theta_grid=(1.0,), steady_state_indicators=False, block_size=5000)
    est = simulate_link_ccdf(model, ClusterGeometry([8.0], 4.0), sim, profiles=prof)
    assert est.meta["in_cluster_tx_freq"][0] == pytest.approx(p, abs=0.02)
    with pytest.raises(ValueError):
        simulate_link_ccdf(model, ClusterGeometry([8.0], 4.0), sim)


def test_unconditioned_matches_theorem2_k1():
    q = 0.4
    model = NetworkModel(0.01, 0.01, 4.0, out_cluster_tx_prob=1 - q)
    thetas = (0.1, 1.0, 10.0)
    sim = SimConfig(trials=20_000, theta_grid=thetas, master_seed=21)
    est = simulate_link_ccdf(model, [1.0], sim)
    exact = [link_ccdf_theorem2(model, [1.0], 1, q, t) for t in thetas]
    assert np.all(np.abs(est.success_freq - exact) <= 0.015)


def test_input_validation():
    model, g = _fixed_case()
    with pytest.raises(ValueError):
        simulate_link_ccdf(model, [0.5, 0.9], SimConfig(trials=10))
    with pytest.raises(ValueError):
        simulate_link_ccdf(model, ClusterGeometry([5.0], 4.0), SimConfig(trials=10))
    with pytest.raises(ValueError):
        SimConfig(cluster_source="other")


def test_access_k1_near_series_and_overall_bounded():
    from ehcoop.analytic import cluster_access_series

    model = NetworkModel(0.01, 0.002, 4.0, out_cluster_tx_prob=1.0)
    sim = SimConfig(trials=6000, master_seed=3)
    est = simulate_cluster_access(model, 1, sim)
    assert abs(est.success_freq[0] - cluster_access_series(5.0)) <= 0.03
    q = 0.3
    model = NetworkModel(0.01, 0.002, 4.0, out_cluster_tx_prob=1 - q)
    sim = SimConfig(trials=4000, theta_grid=(1e-12, 1.0), master_seed=3)
    joint = simulate_overall_success(model, 1, sim, omega=[1.0])
    assert joint.success_freq[1] <= joint.success_freq[0] <= joint.meta["access_freq"]
    assert joint.success_freq[0] == pytest.approx(joint.meta["access_freq"] * (1 - q), abs=0.03)


# -- kernel parity ------------------------------------------------------------------


def _csr_block(rng, n=40, lam=30):
    counts = rng.poisson(lam, n)
    m = int(counts.sum())
    return counts, m


def test_kernel_parity():
    rng = np.random.default_rng(0)
    counts, m = _csr_block(rng)
    u, fad, g2 = rng.random(m), rng.standard_exponential(m), rng.uniform(1, 4, counts.size)
    ref = kernels._annulus_interference_loop(counts, u, fad, g2, 400.0, 2.0, 1.5)
    np.testing.assert_allclose(kernels._annulus_interference_numpy(counts, u, fad, g2, 400.0, 2.0, 1.5), ref, rtol=1e-12)
    np.testing.assert_allclose(kernels._annulus_interference_jit(counts, u, fad, g2, 400.0, 2.0, 1.5), ref, rtol=1e-12)

    r2 = rng.uniform(0, 400, m)
    act = rng.random(m)
    for a, p in ((np.empty(0), 1.0), (act, 0.4)):
        near_l, i_l = kernels._field_cluster_loop(counts, r2, fad, a, p, 3, 2.0)
        for fn in (kernels._field_cluster_numpy, kernels._field_cluster_jit):
            near, i = fn(counts, r2, fad, a, p, 3, 2.0)
            np.testing.assert_array_equal(near, near_l)
            np.testing.assert_allclose(i, i_l, rtol=1e-12)

    tc, _ = _csr_block(rng, 20, 25)
    uc, _ = _csr_block(rng, 20, 60)
    txy = rng.uniform(-10, 10, (int(tc.sum()), 2))
    uxy = rng.uniform(-10, 10, (int(uc.sum()), 2))
    ref = kernels._count_candidates_loop(tc, txy, uc, uxy, 2, 3.0)
    np.testing.assert_array_equal(kernels._count_candidates_numpy(tc, txy, uc, uxy, 2, 3.0), ref)
    np.testing.assert_array_equal(kernels._count_candidates_jit(tc, txy, uc, uxy, 2, 3.0), ref)
