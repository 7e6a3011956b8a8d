import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from ehcoop.analytic import (
    NetworkModel,
    TierConfig,
    asymptotic_outage,
    cluster_access_approx,
    cluster_access_series,
    curve,
    dbm_to_linear,
    distinct_weights,
    interference_laplace,
    kth_neighbor_cdf,
    kth_neighbor_pdf,
    link_ccdf_prop1,
    link_ccdf_theorem1,
    link_ccdf_theorem2,
    link_ccdf_uniform,
    outage_floor_infinite_buffer,
    overall_success_theorem3,
    partial_fraction_coeff,
    sk_ccdf,
)
from ehcoop.analytic.sk import MAX_CLUSTER, compositions
from ehcoop.energy import EnergyProfile, transmission_probability
from ehcoop.geometry import ClusterGeometry, InClusterAvailability
from ehcoop.specfun import pathloss_functional

from conftest import subset_ccdf

THETAS = 10 ** (np.arange(-20, 21, 2) / 10)


def fig2_model(K, distances=(5, 10, 10, 10)):
    ptr = [transmission_probability(EnergyProfile(r, 2, 0.7)) for r in (0.4, 0.45, 0.5, 0.55)]
    model = NetworkModel(
        0.01,
        0.01,
        4.0,
        noise=dbm_to_linear(-114),
        out_cluster_tx_prob=ptr[3],
        tiers=(TierConfig(0.01, 0.53, 2.0),),
        in_cluster=InClusterAvailability([1 - p for p in ptr[:K]]),
    )
    return model, ClusterGeometry(distances[:K], 4.0)


def test_model_validation():
    with pytest.raises(ValueError):
        NetworkModel(0.01, 0.01, 2.0)
    with pytest.raises(ValueError):
        NetworkModel(0.0, 0.01, 4.0)
    with pytest.raises(ValueError):
        TierConfig(0.01, 0.0, 1.0)
    assert dbm_to_linear(-114) == pytest.approx(3.98107e-15, rel=1e-5)


# -- S_K ----------------------------------------------------------------------


def test_sk_examples():
    g = ClusterGeometry([3.0], 4.0)
    assert sk_ccdf(g, InClusterAvailability([0.3]), 0.0) == pytest.approx(0.7)
    a, b = 0.2, 1.0
    g2 = ClusterGeometry.from_normalized([a ** 0.25, 1.0], 4.0)
    for x in (0.1, 1.0, 3.0):
        expected = (b * math.exp(-a * x) - a * math.exp(-b * x)) / (b - a)
        assert sk_ccdf(g2, InClusterAvailability([0.0, 0.0]), x) == pytest.approx(expected, rel=1e-10)
    g3 = ClusterGeometry([5, 10, 10], 4.0)
    q = [0.4, 0.5, 0.6]
    assert sk_ccdf(g3, InClusterAvailability(q), 2.0) == pytest.approx(subset_ccdf(g3.omega_eta, q, 2.0), abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 5),
    st.booleans(),
    st.integers(0, 2**31),
)
def test_sk_matches_subset_oracle(K, repeated, seed):
    rng = np.random.default_rng(seed)
    if repeated:
        d = rng.choice([4.0, 7.0, 10.0], size=K)
    else:
        d = rng.uniform(2.0, 10.0, size=K)
    g = ClusterGeometry(d, float(rng.choice([3.0, 4.0])))
    q = rng.uniform(0.0, 0.9, size=K)
    avail = InClusterAvailability(q)
    for x in (0.0, 0.05, 0.5, 2.0, 8.0):
        assert sk_ccdf(g, avail, x) == pytest.approx(subset_ccdf(g.omega_eta, q, x), abs=1e-8)


def test_partial_fraction_single_value():
    for n in (1, 2, 4):
        for m in range(n):
            assert partial_fraction_coeff(m, [0.7], [n], 0, n) == pytest.approx(0.7 ** (m - n))


def test_partial_fraction_distinct_matches_ratio_form():
    w = np.array([0.1, 0.4, 1.0])
    for j in range(3):
        for m in range(3):
            ratio = w[j] ** m / (w[j] * np.prod([w[l] - w[j] for l in range(3) if l != j]))
            assert partial_fraction_coeff(m, w, [1, 1, 1], j, 1) == pytest.approx(ratio, rel=1e-12)


def test_compositions_count():
    assert sorted(compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert len(list(compositions(3, 3))) == 10


def test_cluster_size_cap():
    g = ClusterGeometry(np.linspace(1, 2, MAX_CLUSTER + 1), 4.0)
    with pytest.raises(ValueError):
        sk_ccdf(g, InClusterAvailability([0.5] * (MAX_CLUSTER + 1)), 1.0)


# -- general and distinct geometries ----------------------------------------------


@pytest.mark.parametrize("K", [1, 2, 3, 4])
def test_theorem1_low_threshold_limit(K):
    model, g = fig2_model(K)
    G = asymptotic_outage(model.in_cluster)
    # interference enters at order sqrt(theta)
    assert link_ccdf_theorem1(model, g, 1e-18) == pytest.approx(1 - G, abs=1e-6)


def test_theorem1_curves_valid():
    for K in (1, 2, 3, 4):
        model, g = fig2_model(K)
        c = curve(link_ccdf_theorem1, THETAS, model, g)
        assert c.is_monotone()
        assert np.all((c.values >= 0) & (c.values <= 1))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31))
def test_theorem1_equals_prop1_on_distinct(K, seed):
    rng = np.random.default_rng(seed)
    d = np.sort(rng.uniform(3.0, 20.0, size=K))
    if K > 1 and np.min(np.diff(d ** 4) / d[1:] ** 4) < 1e-3:
        return
    model, _ = fig2_model(1)
    model = model.with_(in_cluster=InClusterAvailability(rng.uniform(0.05, 0.9, size=K)))
    g = ClusterGeometry(d, 4.0)
    for t in (0.01, 1.0, 10.0):
        assert link_ccdf_theorem1(model, g, t) == pytest.approx(link_ccdf_prop1(model, g, t), abs=1e-12)


def test_prop1_examples():
    model, g = fig2_model(4, (10, 12, 14, 16))
    G = asymptotic_outage(model.in_cluster)
    assert link_ccdf_prop1(model, g, 0.0) == pytest.approx(1 - G, abs=1e-12)
    # K = 1 hand reduction
    m1, g1 = fig2_model(1, (10,))
    q = m1.in_cluster.q_list[0]
    t = 2.0
    tier = m1.tiers[0]
    gg = math.gamma(1.5) * math.gamma(0.5)
    d = 10.0
    expected = (
        (1 - q)
        * math.exp(-(d**4) * t * m1.noise)
        * math.exp(-math.pi * m1.out_cluster_tx_prob * m1.tx_intensity * d**2 * pathloss_functional(t, 4.0))
        * math.exp(-math.pi * tier.tx_prob * tier.intensity * d**2 * gg * (t * tier.power) ** 0.5)
    )
    assert link_ccdf_prop1(m1, g1, t) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        link_ccdf_prop1(*fig2_model(4), 1.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.floats(0.0, 0.9), st.integers(0, 2**31))
def test_uniform_weights_equal_distinct_weights(K, q, seed):
    rng = np.random.default_rng(seed)
    w = np.sort(rng.uniform(0.05, 1.0, size=K))
    w[-1] = 1.0
    if K > 1 and np.min(np.diff(w)) < 1e-3:
        return
    model, _ = fig2_model(1)
    g = ClusterGeometry.from_normalized(w, 4.0, d_K=12.0)
    mu = model.with_(in_cluster=InClusterAvailability.uniform(q, K))
    for t in (0.0, 0.3, 5.0):
        assert link_ccdf_uniform(model, g, q, t) == pytest.approx(link_ccdf_prop1(mu, g, t), abs=1e-12)


# -- averaged geometry and overall success ---------------------------------------


def test_theorem2_examples():
    m = NetworkModel(0.01, 0.01, 4.0)
    assert link_ccdf_theorem2(m, [1.0], 1, 0.0, 1.0) == pytest.approx(1 / (1 + math.pi / 4), rel=1e-12)
    q = 0.3
    for t in (0.1, 1.0, 10.0):
        expected = (1 - q) / (1 + pathloss_functional(t, 4.0))
        assert link_ccdf_theorem2(m, [1.0], 1, q, t) == pytest.approx(expected, rel=1e-12)


def test_theorem2_intensity_invariance_and_monotone_with_tiers():
    q = 1 - transmission_probability(EnergyProfile(0.75, 2, 0.8))
    for omega, K in (([1.0], 1), ([0.5, 1.0], 2)):
        a = [link_ccdf_theorem2(NetworkModel(0.01, 0.01, 4.0, out_cluster_tx_prob=1 - q), omega, K, q, t) for t in THETAS]
        b = [link_ccdf_theorem2(NetworkModel(0.1, 0.1, 4.0, out_cluster_tx_prob=1 - q), omega, K, q, t) for t in THETAS]
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-14)
    tiers = (TierConfig(0.05, 0.5, 2.0),)
    vals = [link_ccdf_theorem2(NetworkModel(lam, lam, 4.0, out_cluster_tx_prob=1 - q, tiers=tiers), [0.5, 1.0], 2, q, 1.0) for lam in (0.01, 0.05, 0.1, 1.0)]
    assert np.all(np.diff(vals) >= -1e-15)


def test_theorem2_tie_perturbed(caplog):
    m = NetworkModel(0.01, 0.01, 4.0)
    with caplog.at_level("WARNING"):
        v = link_ccdf_theorem2(m, [1.0, 1.0], 2, 0.3, 1.0)
    assert "perturbed" in caplog.text
    w = link_ccdf_theorem2(m, [1.0 - 1e-4, 1.0], 2, 0.3, 1.0)
    assert v == pytest.approx(w, abs=1e-3)


def test_theorem3_limits():
    q = 1 - transmission_probability(EnergyProfile(0.5, 2, 0.8))
    m = NetworkModel(0.01, 0.01, 4.0, out_cluster_tx_prob=1 - q)
    for K, omega in ((1, [1.0]), (2, [0.5, 1.0]), (3, [0.3, 0.6, 1.0])):
        for beta in (1.0, 5.0, 20.0):
            lim = cluster_access_approx(K, beta) * (1 - q**K)
            assert overall_success_theorem3(m, omega, K, q, 1e-12, beta=beta) == pytest.approx(lim, abs=1e-4)
            for t in (0.1, 1.0, 10.0):
                assert overall_success_theorem3(m, omega, K, q, t, beta=beta) <= link_ccdf_theorem2(m, omega, K, q, t) + 1e-15
        for t in (0.1, 1.0):
            assert overall_success_theorem3(m, omega, K, q, t, beta=1e9) == pytest.approx(link_ccdf_theorem2(m, omega, K, q, t), abs=1e-6)
            assert overall_success_theorem3(m, omega, K, q, t, beta=math.inf) == link_ccdf_theorem2(m, omega, K, q, t)


# -- access ------------------------------------------------------------------------


def test_access_values():
    assert cluster_access_approx(1, 5.0) == pytest.approx(0.87336, abs=1e-5)
    assert cluster_access_approx(3, 5.0) == pytest.approx((1 + 0.96 / 5.53) ** -3, rel=1e-12)
    assert cluster_access_approx(3, 5.0) == pytest.approx(0.6186, abs=1e-4)
    for K in (1, 2, 5):
        assert cluster_access_approx(K, math.inf) == 1.0
        assert cluster_access_approx(K, 1e9) == pytest.approx(1.0, abs=1e-7)
    assert cluster_access_series(1e6) == pytest.approx(1.0, abs=1e-5)
    assert abs(cluster_access_series(5.0) - cluster_access_approx(1, 5.0)) <= 0.02


@given(st.floats(0.5, 100.0), st.floats(1.01, 3.0))
def test_access_increasing_in_beta(beta, factor):
    assert cluster_access_series(beta * factor) >= cluster_access_series(beta)
    for K in (1, 2, 3, 5):
        assert cluster_access_approx(K, beta * factor) >= cluster_access_approx(K, beta)


# -- floors and outage ----------------------------------------------------------------


def test_outage_values():
    assert asymptotic_outage(InClusterAvailability.uniform(0.5, 3)) == 0.125
    assert asymptotic_outage(InClusterAvailability.uniform(0.25, 2)) == pytest.approx(0.0625)
    assert asymptotic_outage(InClusterAvailability([0.4])) == 0.4
    m = NetworkModel(0.01, 0.01, 4.0)
    assert outage_floor_infinite_buffer(m, [0.3, 0.6, 1.0], 3, 0.75, 0.8, 1e-12) == pytest.approx(0.015625, abs=1e-9)
    for K, omega in ((1, [1.0]), (2, [0.5, 1.0])):
        assert outage_floor_infinite_buffer(m, omega, K, 0.6, 0.8, 1e-12) == pytest.approx(0.4**K, abs=1e-9)
    with pytest.raises(ValueError):
        outage_floor_infinite_buffer(m, [1.0], 1, 0.9, 0.8, 1.0)


def test_floor_matches_large_buffer():
    for K in (1, 2, 3):
        q100 = 1 - transmission_probability(EnergyProfile(0.75, 100, 0.8))
        assert abs(q100**K - 0.25**K) <= 1e-3


# -- Laplace and d_K -------------------------------------------------------------------


def test_laplace_forms():
    assert interference_laplace(0.0, 0.01, 2.0, 10.0, 4.0) == 1.0
    a = interference_laplace(1.0, 0.01, 1.0, 1e-4, 4.0)
    b = interference_laplace(1.0, 0.01, 1.0, 0.0, 4.0)
    assert a == pytest.approx(b, rel=1e-6)
    with pytest.raises(ValueError):
        interference_laplace(1.0, 0.01, 1.0, 1.0, 2.0)


@pytest.mark.parametrize("K", [1, 3, 6])
def test_kth_pdf_normalized_and_cdf(K):
    lam = 0.01
    total = integrate.quad(lambda r: kth_neighbor_pdf(r, lam, K), 0, np.inf, epsabs=1e-12, limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-8)
    for r in (3.0, 10.0, 25.0):
        part = integrate.quad(lambda x: kth_neighbor_pdf(x, lam, K), 0, r, epsabs=1e-13)[0]
        assert kth_neighbor_cdf(r, lam, K) == pytest.approx(part, abs=1e-10)


def test_kth_pdf_k1_rayleigh():
    lam = 0.02
    for r in (1.0, 4.0, 9.0):
        assert kth_neighbor_pdf(r, lam, 1) == pytest.approx(2 * math.pi * lam * r * math.exp(-lam * math.pi * r * r), rel=1e-12)
