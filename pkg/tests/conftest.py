"""Independent oracles shared by the test modules."""

import itertools
import math

import numpy as np
import pytest
from scipy import integrate, linalg


def hypoexp_ccdf(rates, x):
    """``Pr[sum of independent Exp(rate_i) > x]`` via the phase-type matrix exponential."""
    k = len(rates)
    if k == 0:
        return 0.0
    T = np.zeros((k, k))
    for i, r in enumerate(rates):
        T[i, i] = -r
        if i + 1 < k:
            T[i, i + 1] = r
    return float(linalg.expm(T * x)[0].sum())


def subset_ccdf(omega_eta, q_list, x):
    """CCDF of ``sum_i 1_i X_i`` with ``X_i ~ Exp(omega_i**eta)`` by enumerating activity patterns."""
    total = 0.0
    for pattern in itertools.product((0, 1), repeat=len(q_list)):
        w = math.prod((1 - q) if a else q for a, q in zip(pattern, q_list))
        if w == 0.0:
            continue
        rates = [r for a, r in zip(pattern, omega_eta) if a]
        total += w * hypoexp_ccdf(rates, x)
    return total


def pathloss_quad(t1, t2):
    """``2 * int_1^inf x / (1 + x**t2 / t1) dx``, split at the knee for accuracy."""
    if t1 == 0:
        return 0.0
    f = lambda x: x / (1.0 + x**t2 / t1)
    knee = max(1.0, t1 ** (1.0 / t2))
    a = integrate.quad(f, 1.0, knee, epsabs=0, epsrel=1e-13, limit=200)[0] if knee > 1 else 0.0
    b = integrate.quad(f, knee, np.inf, epsabs=0, epsrel=1e-13, limit=200)[0]
    return 2.0 * (a + b)


def elementary_brute(values):
    K = len(values)
    return [sum(math.prod(c) for c in itertools.combinations(values, j)) for j in range(K + 1)]


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)
