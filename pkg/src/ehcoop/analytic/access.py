"""Cluster access probability and the overall (selected and decoded) success probability."""

import math
from typing import Sequence

from .link import _averaged_sum
from .model import NetworkModel

SERIES_TOL = 1e-12
SERIES_MAX_TERMS = 500
_SHAPE = 3.5


def cluster_access_series(beta: float, terms: int = SERIES_MAX_TERMS) -> float:
    """Non-cooperative access probability from the Voronoi-cell user-count law.

    Sums ``E[1/n]`` over the candidate count with the gamma-approximated cell
    area, stopping once a term drops below 1e-12 or after ``terms`` terms.
    """
    if not beta > 0:
        raise ValueError("beta must be > 0")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    a = _SHAPE
    inv = 1.0 / beta
    log_head = a * math.log(a) - math.lgamma(a)
    log_base = math.log(a + inv)
    total = 0.0
    for i in range(1, min(terms, SERIES_MAX_TERMS) + 1):
        log_term = log_head - math.lgamma(i + 1) + math.lgamma(i + a) - (i - 1) * math.log(beta) - (i + a) * log_base
        term = math.exp(log_term)
        total += term
        if term < SERIES_TOL:
            break
    return total


def fit_constants(K: int) -> tuple:
    """Curve-fit constants ``(C1, C2)`` of the access approximation."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if K == 1:
        return 0.725, 0.0
    return 0.06 * K + 0.78, 0.34 * K - 0.49


def access_penalty(K: int, beta: float) -> float:
    c1, c2 = fit_constants(K)
    return c1 / (beta + c2)


def cluster_access_approx(K: int, beta: float) -> float:
    if not beta > 0:
        raise ValueError("beta must be > 0")
    if math.isinf(beta):
        return 1.0
    return (1.0 + access_penalty(K, beta)) ** (-K)


def overall_success_theorem3(model: NetworkModel, omega: Sequence[float], K: int, q_tr: float, theta: float, beta: float = None) -> float:
    """Joint probability of winning cluster access and decoding above ``theta``.

    ``beta`` defaults to ``(1 - q_tr) * lambda / lambda_u``; pass ``math.inf``
    to recover the link success probability.
    """
    if beta is None:
        beta = (1.0 - q_tr) * model.tx_intensity / model.rx_intensity
    extra = 0.0 if math.isinf(beta) else access_penalty(K, beta)
    return _averaged_sum(model, omega, K, q_tr, theta, extra)
