"""Scalar special functions used throughout the analytic model.

Only the restricted parameter families the model needs are supported:
integer-order regularized incomplete Gamma, and 2F1(1, b; c; z) on the
negative real axis.
"""

import math

from scipy import integrate

_SERIES_RTOL = 1e-16
_SERIES_MAX_TERMS = 100_000


def gamma_fn(x: float) -> float:
    """Euler Gamma function for positive real arguments."""
    if not x > 0:
        raise ValueError(f"gamma_fn requires x > 0, got {x!r}")
    return math.gamma(x)


def reg_upper_inc_gamma(n: int, x: float) -> float:
    """Regularized upper incomplete Gamma Q(n, x) for integer n >= 1.

    Uses the finite Poisson series ``exp(-x) * sum_{i<n} x**i / i!``.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"reg_upper_inc_gamma requires integer n >= 1, got {n!r}")
    if x < 0:
        raise ValueError(f"reg_upper_inc_gamma requires x >= 0, got {x!r}")
    if x == 0:
        return 1.0
    term = 1.0
    total = 1.0
    for i in range(1, int(n)):
        term *= x / i
        total += term
    return min(1.0, math.exp(-x) * total)


def alzer_bound(n: int, x: float) -> float:
    """Upper bound ``1 - (1 - exp(-c x))**n`` on Q(n, x), with ``c = (n!)**(-1/n)``."""
    if int(n) != n or n < 1:
        raise ValueError(f"alzer_bound requires integer n >= 1, got {n!r}")
    if x < 0:
        raise ValueError(f"alzer_bound requires x >= 0, got {x!r}")
    c = alzer_rate(int(n))
    # -expm1 keeps precision when c*x is tiny
    return 1.0 - (-math.expm1(-c * x)) ** n


def alzer_rate(n: int) -> float:
    """The constant ``(n!)**(-1/n)`` (kappa in the bound)."""
    return math.exp(-math.lgamma(n + 1) / n)


def _series_2f1(a: float, b: float, c: float, z: float) -> float:
    # plain hypergeometric series, caller guarantees |z| < 1
    term = 1.0
    total = 1.0
    k = 0
    while True:
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        k += 1
        if abs(term) < _SERIES_RTOL * abs(total) or term == 0.0:
            return total
        if k > _SERIES_MAX_TERMS:
            raise ArithmeticError("hypergeometric series failed to converge")


def _euler_2f1(b: float, c: float, z: float) -> float:
    # 2F1(1,b;c;z) = B(b,c-b)^-1 * int_0^1 t^(b-1) (1-t)^(c-b-1) / (1 - z t) dt
    log_beta = math.lgamma(b) + math.lgamma(c - b) - math.lgamma(c)
    val, _ = integrate.quad(
        lambda t: t ** (b - 1.0) * (1.0 - t) ** (c - b - 1.0) / (1.0 - z * t),
        0.0,
        1.0,
        epsabs=0.0,
        epsrel=1e-13,
        limit=400,
    )
    return val * math.exp(-log_beta)


def _rgamma(x: float) -> float:
    # 1/Gamma(x), zero at the poles
    if x <= 0 and x == math.floor(x):
        return 0.0
    return 1.0 / math.gamma(x)


def gauss_2f1(b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function 2F1(1, b; c; z) for c > b > 0 and z <= 0.

    For ``-1/2 <= z <= 0`` the defining series is summed directly. On
    ``-3 <= z < -1/2`` the Pfaff transformation maps the argument to
    ``z / (z - 1)`` in ``(1/3, 3/4]``. Below -3 the 1/z connection formula
    is used (b non-integer) or, failing that, the Euler integral.
    """
    if not (c > b > 0):
        raise ValueError(f"gauss_2f1 requires c > b > 0, got b={b!r}, c={c!r}")
    if z > 0:
        raise ValueError(f"gauss_2f1 requires z <= 0, got {z!r}")
    if z == 0:
        return 1.0
    if z >= -0.5:
        return _series_2f1(1.0, b, c, z)
    if z >= -3.0:
        return _series_2f1(1.0, c - b, c, z / (z - 1.0)) / (1.0 - z)
    if abs(b - round(b)) < 1e-12:
        return _euler_2f1(b, c, z)
    # connection formula with a = 1; the a-b and b-a gammas are finite here
    w = 1.0 / z
    mz = -z
    t1 = (
        math.gamma(c) * math.gamma(b - 1.0) * _rgamma(b) * _rgamma(c - 1.0)
        / mz
        * _series_2f1(1.0, 2.0 - c, 2.0 - b, w)
    )
    t2 = (
        math.gamma(c) * math.gamma(1.0 - b) / math.gamma(c - b)
        * mz ** (-b)
        * _series_2f1(b, b - c + 1.0, b, w)
    )
    return t1 + t2


def pathloss_functional(t1: float, t2: float) -> float:
    """Interference functional ``F(t1, t2) = 2 t1/(t2-2) * 2F1(1, 1-2/t2; 2-2/t2; -t1)``.

    Equals ``2 * int_1^inf x / (1 + x**t2 / t1) dx``; ``t2`` is the pathloss
    exponent and must exceed 2.
    """
    if not t2 > 2:
        raise ValueError(f"pathloss exponent must exceed 2, got {t2!r}")
    if t1 < 0:
        raise ValueError(f"pathloss_functional requires t1 >= 0, got {t1!r}")
    if t1 == 0:
        return 0.0
    delta = 2.0 / t2
    return 2.0 * t1 / (t2 - 2.0) * gauss_2f1(1.0 - delta, 2.0 - delta, -t1)
