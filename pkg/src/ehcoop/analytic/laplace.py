import math

from ..specfun import gamma_fn, pathloss_functional, reg_upper_inc_gamma


def interference_laplace(s: float, intensity_eff: float, power: float, guard_radius: float, eta: float) -> float:
    """``E[exp(-s I)]`` for Rayleigh-faded PPP interference outside a guard disk.

    ``intensity_eff`` is the density of active interferers. With
    ``guard_radius = 0`` the closed form ``exp(-pi lambda G(1+2/eta)G(1-2/eta) (P s)**(2/eta))``
    applies.
    """
    if not eta > 2:
        raise ValueError(f"eta must exceed 2, got {eta!r}")
    if s < 0 or intensity_eff < 0 or guard_radius < 0:
        raise ValueError("s, intensity_eff and guard_radius must be non-negative")
    if s == 0 or intensity_eff == 0:
        return 1.0
    if guard_radius == 0:
        gg = gamma_fn(1 + 2 / eta) * gamma_fn(1 - 2 / eta)
        return math.exp(-math.pi * intensity_eff * gg * (power * s) ** (2 / eta))
    g = guard_radius
    return math.exp(-math.pi * intensity_eff * g**2 * pathloss_functional(s * power / g**eta, eta))


def kth_neighbor_pdf(r: float, intensity_eff: float, K: int) -> float:
    """Density of the distance to the K-th nearest point of a planar PPP."""
    if not r > 0 or not intensity_eff > 0:
        raise ValueError("r and intensity_eff must be positive")
    x = intensity_eff * math.pi * r * r
    return math.exp(math.log(2.0 / r) + K * math.log(x) - x - math.lgamma(K))


def kth_neighbor_cdf(r: float, intensity_eff: float, K: int) -> float:
    """``Pr[d_K <= r] = 1 - Q(K, lambda pi r**2)``."""
    if r <= 0:
        return 0.0
    return 1.0 - reg_upper_inc_gamma(K, intensity_eff * math.pi * r * r)
