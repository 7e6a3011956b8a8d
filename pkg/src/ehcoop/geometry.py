"""Cluster geometry bookkeeping and the elementary-symmetric coefficient machinery."""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

MULTIPLICITY_RTOL = 1e-9
# distinct values closer than this are routed to the multiplicity formulas
SNAP_RTOL = 1e-6


@dataclass(frozen=True)
class ClusterGeometry:
    """Serving distances ``d_1 <= ... <= d_K`` and the pathloss exponent."""

    distances: tuple
    eta: float

    def __post_init__(self):
        d = tuple(float(x) for x in self.distances)
        if not d:
            raise ValueError("a cluster needs at least one transmitter")
        if any(not x > 0 for x in d):
            raise ValueError("cluster distances must be positive")
        if not self.eta > 2:
            raise ValueError(f"eta must exceed 2, got {self.eta!r}")
        object.__setattr__(self, "distances", tuple(sorted(d)))

    @classmethod
    def from_normalized(cls, omega: Sequence[float], eta: float, d_K: float = 1.0) -> "ClusterGeometry":
        return cls(tuple(w * d_K for w in omega), eta)

    @property
    def K(self) -> int:
        return len(self.distances)

    @property
    def d_K(self) -> float:
        return self.distances[-1]

    @cached_property
    def omega(self) -> np.ndarray:
        return np.asarray(self.distances) / self.d_K

    @cached_property
    def omega_eta(self) -> np.ndarray:
        return self.omega**self.eta

    @cached_property
    def unique_values(self):
        return group_multiplicities(self)


@dataclass(frozen=True)
class InClusterAvailability:
    """Idle probabilities ``q_tr,i`` of the K serving transmitters."""

    q_list: tuple

    def __post_init__(self):
        q = tuple(float(x) for x in self.q_list)
        if not q:
            raise ValueError("q_list must not be empty")
        if any(not 0 <= x < 1 for x in q):
            raise ValueError("idle probabilities must lie in [0, 1)")
        object.__setattr__(self, "q_list", q)

    @classmethod
    def uniform(cls, q: float, K: int) -> "InClusterAvailability":
        return cls((q,) * K)

    @property
    def K(self) -> int:
        return len(self.q_list)

    @property
    def G(self) -> float:
        return availability_product(self)

    def omega_hat(self, omega_eta: Sequence[float]) -> np.ndarray:
        if len(omega_eta) != self.K:
            raise ValueError("geometry and availability disagree on K")
        q = np.asarray(self.q_list)
        if np.any(q == 0):
            raise ValueError("omega_hat is undefined when some q_tr,i = 0")
        return np.asarray(omega_eta) / q


def group_multiplicities(geometry, rtol: float = MULTIPLICITY_RTOL):
    """Unique values of ``{omega_i**eta}`` with their multiplicities.

    Accepts a ``ClusterGeometry`` or a plain sequence of ``omega**eta`` values.
    Neighbours (after sorting) merge when their relative gap is below ``rtol``;
    a merged group keeps its first value.
    """
    vals = geometry.omega_eta if isinstance(geometry, ClusterGeometry) else np.asarray(geometry, float)
    vals = np.sort(vals)
    uniq: list = []
    counts: list = []
    for x in vals:
        if uniq and abs(x - uniq[-1]) <= rtol * max(abs(x), abs(uniq[-1])):
            counts[-1] += 1
        else:
            uniq.append(float(x))
            counts.append(1)
    return uniq, counts


def elementary_symmetric(values: Sequence[float]) -> np.ndarray:
    """``e_0..e_K`` of ``values`` by the one-pass product recurrence."""
    e = np.zeros(len(values) + 1)
    e[0] = 1.0
    for j, x in enumerate(values, start=1):
        e[1 : j + 1] = e[1 : j + 1] + x * e[0:j]
    return e


def alpha_coefficients(values: Sequence[float]) -> np.ndarray:
    """``alpha_i = (-1)**i * e_{K-i}(values)`` for ``i = 0..K-1``."""
    K = len(values)
    e = elementary_symmetric(values)
    i = np.arange(K)
    return (-1.0) ** i * e[K - i]


def scaled_hat_alpha(omega_eta: Sequence[float], q_list: Sequence[float]) -> np.ndarray:
    """``G * alpha_i(omega_hat)`` without dividing by any ``q``.

    ``G * e_{K-i}(omega**eta / q)`` is the coefficient of ``t**i`` in
    ``prod_j (omega_j**eta + q_j t)``, which stays finite as some ``q -> 0``.
    """
    K = len(omega_eta)
    poly = np.zeros(K + 1)
    poly[0] = 1.0
    for j, (w, q) in enumerate(zip(omega_eta, q_list), start=1):
        nxt = w * poly
        nxt[1 : j + 1] += q * poly[0:j]
        poly = nxt
    i = np.arange(K)
    return (-1.0) ** i * poly[:K]


def availability_product(avail: InClusterAvailability) -> float:
    """Probability that no serving transmitter is active."""
    return float(np.prod(avail.q_list))
