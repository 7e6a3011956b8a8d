"""Monte Carlo oracle for the closed-form results."""

from .access import simulate_cluster_access, simulate_overall_success
from .fields import FieldRealization, PointSet, auto_window, block_rng, realize_field, sample_ppp
from .laplace import empirical_laplace, sample_kth_distance
from .link import simulate_link_ccdf
from .stats import CI_LEVEL, CLUSTER_SOURCES, EmpiricalEstimate, SimConfig, wilson_interval

__all__ = [
    "CI_LEVEL",
    "CLUSTER_SOURCES",
    "EmpiricalEstimate",
    "FieldRealization",
    "PointSet",
    "SimConfig",
    "auto_window",
    "block_rng",
    "empirical_laplace",
    "realize_field",
    "sample_kth_distance",
    "sample_ppp",
    "simulate_cluster_access",
    "simulate_link_ccdf",
    "simulate_overall_success",
    "wilson_interval",
]
