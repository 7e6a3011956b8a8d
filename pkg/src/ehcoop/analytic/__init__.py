"""Closed-form link, access and overall success probabilities."""

from .access import cluster_access_approx, cluster_access_series, fit_constants, overall_success_theorem3
from .laplace import interference_laplace, kth_neighbor_cdf, kth_neighbor_pdf
from .link import (
    asymptotic_outage,
    curve,
    distinct_weights,
    link_ccdf_prop1,
    link_ccdf_theorem1,
    link_ccdf_theorem2,
    link_ccdf_uniform,
    outage_floor_infinite_buffer,
    uniform_weights,
)
from .model import CcdfCurve, NetworkModel, TierConfig, db_to_linear, dbm_to_linear
from .sk import partial_fraction_coeff, sk_ccdf

__all__ = [
    "CcdfCurve",
    "NetworkModel",
    "TierConfig",
    "asymptotic_outage",
    "cluster_access_approx",
    "cluster_access_series",
    "curve",
    "db_to_linear",
    "dbm_to_linear",
    "distinct_weights",
    "fit_constants",
    "interference_laplace",
    "kth_neighbor_cdf",
    "kth_neighbor_pdf",
    "link_ccdf_prop1",
    "link_ccdf_theorem1",
    "link_ccdf_theorem2",
    "link_ccdf_uniform",
    "outage_floor_infinite_buffer",
    "overall_success_theorem3",
    "partial_fraction_coeff",
    "sk_ccdf",
    "uniform_weights",
]
