"""Isometry invariants of finite point clouds and metric-measure spaces."""

from .core import (Cloud, CloudError, MetricViolationError, ToleranceConfig,
                   cloud_from_coordinates, cloud_from_matrix, validate_metric)
from .invariants import SDD, amd, canonicalize, pdd, rdd, sdd, sdm
from .metrics import compare, lipschitz_check, m_inf, sdd_dist_emd, sdd_dist_lac
from .mmspace import wsd, wsd_dist_emd, wsd_dist_lac

__all__ = [
    "Cloud", "CloudError", "MetricViolationError", "ToleranceConfig",
    "cloud_from_coordinates", "cloud_from_matrix", "validate_metric",
    "SDD", "amd", "canonicalize", "pdd", "rdd", "sdd", "sdm",
    "compare", "lipschitz_check", "m_inf", "sdd_dist_emd", "sdd_dist_lac",
    "wsd", "wsd_dist_emd", "wsd_dist_lac",
]
