"""
TSC - кластеризация подпространств пороговым отбором корреляций
"""

__version__ = "0.1"

from .errors import TscError
from .metrics import MetricsReport, clustering_error, estimation_error, feature_detection_error
from .outlier import OutlierReport, cluster_with_outliers, detect_outliers
from .settings import Settings, settings
from .synthgen import BasisModel, CoefficientModel, SyntheticSpec, generate_dataset
from .tsc_core import ClusterResult, TscOptions, tsc_cluster

__all__ = [
    "BasisModel",
    "ClusterResult",
    "clustering_error",
    "cluster_with_outliers",
    "CoefficientModel",
    "detect_outliers",
    "estimation_error",
    "feature_detection_error",
    "generate_dataset",
    "MetricsReport",
    "OutlierReport",
    "Settings",
    "settings",
    "SyntheticSpec",
    "tsc_cluster",
    "TscError",
    "TscOptions",
]
