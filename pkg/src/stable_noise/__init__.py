"""
α稳定噪声仿真核心

稳定分布采样、统一的 SNR 定义与噪声缩放、香农容量，以及两条仿真管道共用的基础设施。
"""

__version__ = "1.0.0"
__description__ = "Alpha-stable noise at matched SNR: BER curves and classifier accuracy-drop curves"

from .errors import StableNoiseError, ParameterDomainError
from .rng import derive_seed
from .stable import StableParams, sample, tail_fraction
from .reference import ReferenceKind, ReferenceDistribution, reference_cdf, ks_statistic, matching_reference
from .snr import SNR_INF, as_image, power, snr_db, scale_to_snr, shannon_capacity, db_to_linear, linear_to_db
from .curves import SweepCurve, SweepPoint
from .config_manager import ConfigManager, get_config

__all__ = [
    "StableNoiseError",
    "ParameterDomainError",
    "derive_seed",
    "StableParams",
    "sample",
    "tail_fraction",
    "ReferenceKind",
    "ReferenceDistribution",
    "reference_cdf",
    "ks_statistic",
    "matching_reference",
    "SNR_INF",
    "as_image",
    "power",
    "snr_db",
    "scale_to_snr",
    "shannon_capacity",
    "db_to_linear",
    "linear_to_db",
    "SweepCurve",
    "SweepPoint",
    "ConfigManager",
    "get_config",
]
