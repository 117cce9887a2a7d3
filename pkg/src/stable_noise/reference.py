"""
Closed-form reference CDFs and the Kolmogorov–Smirnov statistic
特例分布的闭式 CDF 与 KS 统计量

α=2 (高斯)、α=1 (柯西)、α=0.5,β=1 (Lévy) 三个特例是采样器的检验基准。
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
import scipy.stats

from .errors import EmptyInputError, ParameterDomainError
from .stable import StableParams


class ReferenceKind(Enum):
    """闭式分布类型"""
    GAUSSIAN = "gaussian"
    CAUCHY = "cauchy"
    LEVY = "levy"


@dataclass(frozen=True)
class ReferenceDistribution:
    """
    闭式参考分布

    gaussian 使用 (location=μ, scale=σ)，cauchy / levy 使用 (location=δ, scale=γ)。
    """
    kind: ReferenceKind
    location: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise ParameterDomainError(f"scale 必须满足 scale > 0，当前为 {self.scale}")

    def _frozen(self):
        if self.kind is ReferenceKind.GAUSSIAN:
            return scipy.stats.norm(loc=self.location, scale=self.scale)
        if self.kind is ReferenceKind.CAUCHY:
            return scipy.stats.cauchy(loc=self.location, scale=self.scale)
        return scipy.stats.levy(loc=self.location, scale=self.scale)

    def cdf(self, x):
        return self._frozen().cdf(x)

    def ppf(self, q):
        return self._frozen().ppf(q)


def reference_cdf(kind: ReferenceKind, x, location: float = 0.0, scale: float = 1.0):
    """闭式 CDF 值，标量输入返回 float"""
    value = ReferenceDistribution(ReferenceKind(kind), location, scale).cdf(x)
    return float(value) if np.ndim(value) == 0 else value


def matching_reference(params: StableParams) -> Optional[ReferenceDistribution]:
    """
    若参数落在有闭式解的特例上，返回对应参考分布

    S(2,0;γ,δ) 是均值 δ、标准差 √2·γ 的正态分布。
    """
    if params.alpha == 2.0:
        return ReferenceDistribution(ReferenceKind.GAUSSIAN, params.location, math.sqrt(2.0) * params.scale)
    if params.alpha == 1.0 and params.beta == 0.0:
        return ReferenceDistribution(ReferenceKind.CAUCHY, params.location, params.scale)
    if params.alpha == 0.5 and params.beta == 1.0:
        return ReferenceDistribution(ReferenceKind.LEVY, params.location, params.scale)
    return None


def ks_statistic(samples, cdf: Callable) -> float:
    """
    经验 CDF 与参考 CDF 的上确界距离

    Args:
        samples: 样本序列
        cdf: 参考 CDF（ReferenceDistribution 或可调用对象）

    Returns:
        [0, 1] 内的 KS 统计量
    """
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size == 0:
        raise EmptyInputError("ks_statistic 需要非空样本")
    func = cdf.cdf if isinstance(cdf, ReferenceDistribution) else cdf
    return float(scipy.stats.kstest(samples, func).statistic)
