"""
Alpha-stable sampler
α稳定分布采样

1-参数化 S(α, β; γ, δ) 下的 Chambers–Mallows–Stuck 变换。
第 i 个样本只依赖 (params, seed, i)：计数器 2i 给出均匀角度，2i+1 给出指数变量。
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterDomainError
from .rng import uniform_open


@dataclass(frozen=True)
class StableParams:
    """稳定分布参数 (α, β, γ, δ)"""
    alpha: float
    beta: float = 0.0
    scale: float = 1.0
    location: float = 0.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """校验参数域，错误信息指明越界的约束"""
        if not (math.isfinite(self.alpha) and 0.0 < self.alpha <= 2.0):
            raise ParameterDomainError(f"alpha 必须满足 0 < alpha <= 2，当前为 {self.alpha}")
        if not (math.isfinite(self.beta) and -1.0 <= self.beta <= 1.0):
            raise ParameterDomainError(f"beta 必须满足 -1 <= beta <= 1，当前为 {self.beta}")
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise ParameterDomainError(f"scale 必须满足 scale > 0，当前为 {self.scale}")
        if not math.isfinite(self.location):
            raise ParameterDomainError(f"location 必须为有限值，当前为 {self.location}")


def _cms_standard(alpha: float, beta: float, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """标准化 S(α, β; 1, 0) 的 CMS 变换"""
    if alpha == 1.0:
        half_pi = math.pi / 2.0
        bv = half_pi + beta * v
        if beta == 0.0:
            return np.tan(v)
        return (2.0 / math.pi) * (bv * np.tan(v) - beta * np.log(half_pi * w * np.cos(v) / bv))

    zeta = beta * math.tan(math.pi * alpha / 2.0)
    b = math.atan(zeta) / alpha
    s = (1.0 + zeta * zeta) ** (1.0 / (2.0 * alpha))
    avb = alpha * (v + b)
    return (
        s * np.sin(avb) / np.cos(v) ** (1.0 / alpha)
        * (np.cos(v - avb) / w) ** ((1.0 - alpha) / alpha)
    )


def sample(params: StableParams, n: int, seed: int, offset: int = 0) -> np.ndarray:
    """
    生成 n 个独立的稳定分布样本

    Args:
        params: 分布参数
        n: 样本数
        seed: 64 位种子
        offset: 起始样本下标，用于分段并行生成

    Returns:
        长度为 n 的 float64 数组
    """
    params.validate()
    if n < 0:
        raise ParameterDomainError(f"n 必须满足 n >= 0，当前为 {n}")
    if n == 0:
        return np.empty(0, dtype=np.float64)

    u = uniform_open(seed, 2 * n, 2 * offset).reshape(n, 2)
    v = (u[:, 0] - 0.5) * math.pi
    w = -np.log(u[:, 1])

    x = _cms_standard(params.alpha, params.beta, v, w)
    if params.alpha == 1.0 and params.beta != 0.0:
        # α=1 分支的尺度变换带对数修正项
        return (
            params.scale * x
            + (2.0 / math.pi) * params.beta * params.scale * math.log(params.scale)
            + params.location
        )
    return params.scale * x + params.location


def tail_fraction(samples: np.ndarray, threshold: float) -> float:
    """|x| > threshold 的样本比例"""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        return 0.0
    return float(np.count_nonzero(np.abs(samples) > threshold)) / samples.size
