"""
Alpha-stable channel
α稳定噪声信道

基带实值模型：接收 = 符号 + 按经验 SNR 缩放后的稳定噪声。
突发模式把 α 稳定噪声最强的脉冲铺满一段时间窗，功率仍按同一 SNR 归一。
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from image_noise.shapes import ShapeKind, ShapeSpec, shaped_field
from stable_noise.errors import EmptyInputError, ParameterDomainError
from stable_noise.snr import SNR_INF, scale_to_snr
from stable_noise.stable import StableParams, sample

# 突发噪声使用的椒盐特征指数
BURST_ALPHA = 0.9


@dataclass(frozen=True)
class ChannelConfig:
    """
    信道配置

    noise 的 β 必须为 0；burst_window 不为空时使用突发噪声。
    """
    noise: StableParams
    target_snr: float
    seed: int
    burst_window: Optional[int] = None
    keep_fraction: float = 0.01

    def __post_init__(self):
        if self.noise.beta != 0.0:
            raise ParameterDomainError(f"信道噪声要求 beta == 0，当前为 {self.noise.beta}")
        if math.isnan(self.target_snr) or self.target_snr == -math.inf:
            raise ParameterDomainError(f"target_snr 无效: {self.target_snr}")
        if self.burst_window is not None and self.burst_window < 1:
            raise ParameterDomainError(f"burst_window 必须 >= 1，当前为 {self.burst_window}")


def burst_noise(n: int, alpha: float, window: int, keep_fraction: float, seed: int) -> np.ndarray:
    """
    时域突发噪声：提取稳定噪声中最强的脉冲，每个脉冲向后铺满 window 个符号

    以 (1, n, 1) 的"图像"复用二维的正方形铺开，行方向越界部分被裁掉，只剩时间窗。
    """
    field = sample(StableParams(alpha), n, seed).reshape(1, n, 1)
    return shaped_field(field, ShapeSpec(ShapeKind.SQUARE, window), keep_fraction).ravel()


def channel_noise(n: int, cfg: ChannelConfig) -> np.ndarray:
    """未缩放的信道噪声实现"""
    if cfg.burst_window is not None:
        return burst_noise(n, cfg.noise.alpha, cfg.burst_window, cfg.keep_fraction, cfg.seed)
    return sample(StableParams(cfg.noise.alpha, 0.0, cfg.noise.scale, 0.0), n, cfg.seed)


def transmit(symbols, cfg: ChannelConfig) -> np.ndarray:
    """
    经过 α 稳定信道

    Args:
        symbols: 实值符号序列
        cfg: 信道配置；target_snr 为 +∞ 时原样返回

    Returns:
        接收序列
    """
    symbols = np.asarray(symbols, dtype=np.float64).ravel()
    if symbols.size == 0:
        raise EmptyInputError("transmit 需要非空符号序列")
    if cfg.target_snr == SNR_INF:
        return symbols.copy()
    return symbols + scale_to_snr(symbols, channel_noise(symbols.size, cfg), cfg.target_snr)
