"""
Signal-to-noise ratio core
信噪比核心

图像与调制符号共用同一条 SNR 定义：
    SNR(dB) = 10·log10( Σ P_ori² / Σ (P_ori − P_attacked)² )
平方和用 math.fsum 做补偿求和。图像为 (H, W, C) 的 float64 数组，
即行优先、通道交错的存储顺序。
"""

import math
from typing import Union

import numpy as np

from .errors import ParameterDomainError, ScalingImpossibleError, ShapeMismatchError, UndefinedSnrError

ArrayLike = Union[np.ndarray, list, tuple]

# 零扰动对应的 +∞ 哨兵值，CSV 中写作 "inf"
SNR_INF = math.inf


def as_image(data: ArrayLike) -> np.ndarray:
    """转为 (H, W, C) float64 图像，二维输入视为单通道"""
    image = np.asarray(data, dtype=np.float64)
    if image.ndim == 2:
        image = image[:, :, np.newaxis]
    if image.ndim != 3 or min(image.shape) < 1:
        raise ShapeMismatchError(f"图像形状必须为 (H, W, C) 且各维 >= 1，当前为 {image.shape}")
    return image


def power(x: ArrayLike) -> float:
    """所有元素平方和"""
    values = np.asarray(x, dtype=np.float64).ravel()
    return math.fsum(np.square(values).tolist())


def snr_db(original: ArrayLike, attacked: ArrayLike) -> float:
    """
    按定义式计算 attacked 相对 original 的 SNR

    Returns:
        dB 值；attacked 与 original 完全相同时返回 SNR_INF
    """
    original = np.asarray(original, dtype=np.float64)
    attacked = np.asarray(attacked, dtype=np.float64)
    if original.shape != attacked.shape:
        raise ShapeMismatchError(f"形状不一致: {original.shape} vs {attacked.shape}")
    signal = power(original)
    if signal == 0.0:
        raise UndefinedSnrError("原始信号功率为零，SNR 无定义")
    noise = power(original - attacked)
    if noise == 0.0:
        return SNR_INF
    return 10.0 * math.log10(signal / noise)


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0.0:
        return -math.inf
    return 10.0 * math.log10(value)


def scaling_factor(signal_power: float, noise_power: float, target_db: float) -> float:
    """c = sqrt(P_signal / (P_noise · 10^(target/10)))"""
    if signal_power <= 0.0:
        raise ScalingImpossibleError("信号功率为零，无法缩放噪声")
    if noise_power <= 0.0 or not math.isfinite(noise_power):
        raise ScalingImpossibleError(f"噪声功率无效 ({noise_power})，无法缩放噪声")
    if not math.isfinite(target_db):
        raise ParameterDomainError(f"目标 SNR 必须为有限值，当前为 {target_db}")
    return math.sqrt(signal_power / (noise_power * db_to_linear(target_db)))


def scale_to_snr(signal: ArrayLike, noise: ArrayLike, target_db: float) -> np.ndarray:
    """
    缩放噪声使 snr_db(signal, signal + 噪声) 等于目标值

    Args:
        signal: 图像或符号序列
        noise: 同形状噪声
        target_db: 目标 SNR (dB)，必须有限

    Returns:
        c·noise
    """
    noise = np.asarray(noise, dtype=np.float64)
    c = scaling_factor(power(signal), power(noise), target_db)
    return c * noise


def shannon_capacity(bandwidth: float, snr_linear: float) -> float:
    """香农公式 C = W·log2(1 + S/N)，单位 bit/s"""
    if bandwidth < 0.0 or not math.isfinite(bandwidth):
        raise ParameterDomainError(f"bandwidth 必须满足 bandwidth >= 0，当前为 {bandwidth}")
    if snr_linear < 0.0 or math.isnan(snr_linear):
        raise ParameterDomainError(f"snr_linear 必须满足 snr_linear >= 0，当前为 {snr_linear}")
    return bandwidth * math.log1p(snr_linear) / math.log(2.0)
