"""
Noise fields
噪声场

独立同分布的 α 稳定噪声场，以及从噪声场中提取最强脉冲（椒盐噪声的显式表示）。
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from stable_noise.errors import EmptyInputError, ParameterDomainError
from stable_noise.snr import power
from stable_noise.stable import StableParams, sample


def iid_field(params: StableParams, shape: Sequence[int], seed: int) -> np.ndarray:
    """
    生成与目标图像同形状的独立同分布噪声场

    位置参数强制为 0；元素按行优先、通道交错的顺序依次取样本流。
    """
    shape = tuple(int(s) for s in shape)
    if len(shape) != 3 or min(shape) < 1:
        raise ParameterDomainError(f"噪声场形状必须为 (H, W, C) 且各维 >= 1，当前为 {shape}")
    zero_mean = StableParams(params.alpha, params.beta, params.scale, 0.0)
    return sample(zero_mean, int(np.prod(shape)), seed).reshape(shape)


@dataclass(frozen=True)
class ImpulseSet:
    """
    稀疏脉冲集合

    按 |value| 降序排列（同幅值按线性下标升序），坐标以 (row, col, channel) 给出。
    """
    rows: np.ndarray
    cols: np.ndarray
    channels: np.ndarray
    values: np.ndarray
    shape: Tuple[int, int, int]

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def linear_index(self) -> np.ndarray:
        _, width, n_channels = self.shape
        return (self.rows * width + self.cols) * n_channels + self.channels

    def entries(self):
        """(x, y, channel, value) 元组列表"""
        return [
            (int(c), int(r), int(ch), float(v))
            for r, c, ch, v in zip(self.rows, self.cols, self.channels, self.values)
        ]

    def to_field(self) -> np.ndarray:
        """还原为稀疏噪声场，其余位置为 0"""
        field = np.zeros(self.shape, dtype=np.float64)
        field[self.rows, self.cols, self.channels] = self.values
        return field


def strength_order(values: np.ndarray, linear_index: np.ndarray) -> np.ndarray:
    """按 |value| 降序、线性下标升序的排列"""
    return np.lexsort((linear_index, -np.abs(values)))


def extract_impulses(field: np.ndarray, keep_fraction: float) -> ImpulseSet:
    """
    保留幅值最大的 ⌈keep_fraction·N⌉ 个元素

    Args:
        field: (H, W, C) 噪声场
        keep_fraction: (0, 1] 内的保留比例

    Returns:
        ImpulseSet，零值元素不计入
    """
    field = np.asarray(field, dtype=np.float64)
    if field.size == 0:
        raise EmptyInputError("噪声场为空")
    if field.ndim != 3:
        raise ParameterDomainError(f"噪声场形状必须为 (H, W, C)，当前为 {field.shape}")
    if not (0.0 < keep_fraction <= 1.0):
        raise ParameterDomainError(f"keep_fraction 必须满足 0 < keep_fraction <= 1，当前为 {keep_fraction}")

    flat = field.ravel()
    # 先四舍五入再取整，避免 (1/N)·N 之类的浮点误差多保留一个
    k = min(flat.size, max(1, math.ceil(round(keep_fraction * flat.size, 9))))
    order = strength_order(flat, np.arange(flat.size))[:k]
    order = order[flat[order] != 0.0]

    rows, cols, channels = np.unravel_index(order, field.shape)
    return ImpulseSet(
        rows=rows.astype(np.int64),
        cols=cols.astype(np.int64),
        channels=channels.astype(np.int64),
        values=flat[order].copy(),
        shape=tuple(field.shape),
    )


def impulse_power_share(field: np.ndarray, keep_fraction: float) -> float:
    """保留脉冲携带的功率占整个噪声场功率的比例"""
    total = power(field)
    if total == 0.0:
        return 0.0
    return power(extract_impulses(field, keep_fraction).values) / total
