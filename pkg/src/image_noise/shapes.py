"""
Shaped impulse noise
形状化脉冲噪声

把椒盐脉冲放大成正方形、三角形、菱形区域，同一脉冲只影响它所在的通道。
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np

from stable_noise.errors import ParameterDomainError
from .fields import ImpulseSet, extract_impulses, strength_order


class ShapeKind(Enum):
    """脉冲形状"""
    SQUARE = "square"
    TRIANGLE = "triangle"
    RHOMBUS = "rhombus"


# 默认尺寸：像素数 9 / 6 / 5，量级相当
DEFAULT_SHAPE_SIZES = {
    ShapeKind.SQUARE: 3,
    ShapeKind.TRIANGLE: 3,
    ShapeKind.RHOMBUS: 1,
}


@dataclass(frozen=True)
class ShapeSpec:
    """
    形状规格

    square 的 size 为边长 s，triangle 为直角边 s，rhombus 为曼哈顿半径 r。
    """
    kind: ShapeKind
    size: int

    def __post_init__(self):
        object.__setattr__(self, "kind", ShapeKind(self.kind))
        if int(self.size) != self.size or self.size < 1:
            raise ParameterDomainError(f"size 必须是 >= 1 的整数，当前为 {self.size}")

    @property
    def label(self) -> str:
        return f"{self.kind.value}-{self.size}"

    @classmethod
    def default(cls, kind) -> "ShapeSpec":
        kind = ShapeKind(kind)
        return cls(kind, DEFAULT_SHAPE_SIZES[kind])


def shape_mask(spec: ShapeSpec) -> List[Tuple[int, int]]:
    """
    形状对应的 (dx, dy) 偏移集合

    square: 0 <= dx, dy < s，共 s² 个
    triangle: dx, dy >= 0 且 dx + dy < s，共 s(s+1)/2 个
    rhombus: |dx| + |dy| <= r，共 2r² + 2r + 1 个
    """
    s = spec.size
    if spec.kind is ShapeKind.SQUARE:
        return [(dx, dy) for dy in range(s) for dx in range(s)]
    if spec.kind is ShapeKind.TRIANGLE:
        return [(dx, dy) for dy in range(s) for dx in range(s - dy)]
    return [
        (dx, dy)
        for dy in range(-s, s + 1)
        for dx in range(-s, s + 1)
        if abs(dx) + abs(dy) <= s
    ]


def stamp(impulses: ImpulseSet, spec: ShapeSpec, shape: Sequence[int]) -> np.ndarray:
    """
    以每个脉冲为锚点按形状掩码铺开其取值

    强脉冲先写，已被写过的像素不再覆盖；超出边界的偏移被裁掉，未触及的位置为 0。

    Returns:
        与 shape 同形的噪声场
    """
    shape = tuple(int(s) for s in shape)
    height, width, _ = shape
    field = np.zeros(shape, dtype=np.float64)
    written = np.zeros(shape, dtype=bool)

    offsets = np.array(shape_mask(spec), dtype=np.int64)
    dx, dy = offsets[:, 0], offsets[:, 1]

    for i in strength_order(impulses.values, impulses.linear_index):
        rows = impulses.rows[i] + dy
        cols = impulses.cols[i] + dx
        inside = (rows >= 0) & (rows < height) & (cols >= 0) & (cols < width)
        rows, cols = rows[inside], cols[inside]
        channel = impulses.channels[i]
        free = ~written[rows, cols, channel]
        rows, cols = rows[free], cols[free]
        field[rows, cols, channel] = impulses.values[i]
        written[rows, cols, channel] = True
    return field


def shaped_field(field: np.ndarray, spec: ShapeSpec, keep_fraction: float = 0.01) -> np.ndarray:
    """提取最强脉冲并按形状铺开（缩放到目标 SNR 由 corrupt 完成）"""
    field = np.asarray(field, dtype=np.float64)
    return stamp(extract_impulses(field, keep_fraction), spec, field.shape)
