"""
Synthetic shape dataset
合成图形数据集

五类灰度图形（圆盘、正方形、三角形、十字、横条纹）。图形的位置、大小、亮度与对比度随机，
条纹的宽度与相位随机；背景上叠加若干明暗小方块和高斯噪声。给定种子完全确定。
"""

from typing import Callable, Dict

import numpy as np
from loguru import logger

from stable_noise.errors import ParameterDomainError
from stable_noise.rng import derive_seed
from .dataset import LabeledDataset

MIN_SIDE = 16
BACKGROUND_RANGE = (10.0, 80.0)
CONTRAST_RANGE = (70.0, 200.0)
BACKGROUND_NOISE_STD = 8.0
HALF_SIZE_RANGE = (0.22, 0.34)
# 图形中心偏移上限，占边长的比例
CENTER_JITTER = 0.07
MAX_CLUTTER = 3
CLUTTER_AMPLITUDE = 40.0


def _disk(x, y, h):
    return x * x + y * y <= h * h


def _square(x, y, h):
    return (np.abs(x) <= h) & (np.abs(y) <= h)


def _triangle(x, y, h):
    # 顶点朝上，底边宽 2h
    depth = y + h
    return (depth >= 0) & (y <= h) & (np.abs(x) <= depth / 2.0)


def _cross(x, y, h):
    arm = h / 3.0
    return ((np.abs(x) <= arm) & (np.abs(y) <= h)) | ((np.abs(y) <= arm) & (np.abs(x) <= h))


FIGURES: Dict[str, Callable] = {
    "cross": _cross,
    "disk": _disk,
    "square": _square,
    "triangle": _triangle,
}

# 类别名按字典序排列，导出再导入后下标不变
CLASS_NAMES = sorted(list(FIGURES) + ["stripes"])


def _clutter(image: np.ndarray, side: int, rng: np.random.Generator) -> None:
    """叠加 0~3 个随机位置、随机明暗的小矩形"""
    for _ in range(int(rng.integers(0, MAX_CLUTTER + 1))):
        size = int(rng.integers(max(1, side // 16), side // 8 + 1))
        top, left = rng.integers(0, side - size + 1, size=2)
        image[top:top + size, left:left + size] += rng.uniform(-CLUTTER_AMPLITUDE, CLUTTER_AMPLITUDE)


def _render(kind: str, side: int, rng: np.random.Generator) -> np.ndarray:
    background = rng.uniform(*BACKGROUND_RANGE)
    foreground = min(background + rng.uniform(*CONTRAST_RANGE), 250.0)
    ys, xs = np.mgrid[0:side, 0:side].astype(np.float64) + 0.5

    if kind == "stripes":
        stripe = int(rng.integers(max(2, side // 12), max(2, side // 6) + 1))
        phase = int(rng.integers(0, 2 * stripe))
        mask = ((ys.astype(np.int64) + phase) // stripe) % 2 == 0
    else:
        jitter = side * CENTER_JITTER
        cx = side / 2.0 + rng.uniform(-jitter, jitter)
        cy = side / 2.0 + rng.uniform(-jitter, jitter)
        half = rng.uniform(*HALF_SIZE_RANGE) * side
        mask = FIGURES[kind](xs - cx, ys - cy, half)

    image = np.where(mask, foreground, background)
    _clutter(image, side, rng)
    image = image + rng.normal(0.0, BACKGROUND_NOISE_STD, size=image.shape)
    return np.clip(image, 0.0, 255.0)[:, :, np.newaxis]


def gen_synthetic(per_class: int, side: int = 64, seed: int = 1) -> LabeledDataset:
    """
    生成合成数据集

    Args:
        per_class: 每类图像数，>= 1
        side: 图像边长，>= 16
        seed: 种子

    Returns:
        5 类均衡的 LabeledDataset，单通道
    """
    if per_class < 1:
        raise ParameterDomainError(f"per_class 必须 >= 1，当前为 {per_class}")
    if side < MIN_SIDE:
        raise ParameterDomainError(f"side 必须 >= {MIN_SIDE}，当前为 {side}")

    images, labels = [], []
    for label, kind in enumerate(CLASS_NAMES):
        rng = np.random.default_rng(derive_seed(seed, "synthetic", kind))
        for _ in range(per_class):
            images.append(_render(kind, side, rng))
            labels.append(label)

    logger.info(f"合成数据集生成完成: {len(images)} 张 {side}x{side} 图像")
    return LabeledDataset(images, labels, list(CLASS_NAMES),
                          meta={"synthetic": {"per_class": per_class, "side": side, "seed": seed}})
