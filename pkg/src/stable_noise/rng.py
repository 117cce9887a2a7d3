"""
Counter-based random streams
基于计数器的随机数流

splitmix64 混合器按 (seed, 计数器) 随机访问生成 64 位整数，
同一 seed 下任意分段生成的结果与串行生成完全一致。
"""

import hashlib
from typing import Union

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB

SeedComponent = Union[int, str]


def mix64(value: int) -> int:
    """splitmix64 单步：value + gamma 后做终混"""
    z = (value + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def _component_to_int(component: SeedComponent) -> int:
    if isinstance(component, str):
        digest = hashlib.sha256(component.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "little")
    if isinstance(component, (bool, float)):
        raise TypeError(f"不支持的种子分量类型: {type(component).__name__}")
    return int(component) & MASK64


def derive_seed(base: int, *components: SeedComponent) -> int:
    """
    由基础种子和若干分量派生子种子

    Args:
        base: 基础种子（64位无符号）
        components: 实验编号、曲线下标、网格下标、样本下标等

    Returns:
        派生出的 64 位种子，与调用顺序无关
    """
    h = mix64(int(base) & MASK64)
    for component in components:
        h = mix64(h ^ mix64(_component_to_int(component)))
    return h


def uint64_stream(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """生成计数器 offset..offset+count-1 对应的 64 位整数"""
    if count < 0 or offset < 0:
        raise ValueError("count 与 offset 必须非负")
    key = np.uint64(mix64(int(seed) & MASK64))
    counters = np.arange(offset, offset + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = key + (counters + np.uint64(1)) * np.uint64(GOLDEN_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MUL1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MUL2)
        z = z ^ (z >> np.uint64(31))
    return z


def uniform_open(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """(0, 1) 开区间上的均匀数，取高 52 位（加半格后仍严格小于 1）"""
    z = uint64_stream(seed, count, offset)
    return ((z >> np.uint64(12)).astype(np.float64) + 0.5) * (2.0 ** -52)
