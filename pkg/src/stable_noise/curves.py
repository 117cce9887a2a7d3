"""
Sweep curves
扫描曲线

BER 曲线与准确率下降曲线共用的数据结构：按 SNR 升序排列的 (snr_db, metric) 点。
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .errors import ParameterDomainError


@dataclass
class SweepPoint:
    """曲线上的一个点"""
    snr_db: float
    metric: float
    achieved_snr_db: float
    details: Dict[str, Any] = field(default_factory=dict)


@dataclass
class SweepCurve:
    """
    一条扫描曲线

    label 形如 "alpha=0.9" 或 "square-3"；metric 为 BER 时在 [0,1]，
    为准确率下降时可能为负，统一要求落在 [-1, 1]。
    """
    label: str
    points: List[SweepPoint] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for point in self.points:
            self._check(point)
        self._check_order()

    def _check(self, point: SweepPoint) -> None:
        if math.isnan(point.metric) or not -1.0 <= point.metric <= 1.0:
            raise ParameterDomainError(f"{self.label}: metric 超出 [-1, 1]: {point.metric}")

    def _check_order(self) -> None:
        snrs = [p.snr_db for p in self.points]
        if any(b < a for a, b in zip(snrs, snrs[1:])):
            raise ParameterDomainError(f"{self.label}: 曲线点必须按 snr_db 升序排列")

    def append(self, point: SweepPoint) -> None:
        self._check(point)
        self.points.append(point)
        self._check_order()

    @property
    def snrs(self) -> List[float]:
        return [p.snr_db for p in self.points]

    @property
    def metrics(self) -> List[float]:
        return [p.metric for p in self.points]

    def metric_at(self, snr_db: float) -> Optional[float]:
        for point in self.points:
            if point.snr_db == snr_db:
                return point.metric
        return None
