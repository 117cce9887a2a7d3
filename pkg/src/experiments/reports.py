"""
CSV and manifest writers
结果文件

ber.csv / acc_drop.csv / shapes.csv 使用逗号分隔、表头、LF 换行、9 位有效数字；
manifest.json 记录配置回显、版本、每条曲线的汇总统计以及两项排序报告。
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
from loguru import logger

from comm_sim.sweep import bpsk_theory
from stable_noise import __version__
from stable_noise.curves import SweepCurve

BER_COLUMNS = ["experiment", "codec", "alpha", "snr_db", "achieved_snr_db", "n_bits", "ber"]
ACC_DROP_COLUMNS = ["experiment", "alpha", "snr_db", "mean_achieved_snr_db", "n_images",
                    "clean_acc", "noisy_acc", "acc_drop"]
SHAPES_COLUMNS = ["experiment", "curve_label", "shape", "size", "snr_db", "mean_achieved_snr_db",
                  "n_images", "acc_drop"]


def json_number(value: Optional[float]) -> Any:
    """JSON 不支持 inf / nan：inf 写成 "inf"，nan 写成 null"""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def ber_frame(curves: Sequence[SweepCurve]) -> pd.DataFrame:
    rows = [
        {
            "experiment": curve.meta["experiment"],
            "codec": curve.meta["codec"],
            "alpha": curve.meta["alpha"],
            "snr_db": point.snr_db,
            "achieved_snr_db": point.achieved_snr_db,
            "n_bits": point.details["n_bits"],
            "ber": point.metric,
        }
        for curve in curves
        for point in curve.points
    ]
    return pd.DataFrame(rows, columns=BER_COLUMNS)


def acc_drop_frame(curves: Sequence[SweepCurve]) -> pd.DataFrame:
    rows = [
        {
            "experiment": curve.meta["experiment"],
            "alpha": curve.meta["alpha"],
            "snr_db": point.snr_db,
            "mean_achieved_snr_db": point.achieved_snr_db,
            "n_images": point.details["n_images"],
            "clean_acc": point.details["clean_acc"],
            "noisy_acc": point.details["noisy_acc"],
            "acc_drop": point.metric,
        }
        for curve in curves
        for point in curve.points
    ]
    return pd.DataFrame(rows, columns=ACC_DROP_COLUMNS)


def shapes_frame(curves: Sequence[SweepCurve]) -> pd.DataFrame:
    rows = [
        {
            "experiment": curve.meta["experiment"],
            "curve_label": curve.label,
            "shape": curve.meta["shape"],
            "size": curve.meta["size"],
            "snr_db": point.snr_db,
            "mean_achieved_snr_db": point.achieved_snr_db,
            "n_images": point.details["n_images"],
            "acc_drop": point.metric,
        }
        for curve in curves
        for point in curve.points
    ]
    return pd.DataFrame(rows, columns=SHAPES_COLUMNS)


def write_csv(frame: pd.DataFrame, path, digits: int = 9) -> Path:
    """按统一格式写 CSV；+∞ 由浮点格式化写成 inf"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=f"%.{digits}g", lineterminator="\n")
    logger.info(f"已写出 {path} ({len(frame)} 行)")
    return path


def _point_std_error(point) -> float:
    if "std_error" in point.details:
        return point.details["std_error"]
    n = point.details["n_bits"]
    return math.sqrt(point.metric * (1.0 - point.metric) / n)


def curve_summary(curve: SweepCurve) -> Dict[str, Any]:
    """
    单条曲线的汇总统计

    mean_std_error 为各点二项标准误的平均；mean_achieved_snr_db 只统计有限 SNR 的点。
    """
    metrics = curve.metrics
    achieved = [p.achieved_snr_db for p in curve.points if math.isfinite(p.achieved_snr_db)]
    errors = [_point_std_error(p) for p in curve.points]
    return {
        "label": curve.label,
        "experiment": curve.meta.get("experiment"),
        "n_points": len(metrics),
        "mean_metric": math.fsum(metrics) / len(metrics) if metrics else None,
        "min_metric": min(metrics) if metrics else None,
        "max_metric": max(metrics) if metrics else None,
        "mean_std_error": math.fsum(errors) / len(errors) if errors else None,
        "mean_achieved_snr_db": math.fsum(achieved) / len(achieved) if achieved else None,
        **{key: curve.meta[key] for key in ("codec", "alpha", "shape", "size") if key in curve.meta},
    }


def ber_ordering_report(curves: Sequence[SweepCurve]) -> List[Dict[str, Any]]:
    """
    "α 越小误码率越大" 在每个 (编码, SNR) 点上是否成立

    同一编码的曲线按 α 升序排列，误码率非增即视为成立。只统计独立同分布噪声曲线。
    """
    report = []
    by_codec: Dict[str, List[SweepCurve]] = {}
    for curve in curves:
        if curve.meta.get("experiment") == "ber":
            by_codec.setdefault(curve.meta["codec"], []).append(curve)

    for codec, group in by_codec.items():
        group = sorted(group, key=lambda c: c.meta["alpha"])
        for i, snr in enumerate(group[0].snrs):
            bers = [c.points[i].metric for c in group]
            holds = all(a >= b for a, b in zip(bers, bers[1:]))
            if not holds:
                logger.warning(f"codec={codec} snr={snr}: 误码率未随 α 增大而不增 {bers}")
            report.append({
                "codec": codec,
                "snr_db": json_number(snr),
                "alphas": [c.meta["alpha"] for c in group],
                "ber": bers,
                "smaller_alpha_higher_ber": holds,
            })
    return report


def gaussian_theory_report(curves: Sequence[SweepCurve]) -> List[Dict[str, Any]]:
    """未编码 α=2 曲线旁的高斯理论误码率 Q(√SNR)"""
    report = []
    for curve in curves:
        meta = curve.meta
        if meta.get("experiment") == "ber" and meta.get("codec") == "none" and meta.get("alpha") == 2.0:
            for point in curve.points:
                report.append({
                    "snr_db": json_number(point.snr_db),
                    "simulated_ber": point.metric,
                    "theory_ber": bpsk_theory(point.snr_db),
                })
    return report


def shapes_report(curves: Sequence[SweepCurve]) -> List[Dict[str, Any]]:
    """每个 SNR 点上各形状的准确率下降是否超过 α=0.9 基线（第一条曲线）"""
    if not curves:
        return []
    baseline, shaped = curves[0], curves[1:]
    report = []
    for point in baseline.points:
        entry = {"snr_db": json_number(point.snr_db), "baseline_drop": point.metric, "shapes": {}}
        for curve in shaped:
            drop = curve.metric_at(point.snr_db)
            if drop is None:
                continue
            entry["shapes"][curve.label] = {"acc_drop": drop, "exceeds_baseline": drop > point.metric}
        report.append(entry)
    return report


def build_manifest(config_echo: Dict[str, Any], curves: Dict[str, List[SweepCurve]],
                   extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """组装 manifest 内容"""
    manifest = {
        "artifact_version": __version__,
        "config": config_echo,
        "summaries": {
            name: [curve_summary(curve) for curve in group]
            for name, group in curves.items()
        },
        "reports": {},
    }
    if "ber" in curves:
        manifest["reports"]["ber_ordering"] = ber_ordering_report(curves["ber"])
        manifest["reports"]["gaussian_theory"] = gaussian_theory_report(curves["ber"])
    if "shapes" in curves:
        manifest["reports"]["shapes_vs_baseline"] = shapes_report(curves["shapes"])
    if extra:
        manifest.update(extra)
    return manifest


def write_manifest(manifest: Dict[str, Any], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(manifest, ensure_ascii=False, indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    logger.info(f"已写出 {path}")
    return path
