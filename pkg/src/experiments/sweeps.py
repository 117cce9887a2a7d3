"""
Accuracy-drop sweeps
准确率下降扫描

两类图像实验：
    acc_drop_sweep  各 α 的独立同分布稳定噪声，逐 SNR 计算准确率下降
    shaped_sweep    α=0.9 基线与正方形/三角形/菱形集中噪声在相同 SNR 下的对比

每张测试图像在每个 (曲线, SNR) 上使用独立的派生种子噪声场；网格点互不依赖，
线程数不影响结果。
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence

import numpy as np
from loguru import logger

from classifier.dataset import LabeledDataset
from classifier.protocol import ImageClassifier
from classifier.softmax import accuracy
from image_noise.corruption import corrupt
from image_noise.fields import iid_field
from image_noise.shapes import ShapeSpec, shaped_field
from stable_noise.curves import SweepCurve, SweepPoint
from stable_noise.errors import DatasetError, ParameterDomainError
from stable_noise.rng import derive_seed
from stable_noise.snr import SNR_INF
from stable_noise.stable import StableParams

EXPERIMENT_ACC_DROP = "acc_drop"
EXPERIMENT_SHAPES = "shapes"
BASELINE_ALPHA = 0.9
BASELINE_LABEL = f"alpha={BASELINE_ALPHA:g}"


def standard_error(acc: float, m: int) -> float:
    """二项标准误 sqrt(a(1−a)/m)"""
    return math.sqrt(max(acc * (1.0 - acc), 0.0) / m)


def _with_images(dataset: LabeledDataset, images: List[np.ndarray]) -> LabeledDataset:
    return LabeledDataset(images, dataset.labels, dataset.class_names)


def _point(target_db: float, clean_acc: float, noisy_acc: float, achieved: Sequence[float], m: int,
           **extra) -> SweepPoint:
    mean_achieved = float(np.mean(achieved)) if len(achieved) else SNR_INF
    details = {
        "clean_acc": clean_acc,
        "noisy_acc": noisy_acc,
        "n_images": m,
        "mean_achieved_snr_db": mean_achieved,
        "std_error": standard_error(noisy_acc, m),
    }
    details.update(extra)
    return SweepPoint(snr_db=target_db, metric=clean_acc - noisy_acc, achieved_snr_db=mean_achieved, details=details)


def _warn_if_clipped(label: str, target_db: float, achieved: Sequence[float]) -> None:
    mean_achieved = float(np.mean(achieved))
    if abs(mean_achieved - target_db) > 1e-6:
        logger.warning(f"{label}: 裁剪后平均实际 SNR {mean_achieved:.4f} dB 偏离目标 {target_db:g} dB")


def _check_inputs(classifier: ImageClassifier, test_set: LabeledDataset, snr_grid: Sequence[float]) -> None:
    if not isinstance(classifier, ImageClassifier):
        raise ParameterDomainError(f"分类器必须实现 classify(images)，当前为 {type(classifier).__name__}")
    if len(test_set) == 0:
        raise DatasetError("测试集为空")
    if not snr_grid:
        raise ParameterDomainError("snr_grid 不能为空")


def acc_drop_sweep(classifier: ImageClassifier, test_set: LabeledDataset, alphas: Sequence[float],
                   snr_grid: Sequence[float], base_seed: int, clip: bool = False, beta: float = 0.0,
                   threads: int = 1) -> List[SweepCurve]:
    """
    独立同分布 α 稳定噪声下的准确率下降曲线

    Args:
        classifier: 实现 classify(images) 的分类器
        test_set: 非空测试集
        alphas: 每个 α 一条曲线
        snr_grid: 升序 SNR 网格 (dB)，可含 +∞
        base_seed: 基础种子
        clip: 加噪后是否裁剪到 [0, 255]
        beta: 噪声偏斜参数
        threads: 并行线程数

    Returns:
        每个 α 一条 SweepCurve，metric = 干净准确率 − 加噪准确率（可能为负）
    """
    _check_inputs(classifier, test_set, snr_grid)
    if not alphas:
        raise ParameterDomainError("alphas 不能为空")
    params = [StableParams(alpha, beta) for alpha in alphas]

    m = len(test_set)
    clean_acc = accuracy(classifier, test_set)
    logger.info(f"开始准确率下降扫描: {len(alphas)} 个 α × {len(snr_grid)} 个 SNR, {m} 张测试图像, "
                f"干净准确率 {clean_acc:.4f}")

    tasks = [(ai, si) for ai in range(len(alphas)) for si in range(len(snr_grid))]

    def run(task):
        ai, si = task
        target = snr_grid[si]
        if target == SNR_INF:
            return _point(target, clean_acc, clean_acc, [SNR_INF] * m, m)

        attacked, achieved = [], []
        for item, image in enumerate(test_set.images):
            field = iid_field(params[ai], image.shape, derive_seed(base_seed, EXPERIMENT_ACC_DROP, ai, si, item))
            noisy, snr = corrupt(image, field, target, clip)
            attacked.append(noisy)
            achieved.append(snr)
        if clip:
            _warn_if_clipped(f"alpha={alphas[ai]:g}", target, achieved)
        noisy_acc = accuracy(classifier, _with_images(test_set, attacked))
        logger.debug(f"acc_drop alpha={alphas[ai]} snr={target}: acc={noisy_acc:.4f}")
        return _point(target, clean_acc, noisy_acc, achieved, m)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        points = list(pool.map(run, tasks))

    curves = []
    n = len(snr_grid)
    for ai, alpha in enumerate(alphas):
        curves.append(SweepCurve(
            label=f"alpha={alpha:g}",
            points=points[ai * n:(ai + 1) * n],
            meta={"experiment": EXPERIMENT_ACC_DROP, "alpha": alpha, "beta": beta, "clip": clip},
        ))
    logger.info("准确率下降扫描完成")
    return curves


def shaped_sweep(classifier: ImageClassifier, test_set: LabeledDataset, shapes: Sequence[ShapeSpec],
                 snr_grid: Sequence[float], base_seed: int, keep_fraction: float = 0.01, clip: bool = False, beta: float = 0.0,
                 threads: int = 1) -> List[SweepCurve]:
    """
    集中噪声对比扫描

    第一条曲线是 α=0.9 独立同分布基线，其后每个形状一条曲线。同一 (SNR, 图像) 上，
    所有形状都从基线所用的同一个噪声场中提取脉冲再铺开，只有能量的空间分布不同。
    """
    _check_inputs(classifier, test_set, snr_grid)
    if not shapes:
        raise ParameterDomainError("shapes 不能为空")
    base_params = StableParams(BASELINE_ALPHA, beta)

    m = len(test_set)
    clean_acc = accuracy(classifier, test_set)
    labels = [BASELINE_LABEL] + [spec.label for spec in shapes]
    logger.info(f"开始集中噪声扫描: {', '.join(labels)}; {len(snr_grid)} 个 SNR, {m} 张测试图像")

    def describe(ci):
        if ci == 0:
            return {"shape": "iid", "size": 1}
        return {"shape": shapes[ci - 1].kind.value, "size": shapes[ci - 1].size}

    def run(si):
        target = snr_grid[si]
        if target == SNR_INF:
            return [_point(target, clean_acc, clean_acc, [SNR_INF] * m, m, **describe(ci)) for ci in range(len(labels))]

        attacked = [[] for _ in labels]
        achieved = [[] for _ in labels]
        for item, image in enumerate(test_set.images):
            base = iid_field(base_params, image.shape, derive_seed(base_seed, EXPERIMENT_SHAPES, 0, si, item))
            fields = [base] + [shaped_field(base, spec, keep_fraction) for spec in shapes]
            for ci, field in enumerate(fields):
                noisy, snr = corrupt(image, field, target, clip)
                attacked[ci].append(noisy)
                achieved[ci].append(snr)

        row = []
        for ci, label in enumerate(labels):
            if clip:
                _warn_if_clipped(label, target, achieved[ci])
            noisy_acc = accuracy(classifier, _with_images(test_set, attacked[ci]))
            logger.debug(f"shapes {label} snr={target}: acc={noisy_acc:.4f}")
            row.append(_point(target, clean_acc, noisy_acc, achieved[ci], m, **describe(ci)))
        return row

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        rows = list(pool.map(run, range(len(snr_grid))))

    curves = []
    for ci, label in enumerate(labels):
        meta = {"experiment": EXPERIMENT_SHAPES, "alpha": BASELINE_ALPHA, "keep_fraction": keep_fraction,
                "clip": clip, **describe(ci)}
        curves.append(SweepCurve(label=label, points=[row[ci] for row in rows], meta=meta))
    logger.info("集中噪声扫描完成")
    return curves
