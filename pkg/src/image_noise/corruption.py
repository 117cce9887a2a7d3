"""
按目标 SNR 给图像加噪
"""

import math
from typing import Tuple

import numpy as np
from loguru import logger

from stable_noise.errors import ShapeMismatchError
from stable_noise.snr import SNR_INF, as_image, scale_to_snr, snr_db


def corrupt(image: np.ndarray, field: np.ndarray, target_db: float, clip: bool = False) -> Tuple[np.ndarray, float]:
    """
    attacked = image + 缩放到目标 SNR 的噪声场

    Args:
        image: (H, W, C) 原图
        field: 同形状噪声场，功率须大于 0
        target_db: 目标 SNR；+∞ 表示不加噪
        clip: 是否把结果裁剪到 [0, 255]，裁剪后重新计算实际 SNR

    Returns:
        (attacked, achieved_snr_db)
    """
    image = as_image(image)
    field = np.asarray(field, dtype=np.float64)
    if field.shape != image.shape:
        raise ShapeMismatchError(f"噪声场形状 {field.shape} 与图像形状 {image.shape} 不一致")

    if target_db == SNR_INF:
        return image.copy(), SNR_INF

    attacked = image + scale_to_snr(image, field, target_db)
    if clip:
        np.clip(attacked, 0.0, 255.0, out=attacked)
    achieved = snr_db(image, attacked)
    if clip and math.isfinite(achieved) and abs(achieved - target_db) > 1e-6:
        logger.debug(f"裁剪使实际 SNR 偏离目标: {target_db:.3f} dB → {achieved:.3f} dB")
    return attacked, achieved
