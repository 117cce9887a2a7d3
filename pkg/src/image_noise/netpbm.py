"""
PPM/PGM 读写

只接受二进制 P6 (RGB) 与 P5 (灰度)，maxval 不超过 255。
"""

from pathlib import Path
from typing import Union

import numpy as np
from loguru import logger
from PIL import Image, UnidentifiedImageError

from stable_noise.errors import ImageFormatError

PathLike = Union[str, Path]

_MAGIC_CHANNELS = {b"P5": 1, b"P6": 3}


def _read_magic(path: Path) -> bytes:
    try:
        with open(path, "rb") as f:
            return f.read(2)
    except OSError as e:
        raise ImageFormatError(path, f"无法读取文件 ({e})") from e


def read_netpbm(path: PathLike) -> np.ndarray:
    """
    读取 P5/P6 文件

    Returns:
        (H, W, C) float64 数组，像素值 0..255
    """
    path = Path(path)
    magic = _read_magic(path)
    if magic not in _MAGIC_CHANNELS:
        raise ImageFormatError(path, f"不支持的文件头 {magic!r}，需要 P5 或 P6")

    try:
        with Image.open(path) as img:
            img.load()
            if img.mode not in ("L", "RGB"):
                raise ImageFormatError(path, f"不支持的像素模式 {img.mode}（maxval 必须 <= 255）")
            data = np.asarray(img, dtype=np.float64)
    except (UnidentifiedImageError, SyntaxError, OSError, ValueError) as e:
        if isinstance(e, ImageFormatError):
            raise
        raise ImageFormatError(path, f"文件头或数据损坏 ({e})") from e

    if data.ndim == 2:
        data = data[:, :, np.newaxis]
    if data.shape[2] != _MAGIC_CHANNELS[magic]:
        raise ImageFormatError(path, "通道数与文件头不符")
    return data


def to_uint8(image: np.ndarray) -> np.ndarray:
    """裁剪到 [0, 255] 并四舍五入"""
    return np.clip(np.rint(np.asarray(image, dtype=np.float64)), 0, 255).astype(np.uint8)


def write_netpbm(path: PathLike, image: np.ndarray) -> Path:
    """
    写出 P5（单通道）或 P6（三通道）文件，像素先裁剪、取整

    Args:
        path: 输出路径
        image: (H, W, C) 或 (H, W) 数组，C 为 1 或 3
    """
    path = Path(path)
    data = to_uint8(image)
    if data.ndim == 3 and data.shape[2] == 1:
        data = data[:, :, 0]
    if data.ndim == 3 and data.shape[2] != 3:
        raise ImageFormatError(path, f"只能写出 1 或 3 通道图像，当前 {data.shape[2]} 通道")
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(data).save(path, format="PPM")
    logger.debug(f"图像已写出: {path}")
    return path
