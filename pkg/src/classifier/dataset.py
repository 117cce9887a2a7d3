"""
Labeled image datasets
带标签的图像数据集

目录布局 root/<class_name>/*.ppm|*.pgm；类别按子目录名排序，样本按完整路径排序。
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from image_noise.netpbm import read_netpbm, write_netpbm
from stable_noise.errors import DatasetError
from stable_noise.rng import derive_seed

IMAGE_SUFFIXES = (".ppm", ".pgm")


@dataclass
class LabeledDataset:
    """图像与类别下标"""
    images: List[np.ndarray]
    labels: np.ndarray
    class_names: List[str]
    paths: Optional[List[str]] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if len(self.images) != self.labels.size:
            raise DatasetError(f"图像数 {len(self.images)} 与标签数 {self.labels.size} 不一致")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= len(self.class_names)):
            raise DatasetError("类别下标超出 class_names 范围")

    def __len__(self) -> int:
        return len(self.images)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def class_counts(self) -> List[int]:
        return np.bincount(self.labels, minlength=self.n_classes).tolist()

    def subset(self, indices: Sequence[int]) -> "LabeledDataset":
        indices = [int(i) for i in indices]
        return LabeledDataset(
            images=[self.images[i] for i in indices],
            labels=self.labels[indices] if indices else np.empty(0, dtype=np.int64),
            class_names=list(self.class_names),
            paths=[self.paths[i] for i in indices] if self.paths else None,
            meta=dict(self.meta),
        )


def load_dataset(root) -> LabeledDataset:
    """
    从目录导入数据集

    Args:
        root: 每个类别一个子目录，内含 P6/P5 文件

    Returns:
        LabeledDataset
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"数据集目录不存在: {root}")

    class_dirs = sorted((p for p in root.iterdir() if p.is_dir()), key=lambda p: p.name)
    if not class_dirs:
        raise DatasetError(f"数据集目录下没有类别子目录: {root}")

    images, labels, paths = [], [], []
    for index, class_dir in enumerate(class_dirs):
        files = sorted(
            str(p) for p in class_dir.iterdir()
            if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
        )
        if not files:
            raise DatasetError(f"类别 {class_dir.name} 中没有 PPM/PGM 图像")
        for path in files:
            images.append(read_netpbm(path))
            labels.append(index)
            paths.append(path)

    dataset = LabeledDataset(images, labels, [p.name for p in class_dirs], paths)
    logger.info(f"数据集加载完成: {root}，{len(dataset)} 张图像，{dataset.n_classes} 个类别")
    return dataset


def write_dataset(dataset: LabeledDataset, root) -> List[Path]:
    """按 root/<class>/<序号>.pgm|ppm 导出数据集"""
    root = Path(root)
    written = []
    for i, (image, label) in enumerate(zip(dataset.images, dataset.labels)):
        suffix = ".pgm" if image.shape[2] == 1 else ".ppm"
        path = root / dataset.class_names[label] / f"{i:06d}{suffix}"
        written.append(write_netpbm(path, image))
    logger.info(f"数据集已导出到 {root}，共 {len(written)} 个文件")
    return written


def split(dataset: LabeledDataset, test_fraction: float, seed: int) -> Tuple[LabeledDataset, LabeledDataset]:
    """
    分层划分训练集与测试集

    每个类别内按种子打乱下标，取 round(fraction·n) 个（至少 1 个、至多 n−1 个）作测试。
    """
    if not 0.0 < test_fraction < 1.0:
        raise DatasetError(f"test_fraction 必须在 (0, 1) 内，当前为 {test_fraction}")

    train_idx, test_idx = [], []
    for label in range(dataset.n_classes):
        members = np.nonzero(dataset.labels == label)[0]
        if members.size < 2:
            raise DatasetError(f"类别 {dataset.class_names[label]} 样本不足 2 个，无法划分")
        rng = np.random.default_rng(derive_seed(seed, "split", label))
        shuffled = members[rng.permutation(members.size)]
        n_test = min(max(int(round(test_fraction * members.size)), 1), members.size - 1)
        test_idx.extend(shuffled[:n_test].tolist())
        train_idx.extend(shuffled[n_test:].tolist())

    return dataset.subset(sorted(train_idx)), dataset.subset(sorted(test_idx))
