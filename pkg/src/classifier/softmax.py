"""
Softmax linear classifier
Softmax 线性分类器

特征：通道均值灰度 → d×d 平均池化 → 除以 255。
目标函数：平均交叉熵 + (l2/2)·‖W‖²，小批量梯度下降，零初始化。
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.special import log_softmax, softmax

from stable_noise.errors import DatasetError, ParameterDomainError, TrainingDivergedError
from stable_noise.rng import derive_seed
from stable_noise.snr import as_image
from .dataset import LabeledDataset
from .protocol import ImageClassifier

MODEL_MAGIC = "SOFTMAX1"
DEFAULT_FEATURE_SIDE = 16


@dataclass(frozen=True)
class TrainConfig:
    """训练配置"""
    learning_rate: float = 0.1
    epochs: int = 100
    batch_size: int = 32
    l2: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0.0):
            raise ParameterDomainError(f"learning_rate 必须 > 0，当前为 {self.learning_rate}")
        if self.epochs < 0:
            raise ParameterDomainError(f"epochs 必须 >= 0，当前为 {self.epochs}")
        if self.batch_size < 1:
            raise ParameterDomainError(f"batch_size 必须 >= 1，当前为 {self.batch_size}")
        if not (math.isfinite(self.l2) and self.l2 >= 0.0):
            raise ParameterDomainError(f"l2 必须 >= 0，当前为 {self.l2}")


def preprocess(image: np.ndarray, feature_side: int = DEFAULT_FEATURE_SIDE) -> np.ndarray:
    """
    图像 → d² 维特征向量

    第 i 行格子覆盖 floor(i·H/d) .. floor((i+1)·H/d)；d 大于图像边长时，
    空格子取其起点处的单个像素。像素值不做裁剪。
    """
    if feature_side < 1:
        raise ParameterDomainError(f"feature_side 必须 >= 1，当前为 {feature_side}")
    gray = as_image(image).mean(axis=2)
    height, width = gray.shape

    row_starts = (np.arange(feature_side) * height) // feature_side
    col_starts = (np.arange(feature_side) * width) // feature_side
    row_counts = np.maximum(np.diff(np.append(row_starts, height)), 1)
    col_counts = np.maximum(np.diff(np.append(col_starts, width)), 1)

    sums = np.add.reduceat(np.add.reduceat(gray, row_starts, axis=0), col_starts, axis=1)
    cells = sums / (row_counts[:, np.newaxis] * col_counts[np.newaxis, :])
    return (cells / 255.0).ravel()


def feature_matrix(images: Sequence[np.ndarray], feature_side: int) -> np.ndarray:
    """批量提取特征，形状 (N, d²)"""
    if not images:
        return np.empty((0, feature_side * feature_side), dtype=np.float64)
    return np.stack([preprocess(image, feature_side) for image in images])


@dataclass
class SoftmaxModel:
    """线性 softmax 模型"""
    weights: np.ndarray
    bias: np.ndarray
    feature_side: int
    class_names: List[str]
    loss_history: List[float] = field(default_factory=list)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64).ravel()
        k = len(self.class_names)
        if self.weights.shape != (k, self.feature_side ** 2) or self.bias.shape != (k,):
            raise ParameterDomainError(
                f"模型形状不一致: weights {self.weights.shape}, bias {self.bias.shape}, "
                f"K={k}, d={self.feature_side}"
            )
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ParameterDomainError("模型参数含非有限值")

    @classmethod
    def zeros(cls, class_names: Sequence[str], feature_side: int) -> "SoftmaxModel":
        k = len(class_names)
        return cls(np.zeros((k, feature_side ** 2)), np.zeros(k), feature_side, list(class_names))

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def probabilities(self, features: np.ndarray) -> np.ndarray:
        """softmax(Wx + b)，按行计算"""
        logits = np.atleast_2d(features) @ self.weights.T + self.bias
        return softmax(logits, axis=1)

    def classify(self, images: Sequence[np.ndarray]) -> np.ndarray:
        """批量预测类别下标（并列时取最小下标）"""
        if not images:
            return np.empty(0, dtype=np.int64)
        return np.argmax(self.probabilities(feature_matrix(images, self.feature_side)), axis=1)


def loss_and_gradient(weights: np.ndarray, bias: np.ndarray, features: np.ndarray, labels: np.ndarray,
                      l2: float) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    目标函数及其解析梯度

    Returns:
        (loss, dL/dW, dL/db)
    """
    m = features.shape[0]
    rows = np.arange(m)
    log_probs = log_softmax(features @ weights.T + bias, axis=1)
    loss = -float(np.mean(log_probs[rows, labels])) + 0.5 * l2 * float(np.sum(weights * weights))

    delta = np.exp(log_probs)
    delta[rows, labels] -= 1.0
    grad_w = delta.T @ features / m + l2 * weights
    grad_b = delta.mean(axis=0)
    return loss, grad_w, grad_b


def objective(model: SoftmaxModel, dataset: LabeledDataset, l2: float = 0.0) -> float:
    """数据集上的目标函数值"""
    features = feature_matrix(dataset.images, model.feature_side)
    return loss_and_gradient(model.weights, model.bias, features, dataset.labels, l2)[0]


def train(train_set: LabeledDataset, cfg: TrainConfig, feature_side: int = DEFAULT_FEATURE_SIDE) -> SoftmaxModel:
    """
    小批量梯度下降训练

    每轮用 derive_seed(cfg.seed, "epoch", 轮次) 打乱样本；每轮结束记录全训练集目标函数值。
    """
    if len(train_set) == 0:
        raise DatasetError("训练集为空")
    missing = [name for name, count in zip(train_set.class_names, train_set.class_counts()) if count == 0]
    if missing:
        raise DatasetError(f"以下类别在训练集中没有样本: {missing}")

    features = feature_matrix(train_set.images, feature_side)
    labels = train_set.labels
    model = SoftmaxModel.zeros(train_set.class_names, feature_side)
    weights, bias = model.weights.copy(), model.bias.copy()
    m = features.shape[0]

    logger.info(f"开始训练: {m} 个样本, {model.n_classes} 类, d={feature_side}, {cfg}")
    history = []
    for epoch in range(cfg.epochs):
        order = np.random.default_rng(derive_seed(cfg.seed, "epoch", epoch)).permutation(m)
        for start in range(0, m, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            _, grad_w, grad_b = loss_and_gradient(weights, bias, features[batch], labels[batch], cfg.l2)
            weights -= cfg.learning_rate * grad_w
            bias -= cfg.learning_rate * grad_b

        loss = loss_and_gradient(weights, bias, features, labels, cfg.l2)[0]
        if not math.isfinite(loss) or not np.all(np.isfinite(weights)):
            raise TrainingDivergedError(epoch + 1, loss)
        history.append(loss)
        logger.debug(f"epoch {epoch + 1}/{cfg.epochs}: loss={loss:.6f}")

    if history:
        logger.info(f"训练完成: 最终 loss={history[-1]:.6f}")
    return SoftmaxModel(weights, bias, feature_side, list(train_set.class_names), history)


def predict(model: SoftmaxModel, image: np.ndarray) -> Tuple[int, np.ndarray]:
    """单张图像预测，返回 (类别下标, 概率向量)"""
    probs = model.probabilities(preprocess(image, model.feature_side))[0]
    return int(np.argmax(probs)), probs


def accuracy(classifier: ImageClassifier, dataset: LabeledDataset) -> float:
    """
    分类准确率

    Args:
        classifier: 任何实现 classify(images) 的分类器
        dataset: 非空数据集
    """
    if len(dataset) == 0:
        raise DatasetError("数据集为空，无法计算准确率")
    predicted = np.asarray(classifier.classify(dataset.images))
    return float(np.count_nonzero(predicted == dataset.labels)) / len(dataset)


def save_model(model: SoftmaxModel, path, digits: int = 17) -> Path:
    """写出 SOFTMAX1 文本格式"""
    path = Path(path)
    for name in model.class_names:
        if not name or "\n" in name or name != name.strip():
            raise ParameterDomainError(f"类别名无法写入模型文件: {name!r}")
    fmt = f"%.{digits}g"
    lines = [f"{MODEL_MAGIC} {model.n_classes} {model.feature_side ** 2} {model.feature_side}"]
    lines.extend(model.class_names)
    lines.append(" ".join(fmt % v for v in model.bias))
    lines.extend(" ".join(fmt % v for v in row) for row in model.weights)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"模型已保存: {path}")
    return path


def load_model(path) -> SoftmaxModel:
    """读取 SOFTMAX1 文本格式"""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split() if lines else []
    if len(header) != 4 or header[0] != MODEL_MAGIC:
        raise ParameterDomainError(f"{path}: 不是 {MODEL_MAGIC} 模型文件")
    k, dim, side = (int(v) for v in header[1:])
    if dim != side * side or len(lines) < 2 + k + k:
        raise ParameterDomainError(f"{path}: 模型文件头与内容不符")

    class_names = lines[1:1 + k]
    bias = np.array([float(v) for v in lines[1 + k].split()])
    weights = np.array([[float(v) for v in line.split()] for line in lines[2 + k:2 + 2 * k]])
    return SoftmaxModel(weights, bias, side, class_names)
