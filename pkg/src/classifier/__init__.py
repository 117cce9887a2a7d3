"""
分类器模块 - 图像管道中的分类器
包含数据集导入与划分、softmax 线性分类器、合成数据集与外部分类器适配器
"""

from .protocol import ImageClassifier
from .dataset import LabeledDataset, load_dataset, write_dataset, split
from .softmax import (
    SoftmaxModel,
    TrainConfig,
    DEFAULT_FEATURE_SIDE,
    preprocess,
    feature_matrix,
    loss_and_gradient,
    objective,
    train,
    predict,
    accuracy,
    save_model,
    load_model,
)
from .synthetic import gen_synthetic, CLASS_NAMES
from .external import ExternalClassifier, create_external_classifier, parse_response


__all__ = [
    'ImageClassifier',
    'LabeledDataset',
    'load_dataset',
    'write_dataset',
    'split',
    'SoftmaxModel',
    'TrainConfig',
    'DEFAULT_FEATURE_SIDE',
    'preprocess',
    'feature_matrix',
    'loss_and_gradient',
    'objective',
    'train',
    'predict',
    'accuracy',
    'save_model',
    'load_model',
    'gen_synthetic',
    'CLASS_NAMES',
    'ExternalClassifier',
    'create_external_classifier',
    'parse_response',
]
