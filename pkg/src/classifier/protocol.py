"""
Classifier protocol
扫描所需的最小分类器接口
"""

from typing import Protocol, Sequence, runtime_checkable

import numpy as np


@runtime_checkable
class ImageClassifier(Protocol):
    """批量输入图像，返回与输入等长的类别下标数组"""

    def classify(self, images: Sequence[np.ndarray]) -> np.ndarray:
        ...
