"""
异常定义

所有模块共享的异常层级，CLI 统一捕获 StableNoiseError。
"""

from typing import Optional


class StableNoiseError(Exception):
    """项目异常基类"""


class ParameterDomainError(StableNoiseError, ValueError):
    """参数越界（分布参数、尺度、数量等）"""


class EmptyInputError(StableNoiseError, ValueError):
    """空输入"""


class ShapeMismatchError(StableNoiseError, ValueError):
    """图像与噪声形状不一致"""


class UndefinedSnrError(StableNoiseError, ArithmeticError):
    """原始信号功率为零，SNR无定义"""


class ScalingImpossibleError(StableNoiseError, ArithmeticError):
    """信号或噪声功率为零，无法缩放到目标SNR"""


class FramingError(StableNoiseError, ValueError):
    """比特流长度不匹配"""


class DatasetError(StableNoiseError, ValueError):
    """数据集结构错误"""


class ImageFormatError(StableNoiseError, ValueError):
    """PPM/PGM 文件格式错误"""

    def __init__(self, path, reason: str):
        self.path = str(path)
        super().__init__(f"{self.path}: {reason}")


class TrainingDivergedError(StableNoiseError, RuntimeError):
    """训练损失出现非有限值"""

    def __init__(self, epoch: int, loss: float):
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"训练在第 {epoch} 轮发散 (loss={loss})")


class ExternalClassifierError(StableNoiseError, RuntimeError):
    """外部分类器进程错误"""


class ProtocolError(ExternalClassifierError):
    """外部分类器返回了不合协议的行"""

    def __init__(self, line: str, reason: str):
        self.line = line
        super().__init__(f"{reason}: {line!r}")


class ClassifierTimeoutError(ExternalClassifierError):
    """外部分类器响应超时"""


class ConfigError(StableNoiseError, ValueError):
    """实验配置校验失败"""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class OutputExistsError(StableNoiseError, FileExistsError):
    """输出目录已存在且未指定 --force"""
