"""
实验配置

run 命令读取的 JSON 配置，字段名与 ExperimentConfig 一致（lower_snake_case）。
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import AliasChoices, BaseModel, ConfigDict, Field, ValidationError, field_validator

from classifier.softmax import TrainConfig
from comm_sim.codec import CodecKind
from image_noise.shapes import DEFAULT_SHAPE_SIZES, ShapeKind, ShapeSpec
from stable_noise.errors import ConfigError

DEFAULT_ALPHAS = [0.5, 0.9, 1.0, 1.5, 2.0]
DEFAULT_SNR_GRID_DB = [-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
EXPERIMENT_NAMES = ("ber", "acc_drop", "shapes")


def parse_snr(value: Any) -> float:
    """数值或字面量 "inf" → float"""
    if isinstance(value, str):
        token = value.strip().lower()
        if token in ("inf", "+inf"):
            return math.inf
        try:
            return float(token)
        except ValueError:
            raise ValueError(f"无法解析的 SNR 值: {value!r}")
    return float(value)


def format_snr(value: float) -> Any:
    return "inf" if value == math.inf else value


class SyntheticSection(BaseModel):
    """合成数据集参数"""
    model_config = ConfigDict(extra="forbid")

    per_class: int = Field(200, ge=1)
    side: int = Field(64, ge=16)
    seed: int = Field(1, ge=0)


class ShapeSection(BaseModel):
    """形状噪声参数；size 缺省时取该形状的默认尺寸"""
    model_config = ConfigDict(extra="forbid")

    kind: ShapeKind
    size: Optional[int] = Field(None, ge=1)

    def to_spec(self) -> ShapeSpec:
        return ShapeSpec(self.kind, self.size or DEFAULT_SHAPE_SIZES[self.kind])


class TrainSection(BaseModel):
    """训练参数"""
    model_config = ConfigDict(extra="forbid")

    learning_rate: float = Field(0.1, gt=0)
    epochs: int = Field(100, ge=0)
    batch_size: int = Field(32, ge=1)
    l2: float = Field(1e-4, ge=0)
    seed: int = Field(0, ge=0)

    def to_train_config(self) -> TrainConfig:
        return TrainConfig(**self.model_dump())


class ExperimentConfig(BaseModel):
    """完整实验配置"""
    model_config = ConfigDict(extra="forbid")

    base_seed: int = Field(0, ge=0, lt=2 ** 64)
    experiments: List[Literal["ber", "acc_drop", "shapes"]] = Field(
        default_factory=lambda: list(EXPERIMENT_NAMES), min_length=1
    )
    alphas: List[float] = Field(default_factory=lambda: list(DEFAULT_ALPHAS), min_length=1)
    snr_grid_db: List[float] = Field(default_factory=lambda: list(DEFAULT_SNR_GRID_DB), min_length=1)

    # 通信管道
    n_bits: int = Field(100_000, ge=10_000)
    codecs: List[CodecKind] = Field(
        default_factory=lambda: [CodecKind.NONE, CodecKind.HAMMING74],
        min_length=1,
        validation_alias=AliasChoices("codecs", "codec"),
    )
    burst_windows: List[int] = Field(default_factory=list)

    # 图像管道
    dataset_root: Optional[str] = None
    synthetic: SyntheticSection = Field(default_factory=SyntheticSection)
    test_fraction: float = Field(0.5, gt=0, lt=1)
    shapes: List[ShapeSection] = Field(
        default_factory=lambda: [ShapeSection(kind=kind) for kind in ShapeKind], min_length=1
    )
    keep_fraction: float = Field(0.01, gt=0, le=1)
    clip: bool = False
    noise_beta: float = Field(0.0, ge=-1, le=1)
    train: TrainSection = Field(default_factory=TrainSection)
    feature_side: int = Field(16, ge=1)
    external_command: Optional[str] = None
    external_timeout: float = Field(30.0, gt=0)
    external_processes: int = Field(1, ge=1)

    @field_validator("alphas")
    @classmethod
    def _check_alphas(cls, values: List[float]) -> List[float]:
        for alpha in values:
            if not (math.isfinite(alpha) and 0 < alpha <= 2):
                raise ValueError(f"alpha 必须满足 0 < alpha <= 2，当前为 {alpha}")
        return values

    @field_validator("snr_grid_db", mode="before")
    @classmethod
    def _parse_grid(cls, values: Any) -> List[float]:
        if not isinstance(values, (list, tuple)):
            raise ValueError("snr_grid_db 必须是列表")
        return [parse_snr(v) for v in values]

    @field_validator("snr_grid_db")
    @classmethod
    def _check_grid(cls, values: List[float]) -> List[float]:
        for value in values:
            if math.isnan(value) or value == -math.inf:
                raise ValueError(f"SNR 值无效: {value}")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("snr_grid_db 必须严格升序（inf 只能放在最后）")
        return values

    @field_validator("codecs", mode="before")
    @classmethod
    def _single_codec(cls, values: Any) -> Any:
        # "codec": "hamming74" 与 "codecs": ["hamming74"] 等价
        if isinstance(values, (str, CodecKind)):
            return [values]
        return values

    @field_validator("burst_windows")
    @classmethod
    def _check_windows(cls, values: List[int]) -> List[int]:
        if any(w < 1 for w in values):
            raise ValueError("burst_windows 中的窗口长度必须 >= 1")
        return values

    @property
    def shape_specs(self) -> List[ShapeSpec]:
        return [shape.to_spec() for shape in self.shapes]

    def echo(self) -> Dict[str, Any]:
        """可写入 JSON 的配置回显；inf 写成字符串 "inf" """
        data = self.model_dump(mode="json", exclude={"snr_grid_db"})
        data["base_seed"] = self.base_seed
        data["snr_grid_db"] = [format_snr(v) for v in self.snr_grid_db]
        return data


def config_error_from(error: ValidationError) -> ConfigError:
    """把 pydantic 校验错误整理成逐字段的信息"""
    fields, messages = [], []
    for item in error.errors():
        field = ".".join(str(part) for part in item["loc"]) or "<root>"
        fields.append(field)
        messages.append(f"{field}: {item['msg']}")
    config_error = ConfigError("; ".join(messages))
    config_error.field = fields[0] if fields else None
    return config_error


def parse_config(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise config_error_from(e) from e


def load_experiment_config(path) -> ExperimentConfig:
    """读取并校验 JSON 配置文件"""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"配置文件不存在: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"配置文件不是合法 JSON ({e})")
    if not isinstance(data, dict):
        raise ConfigError("配置文件顶层必须是 JSON 对象")
    return parse_config(data)
