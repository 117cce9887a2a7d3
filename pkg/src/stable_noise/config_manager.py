"""
统一配置管理器

负责加载 config/config.yaml 中的应用级配置（日志、路径、并行度、输出格式）。
实验本身的参数由 experiments.config.ExperimentConfig 从 JSON 读取。
"""

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv
from loguru import logger

# 加载环境变量
load_dotenv()


@dataclass
class LoggingConfig:
    """日志配置"""
    level: str = "INFO"
    save_to_file: bool = True
    max_file_size: str = "10 MB"
    backup_count: int = 7
    log_dir: str = "logs"


@dataclass
class PathConfig:
    """路径配置"""
    data_dir: str = "data"
    output_dir: str = "output"


@dataclass
class PerformanceConfig:
    """性能配置"""
    threads: int = 1


@dataclass
class OutputConfig:
    """数值输出格式（有效数字位数）"""
    sample_digits: int = 9
    csv_digits: int = 9
    model_digits: int = 17


def _section(cls, data: Dict[str, Any]):
    """只取数据类已声明的字段，未知键记录警告"""
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        logger.warning(f"忽略未知配置项 {cls.__name__}: {sorted(unknown)}")
    return cls(**{k: v for k, v in data.items() if k in known})


class ConfigManager:
    """统一配置管理器"""

    _instance = None

    def __new__(cls, config_path: Optional[Path] = None):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self, config_path: Optional[Path] = None):
        if hasattr(self, '_initialized'):
            return

        self._initialized = True
        self.config_path = Path(config_path) if config_path else self._get_config_path()
        self._config_data: Dict[str, Any] = {}
        self.load_config()

    def _get_config_path(self) -> Path:
        """获取配置文件路径"""
        override = os.getenv("STABLENOISE_CONFIG")
        if override:
            return Path(override)

        # 向上查找到项目根目录
        current_dir = Path(__file__).parent
        for _ in range(5):
            config_path = current_dir / "config" / "config.yaml"
            if config_path.exists():
                return config_path
            current_dir = current_dir.parent

        return Path(__file__).parent.parent.parent / "config" / "config.yaml"

    def load_config(self):
        """加载配置文件并初始化各配置节"""
        try:
            if self.config_path.exists():
                with open(self.config_path, 'r', encoding='utf-8') as f:
                    self._config_data = yaml.safe_load(f) or {}
                logger.debug(f"配置文件加载成功: {self.config_path}")
            else:
                logger.warning(f"配置文件不存在: {self.config_path}，使用默认配置")
                self._config_data = {}
        except yaml.YAMLError as e:
            logger.error(f"加载配置文件失败: {e}")
            self._config_data = {}

        self.logging = _section(LoggingConfig, self._get_section("logging"))
        self.paths = _section(PathConfig, self._get_section("paths"))
        self.performance = _section(PerformanceConfig, self._get_section("performance"))
        self.output = _section(OutputConfig, self._get_section("output"))

        level = os.getenv("STABLENOISE_LOG_LEVEL")
        if level:
            self.logging.level = level.upper()

    def _get_section(self, section_name: str) -> Dict[str, Any]:
        """获取配置节"""
        return self._config_data.get(section_name) or {}

    @classmethod
    def reset(cls):
        """丢弃单例，测试中切换配置文件时使用"""
        global _config_manager
        cls._instance = None
        _config_manager = None


# 全局配置实例
_config_manager: Optional[ConfigManager] = None


def get_config() -> ConfigManager:
    """获取全局配置管理器实例"""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager
