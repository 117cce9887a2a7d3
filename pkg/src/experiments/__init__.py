"""
实验编排模块 - BER、准确率下降与集中噪声三组实验
包含实验配置、扫描、CSV/manifest 输出与一键运行
"""

from .config import (
    ExperimentConfig,
    DEFAULT_ALPHAS,
    DEFAULT_SNR_GRID_DB,
    parse_snr,
    format_snr,
    parse_config,
    load_experiment_config,
)
from .sweeps import acc_drop_sweep, shaped_sweep, standard_error
from .reports import (
    ber_frame,
    acc_drop_frame,
    shapes_frame,
    write_csv,
    curve_summary,
    ber_ordering_report,
    shapes_report,
    build_manifest,
    write_manifest,
)
from .runner import RunResult, run, prepare_output_dir

__all__ = [
    'ExperimentConfig',
    'DEFAULT_ALPHAS',
    'DEFAULT_SNR_GRID_DB',
    'parse_snr',
    'format_snr',
    'parse_config',
    'load_experiment_config',
    'acc_drop_sweep',
    'shaped_sweep',
    'standard_error',
    'ber_frame',
    'acc_drop_frame',
    'shapes_frame',
    'write_csv',
    'curve_summary',
    'ber_ordering_report',
    'shapes_report',
    'build_manifest',
    'write_manifest',
    'RunResult',
    'run',
    'prepare_output_dir',
]
