"""
Experiment runner
实验运行器

按 ExperimentConfig 依次执行 BER、准确率下降与集中噪声三个实验，
全部计算完成后一次性写出 CSV 与 manifest。
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from loguru import logger

from classifier.dataset import LabeledDataset, load_dataset, split
from classifier.external import create_external_classifier
from classifier.softmax import save_model, train
from classifier.synthetic import gen_synthetic
from comm_sim.sweep import ber_sweep
from stable_noise.curves import SweepCurve
from stable_noise.errors import OutputExistsError
from .config import ExperimentConfig
from .reports import (
    acc_drop_frame,
    ber_frame,
    build_manifest,
    shapes_frame,
    write_csv,
    write_manifest,
)
from .sweeps import acc_drop_sweep, shaped_sweep

MANIFEST_NAME = "manifest.json"
MODEL_NAME = "model.txt"


@dataclass
class RunResult:
    """一次运行的产物"""
    out_dir: Path
    files: Dict[str, Path] = field(default_factory=dict)
    curves: Dict[str, List[SweepCurve]] = field(default_factory=dict)
    clean_accuracy: Optional[float] = None


def prepare_output_dir(out_dir, force: bool = False) -> Path:
    """已存在且非空的输出目录只有在 force 时才允许复用"""
    out_dir = Path(out_dir)
    if out_dir.exists():
        if not out_dir.is_dir():
            raise OutputExistsError(f"输出路径已存在且不是目录: {out_dir}")
        if any(out_dir.iterdir()) and not force:
            raise OutputExistsError(f"输出目录非空: {out_dir}（使用 --force 覆盖）")
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def load_image_data(config: ExperimentConfig) -> LabeledDataset:
    """优先读取 dataset_root，否则生成合成数据集"""
    if config.dataset_root:
        return load_dataset(config.dataset_root)
    section = config.synthetic
    return gen_synthetic(section.per_class, section.side, section.seed)


def build_classifier(config: ExperimentConfig, train_set: LabeledDataset):
    """
    外部命令优先；否则在训练集上训练内置 softmax 模型

    Returns:
        (classifier, 内置模型或 None)
    """
    if config.external_command:
        logger.info(f"使用外部分类器: {config.external_command}")
        classifier = create_external_classifier(
            config.external_command,
            timeout=config.external_timeout,
            processes=config.external_processes,
            n_classes=train_set.n_classes,
        )
        return classifier, None
    model = train(train_set, config.train.to_train_config(), config.feature_side)
    return model, model


def run_ber(config: ExperimentConfig, threads: int = 1) -> List[SweepCurve]:
    curves = []
    for codec in config.codecs:
        curves.extend(ber_sweep(config.alphas, config.snr_grid_db, codec, config.n_bits, config.base_seed,
                                keep_fraction=config.keep_fraction, threads=threads))
        for window in config.burst_windows:
            curves.extend(ber_sweep(config.alphas, config.snr_grid_db, codec, config.n_bits, config.base_seed,
                                    burst_window=window, keep_fraction=config.keep_fraction, threads=threads))
    return curves


def run_image_experiments(config: ExperimentConfig, threads: int = 1) -> Tuple[Dict[str, List[SweepCurve]], dict]:
    """准确率下降与集中噪声实验，共用同一个数据划分和分类器"""
    dataset = load_image_data(config)
    train_set, test_set = split(dataset, config.test_fraction, config.base_seed)
    logger.info(f"数据划分: 训练 {len(train_set)} 张, 测试 {len(test_set)} 张")
    classifier, model = build_classifier(config, train_set)

    curves = {}
    if "acc_drop" in config.experiments:
        curves["acc_drop"] = acc_drop_sweep(classifier, test_set, config.alphas, config.snr_grid_db,
                                            config.base_seed, clip=config.clip, beta=config.noise_beta,
                                            threads=threads)
    if "shapes" in config.experiments:
        curves["shapes"] = shaped_sweep(classifier, test_set, config.shape_specs, config.snr_grid_db,
                                        config.base_seed, keep_fraction=config.keep_fraction, clip=config.clip,
                                        beta=config.noise_beta, threads=threads)

    first_curve = next(iter(curves.values()))
    info = {
        "classes": list(dataset.class_names),
        "n_train": len(train_set),
        "n_test": len(test_set),
        "clean_accuracy": first_curve[0].points[0].details["clean_acc"],
        "model": model,
    }
    return curves, info


def run(config: ExperimentConfig, out_dir, force: bool = False, threads: int = 1,
        csv_digits: int = 9, model_digits: int = 17) -> RunResult:
    """
    执行配置中选定的实验并写出结果

    Args:
        config: 已校验的实验配置
        out_dir: 输出目录
        force: 允许覆盖非空目录
        threads: 网格点并行线程数，不影响结果

    Returns:
        RunResult
    """
    out_dir = prepare_output_dir(out_dir, force)
    result = RunResult(out_dir=out_dir)
    logger.info(f"开始运行实验 {config.experiments}, base_seed={config.base_seed}, 输出到 {out_dir}")

    if "ber" in config.experiments:
        result.curves["ber"] = run_ber(config, threads)

    extra = {}
    if {"acc_drop", "shapes"} & set(config.experiments):
        image_curves, info = run_image_experiments(config, threads)
        result.curves.update(image_curves)
        result.clean_accuracy = info["clean_accuracy"]
        model = info.pop("model")
        if model is not None:
            result.files["model"] = save_model(model, out_dir / MODEL_NAME, model_digits)
        extra["image_pipeline"] = info

    # 计算全部完成后才写文件
    frames = {"ber": ber_frame, "acc_drop": acc_drop_frame, "shapes": shapes_frame}
    for name in ("ber", "acc_drop", "shapes"):
        if name in result.curves:
            result.files[name] = write_csv(frames[name](result.curves[name]), out_dir / f"{name}.csv", csv_digits)

    manifest = build_manifest(config.echo(), result.curves, extra)
    result.files["manifest"] = write_manifest(manifest, out_dir / MANIFEST_NAME)
    logger.info("实验运行完成")
    return result
