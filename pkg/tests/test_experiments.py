"""
实验编排测试模块
测试实验配置校验、准确率下降扫描、集中噪声扫描、结果文件与一键运行
"""

import json
import math
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

# 添加src目录到Python路径
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from classifier import ImageClassifier, LabeledDataset, TrainConfig, gen_synthetic, split, train
from comm_sim import CodecKind
from experiments import (
    ExperimentConfig,
    acc_drop_sweep,
    build_manifest,
    load_experiment_config,
    parse_config,
    prepare_output_dir,
    run,
    shaped_sweep,
    shapes_report,
    standard_error,
    write_csv,
    acc_drop_frame,
)
from experiments.runner import MANIFEST_NAME, MODEL_NAME
from image_noise import ShapeKind, ShapeSpec
from stable_noise import SNR_INF
from stable_noise.errors import ConfigError, DatasetError, OutputExistsError, ParameterDomainError


class BrightnessClassifier:
    """按平均亮度判类：亮于 128 为 1，否则为 0"""

    def classify(self, images):
        return np.array([int(np.mean(image) > 128.0) for image in images], dtype=np.int64)


def brightness_dataset(per_class=6, side=16):
    rng = np.random.default_rng(0)
    images = [rng.uniform(40.0, 80.0, size=(side, side, 1)) for _ in range(per_class)]
    images += [rng.uniform(180.0, 220.0, size=(side, side, 1)) for _ in range(per_class)]
    return LabeledDataset(images, [0] * per_class + [1] * per_class, ["dark", "light"])


def minimal_config(**overrides):
    data = {
        "base_seed": 11,
        "alphas": [0.9, 2.0],
        "snr_grid_db": [-5, 10, "inf"],
        "n_bits": 10000,
        "codecs": ["none"],
        "synthetic": {"per_class": 4, "side": 16, "seed": 1},
        "shapes": [{"kind": "square"}],
        "train": {"epochs": 2},
        "feature_side": 4,
    }
    data.update(overrides)
    return parse_config(data)


class TestExperimentConfig:
    """测试实验配置"""

    def test_defaults(self):
        """缺省值"""
        config = ExperimentConfig()
        assert config.experiments == ["ber", "acc_drop", "shapes"]
        assert config.alphas == [0.5, 0.9, 1.0, 1.5, 2.0]
        assert config.keep_fraction == 0.01
        assert [spec.label for spec in config.shape_specs] == ["square-3", "triangle-3", "rhombus-1"]

    def test_inf_in_grid(self):
        """网格可用字面量 "inf"，回显时写回字符串"""
        config = minimal_config()
        assert config.snr_grid_db == [-5.0, 10.0, SNR_INF]
        assert config.echo()["snr_grid_db"] == [-5.0, 10.0, "inf"]

    @pytest.mark.parametrize(
        "overrides,field",
        [
            ({"alphas": [0.0]}, "alphas"),
            ({"alphas": [2.5]}, "alphas"),
            ({"snr_grid_db": [10, 5]}, "snr_grid_db"),
            ({"snr_grid_db": ["inf", 0]}, "snr_grid_db"),
            ({"n_bits": 100}, "n_bits"),
            ({"experiments": ["nope"]}, "experiments.0"),
            ({"keep_fraction": 0.0}, "keep_fraction"),
            ({"unknown_field": 1}, "unknown_field"),
        ],
    )
    def test_invalid(self, overrides, field):
        """非法字段报 ConfigError 并指出字段"""
        with pytest.raises(ConfigError) as info:
            minimal_config(**overrides)
        assert info.value.field == field

    @pytest.mark.parametrize(
        "value,expected",
        [
            ("hamming74", [CodecKind.HAMMING74]),
            (["none", "hamming74"], [CodecKind.NONE, CodecKind.HAMMING74]),
        ],
    )
    def test_codec_alias(self, value, expected):
        """"codec" 可代替 "codecs"，接受单个值或列表"""
        config = parse_config({"base_seed": 1, "codec": value})
        assert config.codecs == expected
        assert config.echo()["codecs"] == [codec.value for codec in expected]

    def test_single_codec_under_plural_key(self):
        """"codecs" 也接受单个值"""
        assert parse_config({"codecs": "none"}).codecs == [CodecKind.NONE]

    def test_load_file(self, tmp_path):
        """从 JSON 文件读取"""
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"base_seed": 3, "snr_grid_db": [0, "inf"]}), encoding="utf-8")
        config = load_experiment_config(path)
        assert config.base_seed == 3
        assert config.snr_grid_db == [0.0, SNR_INF]

    def test_load_errors(self, tmp_path):
        """文件不存在或不是 JSON 对象"""
        with pytest.raises(ConfigError):
            load_experiment_config(tmp_path / "missing.json")
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_experiment_config(path)

    def test_example_config_is_valid(self):
        """仓库自带的示例配置可以通过校验"""
        path = Path(__file__).parent.parent / "config" / "example_experiment.json"
        config = load_experiment_config(path)
        assert config.snr_grid_db[-1] == SNR_INF


class TestAccDropSweep:
    """测试准确率下降扫描"""

    def setup_method(self):
        """测试前的准备工作"""
        self.classifier = BrightnessClassifier()
        self.test_set = brightness_dataset()

    def test_structure(self):
        """每个 α 一条曲线，点数等于网格长度"""
        curves = acc_drop_sweep(self.classifier, self.test_set, [0.5, 2.0], [0.0, 20.0, SNR_INF], base_seed=1)
        assert [c.label for c in curves] == ["alpha=0.5", "alpha=2"]
        for curve in curves:
            assert curve.snrs == [0.0, 20.0, SNR_INF]
            assert curve.meta["experiment"] == "acc_drop"
            assert all(p.details["clean_acc"] == 1.0 for p in curve.points)
            assert all(p.details["n_images"] == 12 for p in curve.points)

    def test_infinite_snr_no_drop(self):
        """+∞ 列的下降恰为 0"""
        curves = acc_drop_sweep(self.classifier, self.test_set, [0.9], [10.0, SNR_INF], base_seed=2)
        point = curves[0].points[-1]
        assert point.metric == 0.0
        assert point.details["noisy_acc"] == point.details["clean_acc"]
        assert point.achieved_snr_db == SNR_INF

    def test_achieved_snr(self):
        """不裁剪时平均实际 SNR 等于目标"""
        curves = acc_drop_sweep(self.classifier, self.test_set, [0.9, 1.5], [-5.0, 12.0], base_seed=3)
        for curve in curves:
            for point in curve.points:
                assert abs(point.achieved_snr_db - point.snr_db) < 1e-9

    def test_low_snr_hurts(self):
        """-30 dB 下准确率明显下降"""
        curve = acc_drop_sweep(self.classifier, brightness_dataset(per_class=20), [2.0], [-30.0], base_seed=4)[0]
        assert curve.points[0].metric > 0.1

    def test_threads_do_not_change_results(self):
        """线程数不影响结果"""
        args = (self.classifier, self.test_set, [0.5, 0.9], [-10.0, 0.0, 10.0], 5)
        serial = acc_drop_sweep(*args, threads=1)
        parallel = acc_drop_sweep(*args, threads=3)
        assert [c.metrics for c in serial] == [c.metrics for c in parallel]

    def test_empty_test_set(self):
        """空测试集报错"""
        with pytest.raises(DatasetError):
            acc_drop_sweep(self.classifier, LabeledDataset([], [], ["a", "b"]), [0.9], [0.0], base_seed=1)

    def test_rejects_object_without_classify(self):
        """分类器必须实现 classify"""
        with pytest.raises(ParameterDomainError):
            acc_drop_sweep(object(), self.test_set, [0.9], [0.0], base_seed=1)

    def test_standard_error(self):
        """二项标准误"""
        assert standard_error(0.5, 100) == pytest.approx(0.05)
        assert standard_error(1.0, 10) == 0.0


class TestBuiltinModelOnSynthetic:
    """内置分类器在默认合成数据集上的准确率下降"""

    @classmethod
    def setup_class(cls):
        """训练一次，本类各测试共用"""
        dataset = gen_synthetic(200, side=64, seed=1)
        train_set, cls.test_set = split(dataset, 0.5, seed=0)
        cls.model = train(train_set, TrainConfig(), 16)

    def test_model_satisfies_classifier_protocol(self):
        """SoftmaxModel 满足 ImageClassifier 协议"""
        assert isinstance(self.model, ImageClassifier)

    def test_drop_grows_as_snr_falls(self):
        """+∞ 处下降为 0，-5 dB 的下降大于 30 dB，且沿 SNR 在二项误差内非增"""
        grid = [-5.0, 0.0, 10.0, 20.0, 30.0, SNR_INF]
        curve = acc_drop_sweep(self.model, self.test_set, [2.0], grid, base_seed=21, threads=4)[0]
        drops = curve.metrics
        assert drops[-1] == 0.0
        assert drops[0] > drops[4]
        assert curve.points[0].details["clean_acc"] >= 0.9

        m = len(self.test_set)
        for a, b in zip(curve.points, curve.points[1:]):
            variance = max(p.details["noisy_acc"] * (1.0 - p.details["noisy_acc"]) for p in (a, b))
            assert b.metric <= a.metric + 2.0 * math.sqrt(variance / m)


class TestShapedSweep:
    """测试集中噪声扫描"""

    def setup_method(self):
        """测试前的准备工作"""
        self.classifier = BrightnessClassifier()
        self.test_set = brightness_dataset()
        self.shapes = [ShapeSpec.default(kind) for kind in ShapeKind]

    def test_labels_and_meta(self):
        """基线在前，其后每个形状一条曲线"""
        curves = shaped_sweep(self.classifier, self.test_set, self.shapes, [0.0, SNR_INF], base_seed=1)
        assert [c.label for c in curves] == ["alpha=0.9", "square-3", "triangle-3", "rhombus-1"]
        assert curves[0].meta["shape"] == "iid"
        assert curves[1].meta["size"] == 3
        assert all(c.points[-1].metric == 0.0 for c in curves)

    def test_all_shapes_hit_target(self):
        """每条曲线的平均实际 SNR 都在目标的 1e-9 dB 内"""
        curves = shaped_sweep(self.classifier, self.test_set, self.shapes, [-5.0, 5.0, 15.0], base_seed=2)
        for curve in curves:
            for point in curve.points:
                assert abs(point.achieved_snr_db - point.snr_db) < 1e-9

    def test_threads_do_not_change_results(self):
        """线程数不影响结果"""
        args = (self.classifier, self.test_set, self.shapes, [-5.0, 5.0], 9)
        serial = shaped_sweep(*args, threads=1)
        parallel = shaped_sweep(*args, threads=2)
        assert [c.metrics for c in serial] == [c.metrics for c in parallel]

    def test_shapes_report(self):
        """报告中每个形状与基线比较"""
        curves = shaped_sweep(self.classifier, self.test_set, self.shapes[:1], [0.0, SNR_INF], base_seed=3)
        report = shapes_report(curves)
        assert [entry["snr_db"] for entry in report] == [0.0, "inf"]
        assert set(report[0]["shapes"]) == {"square-3"}
        assert report[1]["shapes"]["square-3"]["exceeds_baseline"] is False


class TestOutputs:
    """测试结果文件"""

    def test_csv_format(self, tmp_path):
        """inf 写成字面量，LF 换行，表头齐全"""
        curves = acc_drop_sweep(BrightnessClassifier(), brightness_dataset(), [0.9], [0.0, SNR_INF], base_seed=1)
        path = write_csv(acc_drop_frame(curves), tmp_path / "acc_drop.csv")
        text = path.read_bytes().decode("utf-8")
        assert "\r\n" not in text
        lines = text.strip().split("\n")
        assert lines[0] == "experiment,alpha,snr_db,mean_achieved_snr_db,n_images,clean_acc,noisy_acc,acc_drop"
        assert lines[2].split(",")[2] == "inf"

    def test_manifest_is_strict_json(self):
        """manifest 中不含 NaN/Infinity"""
        curves = acc_drop_sweep(BrightnessClassifier(), brightness_dataset(), [0.9], [0.0, SNR_INF], base_seed=1)
        manifest = build_manifest(minimal_config().echo(), {"acc_drop": curves})
        json.dumps(manifest, allow_nan=False)
        summary = manifest["summaries"]["acc_drop"][0]
        assert summary["n_points"] == 2
        assert summary["mean_achieved_snr_db"] == pytest.approx(0.0, abs=1e-9)

    def test_prepare_output_dir(self, tmp_path):
        """非空目录需要 force"""
        out = tmp_path / "out"
        prepare_output_dir(out)
        (out / "x.txt").write_text("x", encoding="utf-8")
        with pytest.raises(OutputExistsError):
            prepare_output_dir(out)
        assert prepare_output_dir(out, force=True) == out


class TestRun:
    """测试一键运行"""

    def test_writes_all_outputs(self, tmp_path):
        """三组实验都写出 CSV，manifest 回显 base_seed"""
        config = minimal_config()
        result = run(config, tmp_path / "out")
        out = tmp_path / "out"
        for name in ("ber.csv", "acc_drop.csv", "shapes.csv", MANIFEST_NAME, MODEL_NAME):
            assert (out / name).is_file()

        manifest = json.loads((out / MANIFEST_NAME).read_text(encoding="utf-8"))
        assert manifest["config"]["base_seed"] == 11
        assert manifest["config"]["snr_grid_db"] == [-5.0, 10.0, "inf"]
        assert set(manifest["summaries"]) == {"ber", "acc_drop", "shapes"}
        assert "ber_ordering" in manifest["reports"]
        assert "shapes_vs_baseline" in manifest["reports"]
        assert manifest["image_pipeline"]["n_test"] == 10
        assert result.clean_accuracy == manifest["image_pipeline"]["clean_accuracy"]

        ber = pd.read_csv(out / "ber.csv")
        assert len(ber) == 2 * 3
        assert set(ber["alpha"]) == {0.9, 2.0}

    def test_refuses_non_empty_directory(self, tmp_path):
        """非空目录且未加 force 时拒绝运行"""
        config = minimal_config(experiments=["ber"])
        run(config, tmp_path / "out")
        with pytest.raises(OutputExistsError):
            run(config, tmp_path / "out")
        run(config, tmp_path / "out", force=True)

    def test_threads_give_identical_files(self, tmp_path):
        """不同线程数写出逐字节相同的 CSV"""
        config = minimal_config()
        run(config, tmp_path / "a", threads=1)
        run(config, tmp_path / "b", threads=4)
        for name in ("ber.csv", "acc_drop.csv", "shapes.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_ber_only(self, tmp_path):
        """只运行 BER 时不生成图像管道产物"""
        result = run(minimal_config(experiments=["ber"], burst_windows=[8]), tmp_path / "out")
        assert set(result.files) == {"ber", "manifest"}
        labels = [c.label for c in result.curves["ber"]]
        assert labels == ["alpha=0.9", "alpha=2", "burst-8"]
