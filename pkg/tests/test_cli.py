"""
命令行测试模块
用 click 的 CliRunner 测试主要子命令
"""

import json
import sys
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

# 添加项目根目录和src目录到Python路径
ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(ROOT))
sys.path.insert(0, str(ROOT / "src"))

import main
from classifier import gen_synthetic
from image_noise import read_netpbm, write_netpbm
from stable_noise.config_manager import ConfigManager


@pytest.fixture(autouse=True)
def quiet_config(tmp_path, monkeypatch):
    """日志不落盘，默认输出目录放在临时目录下"""
    config_file = tmp_path / "config.yaml"
    config_file.write_text(
        "paths:\n"
        f"  output_dir: \"{(tmp_path / 'default_out').as_posix()}\"\n"
        "logging:\n"
        "  level: \"WARNING\"\n"
        "  save_to_file: false\n",
        encoding="utf-8",
    )
    monkeypatch.setenv("STABLENOISE_CONFIG", str(config_file))
    ConfigManager.reset()
    yield
    ConfigManager.reset()


@pytest.fixture
def runner():
    return CliRunner()


def small_run_config(path: Path) -> Path:
    path.write_text(json.dumps({
        "base_seed": 5,
        "experiments": ["ber", "acc_drop"],
        "alphas": [2.0],
        "snr_grid_db": [0, "inf"],
        "n_bits": 10000,
        "codecs": ["none"],
        "synthetic": {"per_class": 4, "side": 16, "seed": 1},
        "train": {"epochs": 1},
        "feature_side": 4,
    }), encoding="utf-8")
    return path


class TestCli:
    """测试命令行子命令"""

    def test_version(self, runner):
        """--version"""
        result = runner.invoke(main.cli, ["--version"])
        assert result.exit_code == 0
        assert "1.0.0" in result.output

    def test_capacity(self, runner):
        """香农容量"""
        result = runner.invoke(main.cli, ["capacity", "-w", "3000", "--snr-linear", "1000"])
        assert result.exit_code == 0
        assert "29901.6" in result.output

    def test_capacity_negative_bandwidth(self, runner):
        """负带宽以退出码 1 失败"""
        result = runner.invoke(main.cli, ["capacity", "--bandwidth=-1", "--snr-linear", "1"])
        assert result.exit_code == 1

    def test_stable_sample_to_file(self, runner, tmp_path):
        """--out 时写出全部样本，同种子可复现"""
        args = ["--seed", "3", "--out", str(tmp_path / "s"), "stable", "sample", "-a", "1.5", "-n", "500"]
        result = runner.invoke(main.cli, args)
        assert result.exit_code == 0
        first = (tmp_path / "s" / "samples.txt").read_text(encoding="utf-8").splitlines()
        assert len(first) == 500

        result = runner.invoke(main.cli, args[:4] + ["--force"] + args[4:])
        assert result.exit_code == 0
        assert (tmp_path / "s" / "samples.txt").read_text(encoding="utf-8").splitlines() == first

    def test_stable_sample_bad_alpha(self, runner):
        """非法 α 以退出码 1 失败"""
        result = runner.invoke(main.cli, ["stable", "sample", "-a", "2.5", "-n", "10"])
        assert result.exit_code == 1

    def test_ber_sweep(self, runner, tmp_path):
        """BER 扫描写出 CSV"""
        result = runner.invoke(main.cli, [
            "--out", str(tmp_path / "b"), "ber-sweep", "-a", "2.0", "--snr", "0", "--snr", "inf",
            "--n-bits", "10000",
        ])
        assert result.exit_code == 0
        lines = (tmp_path / "b" / "ber.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "experiment,codec,alpha,snr_db,achieved_snr_db,n_bits,ber"
        assert len(lines) == 3

    def test_gen_noise(self, runner, tmp_path):
        """噪声图像导出为 PGM"""
        result = runner.invoke(main.cli, [
            "--out", str(tmp_path / "n"), "gen-noise", "-a", "0.9", "--height", "16", "--width", "16",
            "--shape", "square",
        ])
        assert result.exit_code == 0
        assert (tmp_path / "n" / "noise.pgm").read_bytes().startswith(b"P5")

    def test_run(self, runner, tmp_path):
        """run 写出结果，--seed 覆盖配置中的 base_seed"""
        config_file = small_run_config(tmp_path / "cfg.json")
        out = tmp_path / "out"
        result = runner.invoke(main.cli, ["--seed", "9", "--out", str(out), "run", str(config_file)])
        assert result.exit_code == 0
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["config"]["base_seed"] == 9
        assert (out / "ber.csv").is_file()
        assert (out / "acc_drop.csv").is_file()

    def test_run_refuses_non_empty_output(self, runner, tmp_path):
        """输出目录非空且未加 --force 时以退出码 1 失败"""
        config_file = small_run_config(tmp_path / "cfg.json")
        out = tmp_path / "out"
        out.mkdir()
        (out / "keep.txt").write_text("x", encoding="utf-8")
        result = runner.invoke(main.cli, ["--out", str(out), "run", str(config_file)])
        assert result.exit_code == 1
        assert not (out / "manifest.json").exists()

    def test_run_invalid_config(self, runner, tmp_path):
        """配置非法时以退出码 1 失败"""
        config_file = tmp_path / "bad.json"
        config_file.write_text(json.dumps({"alphas": [3.0]}), encoding="utf-8")
        result = runner.invoke(main.cli, ["--out", str(tmp_path / "out"), "run", str(config_file)])
        assert result.exit_code == 1


SMALL_IMAGES = ["--per-class", "4", "--side", "16"]


def train_small_model(runner, root: Path) -> Path:
    """在小合成数据集上训练并返回模型文件路径"""
    result = runner.invoke(main.cli, [
        "--seed", "3", "--out", str(root), "train", *SMALL_IMAGES, "--epochs", "2", "--feature-side", "4",
    ])
    assert result.exit_code == 0, result.output
    return root / "model.txt"


class TestImageCommands:
    """测试图像管道相关子命令：输出文件、退出码与 --force"""

    def test_gen_synthetic(self, runner, tmp_path):
        """按类别目录导出；目录非空时需要 --force"""
        out = tmp_path / "data"
        args = ["--seed", "2", "--out", str(out), "gen-synthetic", "--per-class", "2", "--side", "16"]
        result = runner.invoke(main.cli, args)
        assert result.exit_code == 0
        files = sorted(out.glob("*/*.pgm"))
        assert len(files) == 10
        assert {f.parent.name for f in files} == {"cross", "disk", "square", "stripes", "triangle"}
        assert files[0].read_bytes().startswith(b"P5")

        assert runner.invoke(main.cli, args).exit_code == 1
        assert runner.invoke(main.cli, args[:4] + ["--force"] + args[4:]).exit_code == 0

    def test_corrupt(self, runner, tmp_path):
        """单张图像加噪；输出已存在时需要 --force"""
        source = write_netpbm(tmp_path / "in.pgm", np.full((16, 16, 1), 100.0))
        target = tmp_path / "noisy.pgm"
        args = ["corrupt", "-i", str(source), "-o", str(target), "-a", "1.5", "--snr", "10"]
        result = runner.invoke(main.cli, args)
        assert result.exit_code == 0
        noisy = read_netpbm(target)
        assert noisy.shape == (16, 16, 1)
        assert not np.array_equal(noisy, read_netpbm(source))

        assert runner.invoke(main.cli, args).exit_code == 1
        assert runner.invoke(main.cli, ["--force"] + args).exit_code == 0

    def test_corrupt_infinite_snr_copies_image(self, runner, tmp_path):
        """+∞ 时输出与输入相同"""
        source = write_netpbm(tmp_path / "in.pgm", np.arange(256.0).reshape(16, 16, 1))
        target = tmp_path / "same.pgm"
        result = runner.invoke(main.cli, ["corrupt", "-i", str(source), "-o", str(target), "-a", "0.9",
                                          "--snr", "inf"])
        assert result.exit_code == 0
        assert np.array_equal(read_netpbm(target), read_netpbm(source))

    def test_train(self, runner, tmp_path):
        """写出 SOFTMAX1 模型；模型文件已存在时需要 --force"""
        model_path = train_small_model(runner, tmp_path / "m")
        assert model_path.read_text(encoding="utf-8").startswith("SOFTMAX1")

        args = ["--out", str(tmp_path / "m"), "train", *SMALL_IMAGES, "--epochs", "1", "--feature-side", "4"]
        result = runner.invoke(main.cli, args)
        assert result.exit_code == 1
        result = runner.invoke(main.cli, args[:2] + ["--force"] + args[2:])
        assert result.exit_code == 0
        assert "测试集 loss" in result.output

    def test_eval(self, runner, tmp_path):
        """评估只打印准确率，不写文件"""
        model_path = train_small_model(runner, tmp_path / "m")
        before = sorted(p.name for p in (tmp_path / "m").iterdir())
        result = runner.invoke(main.cli, ["--seed", "3", "eval", "-m", str(model_path), *SMALL_IMAGES])
        assert result.exit_code == 0
        assert "准确率" in result.output
        assert "20 张图像" in result.output
        assert sorted(p.name for p in (tmp_path / "m").iterdir()) == before

    def test_eval_missing_model(self, runner, tmp_path):
        """模型文件不存在时报用法错误"""
        result = runner.invoke(main.cli, ["eval", "-m", str(tmp_path / "missing.txt")])
        assert result.exit_code == 2

    def test_acc_sweep(self, runner, tmp_path):
        """写出 acc_drop.csv；文件已存在时需要 --force"""
        model_path = train_small_model(runner, tmp_path / "m")
        out = tmp_path / "a"
        args = ["--out", str(out), "acc-sweep", "-m", str(model_path), *SMALL_IMAGES,
                "-a", "2.0", "--snr", "0", "--snr", "inf"]
        result = runner.invoke(main.cli, args)
        assert result.exit_code == 0
        lines = (out / "acc_drop.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "experiment,alpha,snr_db,mean_achieved_snr_db,n_images,clean_acc,noisy_acc,acc_drop"
        assert len(lines) == 3
        assert lines[2].split(",")[2] == "inf"
        assert lines[2].split(",")[-1] == "0"

        assert runner.invoke(main.cli, args).exit_code == 1
        assert runner.invoke(main.cli, args[:2] + ["--force"] + args[2:]).exit_code == 0

    def test_shapes_sweep(self, runner, tmp_path):
        """写出 shapes.csv：基线加每个形状一条曲线；文件已存在时需要 --force"""
        model_path = train_small_model(runner, tmp_path / "m")
        out = tmp_path / "s"
        args = ["--out", str(out), "shapes-sweep", "-m", str(model_path), *SMALL_IMAGES,
                "--shape", "square:1", "--shape", "rhombus", "--snr", "5", "--snr", "inf"]
        result = runner.invoke(main.cli, args)
        assert result.exit_code == 0
        lines = (out / "shapes.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("experiment,curve_label,shape,size,snr_db")
        assert len(lines) == 1 + 3 * 2
        assert {line.split(",")[1] for line in lines[1:]} == {"alpha=0.9", "square-1", "rhombus-1"}

        assert runner.invoke(main.cli, args).exit_code == 1
        assert runner.invoke(main.cli, args[:2] + ["--force"] + args[2:]).exit_code == 0

    def test_sweep_without_out_writes_nothing(self, runner, tmp_path):
        """未给 --out 时只打印表格"""
        model_path = train_small_model(runner, tmp_path / "m")
        result = runner.invoke(main.cli, ["acc-sweep", "-m", str(model_path), *SMALL_IMAGES, "-a", "1.5",
                                          "--snr", "10"])
        assert result.exit_code == 0
        assert not (tmp_path / "default_out").exists()

    @pytest.mark.parametrize("command", ["train", "eval", "acc-sweep", "shapes-sweep"])
    def test_seed_reaches_synthetic_dataset(self, runner, tmp_path, monkeypatch, command):
        """合成数据集使用 --seed 指定的种子"""
        seen = []

        def recording_gen_synthetic(per_class, side=64, seed=1):
            seen.append(seed)
            return gen_synthetic(per_class, side, seed)

        model_path = train_small_model(runner, tmp_path / "m")
        monkeypatch.setattr(main, "gen_synthetic", recording_gen_synthetic)
        args = {
            "train": ["--force", "--out", str(tmp_path / "m"), "train", "--epochs", "1", "--feature-side", "4"],
            "eval": ["eval", "-m", str(model_path)],
            "acc-sweep": ["acc-sweep", "-m", str(model_path), "-a", "2.0", "--snr", "inf"],
            "shapes-sweep": ["shapes-sweep", "-m", str(model_path), "--shape", "square:1", "--snr", "inf"],
        }[command]
        result = runner.invoke(main.cli, ["--seed", "7", *args, *SMALL_IMAGES])
        assert result.exit_code == 0, result.output
        assert seen == [7]

    def test_gen_noise_reports_impulse_share(self, runner, tmp_path):
        """集中噪声时打印保留脉冲的功率占比"""
        result = runner.invoke(main.cli, [
            "--out", str(tmp_path / "n"), "gen-noise", "-a", "0.9", "--height", "16", "--width", "16",
            "--shape", "rhombus",
        ])
        assert result.exit_code == 0
        assert "的噪声功率" in result.output

    def test_capacity_prints_linear_snr_in_db(self, runner):
        """线性 S/N 同时给出 dB 值"""
        result = runner.invoke(main.cli, ["capacity", "-w", "3000", "--snr-linear", "1000"])
        assert result.exit_code == 0
        assert "30.00 dB" in result.output
