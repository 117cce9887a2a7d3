#!/usr/bin/env python3
"""
α稳定噪声仿真 - 主程序入口
同一 SNR 下的误码率曲线与分类准确率下降曲线
"""

import math
import sys
from pathlib import Path
from typing import Optional

import click
import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table
from loguru import logger

# 添加src目录到Python路径
sys.path.insert(0, str(Path(__file__).parent / "src"))

from stable_noise import (
    StableParams, sample, tail_fraction, matching_reference, ks_statistic, derive_seed,
    shannon_capacity, db_to_linear, linear_to_db, get_config, __version__,
)
from stable_noise.errors import StableNoiseError, OutputExistsError
from image_noise import (
    ShapeKind, ShapeSpec, iid_field, shaped_field, impulse_power_share, corrupt, read_netpbm, write_netpbm,
)
from comm_sim import CodecKind, ber_sweep, bpsk_theory
from classifier import (
    TrainConfig, DEFAULT_FEATURE_SIDE, load_dataset, write_dataset, split, train, accuracy,
    objective, save_model, load_model, gen_synthetic, create_external_classifier,
)
from experiments import (
    DEFAULT_ALPHAS, DEFAULT_SNR_GRID_DB, parse_snr, load_experiment_config, run as run_experiments,
    acc_drop_sweep, shaped_sweep, ber_frame, acc_drop_frame, shapes_frame, write_csv, curve_summary,
)

# 初始化控制台
console = Console()


def _stderr_sink(message):
    sys.stderr.write(message)


def setup_logging():
    """按 config/config.yaml 的 logging 节配置日志输出"""
    settings = get_config().logging
    logger.remove()  # 移除默认的日志处理器
    if settings.save_to_file:
        logger.add(
            str(Path(settings.log_dir) / "app.log"),
            rotation=settings.max_file_size,
            retention=f"{settings.backup_count} days",
            level=settings.level,
            format="{time:YYYY-MM-DD HH:mm:ss} | {level} | {message}"
        )
    logger.add(
        _stderr_sink,
        level=settings.level,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level}</level> | {message}"
    )


def _fail(ctx, action: str, error: Exception):
    console.print(f"[red]{action}失败: {error}[/red]")
    logger.error(f"{action}失败: {error}")
    ctx.exit(1)


def _out_dir(ctx) -> Path:
    return Path(ctx.obj["out"] or get_config().paths.output_dir)


def _target_file(ctx, name: str) -> Path:
    """输出目录下的目标文件；已存在时需要 --force"""
    path = _out_dir(ctx) / name
    if path.exists() and not ctx.obj["force"]:
        raise OutputExistsError(f"文件已存在: {path}（使用 --force 覆盖）")
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _snr_list(values, default):
    return [parse_snr(v) for v in values] if values else list(default)


def _shape_option(values):
    """形如 square:3 或 rhombus 的形状参数 → ShapeSpec 列表；为空时每种形状取默认尺寸"""
    if not values:
        return [ShapeSpec.default(kind) for kind in ShapeKind]
    specs = []
    for value in values:
        kind, _, size = value.partition(":")
        specs.append(ShapeSpec(ShapeKind(kind), int(size)) if size else ShapeSpec.default(kind))
    return specs


def _load_images(ctx, data: Optional[str], per_class: int, side: int):
    """--data 目录，或以 --seed 生成的合成数据集"""
    if data:
        return load_dataset(data)
    return gen_synthetic(per_class, side, ctx.obj["seed"])


def _image_classifier(ctx, dataset, test_fraction, model_path, external, timeout, processes, feature_side):
    """按 --model / --external / 现场训练 三种方式准备分类器，返回 (classifier, test_set)"""
    train_set, test_set = split(dataset, test_fraction, ctx.obj["seed"])
    if model_path:
        return load_model(model_path), test_set
    if external:
        return create_external_classifier(external, timeout, processes, dataset.n_classes), test_set
    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console) as progress:
        progress.add_task("训练 softmax 分类器...", total=None)
        model = train(train_set, TrainConfig(seed=ctx.obj["seed"]), feature_side)
    return model, test_set


def _print_curves(title: str, curves, metric_name: str):
    table = Table(title=title)
    table.add_column("曲线")
    snrs = curves[0].snrs if curves else []
    for snr in snrs:
        table.add_column(f"{snr:g} dB", justify="right")
    for curve in curves:
        table.add_row(curve.label, *(f"{m:.4g}" for m in curve.metrics))
    console.print(table)
    console.print(f"[dim]metric = {metric_name}[/dim]")


@click.group()
@click.version_option(version=__version__)
@click.option('--seed', type=int, help='基础种子（缺省为 0；run 命令中覆盖配置的 base_seed）')
@click.option('--out', type=click.Path(), help='输出目录（缺省取 config.yaml 的 paths.output_dir）')
@click.option('--force', is_flag=True, help='允许覆盖已有输出')
@click.option('--threads', type=int, help='并行线程数，不影响结果')
@click.pass_context
def cli(ctx, seed, out, force, threads):
    """α稳定噪声仿真 - 同一 SNR 下的误码率与分类准确率下降"""
    setup_logging()
    if seed is not None and not 0 <= seed < 2 ** 64:
        raise click.BadParameter("种子必须在 [0, 2^64) 内", param_hint="--seed")
    ctx.obj = {
        "seed": seed or 0,
        "seed_given": seed is not None,
        "out": out,
        "force": force,
        "threads": max(1, threads or get_config().performance.threads),
    }
    console.print(Panel.fit(
        "[bold cyan]α稳定噪声仿真[/bold cyan]\n"
        "[dim]误码率曲线 · 准确率下降曲线 · 集中噪声对比[/dim]",
        border_style="cyan"
    ))


@cli.group()
def stable():
    """稳定分布工具"""


@stable.command('sample')
@click.option('--alpha', '-a', type=float, required=True, help='特征指数 α ∈ (0, 2]')
@click.option('--beta', '-b', type=float, default=0.0, help='偏斜参数 β ∈ [-1, 1]')
@click.option('--scale', type=float, default=1.0, help='尺度 γ > 0')
@click.option('--location', type=float, default=0.0, help='位置 δ')
@click.option('--count', '-n', type=int, default=10000, help='样本数')
@click.option('--offset', type=int, default=0, help='起始样本下标')
@click.pass_context
def stable_sample(ctx, alpha, beta, scale, location, count, offset):
    """生成稳定分布样本并输出统计量"""
    try:
        params = StableParams(alpha, beta, scale, location)
        values = sample(params, count, ctx.obj["seed"], offset)
        digits = get_config().output.sample_digits

        if ctx.obj["out"]:
            path = _target_file(ctx, "samples.txt")
            path.write_text("".join(f"{v:.{digits}g}\n" for v in values), encoding="utf-8")
            console.print(f"[green]✓[/green] 样本已写入: {path}")
        else:
            for v in values[:20]:
                console.print(f"{v:.{digits}g}")
            if count > 20:
                console.print(f"[dim]... 共 {count} 个样本，使用 --out 保存全部[/dim]")

        if count:
            lines = [
                f"[bold]参数:[/bold] α={alpha}, β={beta}, γ={scale}, δ={location}",
                f"[bold]中位数:[/bold] {np.median(values):.6g}",
                f"[bold]四分位距:[/bold] {np.subtract(*np.percentile(values, [75, 25])):.6g}",
            ]
            for threshold in (3.0, 10.0, 100.0):
                lines.append(f"[bold]P(|x| > {threshold:g}):[/bold] {tail_fraction(values - location, threshold * scale):.6g}")
            reference = matching_reference(params)
            if reference is not None:
                ks = ks_statistic(values, reference.cdf)
                lines.append(f"[bold]KS vs {reference.kind.value}:[/bold] {ks:.6g}")
            console.print(Panel("\n".join(lines), title="样本统计", border_style="blue"))

    except StableNoiseError as e:
        _fail(ctx, "采样", e)


@cli.command('gen-noise')
@click.option('--alpha', '-a', type=float, required=True, help='特征指数 α')
@click.option('--beta', '-b', type=float, default=0.0, help='偏斜参数 β')
@click.option('--height', type=int, default=64, help='图像高度')
@click.option('--width', type=int, default=64, help='图像宽度')
@click.option('--channels', type=click.Choice(['1', '3']), default='1', help='通道数')
@click.option('--shape', type=click.Choice([k.value for k in ShapeKind]), help='集中噪声形状')
@click.option('--size', type=int, help='形状尺寸（缺省取默认尺寸）')
@click.option('--keep-fraction', type=float, default=0.01, help='保留脉冲比例')
@click.option('--snr', type=float, default=10.0, help='相对中灰图像的 SNR (dB)')
@click.option('--name', default='noise', help='输出文件名（不含扩展名）')
@click.pass_context
def gen_noise(ctx, alpha, beta, height, width, channels, shape, size, keep_fraction, snr, name):
    """把噪声场叠加到中灰图像上并导出为 PGM/PPM"""
    try:
        dims = (height, width, int(channels))
        field = iid_field(StableParams(alpha, beta), dims, derive_seed(ctx.obj["seed"], "gen-noise"))
        if shape:
            spec = ShapeSpec(ShapeKind(shape), size) if size else ShapeSpec.default(shape)
            share = impulse_power_share(field, keep_fraction)
            field = shaped_field(field, spec, keep_fraction)
            console.print(f"保留的 {keep_fraction:g} 脉冲携带 {share:.2%} 的噪声功率")

        gray = np.full(dims, 128.0)
        noisy, achieved = corrupt(gray, field, snr, clip=True)
        path = _target_file(ctx, f"{name}{'.pgm' if dims[2] == 1 else '.ppm'}")
        write_netpbm(path, noisy)
        console.print(f"[green]✓[/green] 噪声图像已写入: {path}（裁剪后实际 SNR {achieved:.4f} dB）")

    except StableNoiseError as e:
        _fail(ctx, "生成噪声", e)


@cli.command('corrupt')
@click.option('--input', '-i', 'input_path', type=click.Path(exists=True), required=True, help='输入 PPM/PGM')
@click.option('--output', '-o', 'output_path', type=click.Path(), required=True, help='输出 PPM/PGM')
@click.option('--alpha', '-a', type=float, required=True, help='特征指数 α')
@click.option('--beta', '-b', type=float, default=0.0, help='偏斜参数 β')
@click.option('--snr', type=str, required=True, help='目标 SNR (dB)，或 inf')
@click.option('--shape', type=click.Choice([k.value for k in ShapeKind]), help='集中噪声形状')
@click.option('--size', type=int, help='形状尺寸')
@click.option('--keep-fraction', type=float, default=0.01, help='保留脉冲比例')
@click.option('--clip', is_flag=True, help='裁剪到 [0, 255]')
@click.pass_context
def corrupt_image(ctx, input_path, output_path, alpha, beta, snr, shape, size, keep_fraction, clip):
    """按目标 SNR 给单张图像加噪"""
    try:
        output_path = Path(output_path)
        if output_path.exists() and not ctx.obj["force"]:
            raise OutputExistsError(f"文件已存在: {output_path}（使用 --force 覆盖）")

        image = read_netpbm(input_path)
        field = iid_field(StableParams(alpha, beta), image.shape, derive_seed(ctx.obj["seed"], "corrupt"))
        if shape:
            spec = ShapeSpec(ShapeKind(shape), size) if size else ShapeSpec.default(shape)
            field = shaped_field(field, spec, keep_fraction)

        noisy, achieved = corrupt(image, field, parse_snr(snr), clip)
        write_netpbm(output_path, noisy)
        console.print(f"[green]✓[/green] 已写入 {output_path}，实际 SNR {achieved:.9g} dB")

    except (StableNoiseError, ValueError) as e:
        _fail(ctx, "加噪", e)


@cli.command('ber-sweep')
@click.option('--alpha', '-a', 'alphas', type=float, multiple=True, help='特征指数（可多次指定）')
@click.option('--snr', 'snrs', type=str, multiple=True, help='SNR 网格点 (dB) 或 inf（可多次指定）')
@click.option('--codec', type=click.Choice([c.value for c in CodecKind]), default='none', help='编码方式')
@click.option('--n-bits', type=int, default=100000, help='每点比特数')
@click.option('--burst-window', type=int, help='突发噪声时间窗长度')
@click.option('--keep-fraction', type=float, default=0.01, help='突发噪声保留脉冲比例')
@click.pass_context
def ber_sweep_command(ctx, alphas, snrs, codec, n_bits, burst_window, keep_fraction):
    """误码率扫描"""
    try:
        grid = _snr_list(snrs, DEFAULT_SNR_GRID_DB)
        curves = ber_sweep(list(alphas) or DEFAULT_ALPHAS, grid, CodecKind(codec), n_bits, ctx.obj["seed"],
                           burst_window=burst_window, keep_fraction=keep_fraction, threads=ctx.obj["threads"])
        _print_curves(f"BER ({codec})", curves, "bit error rate")
        if codec == CodecKind.NONE.value:
            console.print("[dim]高斯理论 Q(√SNR): " + ", ".join(f"{bpsk_theory(s):.4g}" for s in grid) + "[/dim]")
        if ctx.obj["out"]:
            write_csv(ber_frame(curves), _target_file(ctx, "ber.csv"), get_config().output.csv_digits)

    except (StableNoiseError, ValueError) as e:
        _fail(ctx, "BER 扫描", e)


@cli.command('gen-synthetic')
@click.option('--per-class', type=int, default=200, help='每类图像数')
@click.option('--side', type=int, default=64, help='图像边长')
@click.pass_context
def gen_synthetic_command(ctx, per_class, side):
    """生成合成数据集并按 <out>/<类别>/*.pgm 导出"""
    try:
        dataset = gen_synthetic(per_class, side, ctx.obj["seed"])
        root = _out_dir(ctx)
        if root.exists() and any(root.iterdir()) and not ctx.obj["force"]:
            raise OutputExistsError(f"输出目录非空: {root}（使用 --force 覆盖）")
        written = write_dataset(dataset, root)
        console.print(f"[green]✓[/green] 共 {len(written)} 张图像，{dataset.n_classes} 类，已导出到 {root}")

    except StableNoiseError as e:
        _fail(ctx, "生成合成数据集", e)


@cli.command('train')
@click.option('--data', '-d', type=click.Path(exists=True), help='数据集目录（缺省使用合成数据集）')
@click.option('--per-class', type=int, default=200, help='合成数据集每类图像数')
@click.option('--side', type=int, default=64, help='合成图像边长')
@click.option('--test-fraction', type=float, default=0.5, help='测试集比例')
@click.option('--learning-rate', '--lr', type=float, default=0.1, help='学习率')
@click.option('--epochs', type=int, default=100, help='训练轮数')
@click.option('--batch-size', type=int, default=32, help='批大小')
@click.option('--l2', type=float, default=1e-4, help='L2 正则系数')
@click.option('--feature-side', type=int, default=DEFAULT_FEATURE_SIDE, help='池化网格边长 d')
@click.option('--model', '-m', 'model_name', default='model.txt', help='模型文件名（写入输出目录）')
@click.pass_context
def train_command(ctx, data, per_class, side, test_fraction, learning_rate, epochs, batch_size, l2, feature_side,
                  model_name):
    """训练内置 softmax 分类器"""
    try:
        dataset = _load_images(ctx, data, per_class, side)
        train_set, test_set = split(dataset, test_fraction, ctx.obj["seed"])
        cfg = TrainConfig(learning_rate, epochs, batch_size, l2, ctx.obj["seed"])
        with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console) as progress:
            progress.add_task(f"训练中（{epochs} 轮）...", total=None)
            model = train(train_set, cfg, feature_side)

        path = save_model(model, _target_file(ctx, model_name), get_config().output.model_digits)
        final_loss = model.loss_history[-1] if model.loss_history else math.log(model.n_classes)
        test_loss = objective(model, test_set) if len(test_set) else math.nan
        console.print(Panel(
            f"[bold]类别:[/bold] {', '.join(model.class_names)}\n"
            f"[bold]最终 loss:[/bold] {final_loss:.6f}\n"
            f"[bold]测试集 loss:[/bold] {test_loss:.6f}\n"
            f"[bold]训练准确率:[/bold] {accuracy(model, train_set):.4f}\n"
            f"[bold]测试准确率:[/bold] {accuracy(model, test_set):.4f}\n"
            f"[bold]模型文件:[/bold] {path}",
            title="训练完成",
            border_style="green"
        ))

    except StableNoiseError as e:
        _fail(ctx, "训练", e)


@cli.command('eval')
@click.option('--model', '-m', 'model_path', type=click.Path(exists=True), required=True, help='SOFTMAX1 模型文件')
@click.option('--data', '-d', type=click.Path(exists=True), help='数据集目录（缺省使用合成数据集）')
@click.option('--per-class', type=int, default=200, help='合成数据集每类图像数')
@click.option('--side', type=int, default=64, help='合成图像边长')
@click.pass_context
def eval_command(ctx, model_path, data, per_class, side):
    """在整个数据集上评估模型准确率"""
    try:
        model = load_model(model_path)
        dataset = _load_images(ctx, data, per_class, side)
        if list(dataset.class_names) != list(model.class_names):
            console.print("[yellow]![/yellow] 数据集类别与模型类别不一致，按下标比较")
        console.print(f"[bold]准确率:[/bold] {accuracy(model, dataset):.4f}（{len(dataset)} 张图像）")

    except StableNoiseError as e:
        _fail(ctx, "评估", e)


def _image_sweep_options(func):
    options = [
        click.option('--data', '-d', type=click.Path(exists=True), help='数据集目录（缺省使用合成数据集）'),
        click.option('--per-class', type=int, default=200, help='合成数据集每类图像数'),
        click.option('--side', type=int, default=64, help='合成图像边长'),
        click.option('--test-fraction', type=float, default=0.5, help='测试集比例'),
        click.option('--model', '-m', 'model_path', type=click.Path(exists=True), help='已训练的模型文件'),
        click.option('--external', help='外部分类器命令'),
        click.option('--timeout', type=float, default=30.0, help='外部分类器单行响应超时（秒）'),
        click.option('--processes', type=int, default=1, help='外部分类器子进程数'),
        click.option('--feature-side', type=int, default=DEFAULT_FEATURE_SIDE, help='现场训练时的池化网格边长'),
        click.option('--snr', 'snrs', type=str, multiple=True, help='SNR 网格点 (dB) 或 inf（可多次指定）'),
        click.option('--clip', is_flag=True, help='加噪后裁剪到 [0, 255]'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@cli.command('acc-sweep')
@click.option('--alpha', '-a', 'alphas', type=float, multiple=True, help='特征指数（可多次指定）')
@click.option('--beta', '-b', type=float, default=0.0, help='噪声偏斜参数')
@_image_sweep_options
@click.pass_context
def acc_sweep_command(ctx, alphas, beta, data, per_class, side, test_fraction, model_path, external, timeout,
                      processes, feature_side, snrs, clip):
    """独立同分布 α 稳定噪声下的准确率下降扫描"""
    try:
        dataset = _load_images(ctx, data, per_class, side)
        classifier, test_set = _image_classifier(ctx, dataset, test_fraction, model_path, external, timeout,
                                                 processes, feature_side)
        curves = acc_drop_sweep(classifier, test_set, list(alphas) or DEFAULT_ALPHAS,
                                _snr_list(snrs, DEFAULT_SNR_GRID_DB), ctx.obj["seed"], clip=clip, beta=beta,
                                threads=ctx.obj["threads"])
        _print_curves("准确率下降", curves, "clean_acc - noisy_acc")
        if ctx.obj["out"]:
            write_csv(acc_drop_frame(curves), _target_file(ctx, "acc_drop.csv"), get_config().output.csv_digits)

    except (StableNoiseError, ValueError) as e:
        _fail(ctx, "准确率下降扫描", e)


@cli.command('shapes-sweep')
@click.option('--shape', 'shapes', multiple=True, help='形状，如 square:3、triangle、rhombus:1（可多次指定）')
@click.option('--keep-fraction', type=float, default=0.01, help='保留脉冲比例')
@_image_sweep_options
@click.pass_context
def shapes_sweep_command(ctx, shapes, keep_fraction, data, per_class, side, test_fraction, model_path, external,
                         timeout, processes, feature_side, snrs, clip):
    """集中噪声（正方形/三角形/菱形）与 α=0.9 基线对比"""
    try:
        specs = _shape_option(shapes)
        dataset = _load_images(ctx, data, per_class, side)
        classifier, test_set = _image_classifier(ctx, dataset, test_fraction, model_path, external, timeout,
                                                 processes, feature_side)
        curves = shaped_sweep(classifier, test_set, specs, _snr_list(snrs, DEFAULT_SNR_GRID_DB), ctx.obj["seed"],
                              keep_fraction=keep_fraction, clip=clip, threads=ctx.obj["threads"])
        _print_curves("集中噪声准确率下降", curves, "clean_acc - noisy_acc")
        if ctx.obj["out"]:
            write_csv(shapes_frame(curves), _target_file(ctx, "shapes.csv"), get_config().output.csv_digits)

    except (StableNoiseError, ValueError) as e:
        _fail(ctx, "集中噪声扫描", e)


@cli.command('capacity')
@click.option('--bandwidth', '-w', type=float, required=True, help='带宽 W (Hz)')
@click.option('--snr-linear', 'snr_linear', type=float, multiple=True, help='线性信噪比 S/N（可多次指定）')
@click.option('--snr-db', 'snr_db', type=float, multiple=True, help='信噪比 (dB)（可多次指定）')
@click.pass_context
def capacity_command(ctx, bandwidth, snr_linear, snr_db):
    """香农容量 C = W·log2(1 + S/N)"""
    try:
        points = [(f"{s:g} ({linear_to_db(s):.2f} dB)", s) for s in snr_linear]
        points += [(f"{s:g} dB", db_to_linear(s)) for s in snr_db]
        if not points:
            raise click.UsageError("至少指定一个 --snr-linear 或 --snr-db")
        for label, value in points:
            console.print(f"S/N = {label}: C = {shannon_capacity(bandwidth, value):.6f} bit/s")

    except StableNoiseError as e:
        _fail(ctx, "容量计算", e)


@cli.command('run')
@click.argument('config_file', type=click.Path())
@click.pass_context
def run_command(ctx, config_file):
    """按 JSON 配置执行完整实验"""
    try:
        config = load_experiment_config(config_file)
        if ctx.obj["seed_given"]:
            config = config.model_copy(update={"base_seed": ctx.obj["seed"]})
        output = get_config().output
        result = run_experiments(config, _out_dir(ctx), ctx.obj["force"], ctx.obj["threads"],
                                 output.csv_digits, output.model_digits)

        table = Table(title="曲线汇总")
        for column in ("实验", "曲线", "平均", "最小", "最大", "平均标准误"):
            table.add_column(column)
        for name, curves in result.curves.items():
            for curve in curves:
                summary = curve_summary(curve)
                table.add_row(name, curve.label, f"{summary['mean_metric']:.4g}", f"{summary['min_metric']:.4g}",
                              f"{summary['max_metric']:.4g}", f"{summary['mean_std_error']:.3g}")
        console.print(table)
        for name, path in result.files.items():
            console.print(f"[green]✓[/green] {name}: {path}")

    except StableNoiseError as e:
        _fail(ctx, "运行实验", e)


if __name__ == "__main__":
    cli()
