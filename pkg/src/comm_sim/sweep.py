"""
BER sweeps
误码率扫描

每个点的流程为 编码 → 调制 → 信道 → 解调 → 译码 → 误码率。
同一条曲线 (编码, α) 的所有 SNR 点共用一组比特和一个噪声实现，只有缩放系数 c 随 SNR 变化。
各点互不依赖，可并行计算，结果按网格顺序合并。
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np
from loguru import logger
from scipy.special import erfc

from stable_noise.curves import SweepCurve, SweepPoint
from stable_noise.errors import ParameterDomainError
from stable_noise.rng import derive_seed
from stable_noise.snr import SNR_INF, db_to_linear, snr_db
from stable_noise.stable import StableParams
from .bits import BitStream, ber, demodulate_bpsk, modulate_bpsk, random_bits
from .channel import BURST_ALPHA, ChannelConfig, transmit
from .codec import CodecKind, decode, encode

EXPERIMENT_BER = "ber"
MIN_SWEEP_BITS = 10_000


def q_function(x):
    """高斯尾概率 Q(x) = ½·erfc(x/√2)"""
    return 0.5 * erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2.0))


def bpsk_theory(snr_db_value: float) -> float:
    """高斯噪声下未编码 BPSK 的理论误码率 Q(√SNR)"""
    if snr_db_value == SNR_INF:
        return 0.0
    return float(q_function(math.sqrt(db_to_linear(snr_db_value))))


def simulate_point(alpha: float, target_db: float, codec: CodecKind, n_bits: int, seed: int,
                   burst_window: Optional[int] = None, keep_fraction: float = 0.01) -> SweepPoint:
    """
    单个 (α, SNR) 点的端到端仿真

    比特与噪声只由 seed 决定；同一 seed 下改变 target_db 只改变噪声的缩放系数。
    """
    sent = random_bits(n_bits, derive_seed(seed, "bits"))
    transmitted = encode(sent, codec)
    symbols = modulate_bpsk(transmitted)
    cfg = ChannelConfig(
        noise=StableParams(alpha),
        target_snr=target_db,
        seed=derive_seed(seed, "noise"),
        burst_window=burst_window,
        keep_fraction=keep_fraction,
    )
    received = transmit(symbols, cfg)
    achieved = snr_db(symbols, received)

    detected = demodulate_bpsk(received)
    recovered = decode(BitStream(detected.bits, transmitted.pad), codec)
    rate = ber(sent, recovered)
    return SweepPoint(
        snr_db=target_db,
        metric=rate,
        achieved_snr_db=achieved,
        details={"n_bits": n_bits, "alpha": alpha, "codec": codec.value},
    )


def ber_sweep(alphas: Sequence[float], snr_grid: Sequence[float], codec: CodecKind, n_bits: int, seed: int,
              burst_window: Optional[int] = None, keep_fraction: float = 0.01,
              threads: int = 1) -> List[SweepCurve]:
    """
    误码率扫描

    Args:
        alphas: 特征指数列表，每个 α 一条曲线（突发模式下固定 α=0.9，只产生一条曲线）
        snr_grid: 升序 SNR 网格 (dB)，可含 +∞
        codec: 编码方式
        n_bits: 每点比特数，至少 10⁴
        seed: 基础种子
        burst_window: 突发时间窗长度，None 表示独立同分布噪声
        threads: 并行线程数，不影响结果

    Returns:
        每个 α 一条 SweepCurve，顺序与输入一致
    """
    codec = CodecKind(codec)
    if n_bits < MIN_SWEEP_BITS:
        raise ParameterDomainError(f"n_bits 必须 >= {MIN_SWEEP_BITS}，当前为 {n_bits}")
    if not alphas or not snr_grid:
        raise ParameterDomainError("alphas 与 snr_grid 不能为空")

    alphas = [BURST_ALPHA] if burst_window is not None else list(alphas)
    experiment = EXPERIMENT_BER if burst_window is None else f"{EXPERIMENT_BER}-burst-{burst_window}"
    tasks = [
        (ai, si, alpha, target)
        for ai, alpha in enumerate(alphas)
        for si, target in enumerate(snr_grid)
    ]

    def run(task):
        ai, _, alpha, target = task
        curve_seed = derive_seed(seed, experiment, codec.value, ai)
        point = simulate_point(alpha, target, codec, n_bits, curve_seed, burst_window, keep_fraction)
        logger.debug(f"{experiment} {codec.value} alpha={alpha} snr={target}: ber={point.metric:.3e}")
        return point

    logger.info(f"开始 BER 扫描: {experiment}, codec={codec.value}, {len(tasks)} 个点, 每点 {n_bits} 比特")
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        points = list(pool.map(run, tasks))

    curves = [
        SweepCurve(
            label=f"alpha={alpha:g}" if burst_window is None else f"burst-{burst_window}",
            meta={"experiment": experiment, "codec": codec.value, "alpha": alpha, "n_bits": n_bits},
        )
        for alpha in alphas
    ]
    for (ai, _, _, _), point in zip(tasks, points):
        curves[ai].append(point)
    return curves
