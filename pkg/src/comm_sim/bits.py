"""
比特流、BPSK 调制解调与误码率
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from stable_noise.errors import FramingError, ParameterDomainError
from stable_noise.rng import uint64_stream


@dataclass(frozen=True)
class BitStream:
    """比特序列；pad 记录编码时补齐的零比特数"""
    bits: np.ndarray
    pad: int = 0

    def __post_init__(self):
        bits = np.asarray(self.bits).astype(np.uint8).ravel()
        if bits.size and bits.max() > 1:
            raise ParameterDomainError("比特值必须为 0 或 1")
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return int(self.bits.size)

    def tolist(self):
        return self.bits.tolist()

    @classmethod
    def of(cls, values) -> "BitStream":
        return cls(np.asarray(values, dtype=np.uint8))


BitsLike = Union[BitStream, np.ndarray, list]


def as_bitstream(bits: BitsLike) -> BitStream:
    return bits if isinstance(bits, BitStream) else BitStream.of(bits)


def random_bits(n: int, seed: int) -> BitStream:
    """n 个独立公平比特，取计数器流的最高位"""
    if n < 0:
        raise ParameterDomainError(f"n 必须满足 n >= 0，当前为 {n}")
    return BitStream((uint64_stream(seed, n) >> np.uint64(63)).astype(np.uint8))


def modulate_bpsk(bits: BitsLike) -> np.ndarray:
    """0 → +1.0，1 → −1.0"""
    return 1.0 - 2.0 * as_bitstream(bits).bits.astype(np.float64)


def demodulate_bpsk(received) -> BitStream:
    """符号判决：> 0 判 0，< 0 判 1，恰为 0 判 0"""
    received = np.asarray(received, dtype=np.float64).ravel()
    return BitStream((received < 0.0).astype(np.uint8))


def ber(sent: BitsLike, recovered: BitsLike) -> float:
    """误码率：不同位置所占比例"""
    sent, recovered = as_bitstream(sent), as_bitstream(recovered)
    if len(sent) != len(recovered):
        raise FramingError(f"比特流长度不一致: {len(sent)} vs {len(recovered)}")
    if len(sent) == 0:
        return 0.0
    return float(np.count_nonzero(sent.bits != recovered.bits)) / len(sent)
