"""
Channel codecs
信道编码

Hamming(7,4) 码字排列 p1 p2 d1 p3 d2 d3 d4：
    p1 = d1⊕d2⊕d4, p2 = d1⊕d3⊕d4, p3 = d2⊕d3⊕d4
校验矩阵的第 j 列是 j 的二进制表示，非零伴随式直接给出出错位置。
"""

from enum import Enum

import numpy as np

from stable_noise.errors import FramingError
from .bits import BitStream, BitsLike, as_bitstream


class CodecKind(Enum):
    """编码方式"""
    NONE = "none"
    HAMMING74 = "hamming74"


# 生成矩阵：每行对应一个数据比特
GENERATOR = np.array([
    [1, 1, 1, 0, 0, 0, 0],
    [1, 0, 0, 1, 1, 0, 0],
    [0, 1, 0, 1, 0, 1, 0],
    [1, 1, 0, 1, 0, 0, 1],
], dtype=np.uint8)

# 校验矩阵：第 j 列为位置 j+1 的二进制（低位在上）
PARITY_CHECK = np.array([
    [1, 0, 1, 0, 1, 0, 1],
    [0, 1, 1, 0, 0, 1, 1],
    [0, 0, 0, 1, 1, 1, 1],
], dtype=np.uint8)

DATA_POSITIONS = [2, 4, 5, 6]


def encode(bits: BitsLike, codec: CodecKind) -> BitStream:
    """
    编码；hamming74 下长度不足 4 的倍数时补零并记录补齐数
    """
    stream = as_bitstream(bits)
    codec = CodecKind(codec)
    if codec is CodecKind.NONE:
        return BitStream(stream.bits.copy(), stream.pad)

    pad = (-len(stream)) % 4
    data = np.concatenate([stream.bits, np.zeros(pad, dtype=np.uint8)]).reshape(-1, 4)
    codewords = (data.astype(np.int64) @ GENERATOR) % 2
    return BitStream(codewords.astype(np.uint8).ravel(), pad)


def decode(bits: BitsLike, codec: CodecKind) -> BitStream:
    """
    伴随式译码；每个 7 比特码字内的单比特错误可被纠正，随后去除补齐位
    """
    stream = as_bitstream(bits)
    codec = CodecKind(codec)
    if codec is CodecKind.NONE:
        return BitStream(stream.bits.copy(), stream.pad)

    if len(stream) % 7 != 0:
        raise FramingError(f"hamming74 译码要求长度为 7 的倍数，当前为 {len(stream)}")

    received = stream.bits.reshape(-1, 7).copy()
    syndrome = (received.astype(np.int64) @ PARITY_CHECK.T) % 2
    position = syndrome[:, 0] + 2 * syndrome[:, 1] + 4 * syndrome[:, 2]
    flagged = np.nonzero(position)[0]
    received[flagged, position[flagged] - 1] ^= 1

    data = received[:, DATA_POSITIONS].ravel()
    if stream.pad:
        if stream.pad > data.size:
            raise FramingError(f"补齐位数 {stream.pad} 超过数据长度 {data.size}")
        data = data[:data.size - stream.pad]
    return BitStream(data)
