"""
通信仿真模块 - α稳定噪声信道下的误码率
包含比特生成、Hamming(7,4) 编解码、BPSK 调制解调、稳定噪声信道与 BER 扫描
"""

from .bits import BitStream, random_bits, modulate_bpsk, demodulate_bpsk, ber
from .codec import CodecKind, encode, decode
from .channel import ChannelConfig, transmit, burst_noise, BURST_ALPHA
from .sweep import ber_sweep, simulate_point, q_function, bpsk_theory, EXPERIMENT_BER

__all__ = [
    'BitStream',
    'random_bits',
    'modulate_bpsk',
    'demodulate_bpsk',
    'ber',
    'CodecKind',
    'encode',
    'decode',
    'ChannelConfig',
    'transmit',
    'burst_noise',
    'BURST_ALPHA',
    'ber_sweep',
    'simulate_point',
    'q_function',
    'bpsk_theory',
    'EXPERIMENT_BER',
]
