"""
图像噪声模块 - α稳定噪声场与形状化脉冲噪声
包含独立同分布噪声场、脉冲提取、形状铺开、按 SNR 加噪与 PPM/PGM 读写
"""

from .fields import ImpulseSet, iid_field, extract_impulses, impulse_power_share
from .shapes import ShapeKind, ShapeSpec, DEFAULT_SHAPE_SIZES, shape_mask, stamp, shaped_field
from .corruption import corrupt
from .netpbm import read_netpbm, write_netpbm, to_uint8

__all__ = [
    'ImpulseSet',
    'iid_field',
    'extract_impulses',
    'impulse_power_share',
    'ShapeKind',
    'ShapeSpec',
    'DEFAULT_SHAPE_SIZES',
    'shape_mask',
    'stamp',
    'shaped_field',
    'corrupt',
    'read_netpbm',
    'write_netpbm',
    'to_uint8',
]
