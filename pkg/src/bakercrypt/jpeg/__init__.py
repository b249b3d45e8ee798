"""Baseline JPEG coefficient-level codec."""

from .codec import parse_jpeg, serialize_jpeg
from .model import (
    COMPONENT_NAMES,
    NATURAL,
    ZIGZAG,
    Component,
    JpegModel,
    component_grid_dims,
    component_sample_dims,
    gather_mcu_blocks,
    mcu_block_order,
    scatter_mcu_blocks,
)

__all__ = [
    "COMPONENT_NAMES",
    "NATURAL",
    "ZIGZAG",
    "Component",
    "JpegModel",
    "component_grid_dims",
    "component_sample_dims",
    "gather_mcu_blocks",
    "mcu_block_order",
    "parse_jpeg",
    "scatter_mcu_blocks",
    "serialize_jpeg",
]
