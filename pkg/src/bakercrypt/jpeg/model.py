"""In-memory representation of a baseline JPEG at the coefficient level."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# ZIGZAG[k] is the row-major position of the k-th coefficient in coding order
ZIGZAG = np.array([
    0, 1, 8, 16, 9, 2, 3, 10,
    17, 24, 32, 25, 18, 11, 4, 5,
    12, 19, 26, 33, 40, 48, 41, 34,
    27, 20, 13, 6, 7, 14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36,
    29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46,
    53, 60, 61, 54, 47, 55, 62, 63,
], dtype=np.int64)

# NATURAL[p] is the coding-order index of row-major position p
NATURAL = np.argsort(ZIGZAG)

COMPONENT_NAMES = ("Y", "Cb", "Cr")


@dataclass
class Component:
    id: int
    h: int
    v: int
    tq: int
    coef: np.ndarray  # (rows, cols, 64) int16, zigzag order, absolute DC

    def __eq__(self, other):
        if not isinstance(other, Component):
            return NotImplemented
        return (
            (self.id, self.h, self.v, self.tq) == (other.id, other.h, other.v, other.tq)
            and self.coef.shape == other.coef.shape
            and bool(np.array_equal(self.coef, other.coef))
        )

    def natural(self) -> np.ndarray:
        """Coefficients as ``(rows, cols, 8, 8)`` in row-major block layout."""
        rows, cols, _ = self.coef.shape
        return self.coef[:, :, NATURAL].reshape(rows, cols, 8, 8)


@dataclass
class JpegModel:
    """A parsed baseline JPEG.

    ``segments`` keeps every marker segment that precedes the frame header
    (APPn, COM, DQT) as ``(marker, payload)`` pairs in file order, and
    ``trailer`` keeps the ones found between the scan and EOI. Huffman tables
    and restart intervals are not kept: they are rebuilt on serialization.
    """

    width: int
    height: int
    components: list[Component]
    segments: list[tuple[int, bytes]] = field(default_factory=list)
    trailer: list[tuple[int, bytes]] = field(default_factory=list)
    precision: int = 8

    def __eq__(self, other):
        if not isinstance(other, JpegModel):
            return NotImplemented
        return (
            (self.width, self.height, self.precision) == (other.width, other.height, other.precision)
            and self.components == other.components
            and self.segments == other.segments
            and self.trailer == other.trailer
        )

    @property
    def hmax(self) -> int:
        return max(c.h for c in self.components)

    @property
    def vmax(self) -> int:
        return max(c.v for c in self.components)

    @property
    def mcus_per_line(self) -> int:
        return math.ceil(self.width / (8 * self.hmax))

    @property
    def mcu_rows(self) -> int:
        return math.ceil(self.height / (8 * self.vmax))

    @property
    def n_words(self) -> int:
        return sum(c.coef.shape[0] * c.coef.shape[1] * 64 for c in self.components)

    def component(self, key) -> Component:
        if isinstance(key, str):
            key = COMPONENT_NAMES.index(key)
        return self.components[key]

    def copy(self) -> JpegModel:
        comps = [Component(c.id, c.h, c.v, c.tq, c.coef.copy()) for c in self.components]
        return JpegModel(self.width, self.height, comps, list(self.segments), list(self.trailer), self.precision)

    def quant_tables(self) -> dict[int, np.ndarray]:
        """Quantization tables by destination id, values in zigzag order."""
        tables = {}
        for marker, payload in self.segments:
            if marker != 0xDB:
                continue
            p = 0
            while p < len(payload):
                pq, tq = payload[p] >> 4, payload[p] & 15
                p += 1
                if pq:
                    vals = np.frombuffer(payload[p:p + 128], dtype=">u2").astype(np.int64)
                    p += 128
                else:
                    vals = np.frombuffer(payload[p:p + 64], dtype=np.uint8).astype(np.int64)
                    p += 64
                tables[tq] = vals
        return tables


def component_grid_dims(model: JpegModel, component) -> tuple[int, int]:
    """Block-grid size ``(M, N)`` of one component: ``(V * mcu_rows, H * mcus_per_line)``."""
    c = model.component(component)
    return c.v * model.mcu_rows, c.h * model.mcus_per_line


def component_sample_dims(model: JpegModel, component) -> tuple[int, int]:
    """Component size in samples ``(width, height)`` before MCU padding."""
    c = model.component(component)
    return math.ceil(model.width * c.h / model.hmax), math.ceil(model.height * c.v / model.vmax)


def mcu_block_order(model: JpegModel) -> tuple[list[np.ndarray], np.ndarray]:
    """Where each block of the interleaved MCU sequence lives.

    Returns, per component, the MCU-sequence positions of that component's
    blocks in raster order of its grid, plus the component index of each
    block slot within one MCU.
    """
    X, Y = model.mcus_per_line, model.mcu_rows
    bpm = sum(c.h * c.v for c in model.components)
    block_comp = []
    positions = []
    offset = 0
    for ci, c in enumerate(model.components):
        block_comp += [ci] * (c.h * c.v)
        rows, cols = np.meshgrid(np.arange(Y * c.v), np.arange(X * c.h), indexing="ij")
        mcu = (rows // c.v) * X + cols // c.h
        within = (rows % c.v) * c.h + cols % c.h
        positions.append((mcu * bpm + offset + within).ravel())
        offset += c.h * c.v
    return positions, np.array(block_comp, dtype=np.int64)


def gather_mcu_blocks(model: JpegModel) -> np.ndarray:
    """All blocks as ``(n_blocks, 64)`` in interleaved MCU order."""
    positions, _ = mcu_block_order(model)
    total = sum(len(p) for p in positions)
    out = np.empty((total, 64), dtype=np.int16)
    for pos, c in zip(positions, model.components):
        out[pos] = c.coef.reshape(-1, 64)
    return out


def scatter_mcu_blocks(model: JpegModel, blocks: np.ndarray) -> None:
    """Inverse of :func:`gather_mcu_blocks`, writing into ``model`` in place."""
    positions, _ = mcu_block_order(model)
    for pos, c in zip(positions, model.components):
        c.coef[...] = blocks[pos].reshape(c.coef.shape)
