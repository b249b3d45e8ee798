"""Self-relative throughput benchmark on synthetic images.

Timing covers the whole file-to-file path (parse, encrypt, serialize), best
of several repeats after a warm-up run so that JIT compilation is excluded.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import cipher
from .chaos import KeyMaterial
from .gif import Frame, GifModel, parse_gif, serialize_gif
from .jpeg import Component, JpegModel, parse_jpeg, serialize_jpeg

DEFAULT_SIZES = (256, 512, 1024)
DQT = 0xDB


def synthetic_jpeg(side: int, seed: int = 0) -> bytes:
    """A 4:2:0 baseline JPEG with plausible, mostly sparse coefficients."""
    rng = np.random.default_rng(seed)
    comps = []
    for cid, (h, v, tq) in enumerate(((2, 2, 0), (1, 1, 1), (1, 1, 1)), start=1):
        rows = -(-side // 16) * v
        cols = -(-side // 16) * h
        coef = np.zeros((rows, cols, 64), dtype=np.int16)
        coef[:, :, 0] = rng.integers(-300, 300, size=(rows, cols))
        # AC magnitudes fall off with zigzag index
        scale = 40.0 / (1.0 + np.arange(1, 64))
        ac = np.rint(rng.laplace(0.0, scale, size=(rows, cols, 63)))
        coef[:, :, 1:] = np.clip(ac, -1000, 1000).astype(np.int16)
        comps.append(Component(cid, h, v, tq, coef))
    segments = [(DQT, bytes([tq]) + bytes([1] * 64)) for tq in (0, 1)]
    return serialize_jpeg(JpegModel(side, side, comps, segments))


def synthetic_gif(side: int, seed: int = 0) -> bytes:
    """A single-frame GIF with a 256-entry palette and smooth index gradients."""
    rng = np.random.default_rng(seed)
    palette = rng.integers(0, 256, size=(256, 3), dtype=np.uint8)
    yy, xx = np.mgrid[:side, :side]
    indices = ((xx + yy) * 255 // max(1, 2 * side - 2)).astype(np.uint8)
    frame = Frame(0, 0, side, side, indices)
    return serialize_gif(GifModel(side, side, palette, [frame]))


@dataclass
class BenchResult:
    format: str
    side: int
    input_bytes: int
    seconds: float

    @property
    def bytes_per_second(self) -> float:
        return self.input_bytes / self.seconds

    @property
    def pixels_per_second(self) -> float:
        return self.side * self.side / self.seconds


def _encrypt_file(data: bytes, fmt: str, key: KeyMaterial) -> bytes:
    if fmt == "jpeg":
        return serialize_jpeg(cipher.encrypt_jpeg(parse_jpeg(data), key))
    return serialize_gif(cipher.encrypt_gif(parse_gif(data), key))


def time_encrypt(data: bytes, fmt: str, key: KeyMaterial, repeats: int = 3) -> float:
    _encrypt_file(data, fmt, key)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        _encrypt_file(data, fmt, key)
        best = min(best, time.perf_counter() - t0)
    return best


def run_bench(sizes=DEFAULT_SIZES, formats=("jpeg", "gif"), key: KeyMaterial | None = None,
              repeats: int = 3) -> list[BenchResult]:
    key = key or KeyMaterial(0.1234567890123456, -0.3456789012345678)
    results = []
    for fmt in formats:
        make = synthetic_jpeg if fmt == "jpeg" else synthetic_gif
        for side in sizes:
            data = make(side)
            results.append(BenchResult(fmt, side, len(data), time_encrypt(data, fmt, key, repeats)))
    return results


def scaling_ratios(results: list[BenchResult]) -> list[tuple[str, int, int, float]]:
    """For consecutive sizes of a format: (format, side_a, side_b, time ratio / area ratio)."""
    out = []
    by_fmt: dict[str, list[BenchResult]] = {}
    for r in results:
        by_fmt.setdefault(r.format, []).append(r)
    for fmt, rs in by_fmt.items():
        rs = sorted(rs, key=lambda r: r.side)
        for a, b in zip(rs, rs[1:]):
            out.append((fmt, a.side, b.side, (b.seconds / a.seconds) / (b.side ** 2 / a.side ** 2)))
    return out
