"""Security statistics for plaintext/ciphertext pairs.

JPEG files are measured in the coefficient domain on the low 7 bits of every
coefficient (the part the cipher changes), laid out spatially per component.
GIF files are measured on the palette-mapped Red/Green/Blue channels and on
the raw index plane.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import nist
from .errors import DegenerateVariance, LengthMismatch, ShapeMismatch
from .gif import GifModel, parse_gif, render
from .jpeg import JpegModel, parse_jpeg
from .jpeg.model import COMPONENT_NAMES, NATURAL, gather_mcu_blocks

DIRECTIONS = ("horizontal", "vertical", "diagonal")


def pearson(x, y) -> float:
    """Pearson correlation coefficient of two equal-length samples."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise ShapeMismatch(f"samples of length {x.size} and {y.size}")
    n = x.size
    sx, sy = x.sum(), y.sum()
    vx = n * np.dot(x, x) - sx * sx
    vy = n * np.dot(y, y) - sy * sy
    if n < 2 or vx <= 0 or vy <= 0:
        raise DegenerateVariance("correlation undefined for a constant series")
    r = (n * np.dot(x, y) - sx * sy) / math.sqrt(vx * vy)
    return float(min(1.0, max(-1.0, r)))


def adjacent_pairs(values, direction: str) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(values)
    if a.ndim != 2:
        raise ShapeMismatch("expected a 2D array")
    if direction == "horizontal":
        return a[:, :-1], a[:, 1:]
    if direction == "vertical":
        return a[:-1, :], a[1:, :]
    if direction == "diagonal":
        return a[:-1, :-1], a[1:, 1:]
    raise ValueError(f"unknown direction {direction!r}")


def adjacent_correlation(values, direction: str) -> float:
    """Correlation of every pair of neighbours along ``direction``."""
    x, y = adjacent_pairs(values, direction)
    if x.size < 2:
        raise DegenerateVariance(f"fewer than two {direction} pairs")
    return pearson(x, y)


def npcr_uaci(a, b, depth_max: int) -> tuple[float, float]:
    """Fraction of differing positions and mean absolute difference over ``depth_max``."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes {a.shape} and {b.shape} differ")
    if a.size == 0:
        raise ShapeMismatch("empty arrays")
    npcr = float(np.count_nonzero(a != b)) / a.size
    uaci = float(np.abs(a - b).sum()) / (a.size * depth_max)
    return npcr, uaci


def avalanche(bits_a, bits_b) -> float:
    """Percentage of positions at which two bitstreams differ."""
    a = np.asarray(bits_a, dtype=np.uint8).ravel()
    b = np.asarray(bits_b, dtype=np.uint8).ravel()
    if a.size != b.size:
        raise LengthMismatch(f"bitstreams of {a.size} and {b.size} bits")
    if a.size == 0:
        raise LengthMismatch("empty bitstreams")
    return 100.0 * np.count_nonzero(a != b) / a.size


def entropy(symbols, alphabet_size: int | None = None) -> float:
    """Shannon entropy in bits of the empirical symbol distribution."""
    s = np.asarray(symbols).ravel()
    if s.size == 0:
        raise ValueError("entropy of an empty sequence")
    _, counts = np.unique(s, return_counts=True)
    if alphabet_size is not None and len(counts) > alphabet_size:
        raise ValueError(f"{len(counts)} distinct symbols exceed alphabet size {alphabet_size}")
    p = counts / s.size
    return float(max(0.0, -(p * np.log2(p)).sum()))


# payload extraction


def load_model(data: bytes, fmt: str | None = None):
    fmt = fmt or sniff_format(data)
    return parse_jpeg(data) if fmt == "jpeg" else parse_gif(data)


def sniff_format(data: bytes) -> str:
    if data[:2] == b"\xff\xd8":
        return "jpeg"
    if data[:4] == b"GIF8":
        return "gif"
    raise ValueError("unrecognized file format (expected JPEG or GIF)")


def payload_symbols(model) -> tuple[np.ndarray, int]:
    """Cipher-bearing symbols in canonical order and their bit width.

    JPEG: low 7 bits of every coefficient, MCU order, row by row in a block.
    GIF: every frame's indices in row order, ``log2(palette length)`` bits each.
    """
    if isinstance(model, JpegModel):
        return (gather_mcu_blocks(model)[:, NATURAL].ravel() & 127).astype(np.uint8), 7
    widths = {len(model.palette_for(f)).bit_length() - 1 for f in model.frames}
    width = max(widths) if widths else 8
    parts = [f.indices.ravel() for f in model.frames]
    return (np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint8)), width


def payload_bits(model) -> np.ndarray:
    symbols, width = payload_symbols(model)
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint8)
    return ((symbols[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def export_bitstream(source, path: str | os.PathLike) -> int:
    """Write payload bits packed MSB first (zero-padded to a byte); returns the bit count."""
    if isinstance(source, (bytes, bytearray)):
        source = load_model(bytes(source))
    bits = payload_bits(source)
    Path(path).write_bytes(np.packbits(bits).tobytes())
    return int(bits.size)


def import_bitstream(path: str | os.PathLike, nbits: int | None = None) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(Path(path).read_bytes(), dtype=np.uint8))
    return bits if nbits is None else bits[:nbits]


def channels(model) -> dict[str, list[np.ndarray]]:
    """2D planes per channel; GIF channels hold one plane per frame."""
    if isinstance(model, JpegModel):
        out = {}
        for name, comp in zip(COMPONENT_NAMES, model.components):
            rows, cols, _ = comp.coef.shape
            plane = comp.natural().transpose(0, 2, 1, 3).reshape(rows * 8, cols * 8)
            out[name] = [(plane & 127).astype(np.int64)]
        return out
    out = {"Red": [], "Green": [], "Blue": [], "Index": []}
    for frame in model.frames:
        rgb = render(model, frame)
        for i, name in enumerate(("Red", "Green", "Blue")):
            out[name].append(rgb[:, :, i].astype(np.int64))
        out["Index"].append(frame.indices.astype(np.int64))
    return out


def channel_depth(model, name: str) -> int:
    if isinstance(model, JpegModel):
        return 127
    if name == "Index":
        return max(len(model.palette_for(f)) for f in model.frames) - 1
    return 255


def pooled_correlation(planes: list[np.ndarray], direction: str) -> float:
    xs, ys = [], []
    for p in planes:
        x, y = adjacent_pairs(p, direction)
        xs.append(x.ravel())
        ys.append(y.ravel())
    return pearson(np.concatenate(xs), np.concatenate(ys))


def rgb_stream(model: GifModel) -> np.ndarray:
    """Concatenated palette-mapped RGB bytes of every frame."""
    return np.concatenate([render(model, f).ravel() for f in model.frames])


# reports


@dataclass
class MetricsReport:
    format: str
    correlations: dict = field(default_factory=dict)
    plain_correlations: dict | None = None
    npcr: dict | None = None
    uaci: dict | None = None
    avalanche_pct: float | None = None
    entropies: dict = field(default_factory=dict)
    nist: list = field(default_factory=list)
    nist_bits: int = 0
    nist_advisory: bool = False

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def _correlations(model) -> dict:
    result = {}
    for name, planes in channels(model).items():
        result[name] = {}
        for d in DIRECTIONS:
            try:
                result[name][d] = pooled_correlation(planes, d)
            except DegenerateVariance:
                result[name][d] = None
    return result


def analyze(cipher, plain=None) -> MetricsReport:
    """Compute every statistic for ``cipher`` and, when given, against ``plain``."""
    fmt = "jpeg" if isinstance(cipher, JpegModel) else "gif"
    report = MetricsReport(format=fmt, correlations=_correlations(cipher))
    chans = channels(cipher)
    for name, planes in chans.items():
        alphabet = channel_depth(cipher, name) + 1
        report.entropies[name] = entropy(np.concatenate([p.ravel() for p in planes]), alphabet)
    if fmt == "jpeg":
        report.entropies["total"] = entropy(payload_symbols(cipher)[0], 128)
    else:
        report.entropies["total"] = entropy(rgb_stream(cipher), 256)
    bits = payload_bits(cipher)
    report.nist_bits = int(bits.size)
    report.nist_advisory = bits.size < nist.RECOMMENDED_BITS
    if bits.size >= 100:
        report.nist = [asdict(r) for r in nist.nist_subset(bits)]
    if plain is not None:
        report.plain_correlations = _correlations(plain)
        plain_chans = channels(plain)
        report.npcr, report.uaci = {}, {}
        for name in chans:
            a = np.concatenate([p.ravel() for p in plain_chans[name]])
            b = np.concatenate([p.ravel() for p in chans[name]])
            report.npcr[name], report.uaci[name] = npcr_uaci(a, b, channel_depth(cipher, name))
        plain_bits = payload_bits(plain)
        if plain_bits.size == bits.size:
            report.avalanche_pct = avalanche(plain_bits, bits)
    return report
