"""Encryption and decryption pipelines for JPEG and GIF models.

Encryption is diffusion followed by permutation. Diffusion is bilateral: the
chained recurrence runs over the sequence, then again over the reversed
result with a fresh keystream segment. Permutation is the 3D baker map,
applied per JPEG component (8x8 blocks as units) or per GIF frame (single
indices as units), with one chaotically drawn geometry per round.

All keystream consumption is laid out up front by a :class:`CipherPlan`,
which depends only on the key and the file structure, so the decryptor
derives the same plan as the encryptor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from . import baker3d, chaos
from .chaos import KeyMaterial
from .errors import BadModulus, KeystreamExhausted
from .gif import Frame, GifModel
from .jpeg.model import NATURAL, ZIGZAG, JpegModel, component_grid_dims, gather_mcu_blocks, scatter_mcu_blocks

LAYOUT_VERSION = 1


# diffusion kernels


@numba.njit(cache=True)
def _words_forward(words, ks, out):
    n = words.shape[0]
    prev = ks[n] & 127
    for i in range(n):
        v = np.int32(words[i])
        c = ((ks[i] + (v & 127)) & 127) ^ prev
        out[i] = (v & ~np.int32(127)) | c
        prev = c


@numba.njit(cache=True)
def _words_inverse(cipher, ks, out):
    n = cipher.shape[0]
    prev = ks[n] & 127
    for i in range(n):
        v = np.int32(cipher[i])
        c = v & 127
        out[i] = (v & ~np.int32(127)) | (((prev ^ c) + 128 - (ks[i] & 127)) & 127)
        prev = c


@numba.njit(cache=True)
def _bytes_forward(values, mod, ks, out):
    n = values.shape[0]
    mask = mod - 1
    prev = ks[n] & mask
    for i in range(n):
        c = ((ks[i] + values[i]) & mask) ^ prev
        out[i] = c
        prev = c


@numba.njit(cache=True)
def _bytes_inverse(cipher, mod, ks, out):
    n = cipher.shape[0]
    mask = mod - 1
    prev = ks[n] & mask
    for i in range(n):
        c = np.int64(cipher[i])
        out[i] = ((prev ^ c) + mod - (ks[i] & mask)) & mask
        prev = c


def _keystream_for(n: int, ks) -> np.ndarray:
    ks = np.asarray(ks, dtype=np.int64)
    if len(ks) < n + 1:
        raise KeystreamExhausted(f"{n} values need {n + 1} keystream entries, got {len(ks)}")
    return ks[: n + 1]


def diffuse_words_forward(words, ks) -> np.ndarray:
    """Chain-diffuse the low 7 bits of signed 16-bit words; bits 7..15 pass through.

    ``ks`` supplies ``n + 1`` entries; the last one seeds the chain.
    """
    w = np.asarray(words, dtype=np.int16)
    out = np.empty_like(w)
    _words_forward(w, _keystream_for(len(w), ks), out)
    return out


def diffuse_words_inverse(cipher, ks) -> np.ndarray:
    c = np.asarray(cipher, dtype=np.int16)
    out = np.empty_like(c)
    _words_inverse(c, _keystream_for(len(c), ks), out)
    return out


def _check_modulus(mod: int) -> int:
    mod = int(mod)
    if mod < 2 or mod & (mod - 1):
        raise BadModulus(f"modulus {mod} is not a power of two")
    return mod


def diffuse_bytes_forward(values, mod: int, ks) -> np.ndarray:
    """Chain-diffuse integers in ``[0, mod)``; ``mod`` must be a power of two."""
    mod = _check_modulus(mod)
    v = np.asarray(values, dtype=np.int64)
    out = np.empty_like(v)
    _bytes_forward(v, mod, _keystream_for(len(v), ks), out)
    return out


def diffuse_bytes_inverse(cipher, mod: int, ks) -> np.ndarray:
    mod = _check_modulus(mod)
    c = np.asarray(cipher, dtype=np.int64)
    out = np.empty_like(c)
    _bytes_inverse(c, mod, _keystream_for(len(c), ks), out)
    return out


def _bilateral_words(words, ks_fwd, ks_bwd):
    first = diffuse_words_forward(words, ks_fwd)
    return diffuse_words_forward(first[::-1], ks_bwd)[::-1]


def _bilateral_words_inverse(cipher, ks_fwd, ks_bwd):
    first = diffuse_words_inverse(np.ascontiguousarray(cipher[::-1]), ks_bwd)[::-1]
    return diffuse_words_inverse(np.ascontiguousarray(first), ks_fwd)


def _bilateral_bytes(values, mod, ks_fwd, ks_bwd):
    first = diffuse_bytes_forward(values, mod, ks_fwd)
    return diffuse_bytes_forward(first[::-1], mod, ks_bwd)[::-1]


def _bilateral_bytes_inverse(cipher, mod, ks_fwd, ks_bwd):
    first = diffuse_bytes_inverse(np.ascontiguousarray(cipher[::-1]), mod, ks_bwd)[::-1]
    return diffuse_bytes_inverse(np.ascontiguousarray(first), mod, ks_fwd)


# keystream scheduling


@dataclass(frozen=True)
class Segment:
    consumer: str
    offset: int
    length: int
    kind: str  # "bytes" (quantized to 256) or "raw" (unquantized z values)


@dataclass
class CipherPlan:
    """Keystream layout: disjoint, contiguous segments in consumption order.

    Offsets count iterates after the warm-up.
    """

    key: KeyMaterial
    stream_layout: list[Segment] = field(default_factory=list)
    version: int = LAYOUT_VERSION

    @property
    def total(self) -> int:
        return sum(s.length for s in self.stream_layout)

    def add(self, consumer: str, length: int, kind: str = "bytes") -> None:
        self.stream_layout.append(Segment(consumer, self.total, int(length), kind))

    def add_geometry(self, consumer: str, m: int, n: int) -> None:
        kx, ty = baker3d.draws_needed(m, n, self.key.k, self.key.t)
        self.add(consumer, self.key.rounds * (kx + ty), "raw")

    def materialize(self) -> dict[str, np.ndarray]:
        """Run the generator once and cut the stream into its segments."""
        state = self.key.start()
        z = chaos.raw_values(state, self.total)
        out = {}
        for seg in self.stream_layout:
            chunk = z[seg.offset:seg.offset + seg.length]
            out[seg.consumer] = chaos.quantize_array(chunk, 256) if seg.kind == "bytes" else chunk
        return out


def _geometries(raw: np.ndarray, m: int, n: int, key: KeyMaterial) -> list[baker3d.BakerGeometry]:
    kx, ty = baker3d.draws_needed(m, n, key.k, key.t)
    per_round = kx + ty
    return [
        baker3d.BakerGeometry.from_draws(
            m, n, key.k, key.t, raw[r * per_round:r * per_round + kx], raw[r * per_round + kx:(r + 1) * per_round]
        )
        for r in range(key.rounds)
    ]


def plan_jpeg(model: JpegModel, key: KeyMaterial) -> CipherPlan:
    plan = CipherPlan(key)
    n = model.n_words
    plan.add("words:forward", n + 1)
    plan.add("words:backward", n + 1)
    for i in range(len(model.components)):
        plan.add_geometry(f"geometry:{i}", *component_grid_dims(model, i))
    return plan


def plan_gif(model: GifModel, key: KeyMaterial) -> CipherPlan:
    plan = CipherPlan(key)
    if model.global_palette is not None:
        size = model.global_palette.size
        plan.add("global_palette:forward", size + 1)
        plan.add("global_palette:backward", size + 1)
    for i, frame in enumerate(model.frames):
        if frame.local_palette is not None:
            plan.add(f"frame{i}:palette:forward", frame.local_palette.size + 1)
            plan.add(f"frame{i}:palette:backward", frame.local_palette.size + 1)
        plan.add(f"frame{i}:indices:forward", frame.indices.size + 1)
        plan.add(f"frame{i}:indices:backward", frame.indices.size + 1)
        if frame.indices.size:
            plan.add_geometry(f"frame{i}:geometry", frame.height, frame.width)
    return plan


# JPEG


def _words_of(model: JpegModel) -> np.ndarray:
    """All coefficients in MCU order, row by row within each block."""
    return gather_mcu_blocks(model)[:, NATURAL].ravel()


def _set_words(model: JpegModel, words: np.ndarray) -> None:
    scatter_mcu_blocks(model, words.reshape(-1, 64)[:, ZIGZAG])


def encrypt_jpeg(model: JpegModel, key: KeyMaterial) -> JpegModel:
    stream = plan_jpeg(model, key).materialize()
    out = model.copy()
    words = _bilateral_words(_words_of(model), stream["words:forward"], stream["words:backward"])
    _set_words(out, words)
    for i, comp in enumerate(out.components):
        m, n = component_grid_dims(out, i)
        blocks = comp.coef.reshape(m * n, 64)
        for g in _geometries(stream[f"geometry:{i}"], m, n, key):
            blocks = baker3d.permute(blocks, m, n, g)
        comp.coef = blocks.reshape(m, n, 64)
    return out


def decrypt_jpeg(model: JpegModel, key: KeyMaterial) -> JpegModel:
    stream = plan_jpeg(model, key).materialize()
    out = model.copy()
    for i, comp in enumerate(out.components):
        m, n = component_grid_dims(out, i)
        blocks = comp.coef.reshape(m * n, 64)
        for g in reversed(_geometries(stream[f"geometry:{i}"], m, n, key)):
            blocks = baker3d.unpermute(blocks, m, n, g)
        comp.coef = np.ascontiguousarray(blocks).reshape(m, n, 64)
    words = _bilateral_words_inverse(_words_of(out), stream["words:forward"], stream["words:backward"])
    _set_words(out, words)
    return out


# GIF


def _palette_apply(palette: np.ndarray, stream: dict, prefix: str, inverse: bool) -> np.ndarray:
    flat = palette.astype(np.int64).ravel()
    fwd, bwd = stream[f"{prefix}:forward"], stream[f"{prefix}:backward"]
    flat = _bilateral_bytes_inverse(flat, 256, fwd, bwd) if inverse else _bilateral_bytes(flat, 256, fwd, bwd)
    return flat.astype(np.uint8).reshape(palette.shape)


def _gif_apply(model: GifModel, key: KeyMaterial, inverse: bool) -> GifModel:
    stream = plan_gif(model, key).materialize()
    out = model.copy()
    # palette sizes are needed before any palette is rewritten
    sizes = [len(model.palette_for(f)) for f in model.frames]
    if out.global_palette is not None:
        out.global_palette = _palette_apply(out.global_palette, stream, "global_palette", inverse)
    for i, frame in enumerate(out.frames):
        if frame.local_palette is not None:
            frame.local_palette = _palette_apply(frame.local_palette, stream, f"frame{i}:palette", inverse)
        frame.indices = _frame_apply(frame, sizes[i], stream, f"frame{i}", key, inverse)
    return out


def _frame_apply(frame: Frame, size: int, stream: dict, prefix: str, key: KeyMaterial, inverse: bool) -> np.ndarray:
    m, n = frame.height, frame.width
    flat = frame.indices.astype(np.int64).ravel()
    fwd, bwd = stream[f"{prefix}:indices:forward"], stream[f"{prefix}:indices:backward"]
    geoms = _geometries(stream[f"{prefix}:geometry"], m, n, key) if flat.size else []
    if inverse:
        for g in reversed(geoms):
            flat = baker3d.unpermute(flat, m, n, g)
        flat = _bilateral_bytes_inverse(flat, size, fwd, bwd)
    else:
        flat = _bilateral_bytes(flat, size, fwd, bwd)
        for g in geoms:
            flat = baker3d.permute(flat, m, n, g)
    return flat.astype(np.uint8).reshape(m, n)


def encrypt_gif(model: GifModel, key: KeyMaterial) -> GifModel:
    return _gif_apply(model, key, inverse=False)


def decrypt_gif(model: GifModel, key: KeyMaterial) -> GifModel:
    return _gif_apply(model, key, inverse=True)
