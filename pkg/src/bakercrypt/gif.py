"""GIF87a/89a parsing and serialization at the palette-index level.

Frames keep their image data as decoded ``(height, width)`` index arrays in
logical row order; interlacing is applied and removed only at the byte level.
Extension blocks are carried through verbatim and in file order, which is
what keeps animation timing and looping intact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from . import lzw
from .errors import CorruptGif, EncodingError

EXTENSION = 0x21
IMAGE = 0x2C
TRAILER = 0x3B
GRAPHIC_CONTROL = 0xF9
APPLICATION = 0xFF


@dataclass
class Extension:
    label: int
    chunks: list[bytes]

    @property
    def data(self) -> bytes:
        return b"".join(self.chunks)


@dataclass
class Frame:
    left: int
    top: int
    width: int
    height: int
    indices: np.ndarray  # (height, width) uint8
    local_palette: np.ndarray | None = None  # (P, 3) uint8
    interlaced: bool = False
    sorted_palette: bool = False
    lzw_min_code_size: int = 8

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return (
            (self.left, self.top, self.width, self.height, self.interlaced, self.sorted_palette, self.lzw_min_code_size)
            == (other.left, other.top, other.width, other.height, other.interlaced, other.sorted_palette, other.lzw_min_code_size)
            and _arrays_equal(self.local_palette, other.local_palette)
            and _arrays_equal(self.indices, other.indices)
        )


@dataclass
class GraphicControl:
    disposal: int
    user_input: bool
    delay: int  # hundredths of a second
    transparent_index: int | None


@dataclass
class GifModel:
    width: int
    height: int
    global_palette: np.ndarray | None
    blocks: list = field(default_factory=list)  # Extension | Frame, in file order
    version: bytes = b"GIF89a"
    color_resolution: int = 7
    sorted_palette: bool = False
    background: int = 0
    aspect: int = 0

    def __eq__(self, other):
        if not isinstance(other, GifModel):
            return NotImplemented
        return (
            (self.width, self.height, self.version, self.color_resolution, self.sorted_palette, self.background, self.aspect)
            == (other.width, other.height, other.version, other.color_resolution, other.sorted_palette, other.background, other.aspect)
            and _arrays_equal(self.global_palette, other.global_palette)
            and len(self.blocks) == len(other.blocks)
            and all(a == b for a, b in zip(self.blocks, other.blocks))
        )

    @property
    def frames(self) -> list[Frame]:
        return [b for b in self.blocks if isinstance(b, Frame)]

    def palette_for(self, frame: Frame) -> np.ndarray:
        palette = frame.local_palette if frame.local_palette is not None else self.global_palette
        if palette is None:
            raise CorruptGif("frame has neither a local nor a global color table")
        return palette

    def controls(self) -> list[GraphicControl | None]:
        """The graphic control extension governing each frame, if any."""
        result = []
        pending = None
        for block in self.blocks:
            if isinstance(block, Extension) and block.label == GRAPHIC_CONTROL:
                d = block.data
                if len(d) >= 4:
                    packed, delay, tidx = d[0], struct.unpack("<H", d[1:3])[0], d[3]
                    pending = GraphicControl((packed >> 2) & 7, bool(packed & 2), delay, tidx if packed & 1 else None)
            elif isinstance(block, Frame):
                result.append(pending)
                pending = None
        return result

    @property
    def loop_count(self) -> int | None:
        for block in self.blocks:
            if isinstance(block, Extension) and block.label == APPLICATION and len(block.chunks) >= 2:
                if block.chunks[0][:11] in (b"NETSCAPE2.0", b"ANIMEXTS1.0") and len(block.chunks[1]) >= 3:
                    return struct.unpack("<H", block.chunks[1][1:3])[0]
        return None

    def copy(self) -> GifModel:
        blocks = []
        for b in self.blocks:
            if isinstance(b, Frame):
                blocks.append(Frame(
                    b.left, b.top, b.width, b.height, b.indices.copy(),
                    None if b.local_palette is None else b.local_palette.copy(),
                    b.interlaced, b.sorted_palette, b.lzw_min_code_size,
                ))
            else:
                blocks.append(Extension(b.label, list(b.chunks)))
        return GifModel(
            self.width, self.height,
            None if self.global_palette is None else self.global_palette.copy(),
            blocks, self.version, self.color_resolution, self.sorted_palette, self.background, self.aspect,
        )


def _arrays_equal(a, b) -> bool:
    if a is None or b is None:
        return a is b
    return a.shape == b.shape and bool(np.array_equal(a, b))


def _interlace_rows(height: int) -> np.ndarray:
    """Logical row number of each stored row of an interlaced frame."""
    return np.concatenate([
        np.arange(0, height, 8), np.arange(4, height, 8), np.arange(2, height, 4), np.arange(1, height, 2)
    ])


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CorruptGif("unexpected end of file")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def byte(self) -> int:
        return self.take(1)[0]

    def subblocks(self) -> list[bytes]:
        chunks = []
        while True:
            size = self.byte()
            if size == 0:
                return chunks
            chunks.append(self.take(size))


def _palette(raw: bytes) -> np.ndarray:
    return np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).copy()


def parse_gif(data: bytes) -> GifModel:
    r = _Reader(bytes(data))
    version = r.take(6)
    if version not in (b"GIF87a", b"GIF89a"):
        raise CorruptGif("not a GIF file")
    width, height, packed, background, aspect = struct.unpack("<HHBBB", r.take(7))
    global_palette = None
    if packed & 0x80:
        global_palette = _palette(r.take(3 * (2 << (packed & 7))))
    model = GifModel(
        width, height, global_palette, [], version,
        (packed >> 4) & 7, bool(packed & 0x08), background, aspect,
    )
    while True:
        if r.pos >= len(r.data):
            break  # tolerate a missing trailer
        kind = r.byte()
        if kind == TRAILER:
            break
        if kind == EXTENSION:
            label = r.byte()
            model.blocks.append(Extension(label, r.subblocks()))
        elif kind == IMAGE:
            model.blocks.append(_read_frame(r, model))
        else:
            raise CorruptGif(f"unknown block introducer {kind:#04x} at offset {r.pos - 1}")
    return model


def _read_frame(r: _Reader, model: GifModel) -> Frame:
    left, top, w, h, packed = struct.unpack("<HHHHB", r.take(9))
    local = _palette(r.take(3 * (2 << (packed & 7)))) if packed & 0x80 else None
    min_size = r.byte()
    if not 2 <= min_size <= 8:
        raise CorruptGif(f"invalid LZW minimum code size {min_size}")
    payload = b"".join(r.subblocks())
    try:
        flat = lzw.decode(payload, min_size, w * h)
    except ValueError as exc:
        raise CorruptGif(str(exc)) from None
    if flat.size < w * h:
        # short streams are common in the wild; pad with index 0
        flat = np.concatenate([flat, np.zeros(w * h - flat.size, dtype=np.uint8)])
    stored = flat.reshape(h, w)
    interlaced = bool(packed & 0x40)
    if interlaced:
        indices = np.empty_like(stored)
        indices[_interlace_rows(h)] = stored
    else:
        indices = stored
    frame = Frame(left, top, w, h, indices, local, interlaced, bool(packed & 0x20), min_size)
    palette = model.palette_for(frame)
    if indices.size and int(indices.max()) >= len(palette):
        raise CorruptGif(f"index {int(indices.max())} outside a {len(palette)}-entry color table")
    return frame


def _size_bits(palette: np.ndarray) -> int:
    n = len(palette)
    if n < 2 or n > 256 or n & (n - 1):
        raise EncodingError(f"color table length {n} is not a power of two in [2, 256]")
    return n.bit_length() - 2


def _subblocks(payload: bytes) -> bytes:
    out = bytearray()
    for i in range(0, len(payload), 255):
        chunk = payload[i:i + 255]
        out.append(len(chunk))
        out += chunk
    out.append(0)
    return bytes(out)


def serialize_gif(model: GifModel) -> bytes:
    out = bytearray(model.version)
    packed = (model.color_resolution & 7) << 4 | (0x08 if model.sorted_palette else 0)
    if model.global_palette is not None:
        packed |= 0x80 | _size_bits(model.global_palette)
    out += struct.pack("<HHBBB", model.width, model.height, packed, model.background, model.aspect)
    if model.global_palette is not None:
        out += np.ascontiguousarray(model.global_palette, dtype=np.uint8).tobytes()
    for block in model.blocks:
        if isinstance(block, Extension):
            out += bytes((EXTENSION, block.label))
            for chunk in block.chunks:
                out.append(len(chunk))
                out += chunk
            out.append(0)
        else:
            out += _frame_bytes(block, model)
    out.append(TRAILER)
    return bytes(out)


def _frame_bytes(frame: Frame, model: GifModel) -> bytes:
    palette = model.palette_for(frame)
    if frame.indices.shape != (frame.height, frame.width):
        raise EncodingError(f"index array {frame.indices.shape} does not match frame {frame.height}x{frame.width}")
    if frame.indices.size and int(frame.indices.max()) >= len(palette):
        raise EncodingError(f"index {int(frame.indices.max())} exceeds the {len(palette)}-entry color table")
    packed = (0x40 if frame.interlaced else 0) | (0x20 if frame.sorted_palette else 0)
    if frame.local_palette is not None:
        packed |= 0x80 | _size_bits(frame.local_palette)
    head = bytes((IMAGE,)) + struct.pack("<HHHHB", frame.left, frame.top, frame.width, frame.height, packed)
    if frame.local_palette is not None:
        head += np.ascontiguousarray(frame.local_palette, dtype=np.uint8).tobytes()
    stored = frame.indices[_interlace_rows(frame.height)] if frame.interlaced else frame.indices
    # the code size must cover the whole color table once indices are scrambled
    min_size = max(frame.lzw_min_code_size, 2, (len(palette) - 1).bit_length())
    return head + bytes((min_size,)) + _subblocks(lzw.encode(stored, min_size))


def render(model: GifModel, frame: Frame) -> np.ndarray:
    """Palette-mapped RGB pixels of one frame, ``(height, width, 3)`` uint8."""
    return model.palette_for(frame)[frame.indices]
