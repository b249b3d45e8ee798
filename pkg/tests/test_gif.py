import io
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image, ImageSequence

from bakercrypt import lzw
from bakercrypt.errors import CorruptGif, EncodingError
from bakercrypt.gif import Extension, Frame, GifModel, parse_gif, render, serialize_gif

import corpus


def _pillow_frames(data: bytes) -> list[np.ndarray]:
    im = Image.open(io.BytesIO(data))
    return [np.asarray(fr.convert("RGB")) for fr in ImageSequence.Iterator(im)]


def _opaque(model: GifModel, i: int, frame: Frame) -> np.ndarray:
    ctl = model.controls()[i]
    if ctl is None or ctl.transparent_index is None:
        return np.ones(frame.indices.shape, dtype=bool)
    return frame.indices != ctl.transparent_index


def test_corpus_coverage(gif_files):
    assert len(gif_files) >= 10
    models = {name: parse_gif(d) for name, d in gif_files.items()}
    assert any(len(m.frames) > 1 for m in models.values())
    assert any(f.interlaced for m in models.values() for f in m.frames)
    assert any(f.local_palette is not None for m in models.values() for f in m.frames)


def test_indices_match_reference_decoder(gif_files):
    for name, data in gif_files.items():
        model = parse_gif(data)
        im = Image.open(io.BytesIO(data))
        first = model.frames[0]
        if im.mode == "P":
            ref = np.asarray(im)[first.top:first.top + first.height, first.left:first.left + first.width]
            assert np.array_equal(ref, first.indices), name


def test_rendered_frames_match_reference_decoder(gif_files):
    for name, data in gif_files.items():
        model = parse_gif(data)
        ref = _pillow_frames(data)
        assert len(ref) == len(model.frames), name
        for i, (pix, frame) in enumerate(zip(ref, model.frames)):
            rect = pix[frame.top:frame.top + frame.height, frame.left:frame.left + frame.width]
            mask = _opaque(model, i, frame)
            assert np.array_equal(rect[mask], render(model, frame)[mask]), (name, i)


def test_round_trip_is_identity(gif_files):
    for name, data in gif_files.items():
        model = parse_gif(data)
        assert parse_gif(serialize_gif(model)) == model, name


def test_serialized_files_decode_in_reference_decoder(gif_files):
    for name, data in gif_files.items():
        out = serialize_gif(parse_gif(data))
        a, b = _pillow_frames(data), _pillow_frames(out)
        assert len(a) == len(b)
        for x, y in zip(a, b):
            assert np.array_equal(x, y), name


@pytest.mark.parametrize("depth", range(2, 9))
def test_lzw_round_trip_random_arrays(depth):
    rng = np.random.default_rng(depth)
    for _ in range(1000 // 7 + 1):
        n = int(rng.integers(0, 3000))
        # mix noise with long runs so both dictionary growth and resets are hit
        a = rng.integers(0, 1 << depth, n).astype(np.uint8)
        if n and rng.random() < 0.5:
            a = np.repeat(a[: max(1, n // 20)], 20)[:n]
        code = lzw.encode(a, depth)
        assert np.array_equal(lzw.decode(code, depth, a.size), a)


def test_lzw_table_reset_on_large_input():
    a = np.random.default_rng(0).integers(0, 256, 200_000).astype(np.uint8)
    assert np.array_equal(lzw.decode(lzw.encode(a, 8), 8, a.size), a)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 8), st.data())
def test_lzw_property(depth, data):
    values = data.draw(st.lists(st.integers(0, (1 << depth) - 1), max_size=600))
    a = np.array(values, dtype=np.uint8)
    assert np.array_equal(lzw.decode(lzw.encode(a, depth), depth, a.size), a)


def test_lzw_rejects_wide_indices():
    with pytest.raises(ValueError):
        lzw.encode(np.array([4], dtype=np.uint8), 2)


def test_all_zero_two_color_file():
    palette = np.array([[0, 0, 0], [255, 255, 255]], dtype=np.uint8)
    model = GifModel(13, 7, palette, [Frame(0, 0, 13, 7, np.zeros((7, 13), np.uint8), lzw_min_code_size=2)])
    data = serialize_gif(model)
    parsed = parse_gif(data)
    assert not parsed.frames[0].indices.any()
    assert parsed.frames[0].indices.shape == (7, 13)
    assert np.asarray(Image.open(io.BytesIO(data)).convert("L")).max() == 0


def test_interlaced_rows_are_logical():
    rng = np.random.default_rng(3)
    idx = rng.integers(0, 4, (19, 5)).astype(np.uint8)
    palette = rng.integers(0, 256, (4, 3), dtype=np.uint8)
    model = GifModel(5, 19, palette, [Frame(0, 0, 5, 19, idx, interlaced=True, lzw_min_code_size=2)])
    data = serialize_gif(model)
    assert np.array_equal(np.asarray(Image.open(io.BytesIO(data))), idx)
    assert parse_gif(data).frames[0].interlaced


def test_bad_signature():
    with pytest.raises(CorruptGif):
        parse_gif(b"GIF90a" + b"\x00" * 20)


def test_truncated_file(gif_files):
    data = gif_files["chelsea_128"]
    with pytest.raises(CorruptGif):
        parse_gif(data[: len(data) // 2])


def test_unknown_block():
    data = bytearray(corpus.gif_bytes(corpus.sources()["tiny"].quantize(4)))
    data[-1] = 0x99
    with pytest.raises(CorruptGif):
        parse_gif(bytes(data))


def test_index_outside_color_table_rejected():
    with pytest.raises(CorruptGif):
        parse_gif(corpus.pillow_out_of_range())


def test_invalid_lzw_code():
    model = GifModel(4, 4, np.zeros((4, 3), np.uint8), [Frame(0, 0, 4, 4, np.zeros((4, 4), np.uint8), lzw_min_code_size=2)])
    data = bytearray(serialize_gif(model))
    # replace the image data with a single sub-block holding an impossible first code
    start = data.index(0x2C) + 10
    data[start:] = bytes([2, 1, 0x07, 0, 0x3B])
    with pytest.raises(CorruptGif):
        parse_gif(bytes(data))


def test_encoding_error_for_index_beyond_palette():
    model = GifModel(2, 2, np.zeros((2, 3), np.uint8), [Frame(0, 0, 2, 2, np.array([[0, 1], [2, 0]], np.uint8))])
    with pytest.raises(EncodingError):
        serialize_gif(model)


def test_encoding_error_for_bad_palette_length():
    model = GifModel(2, 2, np.zeros((3, 3), np.uint8), [Frame(0, 0, 2, 2, np.zeros((2, 2), np.uint8))])
    with pytest.raises(EncodingError):
        serialize_gif(model)


def test_min_code_size_grows_to_cover_palette():
    palette = np.zeros((64, 3), np.uint8)
    idx = np.full((3, 3), 63, np.uint8)
    model = GifModel(3, 3, palette, [Frame(0, 0, 3, 3, idx, lzw_min_code_size=2)])
    parsed = parse_gif(serialize_gif(model))
    assert parsed.frames[0].lzw_min_code_size == 6
    assert np.array_equal(parsed.frames[0].indices, idx)


def test_min_code_size_kept_when_sufficient(gif_files):
    for data in gif_files.values():
        model = parse_gif(data)
        again = parse_gif(serialize_gif(model))
        assert [f.lzw_min_code_size for f in again.frames] == [f.lzw_min_code_size for f in model.frames]


def test_animation_structure_preserved(gif_files):
    model = parse_gif(gif_files["animated_cropped"])
    assert model.loop_count == 2
    assert [c.delay for c in model.controls()] == [10, 20, 30, 40]
    assert [(f.left, f.top, f.width, f.height) for f in model.frames] == [
        (0, 0, 40, 30), (5, 3, 12, 9), (20, 10, 20, 20), (39, 29, 1, 1)
    ]
    again = parse_gif(serialize_gif(model))
    exts = [b for b in again.blocks if isinstance(b, Extension)]
    assert exts == [b for b in model.blocks if isinstance(b, Extension)]
    assert [type(b) for b in again.blocks] == [type(b) for b in model.blocks]


def test_pillow_animation_metadata(gif_files):
    model = parse_gif(gif_files["animated_global"])
    assert model.loop_count == 3
    assert [c.delay for c in model.controls()] == [4, 8, 12, 16]


def test_extension_bytes_survive_verbatim():
    ext = Extension(0xFE, [b"hello", b"x" * 255, b"!"])
    model = GifModel(1, 1, np.zeros((2, 3), np.uint8), [ext, Frame(0, 0, 1, 1, np.zeros((1, 1), np.uint8), lzw_min_code_size=2)])
    data = serialize_gif(model)
    assert b"\x21\xfe\x05hello\xff" + b"x" * 255 + b"\x01!\x00" in data
    assert parse_gif(data).blocks[0] == ext


def test_missing_trailer_tolerated(gif_files):
    data = gif_files["coffee_16"]
    assert data.endswith(b"\x3b")
    assert parse_gif(data[:-1]) == parse_gif(data)


def test_screen_descriptor_fields(gif_files):
    model = parse_gif(gif_files["odd_8"])
    w, h = struct.unpack("<HH", gif_files["odd_8"][6:10])
    assert (model.width, model.height) == (w, h) == (9, 17)
    assert len(model.global_palette) in (2, 4, 8, 16, 32, 64, 128, 256)
