"""Baseline JFIF parser and serializer working on quantized coefficients."""

from __future__ import annotations

import struct

import numpy as np

from ..errors import CorruptStream, EncodingOverflow, UnsupportedJpeg
from . import _scan
from .huffman import code_lengths_and_codes, decode_tables, optimal_table
from .model import Component, JpegModel, mcu_block_order

SOI, EOI, SOS, DHT, DQT, DRI, COM = 0xD8, 0xD9, 0xDA, 0xC4, 0xDB, 0xDD, 0xFE
SOF0 = 0xC0
# frame types other than baseline: extended/progressive/lossless, huffman or arithmetic
_OTHER_SOF = {0xC1, 0xC2, 0xC3, 0xC5, 0xC6, 0xC7, 0xC9, 0xCA, 0xCB, 0xCD, 0xCE, 0xCF}

_SCAN_ERRORS = {
    _scan.ERR_BAD_CODE: "invalid Huffman code",
    _scan.ERR_BAD_RUN: "AC run exceeds block",
    _scan.ERR_MISSING_RST: "expected restart marker",
}


def _segments(data: bytes):
    """Yield ``(marker, payload, offset_after)`` for marker segments up to SOS."""
    if data[:2] != b"\xff\xd8":
        raise CorruptStream("missing SOI marker")
    p = 2
    n = len(data)
    while True:
        while p < n and data[p] != 0xFF:
            p += 1  # tolerate garbage between segments
        while p < n and data[p] == 0xFF:
            p += 1
        if p >= n:
            raise CorruptStream("unexpected end of file before scan")
        marker = data[p]
        p += 1
        if marker == EOI:
            raise CorruptStream("EOI before any scan")
        if 0xD0 <= marker <= 0xD7 or marker == 0x01:
            continue
        if p + 2 > n:
            raise CorruptStream("truncated marker segment")
        length = struct.unpack(">H", data[p:p + 2])[0]
        if length < 2 or p + length > n:
            raise CorruptStream(f"bad length for marker FF{marker:02X}")
        payload = data[p + 2:p + length]
        p += length
        yield marker, payload, p


def _scan_end(data: bytes, start: int) -> int:
    """Offset of the first marker after the entropy-coded data."""
    p = start
    while True:
        p = data.find(b"\xff", p)
        if p < 0 or p + 1 >= len(data):
            raise CorruptStream("entropy-coded data runs past end of file")
        nxt = data[p + 1]
        if nxt == 0x00 or 0xD0 <= nxt <= 0xD7 or nxt == 0xFF:
            p += 1 if nxt == 0xFF else 2
            continue
        return p


def _read_dht(payload: bytes, tables: dict) -> None:
    p = 0
    while p < len(payload):
        if p + 17 > len(payload):
            raise CorruptStream("truncated DHT segment")
        tc, th = payload[p] >> 4, payload[p] & 15
        if tc > 1 or th > 3:
            raise CorruptStream(f"bad Huffman table selector {payload[p]:#04x}")
        bits = [0] + list(payload[p + 1:p + 17])
        total = sum(bits)
        p += 17
        if total > 256 or p + total > len(payload):
            raise CorruptStream("truncated DHT values")
        tables[(tc, th)] = (bits, list(payload[p:p + total]))
        p += total


def parse_jpeg(data: bytes) -> JpegModel:
    """Parse a baseline, Huffman-coded, 3-component interleaved JPEG."""
    data = bytes(data)
    segments = []
    huff = {}
    frame = None
    restart_interval = 0
    scan = None
    scan_start = 0
    for marker, payload, after in _segments(data):
        if marker in _OTHER_SOF:
            raise UnsupportedJpeg(f"frame type FF{marker:02X} is not baseline sequential")
        if marker == 0xCC:
            raise UnsupportedJpeg("arithmetic coding is not supported")
        if marker == SOF0:
            if frame is not None:
                raise CorruptStream("multiple frame headers")
            frame = _read_sof(payload)
        elif marker == DHT:
            _read_dht(payload, huff)
        elif marker == DRI:
            if len(payload) != 2:
                raise CorruptStream("bad DRI segment")
            restart_interval = struct.unpack(">H", payload)[0]
        elif marker == SOS:
            scan = payload
            scan_start = after
            break
        else:
            segments.append((marker, payload))
    if frame is None:
        raise CorruptStream("scan before frame header")
    precision, height, width, comps = frame
    model = JpegModel(width, height, comps, segments, [], precision)
    if height == 0:
        raise UnsupportedJpeg("height defined by DNL is not supported")

    dc_sel, ac_sel = _read_sos(scan, comps)
    end = _scan_end(data, scan_start)
    entropy = np.frombuffer(data, dtype=np.uint8, count=end - scan_start, offset=scan_start)

    positions, block_comp = mcu_block_order(model)
    n_mcus = model.mcus_per_line * model.mcu_rows
    blocks = np.zeros((n_mcus * len(block_comp), 64), dtype=np.int16)
    dc = _table_arrays(huff, 0, dc_sel)
    ac = _table_arrays(huff, 1, ac_sel)
    status, _, _ = _scan.decode_scan(entropy, n_mcus, restart_interval, block_comp, dc_sel, ac_sel, *dc, *ac, blocks)
    if status != _scan.OK:
        raise CorruptStream(_SCAN_ERRORS.get(status, f"scan decoding failed ({status})"))
    for pos, c in zip(positions, comps):
        c.coef = blocks[pos].reshape(c.coef.shape)

    model.trailer = _read_trailer(data, end)
    return model


def _read_sof(payload: bytes):
    if len(payload) < 6:
        raise CorruptStream("truncated frame header")
    precision, height, width, nf = struct.unpack(">BHHB", payload[:6])
    if precision != 8:
        raise UnsupportedJpeg(f"{precision}-bit samples are not supported")
    if nf != 3:
        raise UnsupportedJpeg(f"expected 3 components, found {nf}")
    if len(payload) < 6 + 3 * nf:
        raise CorruptStream("truncated frame header")
    if width == 0:
        raise CorruptStream("zero image width")
    comps = []
    for i in range(nf):
        cid, hv, tq = payload[6 + 3 * i:9 + 3 * i]
        h, v = hv >> 4, hv & 15
        if not (1 <= h <= 4 and 1 <= v <= 4) or tq > 3:
            raise CorruptStream(f"bad scan selector for component {cid}")
        comps.append(Component(cid, h, v, tq, np.zeros((0, 0, 64), dtype=np.int16)))
    if sum(c.h * c.v for c in comps) > 10:
        raise CorruptStream("more than 10 blocks per MCU")
    hmax = max(c.h for c in comps)
    vmax = max(c.v for c in comps)
    X = -(-width // (8 * hmax))
    Y = -(-height // (8 * vmax)) if height else 0
    for c in comps:
        c.coef = np.zeros((c.v * Y, c.h * X, 64), dtype=np.int16)
    return precision, height, width, comps


def _read_sos(payload: bytes, comps: list[Component]):
    ns = payload[0] if payload else 0
    if ns != len(comps):
        raise UnsupportedJpeg("only single interleaved scans covering all components are supported")
    ids = [c.id for c in comps]
    dc_sel = np.zeros(ns, dtype=np.int64)
    ac_sel = np.zeros(ns, dtype=np.int64)
    for i in range(ns):
        cs, td_ta = payload[1 + 2 * i], payload[2 + 2 * i]
        if cs not in ids or ids.index(cs) != i:
            raise UnsupportedJpeg("scan component order differs from frame order")
        dc_sel[i], ac_sel[i] = td_ta >> 4, td_ta & 15
    ss, se, ahal = payload[1 + 2 * ns:4 + 2 * ns]
    if (ss, se, ahal) != (0, 63, 0):
        raise UnsupportedJpeg("spectral selection or successive approximation in scan")
    return dc_sel, ac_sel


def _table_arrays(huff: dict, tc: int, selectors):
    maxcode = np.full((4, 18), -1, dtype=np.int64)
    valptr = np.zeros((4, 17), dtype=np.int64)
    mincode = np.zeros((4, 17), dtype=np.int64)
    vals = np.zeros((4, 256), dtype=np.int64)
    for th in set(int(s) for s in selectors):
        if (tc, th) not in huff:
            raise CorruptStream(f"scan references undefined Huffman table {tc}/{th}")
        maxcode[th], valptr[th], mincode[th], vals[th] = decode_tables(*huff[(tc, th)])
    return maxcode, valptr, mincode, vals


def _read_trailer(data: bytes, p: int) -> list[tuple[int, bytes]]:
    trailer = []
    n = len(data)
    while p < n:
        while p < n and data[p] == 0xFF:
            p += 1
        if p >= n:
            break
        marker = data[p]
        p += 1
        if marker == EOI:
            return trailer
        if marker == SOS or marker == DHT or marker == DRI or marker == DQT:
            raise UnsupportedJpeg("multiple scans are not supported")
        if p + 2 > n:
            break
        length = struct.unpack(">H", data[p:p + 2])[0]
        trailer.append((marker, data[p + 2:p + length]))
        p += length
    raise CorruptStream("missing EOI marker")


def _segment(marker: int, payload: bytes) -> bytes:
    if len(payload) + 2 > 0xFFFF:
        raise EncodingOverflow(f"marker segment FF{marker:02X} too long")
    return bytes((0xFF, marker)) + struct.pack(">H", len(payload) + 2) + payload


def serialize_jpeg(model: JpegModel) -> bytes:
    """Encode ``model`` as a baseline JPEG with optimized Huffman tables."""
    positions, block_comp = mcu_block_order(model)
    total = sum(len(p) for p in positions)
    blocks = np.empty((total, 64), dtype=np.int16)
    for pos, c in zip(positions, model.components):
        if c.coef.shape[:2] != (c.v * model.mcu_rows, c.h * model.mcus_per_line):
            raise EncodingOverflow(f"component {c.id} grid {c.coef.shape[:2]} does not match the frame")
        blocks[pos] = c.coef.reshape(-1, 64)

    # luminance uses table 0, chrominance shares table 1
    sel = np.array([0] + [1] * (len(model.components) - 1), dtype=np.int64)
    dc_freq = np.zeros((2, 256), dtype=np.int64)
    ac_freq = np.zeros((2, 256), dtype=np.int64)
    status, where = _scan.count_symbols(blocks, block_comp, sel, sel, dc_freq, ac_freq)
    if status == _scan.ERR_DC_OVERFLOW:
        raise EncodingOverflow(f"DC difference in block {where} exceeds the baseline range")
    if status == _scan.ERR_AC_OVERFLOW:
        raise EncodingOverflow(f"AC coefficient in block {where} exceeds the baseline range")

    dht = b""
    codes = {}
    for tc, freq in ((0, dc_freq), (1, ac_freq)):
        co = np.zeros((2, 256), dtype=np.int64)
        si = np.zeros((2, 256), dtype=np.int64)
        for th in range(2):
            if th and len(model.components) == 1:
                continue
            bits, huffval = optimal_table(freq[th])
            co[th], si[th] = code_lengths_and_codes(bits, huffval)
            dht += bytes([(tc << 4) | th]) + bytes(bits[1:17]) + bytes(huffval)
        codes[tc] = (co, si)

    out = np.zeros(total * 64 * 7 + 1024, dtype=np.uint8)
    status, n = _scan.encode_scan(blocks, block_comp, sel, sel, *codes[0], *codes[1], out)
    if status != _scan.OK:
        raise EncodingOverflow("symbol without Huffman code")

    parts = [b"\xff\xd8"]
    parts += [_segment(m, p) for m, p in model.segments]
    sof = struct.pack(">BHHB", model.precision, model.height, model.width, len(model.components))
    for c in model.components:
        sof += bytes((c.id, (c.h << 4) | c.v, c.tq))
    parts.append(_segment(SOF0, sof))
    parts.append(_segment(DHT, dht))
    sos = bytes([len(model.components)])
    for c, s in zip(model.components, sel):
        sos += bytes((c.id, (int(s) << 4) | int(s)))
    sos += b"\x00\x3f\x00"
    parts.append(_segment(SOS, sos))
    parts.append(out[:n].tobytes())
    parts += [_segment(m, p) for m, p in model.trailer]
    parts.append(b"\xff\xd9")
    return b"".join(parts)
