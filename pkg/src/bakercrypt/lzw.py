"""Variable code width LZW as used for GIF image data."""

from __future__ import annotations

import numba
import numpy as np

MAX_CODES = 4096

OK = 0
ERR_BAD_CODE = 1
ERR_OVERFLOW = 2


@numba.njit(cache=True)
def _decode(data, min_size, out):
    clear = 1 << min_size
    eoi = clear + 1
    prefix = np.zeros(MAX_CODES, dtype=np.int64)
    suffix = np.zeros(MAX_CODES, dtype=np.uint8)
    length = np.zeros(MAX_CODES, dtype=np.int64)
    for i in range(clear):
        suffix[i] = i
        length[i] = 1
    size = min_size + 1
    next_code = eoi + 1
    prev = -1
    acc = 0
    nacc = 0
    pos = 0
    written = 0
    limit = out.shape[0]
    n = data.shape[0]
    while True:
        while nacc < size:
            if pos >= n:
                # missing end code: accept what was decoded
                return OK, written
            acc |= np.int64(data[pos]) << nacc
            pos += 1
            nacc += 8
        code = acc & ((1 << size) - 1)
        acc >>= size
        nacc -= size
        if code == clear:
            size = min_size + 1
            next_code = eoi + 1
            prev = -1
            continue
        if code == eoi:
            return OK, written
        if prev < 0:
            if code >= clear:
                return ERR_BAD_CODE, written
            if written >= limit:
                return ERR_OVERFLOW, written
            out[written] = code
            written += 1
            prev = code
            continue
        if code < next_code:
            cur = code
        elif code == next_code:
            cur = prev
        else:
            return ERR_BAD_CODE, written
        ln = length[cur]
        extra = 1 if code == next_code else 0
        if written + ln + extra > limit:
            return ERR_OVERFLOW, written
        # walk the chain backwards into place
        c = cur
        for i in range(ln - 1, -1, -1):
            out[written + i] = suffix[c]
            c = prefix[c]
        first = out[written]
        if extra:
            out[written + ln] = first
        written += ln + extra
        if next_code < MAX_CODES:
            prefix[next_code] = prev
            suffix[next_code] = first
            length[next_code] = length[prev] + 1
            next_code += 1
            if next_code == (1 << size) and size < 12:
                size += 1
        prev = code


@numba.njit(cache=True)
def _encode(indices, min_size, out):
    clear = 1 << min_size
    eoi = clear + 1
    # child lookup: table[prefix * 256 + symbol] -> code (0 = absent)
    table = np.zeros(MAX_CODES * 256, dtype=np.int32)
    used = np.zeros(MAX_CODES, dtype=np.int32)
    n_used = 0
    size = min_size + 1
    next_code = eoi + 1
    acc = np.int64(0)
    nacc = 0
    pos = 0

    acc |= np.int64(clear) << nacc
    nacc += size
    n = indices.shape[0]
    if n == 0:
        acc |= np.int64(eoi) << nacc
        nacc += size
        while nacc > 0:
            out[pos] = acc & 0xFF
            pos += 1
            acc >>= 8
            nacc -= 8
        return pos
    cur = np.int64(indices[0])
    for i in range(1, n):
        sym = indices[i]
        key = cur * 256 + sym
        child = table[key]
        if child:
            cur = child
            continue
        acc |= cur << nacc
        nacc += size
        while nacc >= 8:
            out[pos] = acc & 0xFF
            pos += 1
            acc >>= 8
            nacc -= 8
        if next_code < MAX_CODES:
            table[key] = next_code
            used[n_used] = key
            n_used += 1
            if next_code == (1 << size) and size < 12:
                size += 1
            next_code += 1
        else:
            # table full: reset both sides
            acc |= np.int64(clear) << nacc
            nacc += size
            while nacc >= 8:
                out[pos] = acc & 0xFF
                pos += 1
                acc >>= 8
                nacc -= 8
            for j in range(n_used):
                table[used[j]] = 0
            n_used = 0
            size = min_size + 1
            next_code = eoi + 1
        cur = np.int64(sym)
    acc |= cur << nacc
    nacc += size
    # the decoder adds one more entry after the final code before reading the end code
    if next_code < MAX_CODES and next_code == (1 << size) and size < 12:
        size += 1
    acc |= np.int64(eoi) << nacc
    nacc += size
    while nacc > 0:
        out[pos] = acc & 0xFF
        pos += 1
        acc >>= 8
        nacc -= 8
    return pos


def decode(data: bytes, min_size: int, expected: int) -> np.ndarray:
    """Decompress ``data`` (sub-blocks already joined) into at most ``expected`` indices.

    Raises ``ValueError`` on invalid codes or when the stream overflows.
    """
    out = np.zeros(expected, dtype=np.uint8)
    status, written = _decode(np.frombuffer(data, dtype=np.uint8), min_size, out)
    if status == ERR_BAD_CODE:
        raise ValueError("invalid LZW code")
    if status == ERR_OVERFLOW:
        raise ValueError("LZW data decodes to more pixels than the frame holds")
    return out[:written]


def encode(indices, min_size: int) -> bytes:
    """Compress a flat index array; every value must be below ``2**min_size``."""
    idx = np.ascontiguousarray(indices, dtype=np.uint8).ravel()
    if idx.size and int(idx.max()) >= (1 << min_size):
        raise ValueError(f"index {int(idx.max())} does not fit a {min_size}-bit LZW alphabet")
    out = np.zeros(idx.size * 2 + 16, dtype=np.uint8)
    n = _encode(idx, min_size, out)
    return out[:n].tobytes()
