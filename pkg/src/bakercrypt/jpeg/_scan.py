"""Compiled entropy-coding kernels for interleaved baseline scans.

Blocks are handled in MCU order as ``(n_blocks, 64)`` int16 arrays in zigzag
order with absolute DC values. ``block_comp[b]`` gives the component of the
``b``-th block inside one MCU. Kernels report failures through integer status
codes; the Python layer turns them into exceptions.
"""

import numba
import numpy as np

OK = 0
ERR_BAD_CODE = 1
ERR_BAD_RUN = 2
ERR_MISSING_RST = 3
ERR_TRUNCATED = 4
ERR_DC_OVERFLOW = 5
ERR_AC_OVERFLOW = 6
ERR_NO_CODE = 7

MAX_DC_CATEGORY = 11
MAX_AC_CATEGORY = 10


@numba.njit(cache=True)
def decode_scan(data, n_mcus, restart_interval, block_comp, dc_sel, ac_sel,
                dc_maxcode, dc_valptr, dc_mincode, dc_vals,
                ac_maxcode, ac_valptr, ac_mincode, ac_vals, out):
    """Decode ``n_mcus`` MCUs from entropy-coded ``data`` into ``out``.

    Returns ``(status, bytes_consumed, padded_bits)``.
    """
    n = data.shape[0]
    pos = 0
    acc = np.int64(0)
    nacc = 0
    padded = 0
    n_comp = dc_sel.shape[0]
    pred = np.zeros(n_comp, dtype=np.int64)
    bpm = block_comp.shape[0]
    b = 0
    for mcu in range(n_mcus):
        if restart_interval > 0 and mcu > 0 and mcu % restart_interval == 0:
            acc = 0
            nacc = 0
            while pos + 1 < n and data[pos] == 0xFF and data[pos + 1] == 0xFF:
                pos += 1
            if pos + 1 < n and data[pos] == 0xFF and 0xD0 <= data[pos + 1] <= 0xD7:
                pos += 2
            else:
                return ERR_MISSING_RST, pos, padded
            for c in range(n_comp):
                pred[c] = 0
        for bi in range(bpm):
            c = block_comp[bi]
            for k in range(64):
                out[b, k] = 0
            # DC, then AC; t == 0 selects the DC table set
            for t in range(2):
                k = 0 if t == 0 else 1
                while True:
                    if t == 0:
                        sel = dc_sel[c]
                    else:
                        sel = ac_sel[c]
                    # huffman decode, one bit at a time
                    code = 0
                    length = 0
                    sym = -1
                    while length < 16:
                        if nacc == 0:
                            if pos < n and data[pos] != 0xFF:
                                acc = data[pos]
                                pos += 1
                            elif pos + 1 < n and data[pos] == 0xFF and data[pos + 1] == 0x00:
                                acc = 0xFF
                                pos += 2
                            else:
                                acc = 0
                                padded += 8
                            nacc = 8
                        nacc -= 1
                        code = (code << 1) | ((acc >> nacc) & 1)
                        length += 1
                        if t == 0:
                            mx = dc_maxcode[sel, length]
                        else:
                            mx = ac_maxcode[sel, length]
                        if code <= mx:
                            if t == 0:
                                sym = dc_vals[sel, dc_valptr[sel, length] + code - dc_mincode[sel, length]]
                            else:
                                sym = ac_vals[sel, ac_valptr[sel, length] + code - ac_mincode[sel, length]]
                            break
                    if sym < 0:
                        return ERR_BAD_CODE, pos, padded
                    if t == 0:
                        s = sym
                        r = 0
                        if s > 15:
                            return ERR_BAD_CODE, pos, padded
                    else:
                        r = sym >> 4
                        s = sym & 15
                    # receive s extra bits
                    v = 0
                    for _ in range(s):
                        if nacc == 0:
                            if pos < n and data[pos] != 0xFF:
                                acc = data[pos]
                                pos += 1
                            elif pos + 1 < n and data[pos] == 0xFF and data[pos + 1] == 0x00:
                                acc = 0xFF
                                pos += 2
                            else:
                                acc = 0
                                padded += 8
                            nacc = 8
                        nacc -= 1
                        v = (v << 1) | ((acc >> nacc) & 1)
                    if s > 0 and v < (1 << (s - 1)):
                        v += (-1 << s) + 1
                    if t == 0:
                        pred[c] += v
                        out[b, 0] = pred[c]
                        break
                    if s == 0:
                        if r == 15:
                            k += 16
                            if k > 64:
                                return ERR_BAD_RUN, pos, padded
                            if k == 64:
                                break
                            continue
                        break
                    k += r
                    if k > 63:
                        return ERR_BAD_RUN, pos, padded
                    out[b, k] = v
                    k += 1
                    if k >= 64:
                        break
            b += 1
    return OK, pos, padded


@numba.njit(cache=True)
def _category(v):
    a = v if v >= 0 else -v
    s = 0
    while a:
        s += 1
        a >>= 1
    return s


@numba.njit(cache=True)
def count_symbols(blocks, block_comp, dc_sel, ac_sel, dc_freq, ac_freq):
    """First encoding pass: accumulate symbol frequencies per table."""
    n_comp = dc_sel.shape[0]
    pred = np.zeros(n_comp, dtype=np.int64)
    bpm = block_comp.shape[0]
    for b in range(blocks.shape[0]):
        c = block_comp[b % bpm]
        diff = np.int64(blocks[b, 0]) - pred[c]
        pred[c] = blocks[b, 0]
        s = _category(diff)
        if s > MAX_DC_CATEGORY:
            return ERR_DC_OVERFLOW, b
        dc_freq[dc_sel[c], s] += 1
        run = 0
        for k in range(1, 64):
            v = np.int64(blocks[b, k])
            if v == 0:
                run += 1
                continue
            while run > 15:
                ac_freq[ac_sel[c], 0xF0] += 1
                run -= 16
            s = _category(v)
            if s > MAX_AC_CATEGORY:
                return ERR_AC_OVERFLOW, b
            ac_freq[ac_sel[c], (run << 4) | s] += 1
            run = 0
        if run > 0:
            ac_freq[ac_sel[c], 0] += 1
    return OK, 0


@numba.njit(cache=True)
def encode_scan(blocks, block_comp, dc_sel, ac_sel, dc_code, dc_size, ac_code, ac_size, out):
    """Second encoding pass: emit byte-stuffed entropy-coded data.

    Returns ``(status, n_bytes)``; the final byte is padded with one bits.
    """
    n_comp = dc_sel.shape[0]
    pred = np.zeros(n_comp, dtype=np.int64)
    bpm = block_comp.shape[0]
    acc = np.int64(0)
    nacc = 0
    pos = 0
    for b in range(blocks.shape[0]):
        c = block_comp[b % bpm]
        for k in range(64):
            v = np.int64(blocks[b, k])
            if k == 0:
                diff = v - pred[c]
                pred[c] = v
                s = _category(diff)
                size = dc_size[dc_sel[c], s]
                if size == 0:
                    return ERR_NO_CODE, pos
                nbits = size + s
                bits = (dc_code[dc_sel[c], s] << s) | ((diff if diff >= 0 else diff - 1) & ((1 << s) - 1))
                run = 0
            else:
                if v == 0:
                    run += 1
                    if k < 63:
                        continue
                    # trailing zeros: end of block
                    size = ac_size[ac_sel[c], 0]
                    if size == 0:
                        return ERR_NO_CODE, pos
                    nbits = size
                    bits = ac_code[ac_sel[c], 0]
                else:
                    while run > 15:
                        size = ac_size[ac_sel[c], 0xF0]
                        if size == 0:
                            return ERR_NO_CODE, pos
                        acc = (acc << size) | ac_code[ac_sel[c], 0xF0]
                        nacc += size
                        while nacc >= 8:
                            byte = (acc >> (nacc - 8)) & 0xFF
                            out[pos] = byte
                            pos += 1
                            if byte == 0xFF:
                                out[pos] = 0
                                pos += 1
                            nacc -= 8
                        acc &= (np.int64(1) << nacc) - 1
                        run -= 16
                    s = _category(v)
                    sym = (run << 4) | s
                    size = ac_size[ac_sel[c], sym]
                    if size == 0:
                        return ERR_NO_CODE, pos
                    nbits = size + s
                    bits = (ac_code[ac_sel[c], sym] << s) | ((v if v >= 0 else v - 1) & ((1 << s) - 1))
                    run = 0
            acc = (acc << nbits) | bits
            nacc += nbits
            while nacc >= 8:
                byte = (acc >> (nacc - 8)) & 0xFF
                out[pos] = byte
                pos += 1
                if byte == 0xFF:
                    out[pos] = 0
                    pos += 1
                nacc -= 8
            acc &= (np.int64(1) << nacc) - 1
    if nacc > 0:
        pad = 8 - nacc
        byte = ((acc << pad) | ((1 << pad) - 1)) & 0xFF
        out[pos] = byte
        pos += 1
        if byte == 0xFF:
            out[pos] = 0
            pos += 1
    return OK, pos
