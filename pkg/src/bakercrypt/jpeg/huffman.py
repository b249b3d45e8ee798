"""Huffman table construction for baseline JPEG.

``bits``/``huffval`` is the on-disk table form: ``bits[l]`` counts the codes
of length ``l`` (index 0 unused) and ``huffval`` lists symbols in code order.
"""

from __future__ import annotations

import numpy as np

from ..errors import CorruptStream

MAX_CODE_LENGTH = 16


def optimal_table(freq) -> tuple[list[int], list[int]]:
    """Length-limited optimal code for 256 symbol frequencies.

    Follows the code-size, bit-adjustment and sort procedures of ITU T.81
    Annex K.2, including the reserved all-ones codeword.
    """
    freq = [int(f) for f in freq]
    if len(freq) != 256:
        raise ValueError("expected 256 frequencies")
    if not any(freq):
        freq[0] = 1
    freq.append(1)  # symbol 256 reserves the all-ones code
    codesize = [0] * 257
    others = [-1] * 257

    while True:
        c1, v = -1, None
        for i in range(257):
            if freq[i] and (v is None or freq[i] <= v):
                v, c1 = freq[i], i
        c2, v = -1, None
        for i in range(257):
            if freq[i] and i != c1 and (v is None or freq[i] <= v):
                v, c2 = freq[i], i
        if c2 < 0:
            break
        freq[c1] += freq[c2]
        freq[c2] = 0
        codesize[c1] += 1
        while others[c1] >= 0:
            c1 = others[c1]
            codesize[c1] += 1
        others[c1] = c2
        codesize[c2] += 1
        while others[c2] >= 0:
            c2 = others[c2]
            codesize[c2] += 1

    bits = [0] * 33
    for size in codesize:
        if size:
            bits[size] += 1

    # shorten codes longer than 16 bits
    for i in range(32, MAX_CODE_LENGTH, -1):
        while bits[i] > 0:
            j = i - 2
            while bits[j] == 0:
                j -= 1
            bits[i] -= 2
            bits[i - 1] += 1
            bits[j + 1] += 2
            bits[j] -= 1
    # drop the reserved code from the longest length in use
    i = MAX_CODE_LENGTH
    while bits[i] == 0:
        i -= 1
    bits[i] -= 1

    huffval = [s for size in range(1, 33) for s in range(256) if codesize[s] == size]
    return bits[: MAX_CODE_LENGTH + 1], huffval


def code_lengths_and_codes(bits, huffval) -> tuple[np.ndarray, np.ndarray]:
    """Per-symbol code (``ehufco``) and length (``ehufsi``) arrays of size 256."""
    ehufco = np.zeros(256, dtype=np.int64)
    ehufsi = np.zeros(256, dtype=np.int64)
    code = 0
    p = 0
    for length in range(1, MAX_CODE_LENGTH + 1):
        for _ in range(bits[length]):
            sym = huffval[p]
            ehufco[sym] = code
            ehufsi[sym] = length
            code += 1
            p += 1
        code <<= 1
    return ehufco, ehufsi


def decode_tables(bits, huffval) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """``maxcode``, ``valptr``, ``mincode`` and padded ``huffval`` for decoding."""
    maxcode = np.full(18, -1, dtype=np.int64)
    valptr = np.zeros(17, dtype=np.int64)
    mincode = np.zeros(17, dtype=np.int64)
    code = 0
    p = 0
    for length in range(1, MAX_CODE_LENGTH + 1):
        if bits[length]:
            valptr[length] = p
            mincode[length] = code
            code += bits[length]
            p += bits[length]
            maxcode[length] = code - 1
            if code > (1 << length):
                raise CorruptStream("Huffman table is over-subscribed")
        code <<= 1
    maxcode[17] = 0x7FFFFFFF
    vals = np.zeros(256, dtype=np.int64)
    vals[: len(huffval)] = huffval
    return maxcode, valptr, mincode, vals
