"""Five statistical tests from NIST SP 800-22.

Implemented: Frequency (monobit), Frequency within a Block, Runs, Cumulative
Sums (forward and reverse) and Approximate Entropy. Each function takes a 0/1
array and returns a p-value; a sequence passes when ``p >= ALPHA``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, gammaincc, ndtr

from .errors import InsufficientBits

ALPHA = 0.01
RECOMMENDED_BITS = 10**6


def _bits(bits) -> np.ndarray:
    b = np.asarray(bits, dtype=np.int8).ravel()
    if b.size and (b.min() < 0 or b.max() > 1):
        raise ValueError("bit sequence must contain only 0 and 1")
    return b


def frequency(bits) -> float:
    b = _bits(bits)
    n = b.size
    s_obs = abs(int(2 * b.sum(dtype=np.int64)) - n) / math.sqrt(n)
    return float(erfc(s_obs / math.sqrt(2)))


def block_frequency(bits, block_size: int = 128) -> float:
    b = _bits(bits)
    blocks = b.size // block_size
    if blocks == 0:
        raise InsufficientBits(f"block frequency needs at least {block_size} bits")
    pi = b[: blocks * block_size].reshape(blocks, block_size).mean(axis=1)
    chi2 = 4.0 * block_size * float(((pi - 0.5) ** 2).sum())
    return float(gammaincc(blocks / 2.0, chi2 / 2.0))


def runs(bits) -> float:
    b = _bits(bits)
    n = b.size
    pi = b.sum(dtype=np.int64) / n
    # frequency prerequisite
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return 0.0
    v_obs = 1 + int(np.count_nonzero(b[1:] != b[:-1]))
    num = abs(v_obs - 2.0 * n * pi * (1 - pi))
    return float(erfc(num / (2.0 * math.sqrt(2.0 * n) * pi * (1 - pi))))


def _cdiv(a: int, b: int) -> int:
    # integer division truncating toward zero
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


def cumulative_sums(bits, reverse: bool = False) -> float:
    b = _bits(bits)
    n = b.size
    walk = np.cumsum((2 * b.astype(np.int64) - 1)[::-1] if reverse else 2 * b.astype(np.int64) - 1)
    z = int(np.abs(walk).max())
    if z == 0:
        return 0.0
    root = math.sqrt(n)
    k1 = np.arange(_cdiv(_cdiv(-n, z) + 1, 4), _cdiv(_cdiv(n, z) - 1, 4) + 1)
    k2 = np.arange(_cdiv(_cdiv(-n, z) - 3, 4), _cdiv(_cdiv(n, z) - 1, 4) + 1)
    s1 = (ndtr((4 * k1 + 1) * z / root) - ndtr((4 * k1 - 1) * z / root)).sum()
    s2 = (ndtr((4 * k2 + 3) * z / root) - ndtr((4 * k2 + 1) * z / root)).sum()
    return float(1.0 - s1 + s2)


def _phi(b: np.ndarray, m: int) -> float:
    if m == 0:
        return 0.0
    n = b.size
    wrapped = np.concatenate([b, b[: m - 1]]).astype(np.int64)
    codes = np.zeros(n, dtype=np.int64)
    for j in range(m):
        codes = (codes << 1) | wrapped[j:j + n]
    counts = np.bincount(codes, minlength=1 << m)
    c = counts[counts > 0] / n
    return float((c * np.log(c)).sum())


def approximate_entropy(bits, m: int = 10) -> float:
    b = _bits(bits)
    n = b.size
    apen = _phi(b, m) - _phi(b, m + 1)
    chi2 = 2.0 * n * (math.log(2) - apen)
    return float(gammaincc(2 ** (m - 1), chi2 / 2.0))


@dataclass(frozen=True)
class NistResult:
    name: str
    p_value: float
    passed: bool


def nist_subset(bits, block_size: int = 128, apen_m: int = 10) -> list[NistResult]:
    """Run the five implemented tests (cumulative sums in both directions).

    Inputs shorter than ``RECOMMENDED_BITS`` are accepted but their results are
    advisory only; fewer than 100 bits is refused outright.
    """
    b = _bits(bits)
    if b.size < 100:
        raise InsufficientBits(f"{b.size} bits is below the 100-bit minimum")
    tests = [
        ("Frequency", lambda: frequency(b)),
        (f"Block Frequency (m={block_size})", lambda: block_frequency(b, block_size)),
        ("Runs", lambda: runs(b)),
        ("Cumulative Sums (forward)", lambda: cumulative_sums(b)),
        ("Cumulative Sums (reverse)", lambda: cumulative_sums(b, reverse=True)),
        (f"Approximate Entropy (m={apen_m})", lambda: approximate_entropy(b, apen_m)),
    ]
    results = []
    for name, fn in tests:
        p = fn()
        results.append(NistResult(name, p, p >= ALPHA))
    return results
