"""3D baker block permutation on integer grids.

A linear array of ``M*N`` elements is viewed as a ``W x L x H`` cube (x fastest,
then y, then z). The x and y axes are cut into variable-width pieces and every
``n_i x m_j x H`` column block is restacked, block after block, into the cube
in raster order. The result is a bijection on cell indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InfeasiblePartition


def cube_dims(m: int, n: int) -> tuple[int, int, int]:
    """Cube extents ``(W, L, H)`` for an ``m`` (vertical) by ``n`` (horizontal) array."""
    if m < 1 or n < 1:
        raise DimensionMismatch(f"array dimensions must be positive, got {m}x{n}")
    if m % 4:
        return m, n, 1
    w = m // 4
    if n % 8 == 0:
        return w, n // 8, 32
    if n % 4 == 0:
        return w, n // 4, 16
    if n % 2 == 0:
        return w, n // 2, 8
    return w, n, 4


def partition_axis(total: int, count: int, raw: Sequence[float]) -> list[int]:
    """Cut ``total`` into ``count`` pieces from ``count - 1`` values in [-1, 1].

    Each piece takes its share of whatever extent is still unassigned, clamped
    so that every piece (including the ones still to come) is at least 1 wide.
    The last piece is the remainder.
    """
    if count == 1 and total >= 1:
        return [total]
    if count < 1 or count >= total:
        raise InfeasiblePartition(f"cannot cut extent {total} into {count} pieces")
    if len(raw) < count - 1:
        raise InfeasiblePartition(f"need {count - 1} partition values, got {len(raw)}")
    sizes = []
    remaining = total
    for i in range(count - 1):
        size = int(np.floor((float(raw[i]) + 1.0) / 2.0 * remaining))
        size = min(max(size, 1), remaining - (count - 1 - i))
        sizes.append(size)
        remaining -= size
    sizes.append(remaining)
    return sizes


@dataclass(frozen=True)
class BakerGeometry:
    W: int
    L: int
    H: int
    n: tuple[int, ...]
    m: tuple[int, ...]

    def __post_init__(self):
        n, m = tuple(int(v) for v in self.n), tuple(int(v) for v in self.m)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        if sum(n) != self.W or sum(m) != self.L or min(n) < 1 or min(m) < 1:
            raise InfeasiblePartition(f"pieces {n} / {m} do not tile a {self.W}x{self.L} face")

    @property
    def k(self) -> int:
        return len(self.n)

    @property
    def t(self) -> int:
        return len(self.m)

    @property
    def F(self) -> tuple[int, ...]:
        return tuple(int(v) for v in np.concatenate([[0], np.cumsum(self.n)[:-1]]))

    @property
    def G(self) -> tuple[int, ...]:
        return tuple(int(v) for v in np.concatenate([[0], np.cumsum(self.m)[:-1]]))

    @property
    def size(self) -> int:
        return self.W * self.L * self.H

    @classmethod
    def from_draws(cls, m: int, n: int, k: int, t: int, raw_x: Sequence[float], raw_y: Sequence[float]) -> BakerGeometry:
        """Build the geometry for an ``m x n`` array from chaotic draws.

        ``k`` and ``t`` are clamped to ``W - 1`` and ``L - 1`` (but never below 1).
        """
        W, L, H = cube_dims(m, n)
        k, t = clamp_counts(W, L, k, t)
        return cls(W, L, H, tuple(partition_axis(W, k, raw_x)), tuple(partition_axis(L, t, raw_y)))


def clamp_counts(W: int, L: int, k: int, t: int) -> tuple[int, int]:
    return max(1, min(k, W - 1)), max(1, min(t, L - 1))


def draws_needed(m: int, n: int, k: int, t: int) -> tuple[int, int]:
    """Number of x-axis and y-axis partition values one geometry consumes."""
    W, L, _ = cube_dims(m, n)
    k, t = clamp_counts(W, L, k, t)
    return k - 1, t - 1


def baker_map(x: int, y: int, z: int, g: BakerGeometry) -> tuple[int, int, int]:
    """Image of one cell under the baker map."""
    F, G = g.F, g.G
    i = int(np.searchsorted(F, x, side="right")) - 1
    j = int(np.searchsorted(G, y, side="right")) - 1
    ni, mj = g.n[i], g.m[j]
    num = (g.W * G[j] + mj * F[i]) * g.H + z * mj * ni + (y - G[j]) * ni + x - F[i]
    wl = g.W * g.L
    return num % g.W, (num % wl) // g.W, num // wl


def destination(g: BakerGeometry) -> np.ndarray:
    """Linear target index of every linear source index, vectorized."""
    p = np.arange(g.size, dtype=np.int64)
    wl = g.W * g.L
    x, y, z = p % g.W, (p % wl) // g.W, p // wl
    F = np.asarray(g.F, dtype=np.int64)
    G = np.asarray(g.G, dtype=np.int64)
    n = np.asarray(g.n, dtype=np.int64)
    m = np.asarray(g.m, dtype=np.int64)
    i = np.searchsorted(F, x, side="right") - 1
    j = np.searchsorted(G, y, side="right") - 1
    ni, mj, Fi, Gj = n[i], m[j], F[i], G[j]
    # re-linearizing (x', y', z') with the same raster rule gives num back
    return (g.W * Gj + mj * Fi) * g.H + z * mj * ni + (y - Gj) * ni + x - Fi


def _check(elements: np.ndarray, m: int, n: int, g: BakerGeometry) -> None:
    if m * n != g.size or len(elements) != g.size:
        raise DimensionMismatch(
            f"{len(elements)} elements for a {m}x{n} array do not fill a {g.W}x{g.L}x{g.H} cube"
        )


def permute(elements, m: int, n: int, g: BakerGeometry, rounds: int = 1, dest: np.ndarray | None = None) -> np.ndarray:
    """Apply the baker map ``rounds`` times along axis 0 of ``elements``."""
    a = np.asarray(elements)
    _check(a, m, n, g)
    if dest is None:
        dest = destination(g)
    for _ in range(rounds):
        out = np.empty_like(a)
        out[dest] = a
        a = out
    return a


def unpermute(elements, m: int, n: int, g: BakerGeometry, rounds: int = 1, dest: np.ndarray | None = None) -> np.ndarray:
    """Inverse of :func:`permute` for the same geometry and round count."""
    a = np.asarray(elements)
    _check(a, m, n, g)
    if dest is None:
        dest = destination(g)
    for _ in range(rounds):
        a = a[dest]
    return a
