"""Compound chaotic sequence generator.

Two Chebyshev-type tracks are iterated alternately: the cubic
``x -> 4x^3 - 3x`` when ``x + y < 0`` and the quartic ``y -> 8y^4 - 8y^2 + 1``
otherwise. Each step emits the freshly updated track value ``z`` which is then
quantized through ``arccos`` into an integer alphabet of size ``N``.

Finite precision lets orbits land on (or next to) a fixed point and stay
there, so a track value that comes within ``PERTURB_RADIUS`` of a fixed point
of its own map is nudged by a small deterministic offset. The offset depends
only on a counter inside the state, which keeps encryption and decryption in
lockstep.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

import numba
import numpy as np

from .errors import FixedPointSeed, KeyFileError, OutOfRange

SEED_TOLERANCE = 1e-12
PERTURB_RADIUS = 1e-10
PERTURB_UNIT = 1e-9
DEFAULT_WARMUP = 100
DEFAULT_ALPHABET = 256


def _real_roots(coeffs) -> np.ndarray:
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) < 1e-9].real
    real = real[(real >= -1.0 - 1e-9) & (real <= 1.0 + 1e-9)]
    return np.sort(np.clip(real, -1.0, 1.0))


# 4x^3 - 3x = x  and  8y^4 - 8y^2 + 1 = y
CUBIC_FIXED_POINTS = _real_roots([4.0, 0.0, -4.0, 0.0])
QUARTIC_FIXED_POINTS = _real_roots([8.0, 0.0, -8.0, -1.0, 1.0])
ALL_FIXED_POINTS = np.unique(np.concatenate([CUBIC_FIXED_POINTS, QUARTIC_FIXED_POINTS]))


def validate_seed(x0: float, y0: float) -> tuple[float, float]:
    """Check a seed pair and return it as floats.

    Both values must lie strictly inside (-1, 1) and keep a distance of more
    than ``SEED_TOLERANCE`` from every fixed point of either map.
    """
    x0, y0 = float(x0), float(y0)
    for name, value in (("x0", x0), ("y0", y0)):
        if not math.isfinite(value) or abs(value) >= 1.0:
            raise OutOfRange(f"{name}={value!r} is outside the open interval (-1, 1)")
        gap = np.abs(ALL_FIXED_POINTS - value)
        if gap.min() <= SEED_TOLERANCE:
            root = ALL_FIXED_POINTS[gap.argmin()]
            raise FixedPointSeed(f"{name}={value!r} is within {SEED_TOLERANCE:g} of fixed point {root:.12f}")
    return x0, y0


@dataclass(frozen=True)
class KeyMaterial:
    """The complete secret key."""

    x0: float
    y0: float
    k: int = 32
    t: int = 20
    warmup: int = DEFAULT_WARMUP
    rounds: int = 1

    def __post_init__(self):
        x0, y0 = validate_seed(self.x0, self.y0)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "y0", y0)
        for name in ("k", "t", "rounds"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise OutOfRange(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if int(self.warmup) != self.warmup or self.warmup < 0:
            raise OutOfRange(f"warmup must be a non-negative integer, got {self.warmup!r}")
        object.__setattr__(self, "warmup", int(self.warmup))

    def replace(self, **changes) -> KeyMaterial:
        values = dict(x0=self.x0, y0=self.y0, k=self.k, t=self.t, warmup=self.warmup, rounds=self.rounds)
        values.update(changes)
        return KeyMaterial(**values)

    def start(self) -> ChaoticState:
        """Fresh generator state with the warm-up iterates already discarded."""
        state = ChaoticState(self.x0, self.y0)
        advance(state, self.warmup)
        return state


@dataclass
class ChaoticState:
    x: float
    y: float
    emitted: int = 0
    perturb_counter: int = field(default=0)


def _nudge(value: float, counter: int) -> float:
    delta = ((counter % 9) + 1) * PERTURB_UNIT
    value = value - delta if value > 0.0 else value + delta
    return min(1.0, max(-1.0, value))


def next_z(state: ChaoticState) -> float:
    """Advance the compound map one step and return the emitted value."""
    x, y = state.x, state.y
    if x + y < 0.0:
        x = x * (4.0 * x * x - 3.0)
        x = min(1.0, max(-1.0, x))
        z = x
        if np.abs(CUBIC_FIXED_POINTS - x).min() <= PERTURB_RADIUS:
            x = _nudge(x, state.perturb_counter)
            state.perturb_counter += 1
    else:
        y2 = y * y
        y = 8.0 * y2 * (y2 - 1.0) + 1.0
        y = min(1.0, max(-1.0, y))
        z = y
        if np.abs(QUARTIC_FIXED_POINTS - y).min() <= PERTURB_RADIUS:
            y = _nudge(y, state.perturb_counter)
            state.perturb_counter += 1
    state.x, state.y = x, y
    state.emitted += 1
    return z


def quantize(z: float, n: int = DEFAULT_ALPHABET) -> int:
    """Map ``z`` in [-1, 1] onto one of ``n`` sub-domains."""
    if z >= 1.0:
        return n - 1
    return int(math.floor((1.0 - math.acos(z) / math.pi) * n))


def quantize_array(z: np.ndarray, n: int = DEFAULT_ALPHABET) -> np.ndarray:
    """Vectorized :func:`quantize`; returns ``int64``."""
    z = np.asarray(z, dtype=np.float64)
    out = np.floor((1.0 - np.arccos(z) / np.pi) * n).astype(np.int64)
    out[z >= 1.0] = n - 1
    np.clip(out, 0, n - 1, out=out)
    return out


@numba.njit(cache=True)
def _iterate(x, y, counter, cubic_fp, quartic_fp, out):
    for i in range(out.shape[0]):
        if x + y < 0.0:
            x = x * (4.0 * x * x - 3.0)
            x = min(1.0, max(-1.0, x))
            out[i] = x
            near = False
            for fp in cubic_fp:
                if abs(fp - x) <= 1e-10:
                    near = True
            if near:
                delta = ((counter % 9) + 1) * 1e-9
                x = x - delta if x > 0.0 else x + delta
                x = min(1.0, max(-1.0, x))
                counter += 1
        else:
            y2 = y * y
            y = 8.0 * y2 * (y2 - 1.0) + 1.0
            y = min(1.0, max(-1.0, y))
            out[i] = y
            near = False
            for fp in quartic_fp:
                if abs(fp - y) <= 1e-10:
                    near = True
            if near:
                delta = ((counter % 9) + 1) * 1e-9
                y = y - delta if y > 0.0 else y + delta
                y = min(1.0, max(-1.0, y))
                counter += 1
    return x, y, counter


def raw_values(state: ChaoticState, count: int) -> np.ndarray:
    """Emit ``count`` unquantized values, advancing ``state`` in place."""
    out = np.empty(int(count), dtype=np.float64)
    if count:
        x, y, c = _iterate(state.x, state.y, state.perturb_counter, CUBIC_FIXED_POINTS, QUARTIC_FIXED_POINTS, out)
        state.x, state.y, state.perturb_counter = float(x), float(y), int(c)
        state.emitted += int(count)
    return out


def advance(state: ChaoticState, count: int) -> None:
    """Discard ``count`` iterates."""
    # chunked so huge warm-ups do not allocate one large buffer
    while count > 0:
        step = min(count, 1 << 20)
        raw_values(state, step)
        count -= step


def keystream(state: ChaoticState, count: int, n: int = DEFAULT_ALPHABET) -> np.ndarray:
    """Return ``count`` keystream integers in ``[0, n-1]``."""
    return quantize_array(raw_values(state, count), n)


# key files


def _format_real(value: float) -> str:
    text = repr(value)
    if "e" in text or "E" in text:
        text = format(Decimal(value), "f")
    whole, _, frac = text.partition(".")
    return f"{whole}.{frac.ljust(14, '0')}"


def format_key(key: KeyMaterial) -> str:
    lines = [_format_real(key.x0), _format_real(key.y0), str(key.k), str(key.t), str(key.rounds), str(key.warmup)]
    return "\n".join(lines) + "\n"


def parse_key(text: str) -> KeyMaterial:
    """Parse the five- or six-line key file format.

    Lines: x0, y0, k, t, rounds and optionally the warm-up count.
    Blank lines and ``#`` comments are ignored.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) not in (5, 6):
        raise KeyFileError(f"key file must have 5 or 6 value lines, found {len(lines)}")
    try:
        x0, y0 = float(lines[0]), float(lines[1])
        k, t, rounds = int(lines[2]), int(lines[3]), int(lines[4])
        warmup = int(lines[5]) if len(lines) == 6 else DEFAULT_WARMUP
    except ValueError as exc:
        raise KeyFileError(f"malformed key file: {exc}") from None
    return KeyMaterial(x0, y0, k=k, t=t, warmup=warmup, rounds=rounds)


def load_key(path: str | os.PathLike) -> KeyMaterial:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise KeyFileError(f"cannot read key file {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise KeyFileError(f"key file {path} is not text") from None
    return parse_key(text)


def save_key(key: KeyMaterial, path: str | os.PathLike) -> None:
    Path(path).write_text(format_key(key))
