"""Deterministic, splittable sampling of perturbation regions.

The word generator is a counter-based splitmix64: plain 64-bit integer
arithmetic, so two runs with the same seed agree bit for bit on any
platform, and generating a block of words is a vectorized numpy
operation. Standard normals are produced by applying the inverse normal
CDF to 64-bit uniforms rather than by any platform RNG.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

_U64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15  # splitmix64 Weyl increment
_SPLIT_GAMMA = 0xD1B54A32D192ED03  # separate odd increment for child-seed derivation
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on a uint64 array (wraparound is silent there)."""
    z = (z ^ (z >> np.uint64(30))) * _MIX_A
    z = (z ^ (z >> np.uint64(27))) * _MIX_B
    return z ^ (z >> np.uint64(31))


def _mix64_int(z: int) -> int:
    """splitmix64 finalizer on a plain int, masked to 64 bits."""
    z = ((z ^ (z >> 30)) * int(_MIX_A)) & _U64
    z = ((z ^ (z >> 27)) * int(_MIX_B)) & _U64
    return z ^ (z >> 31)


@dataclass
class SampleStream:
    """Random stream fully identified by ``(seed, stream_index)``.

    The same pair always yields the identical word sequence; distinct
    stream indices mix into decorrelated sequences. Instances are cheap
    and value-like, but a single instance must not be advanced from two
    threads at once: parallel work should go through :meth:`split`.
    """

    seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) <= _U64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.stream_index < 0:
            raise ValueError("stream_index must be non-negative")
        base = (int(self.seed) + _GAMMA * (self.stream_index + 1)) & _U64
        self._base = np.uint64(_mix64_int(base))
        self._pos = 0

    def words(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit words as a uint64 array."""
        idx = np.arange(self._pos + 1, self._pos + n + 1, dtype=np.uint64)
        self._pos += n
        return _mix64(self._base + idx * np.uint64(_GAMMA))

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` doubles uniform on the open interval (0, 1)."""
        return ((self.words(n) >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53

    def symmetric(self, n: int) -> np.ndarray:
        """``n`` doubles uniform on (-1, 1)."""
        return 2.0 * self.uniforms(n) - 1.0

    def normals(self, n: int) -> np.ndarray:
        """``n`` standard normals: inverse normal CDF applied to uniforms."""
        return ndtri(self.uniforms(n))

    def split(self, k: int) -> list["SampleStream"]:
        """Derive ``k`` child streams.

        A pure function of ``(seed, stream_index)``: re-splitting the
        same parent yields bit-identical children no matter how far the
        parent has been advanced, and the child-seed derivation uses an
        increment disjoint from the word counter's.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        base = int(self._base)
        return [
            SampleStream(_mix64_int((base + (i + 1) * _SPLIT_GAMMA) & _U64))
            for i in range(k)
        ]


def split(stream: SampleStream, k: int) -> list[SampleStream]:
    """Module-level alias for :meth:`SampleStream.split`."""
    return stream.split(k)


@dataclass
class BallRegion:
    """Euclidean ball ``{v : ||v - center|| <= radius}``."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(-1)
        self.radius = float(self.radius)
        if not np.isfinite(self.radius) or self.radius < 0.0:
            raise ValueError("radius must be finite and non-negative")
        if not np.all(np.isfinite(self.center)):
            raise ValueError("center must be finite")

    @classmethod
    def relative(cls, x, delta: float) -> "BallRegion":
        """Ball of relative size delta around x: radius ``delta * ||x||``."""
        x = np.asarray(x, dtype=float)
        return cls(x, delta * float(np.linalg.norm(x)))


@dataclass
class CubeRegion:
    """Axis-aligned box: coordinate ``i`` spans ``center_i +- half_widths_i``."""

    center: np.ndarray
    half_widths: np.ndarray

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(-1)
        self.half_widths = np.asarray(self.half_widths, dtype=float).reshape(-1)
        if self.half_widths.shape != self.center.shape:
            raise ValueError("half_widths must match center in length")
        if not np.all(np.isfinite(self.half_widths)) or np.any(self.half_widths < 0.0):
            raise ValueError("half_widths must be finite and non-negative")
        if not np.all(np.isfinite(self.center)):
            raise ValueError("center must be finite")

    @classmethod
    def relative(cls, x, delta: float) -> "CubeRegion":
        """Entrywise-relative box: coordinate ``i`` may move by ``delta * |x_i|``."""
        x = np.asarray(x, dtype=float)
        return cls(x, delta * np.abs(x))


def _unit_directions(stream: SampleStream, n: int, m: int) -> np.ndarray:
    """n isotropic unit vectors in R^m (rows). Zero draws are resampled."""
    g = stream.normals(n * m).reshape(n, m)
    norms = np.linalg.norm(g, axis=1)
    for _ in range(100):
        bad = np.flatnonzero(norms == 0.0)
        if bad.size == 0:
            return g / norms[:, None]
        g[bad] = stream.normals(bad.size * m).reshape(-1, m)
        norms[bad] = np.linalg.norm(g[bad], axis=1)
    raise RuntimeError("failed to draw a nonzero direction")


def sample_ball(region: BallRegion, stream: SampleStream, size: int | None = None):
    """Uniform point(s) in a ball.

    Direction is a normalized vector of independent normals; the radial
    coordinate is ``radius * U**(1/m)``, the inverse CDF of the r^m law.
    Returns one vector, or a ``(size, m)`` array when ``size`` is given.
    A zero-radius region returns its center.
    """
    n = 1 if size is None else int(size)
    m = region.center.size
    if region.radius == 0.0:
        out = np.tile(region.center, (n, 1))
        return out[0] if size is None else out
    dirs = _unit_directions(stream, n, m)
    radii = region.radius * stream.uniforms(n) ** (1.0 / m)
    out = region.center + dirs * radii[:, None]
    return out[0] if size is None else out


def sample_cube(region: CubeRegion, stream: SampleStream, size: int | None = None):
    """Uniform point(s) in a box: each coordinate independent uniform."""
    n = 1 if size is None else int(size)
    m = region.center.size
    u = stream.symmetric(n * m).reshape(n, m)
    out = region.center + u * region.half_widths
    return out[0] if size is None else out
