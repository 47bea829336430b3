"""Functions sampled on a node grid over a box, with multilinear or cubic evaluation.

Binary layout (little endian) follows the GridSet header with its own magic
and a float64 value payload on the node grid::

    magic    4s   b"PXSF"
    version  u4   1
    D        u4
    lower    f8[D]
    upper    f8[D]
    shape    u4[D]            node counts (>= 2 per axis)
    body     f8[prod(shape)]  values, row-major
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import ndimage

from . import kernels
from .errors import DimensionError, DomainError

MAGIC = b"PXSF"
VERSION = 1
METHODS = ("linear", "cubic", "exact")


@dataclass
class SampledFunction:
    lower: np.ndarray
    upper: np.ndarray
    values: np.ndarray
    analytic: Optional[Callable] = field(default=None, repr=False, compare=False)
    _spline: Optional[np.ndarray] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float).reshape(-1)
        self.upper = np.asarray(self.upper, dtype=float).reshape(-1)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != self.lower.size or self.upper.size != self.lower.size:
            raise DimensionError("box bounds and value grid dimensions disagree")
        if np.any(np.array(self.values.shape) < 2):
            raise DimensionError("need at least two nodes per axis")
        if np.any(self.upper <= self.lower):
            raise DomainError("box must have positive extent along every axis")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("values must be finite")

    @classmethod
    def from_callable(cls, func: Callable, lower, upper, shape, keep: bool = True) -> "SampledFunction":
        """Sample ``func`` (points (m, D) -> values (m,)) at the nodes of the box."""
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        shape = tuple(int(s) for s in np.broadcast_to(shape, lower.shape))
        axes = [np.linspace(lower[i], upper[i], shape[i]) for i in range(lower.size)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, lower.size)
        vals = np.asarray(func(mesh), dtype=float).reshape(shape)
        return cls(lower, upper, vals, func if keep else None)

    @property
    def D(self) -> int:
        return self.lower.size

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def h(self) -> np.ndarray:
        return (self.upper - self.lower) / (np.array(self.shape) - 1)

    def nodes(self, axis: int) -> np.ndarray:
        return np.linspace(self.lower[axis], self.upper[axis], self.shape[axis])

    @property
    def vanishes_on_boundary(self) -> bool:
        scale = max(float(np.abs(self.values).max()), 1e-300)
        for a in range(self.D):
            shell = np.take(self.values, [0, -1], axis=a)
            if np.abs(shell).max() > 1e-12 * scale:
                return False
        return True

    def evaluate(self, points, method: str = "linear") -> np.ndarray:
        """Values at arbitrary points; zero outside the box."""
        pts = np.ascontiguousarray(np.asarray(points, dtype=float).reshape(-1, self.D))
        if method == "linear":
            return kernels.interp_linear(np.ascontiguousarray(self.values.reshape(-1)),
                                         np.array(self.shape, dtype=np.int64),
                                         self.lower, self.h, pts)
        if method == "cubic":
            if self._spline is None:
                self._spline = ndimage.spline_filter(self.values, order=3, mode="constant")
            idx = ((pts - self.lower) / self.h).T
            out = ndimage.map_coordinates(self._spline, idx, order=3, mode="constant",
                                          cval=0.0, prefilter=False)
            inside = np.all((pts >= self.lower) & (pts <= self.upper), axis=1)
            return np.where(inside, out, 0.0)
        if method == "exact":
            if self.analytic is None:
                raise DomainError("no analytic form attached to this function")
            inside = np.all((pts >= self.lower) & (pts <= self.upper), axis=1)
            out = np.zeros(pts.shape[0])
            if inside.any():
                out[inside] = self.analytic(pts[inside])
            return out
        raise DomainError(f"unknown interpolation method {method!r}; choose from {METHODS}")

    def trapezoid_weights(self) -> np.ndarray:
        w = np.ones(self.shape)
        for a, h in enumerate(self.h):
            wa = np.full(self.shape[a], h)
            wa[[0, -1]] = 0.5 * h
            shape = [1] * self.D
            shape[a] = -1
            w = w * wa.reshape(shape)
        return w

    def scaled(self, factor: float) -> "SampledFunction":
        ana = None if self.analytic is None else (lambda x, f=self.analytic: factor * f(x))
        return SampledFunction(self.lower, self.upper, factor * self.values, ana)

    def dilated(self, delta: Sequence[float], resample: bool = True) -> "SampledFunction":
        """The function x -> f(delta * x), componentwise.

        Without resampling the node values are kept and the box is rescaled,
        which represents the dilate exactly.  With resampling the new box is
        covered by nodes at the original spacing and the values are recomputed
        (from the analytic form when there is one), so the two sides of a
        dilation identity come from different samples and different
        quadrature nodes.
        """
        delta = np.asarray(delta, dtype=float).reshape(-1)
        if delta.size != self.D or np.any(delta <= 0):
            raise DomainError("dilation factors must be positive, one per axis")
        lo, hi = self.lower / delta, self.upper / delta
        base = self.analytic
        ana = None if base is None else (lambda x, b=base, dl=delta: b(x * dl))
        if not resample:
            return SampledFunction(lo, hi, self.values.copy(), ana)
        shape = np.maximum(np.rint((hi - lo) / self.h).astype(int) + 1, 2)
        if ana is not None:
            return SampledFunction.from_callable(ana, lo, hi, shape)
        return SampledFunction.from_callable(lambda x: self.evaluate(x * delta), lo, hi, shape,
                                             keep=False)

    # serialisation ------------------------------------------------------

    def to_bytes(self) -> bytes:
        head = struct.pack("<4sII", MAGIC, VERSION, self.D)
        head += struct.pack(f"<{self.D}d", *self.lower)
        head += struct.pack(f"<{self.D}d", *self.upper)
        head += struct.pack(f"<{self.D}I", *self.shape)
        return head + self.values.astype("<f8").tobytes(order="C")

    @classmethod
    def from_bytes(cls, data: bytes) -> "SampledFunction":
        magic, version, D = struct.unpack_from("<4sII", data, 0)
        if magic != MAGIC or version != VERSION:
            raise DomainError("not a SampledFunction v1 payload")
        off = 12
        lower = struct.unpack_from(f"<{D}d", data, off)
        off += 8 * D
        upper = struct.unpack_from(f"<{D}d", data, off)
        off += 8 * D
        shape = struct.unpack_from(f"<{D}I", data, off)
        off += 4 * D
        vals = np.frombuffer(data, dtype="<f8", count=int(np.prod(shape)), offset=off)
        return cls(lower, upper, vals.reshape(shape).copy())

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "SampledFunction":
        return cls.from_bytes(Path(path).read_bytes())


def lp_norm(g: SampledFunction, p) -> float:
    """(sum |g|^p w)^(1/p) with trapezoid node weights; ``p`` may be inf."""
    if isinstance(p, str):
        p = math.inf if p.lower() in ("inf", "infinity") else Fraction(p)
    p = float(p)
    if math.isnan(p) or p < 1:
        raise DomainError("p must be >= 1")
    a = np.abs(g.values)
    if math.isinf(p):
        return float(a.max())
    return float(np.sum(a**p * g.trapezoid_weights()) ** (1.0 / p))


# presets ----------------------------------------------------------------

def _smooth_step(x, eps):
    if eps <= 0:
        return (x >= 0).astype(float)
    return np.clip(0.5 + x / (2 * eps), 0.0, 1.0)


def box_preset(lo, hi, *, pad: float = 1.0, resolution: int = 64, eps: float = 0.0):
    """Indicator of [lo, hi] sampled on nodes; ``eps`` > 0 ramps the edges linearly."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)

    def f(x):
        return np.prod(_smooth_step(x - lo, eps) * _smooth_step(hi - x, eps), axis=-1)

    span = hi - lo
    return SampledFunction.from_callable(f, lo - pad * span, hi + pad * span,
                                         np.rint(resolution * (1 + 2 * pad)).astype(int) + 1)


def gauss_preset(dim: int, *, center=0.0, radius: float = 6.0, resolution: int = 961):
    """exp(-|x - c|^2) on the cube of the given radius (values there are below 1e-15)."""
    c = np.broadcast_to(np.asarray(center, dtype=float), (dim,))

    def f(x):
        return np.exp(-np.sum((x - c) ** 2, axis=-1))

    return SampledFunction.from_callable(f, c - radius, c + radius, resolution)


def bump_preset(dim: int, *, center=0.0, radius: float = 1.0, resolution: int = 65):
    """The smooth bump exp(-1 / (1 - r^2)) with r = |x - c| / radius."""
    c = np.broadcast_to(np.asarray(center, dtype=float), (dim,))

    def f(x):
        r2 = np.sum((x - c) ** 2, axis=-1) / radius**2
        out = np.zeros(r2.shape)
        m = r2 < 1
        out[m] = np.exp(-1.0 / (1.0 - r2[m]))
        return out

    return SampledFunction.from_callable(f, c - radius, c + radius, resolution)


PRESETS = {"box": box_preset, "gauss": gauss_preset, "bump": bump_preset}
