"""Axis-aligned grid representation of bounded sets with fractional occupancy.

A :class:`GridSet` stands for the function ``sum_c occ[c] * chi_c`` where
``chi_c`` is the indicator of grid cell ``c``; a genuine set is the special
case where every occupancy is 0 or 1.  All integrals against functions that
have closed-form antiderivatives on cells are therefore exact.

Binary layout (little endian)::

    magic    4s   b"PXGS"
    version  u4   1
    n        u4
    lower    f8[n]
    upper    f8[n]
    shape    u4[n]
    body     f4[prod(shape)]   occupancy, row-major (last axis fastest)
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .errors import DimensionError, DomainError

MAGIC = b"PXGS"
VERSION = 1


@dataclass
class GridSet:
    lower: np.ndarray
    upper: np.ndarray
    occupancy: np.ndarray

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float).reshape(-1)
        self.upper = np.asarray(self.upper, dtype=float).reshape(-1)
        self.occupancy = np.asarray(self.occupancy, dtype=float)
        if self.occupancy.ndim != self.lower.size or self.upper.size != self.lower.size:
            raise DimensionError("box bounds and occupancy dimensions disagree")
        if np.any(self.upper <= self.lower):
            raise DomainError("box must have positive extent along every axis")
        if not np.all(np.isfinite(self.occupancy)):
            raise DomainError("occupancy must be finite")
        if np.any(self.occupancy < 0) or np.any(self.occupancy > 1):
            raise DomainError("occupancy must lie in [0, 1]")

    # construction -------------------------------------------------------

    @staticmethod
    def _shape(lower, resolution) -> tuple[int, ...]:
        dims = np.atleast_1d(np.asarray(lower, dtype=float)).shape
        return tuple(int(r) for r in np.broadcast_to(resolution, dims))

    @classmethod
    def empty(cls, lower, upper, resolution) -> "GridSet":
        return cls(lower, upper, np.zeros(cls._shape(lower, resolution)))

    @classmethod
    def full(cls, lower, upper, resolution) -> "GridSet":
        return cls(lower, upper, np.ones(cls._shape(lower, resolution)))

    @classmethod
    def from_boxes(cls, lower, upper, resolution, boxes) -> "GridSet":
        """Rasterise a union of boxes ``[(lo, hi), ...]`` with exact cell-overlap fractions.

        Overlapping boxes add up and are clipped at 1, so the result is exact
        for disjoint boxes and an upper bound on the union otherwise.
        """
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        shape = tuple(int(r) for r in np.broadcast_to(resolution, lower.shape))
        occ = np.zeros(shape)
        edges = [np.linspace(lower[i], upper[i], shape[i] + 1) for i in range(lower.size)]
        for lo, hi in boxes:
            lo = np.atleast_1d(np.asarray(lo, dtype=float))
            hi = np.atleast_1d(np.asarray(hi, dtype=float))
            frac = None
            for i, e in enumerate(edges):
                ov = np.clip(np.minimum(e[1:], hi[i]) - np.maximum(e[:-1], lo[i]), 0.0, None)
                f = ov / (e[1:] - e[:-1])
                frac = f if frac is None else np.multiply.outer(frac, f)
            occ += frac
        return cls(lower, upper, np.minimum(occ, 1.0))

    @classmethod
    def box(cls, lo, hi, resolution=1) -> "GridSet":
        """A single box whose grid is aligned with its faces (occupancy 1)."""
        return cls.full(lo, hi, resolution)

    # geometry -----------------------------------------------------------

    @property
    def n(self) -> int:
        return self.lower.size

    @property
    def shape(self) -> tuple[int, ...]:
        return self.occupancy.shape

    @property
    def cell_widths(self) -> np.ndarray:
        return (self.upper - self.lower) / np.array(self.shape)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.cell_widths))

    def edges(self, axis: int) -> np.ndarray:
        return np.linspace(self.lower[axis], self.upper[axis], self.shape[axis] + 1)

    def centers(self, axis: int) -> np.ndarray:
        e = self.edges(axis)
        return 0.5 * (e[1:] + e[:-1])

    def measure(self) -> float:
        return float(self.occupancy.sum()) * self.cell_volume

    def lookup(self, points) -> np.ndarray:
        """Occupancy of the cell containing each point (0 outside the box)."""
        pts = np.ascontiguousarray(np.asarray(points, dtype=float).reshape(-1, self.n))
        return kernels.grid_lookup(np.ascontiguousarray(self.occupancy).reshape(-1),
                                   np.array(self.shape, dtype=np.int64), self.lower,
                                   self.cell_widths, pts)

    def dilated(self, delta: Sequence[float]) -> "GridSet":
        """Image under x -> (delta_1 x_1, ..., delta_n x_n), delta > 0."""
        delta = np.broadcast_to(np.asarray(delta, dtype=float), self.lower.shape)
        if np.any(delta <= 0):
            raise DomainError("dilation factors must be positive")
        return GridSet(self.lower * delta, self.upper * delta, self.occupancy.copy())

    def sub_points(self, sub: int = 1):
        """Midpoints of a ``sub``-fold refinement of the occupied cells and their weights."""
        axes = []
        for i in range(self.n):
            h = self.cell_widths[i]
            off = (np.arange(sub) + 0.5) / sub
            axes.append((self.edges(i)[:-1, None] + h * off[None, :]).reshape(-1))
        occ = self.occupancy
        for i in range(self.n):
            occ = np.repeat(occ, sub, axis=i)
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
        w = occ.reshape(-1) * (self.cell_volume / sub**self.n)
        keep = w > 0
        return pts[keep], w[keep]

    # serialisation ------------------------------------------------------

    def to_bytes(self) -> bytes:
        head = struct.pack("<4sII", MAGIC, VERSION, self.n)
        head += struct.pack(f"<{self.n}d", *self.lower)
        head += struct.pack(f"<{self.n}d", *self.upper)
        head += struct.pack(f"<{self.n}I", *self.shape)
        return head + self.occupancy.astype("<f4").tobytes(order="C")

    @classmethod
    def from_bytes(cls, data: bytes) -> "GridSet":
        magic, version, n = struct.unpack_from("<4sII", data, 0)
        if magic != MAGIC or version != VERSION:
            raise DomainError("not a GridSet v1 payload")
        off = 12
        lower = struct.unpack_from(f"<{n}d", data, off)
        off += 8 * n
        upper = struct.unpack_from(f"<{n}d", data, off)
        off += 8 * n
        shape = struct.unpack_from(f"<{n}I", data, off)
        off += 4 * n
        occ = np.frombuffer(data, dtype="<f4", count=int(np.prod(shape)), offset=off)
        return cls(lower, upper, occ.astype(float).reshape(shape))

    def to_json(self) -> dict:
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist(),
                "shape": list(self.shape), "occupancy": self.occupancy.reshape(-1).tolist()}

    @classmethod
    def from_json(cls, data) -> "GridSet":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["lower"], data["upper"],
                   np.asarray(data["occupancy"], dtype=float).reshape(data["shape"]))

    def save(self, path) -> None:
        path = Path(path)
        if path.suffix == ".json":
            path.write_text(json.dumps(self.to_json()))
        else:
            path.write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "GridSet":
        path = Path(path)
        if path.suffix == ".json":
            return cls.from_json(path.read_text())
        return cls.from_bytes(path.read_bytes())
