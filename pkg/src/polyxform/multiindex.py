"""Multiindices, dictionary order and enumeration of M_{n,d}.

A multiindex is an n-tuple of nonnegative integers.  Everything here is exact
integer arithmetic; floating point only appears when a multiindex is used as
an exponent on real coordinates (:meth:`MultiIndex.monomial`).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionError, DomainError


@total_ordering
@dataclass(frozen=True)
class MultiIndex:
    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(a) for a in self.exponents)
        if len(exps) < 1:
            raise DomainError("a multiindex needs length >= 1")
        if any(a < 0 for a in exps):
            raise DomainError(f"negative exponent in {exps}")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def zero(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, i: int) -> "MultiIndex":
        e = [0] * n
        e[i] = 1
        return cls(tuple(e))

    def __len__(self):
        return len(self.exponents)

    def __iter__(self):
        return iter(self.exponents)

    def __getitem__(self, i):
        return self.exponents[i]

    def __lt__(self, other):
        if not isinstance(other, MultiIndex):
            return NotImplemented
        return dict_compare(self, other) < 0

    def __add__(self, other):
        if len(other) != len(self):
            raise DimensionError("multiindex lengths differ")
        return MultiIndex(tuple(a + b for a, b in zip(self, other)))

    def __repr__(self):
        return f"MultiIndex{self.exponents}"

    @property
    def n(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def is_zero(self) -> bool:
        return not any(self.exponents)

    def factorial(self) -> int:
        return math.prod(math.factorial(a) for a in self.exponents)

    def dominates(self, other: "MultiIndex") -> bool:
        """Componentwise ``other <= self``."""
        return all(b <= a for a, b in zip(self, other))

    def monomial(self, t):
        """Evaluate ``t**alpha`` for points ``t`` of shape (..., n)."""
        t = np.asarray(t, dtype=float)
        if t.shape[-1] != self.n:
            raise DimensionError(f"points have {t.shape[-1]} coordinates, multiindex has {self.n}")
        out = np.ones(t.shape[:-1])
        for i, a in enumerate(self.exponents):
            if a:
                out = out * t[..., i] ** a
        return out

    def to_json(self) -> list[int]:
        return list(self.exponents)

    @classmethod
    def from_json(cls, data: Sequence[int]) -> "MultiIndex":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(data))


def dict_compare(a: MultiIndex, b: MultiIndex) -> int:
    """Dictionary order: -1, 0 or 1 according to the first differing entry."""
    if len(a) != len(b):
        raise DimensionError(f"cannot compare multiindices of lengths {len(a)} and {len(b)}")
    for x, y in zip(a.exponents, b.exponents):
        if x != y:
            return -1 if x < y else 1
    return 0


@dataclass(frozen=True)
class IndexRange:
    """The set M_{n,d} of multiindices of length n and degree at most d."""

    n: int
    d: int

    def __post_init__(self):
        if self.n < 1 or self.d < 0:
            raise DomainError(f"need n >= 1 and d >= 0, got n={self.n}, d={self.d}")

    @property
    def size(self) -> int:
        return math.comb(self.n + self.d, self.d)

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter_multiindices(self.n, self.d)

    def __len__(self):
        return self.size


def iter_multiindices(n: int, d: int) -> Iterator[MultiIndex]:
    """Yield M_{n,d} in dictionary order without sorting.

    The successor of a tuple is found by the usual odometer step: the last
    position is bumped if the degree budget allows, otherwise it is zeroed and
    the carry moves left.
    """
    if n < 1 or d < 0:
        raise DomainError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    cur = [0] * n
    total = 0
    while True:
        yield MultiIndex(tuple(cur))
        i = n - 1
        while i >= 0:
            if total < d:
                cur[i] += 1
                total += 1
                break
            total -= cur[i]
            cur[i] = 0
            i -= 1
        if i < 0:
            return


def enumerate_multiindices(n: int, d: int) -> list[MultiIndex]:
    return list(iter_multiindices(n, d))


def as_multiindex(obj) -> MultiIndex:
    if isinstance(obj, MultiIndex):
        return obj
    if isinstance(obj, (int, np.integer)):
        return MultiIndex((int(obj),))
    return MultiIndex(tuple(obj))
