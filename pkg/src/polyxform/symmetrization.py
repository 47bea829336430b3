"""Steiner symmetrization of grid sets and the one-dimensional sublevel bound.

Symmetrization acts line by line: the occupancy along each grid line in the
chosen direction is replaced by a centred interval of the same length.  The
output grid along that axis is symmetric about 0 with an even number of cells
of the original width, so the interval's centre is a cell edge and the two
fractional end cells carry exactly the leftover length.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
import sympy as sp

from .errors import CertificationError, DomainError
from .gridset import GridSet
from .measures import monomial_measure


def steiner(E: GridSet, axis: int) -> GridSet:
    """Symmetrize ``E`` with respect to the hyperplane x_axis = 0 (``axis`` is 0-based)."""
    if not 0 <= axis < E.n:
        raise DomainError(f"axis {axis} out of range for a set in R^{E.n}")
    N = E.shape[axis]
    Nout = N + (N % 2)
    h = E.cell_widths[axis]
    half = 0.5 * np.moveaxis(E.occupancy, axis, -1).sum(axis=-1)
    right = np.clip(half[..., None] - np.arange(Nout // 2), 0.0, 1.0)
    occ = np.concatenate([right[..., ::-1], right], axis=-1)
    lower, upper = E.lower.copy(), E.upper.copy()
    lower[axis], upper[axis] = -0.5 * Nout * h, 0.5 * Nout * h
    return GridSet(lower, upper, np.moveaxis(occ, -1, axis))


def full_symmetrize(E: GridSet) -> GridSet:
    """Symmetrize along axes 0, 1, ..., n-1 in that order."""
    for axis in range(E.n):
        E = steiner(E, axis)
    return E


@dataclass(frozen=True)
class SublevelConstant:
    k: int
    j0: int
    exact: Fraction

    @property
    def value(self) -> float:
        return float(self.exact)


def sublevel_constant(k: int) -> SublevelConstant:
    """c_k = 2^k j0! (k - j0)! / (k^k (k+1)^k), j0 = k/2 (k even) or (k+1)/2 (k odd)."""
    if k < 1:
        raise DomainError("k must be a positive integer")
    j0 = k // 2 if k % 2 == 0 else (k + 1) // 2
    c = Fraction(2**k * math.factorial(j0) * math.factorial(k - j0), k**k * (k + 1) ** k)
    return SublevelConstant(k, j0, c)


_t = sp.Symbol("t")


def _nonnegative_on(g: sp.Poly, lo, hi) -> bool:
    """Exact test of g >= 0 on the closed interval [lo, hi] (either end may be None = infinite)."""
    if g.is_zero:
        return True
    if lo is not None and hi is not None and lo == hi:
        return g.eval(lo) >= 0
    _, factors = g.sqf_list()
    odd = sp.Poly(1, _t, domain="QQ")
    for p, e in factors:
        if e % 2:
            odd = odd * p
    if odd.degree() > 0:
        count = odd.count_roots(lo, hi)
        for end in (lo, hi):
            if end is not None and odd.eval(end) == 0:
                count -= 1
        if count > 0:
            return False
    # no sign change inside: one nonzero sample decides
    if lo is not None and hi is not None:
        probes = [lo + (hi - lo) * sp.Rational(i, 97) for i in range(1, 97)]
    else:
        base = lo if lo is not None else (hi if hi is not None else sp.Integer(0))
        step = 1 if lo is not None else -1
        probes = [base + step * i for i in range(1, g.degree() + 3)]
    for x in probes:
        val = g.eval(x)
        if val != 0:
            return val > 0
    return True


@dataclass
class SmoothTestFunction:
    """Polynomial f (ascending coefficients) with f^(k) >= 1 claimed on ``interval``."""

    coefficients: Sequence[float]
    interval: tuple
    k: int

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        self._certified: Optional[bool] = None

    @property
    def poly(self) -> np.polynomial.Polynomial:
        return np.polynomial.Polynomial(self.coefficients)

    def __call__(self, t):
        return self.poly(t)

    def _exact_bounds(self):
        lo, hi = self.interval
        conv = lambda v: None if v is None or math.isinf(v) else sp.Rational(Fraction(v))
        return conv(lo), conv(hi)

    def certify(self) -> bool:
        """Exact check that f^(k) - 1 >= 0 on the interval (coefficients read as exact binary rationals)."""
        if self._certified is None:
            coeffs = [sp.Rational(Fraction(float(c))) for c in self.coefficients]
            f = sp.Poly(list(reversed(coeffs)) or [0], _t, domain="QQ")
            g = f.diff((_t, self.k)) - 1
            lo, hi = self._exact_bounds()
            self._certified = bool(_nonnegative_on(g, lo, hi))
        return self._certified

    def require_certified(self):
        if not self.certify():
            raise CertificationError(f"f^({self.k}) >= 1 fails somewhere on {self.interval}")

    @classmethod
    def random(cls, k: int, rng: np.random.Generator, interval=(-2.0, 2.0),
               scale: float = 1.0) -> "SmoothTestFunction":
        """f^(k) = 1 + eps + c (t - r)^2 with c >= 0, integrated k times with random constants.

        The small ``eps`` absorbs the rounding of the repeated integration so
        that the stored coefficients still certify.
        """
        c = rng.uniform(0, scale)
        r = rng.uniform(*interval)
        g = np.polynomial.Polynomial([1 + 1e-9 + c * r * r, -2 * c * r, c])
        f = g.integ(k, lbnd=0, k=list(rng.uniform(-scale, scale, size=k)))
        return cls(f.coef, interval, k)


def abs_integral_per_cell(poly: np.polynomial.Polynomial, edges: np.ndarray) -> np.ndarray:
    """Integral of |poly| over each cell [edges[i], edges[i+1]], split at real roots."""
    F = poly.integ()
    roots = poly.roots() if poly.degree() > 0 else np.array([])
    roots = np.sort(roots[np.abs(roots.imag) <= 1e-12 * (1 + np.abs(roots.real))].real)
    out = np.empty(edges.size - 1)
    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        inner = roots[(roots > a) & (roots < b)]
        pts = np.concatenate([[a], inner, [b]])
        out[i] = np.sum(np.abs(np.diff(F(pts))))
    return out


@dataclass(frozen=True)
class SublevelReport:
    lhs: float
    rhs: float
    holds: bool
    constant: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else math.inf


def symmetric_power_integral(length: float, k: int) -> float:
    """Integral of |t|^k over the centred interval of the given length."""
    return 2.0**-k * length ** (k + 1) / (k + 1)


def sublevel_check(f: SmoothTestFunction, E: GridSet, k: Optional[int] = None) -> SublevelReport:
    """Compare int_E |f| with c_k int_{S(E)} |t|^k / k! for a one-dimensional E inside f's interval."""
    k = f.k if k is None else k
    if k != f.k:
        raise DomainError("k must match the certified derivative order of f")
    f.require_certified()
    if E.n != 1:
        raise DomainError("sublevel_check needs a one-dimensional set")
    lo, hi = f.interval
    occupied = np.nonzero(E.occupancy > 0)[0]
    edges = E.edges(0)
    if occupied.size and (edges[occupied[0]] < lo or edges[occupied[-1] + 1] > hi):
        raise DomainError("E must lie inside the certified interval")
    lhs = float(np.dot(E.occupancy, abs_integral_per_cell(f.poly, edges)))
    ck = sublevel_constant(k)
    rhs = ck.value * symmetric_power_integral(E.measure(), k) / math.factorial(k)
    tol = 1e-12 + 8 * np.finfo(float).eps * E.occupancy.size
    return SublevelReport(lhs, rhs, bool(lhs >= rhs * (1.0 - tol)), ck.value)


def symmetrized_power_integral(E: GridSet, k: int) -> float:
    """int_{S(E)} |t|^k dt evaluated on the rasterised symmetrization of a 1-D set."""
    return monomial_measure(steiner(E, 0), [k + 1.0])
