"""Monomial-weight measures and the interpolation inequality between them.

For ``s`` in the open positive orthant,

    |E|_s = integral over E of prod_i |x_i|^(s_i - 1) dx.

On a :class:`~polyxform.gridset.GridSet` the weight is integrated exactly per
cell through the antiderivative ``sign(x) |x|^s / s``, so the only error is
floating-point rounding.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegeneracyError, DimensionError, DomainError
from .gridset import GridSet

COND_LIMIT = 1e10
SIGMA_RTOL = 1e-12


@dataclass(frozen=True)
class MonomialWeight:
    s: tuple[float, ...]

    def __post_init__(self):
        s = tuple(float(x) for x in np.atleast_1d(self.s))
        if any(not x > 0 for x in s):
            raise DomainError(f"weight exponents must be positive, got {s}")
        object.__setattr__(self, "s", s)

    @property
    def n(self) -> int:
        return len(self.s)


def _weight(w) -> MonomialWeight:
    return w if isinstance(w, MonomialWeight) else MonomialWeight(tuple(np.atleast_1d(w)))


def axis_cell_integrals(edges: np.ndarray, s: float) -> np.ndarray:
    """Integrals of |x|^(s-1) over consecutive cells delimited by ``edges``."""
    F = np.sign(edges) * np.abs(edges) ** s / s
    return np.diff(F)


def monomial_measure(E: GridSet, w) -> float:
    w = _weight(w)
    if w.n != E.n:
        raise DimensionError(f"weight has {w.n} exponents, set lives in R^{E.n}")
    acc = E.occupancy
    # contract the leading axis each time; the remaining axes shift down
    for i in range(E.n):
        acc = np.tensordot(axis_cell_integrals(E.edges(i), w.s[i]), acc, axes=(0, 0))
    return float(acc)


def _solve_checked(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve with partial pivoting; reject singular or badly conditioned systems."""
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise DegeneracyError(f"matrix is singular or ill-conditioned (cond={cond:.3g})")
    x = np.linalg.solve(M, rhs)
    resid = np.linalg.norm(M @ x - rhs)
    if resid > SIGMA_RTOL * max(1.0, np.linalg.norm(rhs)) * max(1.0, cond / 1e3):
        raise DegeneracyError(f"linear solve residual {resid:.3g} too large")
    return x


@dataclass(frozen=True)
class ExtremalShape:
    """The set {x : sum_i |x|^{v_i} / a_i <= 1} for independent exponent vectors v_i."""

    v: tuple[tuple[float, ...], ...]
    a: tuple[float, ...]

    def __post_init__(self):
        v = tuple(tuple(float(c) for c in row) for row in np.atleast_2d(self.v))
        a = tuple(float(x) for x in np.atleast_1d(self.a))
        n = len(v)
        if any(len(row) != n for row in v) or len(a) != n:
            raise DimensionError("need n exponent vectors of length n and n scales")
        if any(not x > 0 for x in a):
            raise DomainError("scales a_i must be positive")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return len(self.v)

    @property
    def matrix(self) -> np.ndarray:
        """Matrix with the v_i as columns."""
        return np.array(self.v).T

    @property
    def V(self) -> float:
        return abs(float(np.linalg.det(self.matrix)))

    def sigma(self, s) -> np.ndarray:
        """Cone coordinates of ``s``: s = sum_j sigma_j v_j with every sigma_j > 0."""
        sig = _solve_checked(self.matrix, np.asarray(_weight(s).s))
        if np.any(sig <= 0):
            raise DomainError(f"s is not interior to the cone of the v's (sigma={sig})")
        return sig

    def contains(self, x) -> np.ndarray:
        x = np.abs(np.asarray(x, dtype=float))
        tot = np.zeros(x.shape[:-1])
        with np.errstate(divide="ignore", invalid="ignore"):
            for vi, ai in zip(self.v, self.a):
                tot = tot + np.prod(x ** np.array(vi), axis=-1) / ai
        return tot <= 1.0

    def bounding_box(self) -> np.ndarray:
        """Half-widths X_k with the set inside prod [-X_k, X_k].

        Bounded exactly when every coordinate axis lies in the cone of the v's.
        """
        inv = np.linalg.inv(self.matrix)
        if np.any(inv < -1e-14):
            raise DomainError("extremal set is unbounded for these exponent vectors")
        return np.exp(np.clip(inv, 0, None).T @ np.log(self.a))


def extremal_measure(shape: ExtremalShape, w) -> float:
    """Closed form 2^n a^sigma / V * prod Gamma(sigma_j) / Gamma(1 + |sigma|)."""
    w = _weight(w)
    if w.n != shape.n:
        raise DimensionError("weight and shape dimensions differ")
    sig = shape.sigma(w)
    V = shape.V
    logval = (shape.n * math.log(2.0) + float(np.dot(sig, np.log(shape.a))) - math.log(V)
              + sum(math.lgamma(x) for x in sig) - math.lgamma(1.0 + float(sig.sum())))
    return math.exp(logval)


def extremal_measure_mc(shape: ExtremalShape, w, samples: int, rng: np.random.Generator):
    """Rejection-sampling estimate of |E_v^a|_s; returns (estimate, stderr).

    Coordinates are drawn from the normalised density of |x_k|^(s_k - 1) on
    [-X_k, X_k] (inverse CDF X_k U^(1/s_k)), so the estimate is the box's
    weighted mass times the acceptance rate.
    """
    w = _weight(w)
    X = shape.bounding_box()
    s = np.asarray(w.s)
    u = rng.random((samples, shape.n))
    x = X * u ** (1.0 / s)
    acc = shape.contains(x)
    mass = float(np.prod(2.0 * X**s / s))
    p = acc.mean()
    return mass * p, mass * math.sqrt(max(p * (1 - p), 0.0) / samples)


def lemma_constant(theta: Sequence[float], W: float) -> float:
    """2^{n th0} prod th_j^{-th_j} [prod Gamma(th_j/th0) / (W Gamma(1/th0))]^{th0}."""
    th = np.asarray(theta, dtype=float)
    n = th.size - 1
    t0 = th[0]
    log_c = n * t0 * math.log(2.0) - float(np.sum(th * np.log(th)))
    log_c += t0 * (sum(math.lgamma(t / t0) for t in th[1:]) - math.log(W) - math.lgamma(1.0 / t0))
    return math.exp(log_c)


@dataclass(frozen=True)
class InterpolationReport:
    lhs: float
    rhs: float
    constant: float
    slack: float
    holds: bool

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else (0.0 if self.lhs == 0 else math.inf)


def interpolation_check(E: GridSet, w_list, theta) -> InterpolationReport:
    """Check |E|_s <= C prod_j |E|_{w_j}^{theta_j} with s = sum_{j>=1} theta_j w_j.

    ``theta`` has one more entry than ``w_list``; ``theta[0]`` is the weight of
    the origin.  With exactly n vectors the constant is the sharp one from the
    extremal-set argument.  With more than n vectors, the first independent
    n-subset gets that constant (for the renormalised weights) and the rest are
    absorbed by Hoelder's inequality, which contributes no constant.
    """
    W_all = np.atleast_2d(np.asarray(w_list, dtype=float))
    th = np.asarray(theta, dtype=float)
    N, n = W_all.shape
    if n != E.n:
        raise DimensionError("exponent vectors and set dimension differ")
    if th.size != N + 1:
        raise DimensionError("theta needs one more entry than w_list")
    if np.any(th <= 0) or abs(th.sum() - 1.0) > 1e-12:
        raise DomainError("theta must be positive and sum to 1")
    if np.any(W_all <= 0):
        raise DomainError("exponent vectors must lie in the open positive orthant")
    if N < n:
        raise DegeneracyError("need at least n exponent vectors")

    subset = None
    for comb in itertools.combinations(range(N), n):
        M = W_all[list(comb)].T
        c = np.linalg.cond(M)
        if np.isfinite(c) and c <= COND_LIMIT:
            subset = comb
            break
    if subset is None:
        raise DegeneracyError("no linearly independent n-subset among the exponent vectors")
    phi = float(sum(th[1 + j] for j in range(N) if j not in subset))
    sub_theta = np.concatenate([[th[0]], th[[1 + j for j in subset]]]) / (1.0 - phi)
    W = abs(float(np.linalg.det(W_all[list(subset)].T)))
    constant = lemma_constant(sub_theta, W) ** (1.0 - phi)

    s = th[1:] @ W_all
    lhs = monomial_measure(E, s)
    factors = [monomial_measure(E, wj) for wj in W_all]
    rhs = constant * math.prod(f**t for f, t in zip(factors, th[1:]))
    # every quantity is an exact cell integral; only rounding separates the two sides
    slack = 1e-12 + 8 * np.finfo(float).eps * E.occupancy.size
    return InterpolationReport(lhs, rhs, constant, slack, bool(lhs <= rhs * (1.0 + slack)))
