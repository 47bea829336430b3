"""Numerical evaluation of the polynomial-graph averaging operator and its symmetries.

For an index family A and coefficients u in R^A,

    T_A f(u) = int_{R^n} f(t, P_1(t), ..., P_n'(t)) dt,   P_j(t) = sum_{(a,j) in A} u_(a,j) t^a.

Quadrature is tensor Gauss-Legendre on a cell partition of the t-box; f is
read off its node grid by multilinear interpolation unless told otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .admissibility import IndexFamily
from .errors import DimensionError, DomainError, PreconditionError
from .multiindex import MultiIndex, as_multiindex
from .sampled import SampledFunction, lp_norm

DEFAULT_ORDER = 4


@dataclass(frozen=True)
class ParamPoint:
    """Coefficients u_(alpha, j) stored in the family's canonical pair order."""

    family: IndexFamily
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if c.size != self.family.size:
            raise DimensionError(f"need {self.family.size} coefficients, got {c.size}")
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_mapping(cls, fam: IndexFamily, mapping: dict) -> "ParamPoint":
        norm = {(as_multiindex(a), int(j)): float(v) for (a, j), v in mapping.items()}
        if set(norm) != set(fam.pairs):
            raise DimensionError("keys must be exactly the pairs of the family")
        return cls(fam, [norm[p] for p in fam.ordered_pairs()])

    @classmethod
    def zeros(cls, fam: IndexFamily) -> "ParamPoint":
        return cls(fam, np.zeros(fam.size))

    def as_dict(self) -> dict:
        return dict(zip(self.family.ordered_pairs(), self.coefficients.tolist()))

    def __getitem__(self, pair):
        a, j = pair
        return self.as_dict()[(as_multiindex(a), int(j))]


def _coeffs(fam: IndexFamily, u) -> np.ndarray:
    if isinstance(u, ParamPoint):
        if u.family != fam:
            raise DimensionError("parameter point belongs to a different family")
        return u.coefficients
    if isinstance(u, dict):
        return ParamPoint.from_mapping(fam, u).coefficients
    return ParamPoint(fam, u).coefficients


def _graph_matrix(fam: IndexFamily, t: np.ndarray) -> np.ndarray:
    """Columns t^alpha for the canonical pairs, rows the points."""
    return np.stack([a.monomial(t) for a, _ in fam.ordered_pairs()], axis=-1)


def _components(fam: IndexFamily) -> list[np.ndarray]:
    labels = np.array([j for _, j in fam.ordered_pairs()])
    return [np.nonzero(labels == j)[0] for j in range(1, fam.nprime + 1)]


def graph_point(fam: IndexFamily, u, t) -> np.ndarray:
    """(t, P_1(t), ..., P_n'(t)) for one point t or an array of shape (m, n)."""
    c = _coeffs(fam, u)
    t = np.asarray(t, dtype=float)
    single = t.ndim == 1
    t = np.atleast_2d(t)
    if t.shape[-1] != fam.n:
        raise DimensionError(f"t must have {fam.n} coordinates")
    mono = _graph_matrix(fam, t)
    ys = [mono[:, idx] @ c[idx] for idx in _components(fam)]
    out = np.concatenate([t, np.stack(ys, axis=-1)], axis=-1)
    return out[0] if single else out


def gauss_legendre_grid(lower, upper, cells, order: int):
    """Nodes (M, n) and weights (M,) of the composite tensor Gauss-Legendre rule."""
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    cells = np.broadcast_to(np.asarray(cells, dtype=int), lower.shape)
    x0, w0 = np.polynomial.legendre.leggauss(order)
    axes_x, axes_w = [], []
    for lo, hi, m in zip(lower, upper, cells):
        e = np.linspace(lo, hi, m + 1)
        half = 0.5 * np.diff(e)
        mid = 0.5 * (e[1:] + e[:-1])
        axes_x.append((mid[:, None] + half[:, None] * x0[None, :]).reshape(-1))
        axes_w.append((half[:, None] * w0[None, :]).reshape(-1))
    X = np.stack(np.meshgrid(*axes_x, indexing="ij"), axis=-1).reshape(-1, lower.size)
    W = axes_w[0]
    for w in axes_w[1:]:
        W = np.multiply.outer(W, w)
    return X, W.reshape(-1)


@dataclass(frozen=True)
class QuadratureSpec:
    lower: np.ndarray
    upper: np.ndarray
    cells: np.ndarray
    order: int


def default_quadrature(fam: IndexFamily, f: SampledFunction, order: int = DEFAULT_ORDER,
                       refine: int = 1) -> QuadratureSpec:
    """t-box from f's support in the t-slots, padded by one node spacing.

    The graph point has first coordinates t itself, so any t outside f's
    t-range contributes nothing whatever the coefficients are.
    """
    if f.D != fam.n + fam.nprime:
        raise DimensionError(f"f must live on R^{fam.n + fam.nprime}, got R^{f.D}")
    lo, hi, h = f.lower[: fam.n], f.upper[: fam.n], f.h[: fam.n]
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise DomainError("effective t-domain is unbounded")
    cells = (np.array(f.shape[: fam.n]) - 1 + 2) * int(refine)
    return QuadratureSpec(lo - h, hi + h, cells, int(order))


def _integrate(evaluator: Callable, fam: IndexFamily, U: np.ndarray, q: QuadratureSpec) -> np.ndarray:
    T, W = gauss_legendre_grid(q.lower, q.upper, q.cells, q.order)
    mono = _graph_matrix(fam, T)
    comps = _components(fam)
    out = np.empty(U.shape[0])
    for i, c in enumerate(U):
        ys = [mono[:, idx] @ c[idx] for idx in comps]
        pts = np.concatenate([T, np.stack(ys, axis=-1)], axis=-1)
        out[i] = float(np.dot(W, evaluator(pts)))
    return out


def apply_T_many(fam: IndexFamily, f: SampledFunction, U, *, order: int = DEFAULT_ORDER,
                 method: str = "linear", refine: int = 1,
                 quadrature: Optional[QuadratureSpec] = None) -> np.ndarray:
    """T_A f at each row of ``U`` (shape (m, #pairs), canonical order)."""
    U = np.atleast_2d(np.asarray(U, dtype=float))
    if U.shape[1] != fam.size:
        raise DimensionError(f"coefficient rows need {fam.size} entries")
    q = quadrature or default_quadrature(fam, f, order, refine)
    return _integrate(lambda p: f.evaluate(p, method), fam, U, q)


def apply_T(fam: IndexFamily, f: SampledFunction, u, *, order: int = DEFAULT_ORDER,
            method: str = "linear", refine: int = 1,
            quadrature: Optional[QuadratureSpec] = None) -> float:
    return float(apply_T_many(fam, f, _coeffs(fam, u)[None, :], order=order, method=method,
                              refine=refine, quadrature=quadrature)[0])


def sample_T(fam: IndexFamily, f: SampledFunction, lower, upper, resolution, **kw) -> SampledFunction:
    """T_A f on the node grid of a user-specified box in R^A (no adaptivity)."""
    lower = np.asarray(lower, dtype=float).reshape(-1)
    upper = np.asarray(upper, dtype=float).reshape(-1)
    if lower.size != fam.size:
        raise DimensionError(f"output box must live in R^{fam.size}")
    shape = tuple(int(s) for s in np.broadcast_to(resolution, lower.shape))
    axes = [np.linspace(lower[i], upper[i], shape[i]) for i in range(lower.size)]
    U = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, lower.size)
    return SampledFunction(lower, upper, apply_T_many(fam, f, U, **kw).reshape(shape))


# dilations ----------------------------------------------------------------

@dataclass(frozen=True)
class DilationSpec:
    delta: tuple
    delta_prime: tuple

    def __post_init__(self):
        d = tuple(float(x) for x in np.atleast_1d(self.delta))
        dp = tuple(float(x) for x in np.atleast_1d(self.delta_prime))
        if any(not x > 0 for x in d + dp):
            raise DomainError("dilation factors must be strictly positive")
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "delta_prime", dp)

    @property
    def full(self) -> np.ndarray:
        return np.array(self.delta + self.delta_prime)

    def scale_parameters(self, fam: IndexFamily, u) -> np.ndarray:
        """u_(alpha, j) -> delta'_j delta^(-alpha) u_(alpha, j)."""
        if len(self.delta) != fam.n or len(self.delta_prime) != fam.nprime:
            raise DimensionError("dilation dimensions do not match the family")
        c = _coeffs(fam, u)
        d = np.array(self.delta)
        fac = np.array([self.delta_prime[j - 1] * np.prod(d ** -np.array(a.exponents, dtype=float))
                        for a, j in fam.ordered_pairs()])
        return fac * c


@dataclass(frozen=True)
class IdentityReport:
    lhs: float
    rhs: float
    rel_err: float
    extra: dict


def _rel(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def dilation_check(fam: IndexFamily, f: SampledFunction, spec: DilationSpec, u, *,
                   order: int = DEFAULT_ORDER, method: str = "linear", refine: int = 1,
                   resample: bool = True, norms=(1, 2, math.inf)) -> IdentityReport:
    """Compare T(f_{d,d'})(u) with (prod d)^-1 T f(scaled u), plus the L^p norm identity."""
    c = _coeffs(fam, u)
    if all(x == 1.0 for x in spec.delta + spec.delta_prime):
        val = apply_T(fam, f, c, order=order, method=method, refine=refine)
        lhs = rhs = val
    else:
        fd = f.dilated(spec.full, resample=resample)
        lhs = apply_T(fam, fd, c, order=order, method=method, refine=refine)
        rhs = apply_T(fam, f, spec.scale_parameters(fam, c), order=order, method=method,
                      refine=refine) / math.prod(spec.delta)
    exact = f.dilated(spec.full, resample=False)
    jac = float(np.prod(spec.full))
    norm_err = {}
    for p in norms:
        pf = float(p)
        left = lp_norm(exact, pf)
        right = lp_norm(f, pf) * (1.0 if math.isinf(pf) else jac ** (-1.0 / pf))
        norm_err[str(p)] = _rel(left, right)
    return IdentityReport(lhs, rhs, _rel(lhs, rhs), {"norm_rel_err": norm_err})


# John's equations -----------------------------------------------------------

def _pair(p):
    a, j = p
    return as_multiindex(a), int(j)


def john_residual(fam: IndexFamily, f: SampledFunction, u, first, second, h_u: float, *,
                  order: int = DEFAULT_ORDER, method: str = "cubic", refine: int = 1) -> float:
    """Central-difference value of (d_{a,j} d_{b,k} - d_{a~,j} d_{b~,k}) T f at u.

    ``first`` = ((a, j), (b, k)) and ``second`` = ((a~, j), (b~, k)) with
    a + b = a~ + b~; the difference quotients are second order in ``h_u``.
    """
    (a, j), (b, k) = map(_pair, first)
    (a2, j2), (b2, k2) = map(_pair, second)
    if (j, k) != (j2, k2) and (j, k) != (k2, j2):
        raise PreconditionError("both derivative pairs must use the same component labels")
    if a + b != a2 + b2:
        raise PreconditionError(f"{a} + {b} != {a2} + {b2}")
    pos = {p: i for i, p in enumerate(fam.ordered_pairs())}
    for p in [(a, j), (b, k), (a2, j2), (b2, k2)]:
        if p not in pos:
            raise PreconditionError(f"{p} is not a pair of the family")
    c = _coeffs(fam, u)
    h = float(h_u)

    def stencil(i1, i2):
        rows, wts = [], []
        if i1 == i2:
            for s, w in ((1, 1.0), (0, -2.0), (-1, 1.0)):
                e = c.copy()
                e[i1] += s * h
                rows.append(e)
                wts.append(w / h**2)
        else:
            for s1 in (1, -1):
                for s2 in (1, -1):
                    e = c.copy()
                    e[i1] += s1 * h
                    e[i2] += s2 * h
                    rows.append(e)
                    wts.append(s1 * s2 / (4 * h * h))
        return np.array(rows), np.array(wts)

    r1, w1 = stencil(pos[(a, j)], pos[(b, k)])
    r2, w2 = stencil(pos[(a2, j2)], pos[(b2, k2)])
    vals = apply_T_many(fam, f, np.vstack([r1, r2]), order=order, method=method, refine=refine)
    return float(np.dot(w1, vals[: len(w1)]) - np.dot(w2, vals[len(w1):]))


# factorisation -------------------------------------------------------------

def factorization_check(n: int, nprime: int, d: int, j: int, f: SampledFunction, u, *,
                        order: int = DEFAULT_ORDER, method: str = "linear",
                        refine: int = 1) -> IdentityReport:
    """T_{n,n',d} f(u) against T_{n,n',j} applied to the shifted function at the truncated u.

    The shift moves the coefficients of degree above ``j`` into the function:
    f~(t, x) = f(t, x + sum_{|a| > j} u_a t^a).  For j < d the right side is
    integrated with a different Gauss-Legendre order so that the two sides
    are independent quadratures.
    """
    if not 0 <= j <= d:
        raise DomainError("need 0 <= j <= d")
    big = IndexFamily.full(n, nprime, d)
    c = _coeffs(big, u)
    lhs = apply_T(big, f, c, order=order, method=method, refine=refine)
    if j == d:
        rhs = apply_T(big, f, c, order=order, method=method, refine=refine)
        return IdentityReport(lhs, rhs, _rel(lhs, rhs), {})
    small = IndexFamily.full(n, nprime, j)
    pairs = big.ordered_pairs()
    low = np.array([a.degree <= j for a, _ in pairs])
    high_fam_pairs = [p for p, keep in zip(pairs, low) if not keep]
    high_c = c[~low]
    comps = [np.array([i for i, (_, k) in enumerate(high_fam_pairs) if k == m])
             for m in range(1, nprime + 1)]

    def shifted(pts):
        t = pts[:, :n]
        shift = np.zeros((pts.shape[0], nprime))
        for m, idx in enumerate(comps):
            for i in idx:
                shift[:, m] += high_c[i] * high_fam_pairs[i][0].monomial(t)
        moved = pts.copy()
        moved[:, n:] += shift
        return f.evaluate(moved, method)

    c_low = np.array([c[i] for i, (a, k) in enumerate(pairs) if a.degree <= j])
    order_map = {p: i for i, p in enumerate(small.ordered_pairs())}
    c_small = np.zeros(small.size)
    for (a, k), v in zip([p for p, keep in zip(pairs, low) if keep], c_low):
        c_small[order_map[(a, k)]] = v
    q = default_quadrature(small, f, order + 1, refine)
    rhs = float(_integrate(shifted, small, c_small[None, :], q)[0])
    return IdentityReport(lhs, rhs, _rel(lhs, rhs), {})


# translations ---------------------------------------------------------------

def translation_map(fam: IndexFamily, h, h_prime):
    """Affine map u -> L u + b with T f_{h,h'}(u) = T f(L u + b), f_{h,h'}(x, y) = f(x + h, y + h').

    Built by expanding sum_a u_a (t - h)^a + h' binomially.  Only the full
    family is closed under this recentring.
    """
    if not fam.is_full():
        raise DomainError("translation recentring is only defined for full families")
    h = np.asarray(h, dtype=float).reshape(-1)
    hp = np.asarray(h_prime, dtype=float).reshape(-1)
    if h.size != fam.n or hp.size != fam.nprime:
        raise DimensionError("translation dimensions do not match the family")
    pairs = fam.ordered_pairs()
    pos = {p: i for i, p in enumerate(pairs)}
    L = np.zeros((fam.size, fam.size))
    b = np.zeros(fam.size)
    for (alpha, k), col in pos.items():
        for (gamma, k2), row in pos.items():
            if k2 != k or not alpha.dominates(gamma):
                continue
            coef = 1.0
            for ai, gi, hi in zip(alpha.exponents, gamma.exponents, h):
                coef *= math.comb(ai, gi) * (-hi) ** (ai - gi)
            L[row, col] = coef
    for k in range(1, fam.nprime + 1):
        b[pos[(MultiIndex.zero(fam.n), k)]] = hp[k - 1]
    return L, b


def translation_is_unimodular(fam: IndexFamily, L: np.ndarray) -> bool:
    """Structural check: unit diagonal and triangular with respect to degree."""
    pairs = fam.ordered_pairs()
    order = sorted(range(len(pairs)), key=lambda i: (pairs[i][0].degree, i))
    P = L[np.ix_(order, order)]
    return bool(np.all(np.diag(P) == 1.0) and np.all(np.tril(P, -1) == 0.0))


def translated(f: SampledFunction, h, h_prime) -> SampledFunction:
    """f_{h,h'} represented exactly by shifting the box."""
    shift = np.concatenate([np.atleast_1d(h), np.atleast_1d(h_prime)]).astype(float)
    ana = None if f.analytic is None else (lambda x, g=f.analytic: g(x + shift))
    return SampledFunction(f.lower - shift, f.upper - shift, f.values.copy(), ana)


def translation_check(fam: IndexFamily, f: SampledFunction, h, h_prime, u, **kw) -> IdentityReport:
    L, b = translation_map(fam, h, h_prime)
    c = _coeffs(fam, u)
    lhs = apply_T(fam, translated(f, h, h_prime), c, **kw)
    rhs = apply_T(fam, f, L @ c + b, **kw)
    return IdentityReport(lhs, rhs, _rel(lhs, rhs), {"unimodular": translation_is_unimodular(fam, L)})
