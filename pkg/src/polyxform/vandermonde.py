"""Generalized Vandermonde polynomials of an index family and coercivity ratios."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .admissibility import IndexFamily, analyze
from .errors import AdmissibilityError, DegeneracyError, DimensionError
from .gridset import GridSet
from .multiindex import MultiIndex


def monomial_matrix(layer: Sequence[MultiIndex], pts) -> np.ndarray:
    """Entries x_j^{alpha_m}: rows are points, columns the layer's multiindices."""
    pts = np.asarray(pts, dtype=float)
    return np.stack([a.monomial(pts) for a in layer], axis=-1)


@dataclass(frozen=True)
class VandermondeEvaluation:
    components: tuple
    value: object

    def __abs__(self):
        return abs(self.value)


def evaluate_V(fam: IndexFamily, pts) -> VandermondeEvaluation:
    """Per-component determinants V_k and their product for points of shape (..., #A, n).

    Determinants come from LAPACK's LU with partial pivoting.
    """
    report = analyze(fam)
    if not report.dimensionality_ok:
        raise AdmissibilityError("dimensionality")
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1 and fam.n == 1:
        pts = pts[:, None]
    if pts.shape[-2:] != (report.cardinality, fam.n):
        raise DimensionError(f"expected points of shape (..., {report.cardinality}, {fam.n}), "
                             f"got {pts.shape}")
    comps = tuple(np.linalg.det(monomial_matrix(layer, pts)) for layer in fam.layers)
    prod = comps[0]
    for c in comps[1:]:
        prod = prod * c
    if prod.ndim == 0:
        comps = tuple(float(c) for c in comps)
        prod = float(prod)
    return VandermondeEvaluation(comps, prod)


def cofactor_top_coefficient(layer: Sequence[MultiIndex], xprime) -> float:
    """Coefficient of x^{max(layer)} in det[x; x'] viewed as a polynomial in the free row x.

    Cofactor expansion along the free row: the coefficient is the signed minor
    built from the remaining points and the layer with its maximum removed.
    """
    layer = sorted(layer)
    size = len(layer)
    xprime = np.asarray(xprime, dtype=float).reshape(size - 1, len(layer[0]))
    if size == 1:
        return 1.0
    minor = monomial_matrix(layer[:-1], xprime)
    return (-1) ** (size - 1) * float(np.linalg.det(minor))


def coercivity_exponent(fam: IndexFamily) -> Fraction:
    """p = #A / (#A + |A|), which is < 1."""
    rep = analyze(fam)
    if not (rep.dimensionality_ok and rep.scaling_ok):
        raise AdmissibilityError("dimensionality" if not rep.dimensionality_ok else "scaling")
    return Fraction(rep.cardinality, rep.cardinality + rep.weight)


@dataclass(frozen=True)
class CoercivityReport:
    lhs: float
    rhs_base: float
    ratio: float
    p: Fraction
    lhs_coarse: float
    lhs_fine: float
    sub: int


def vandermonde_integral(fam: IndexFamily, sets: Sequence[GridSet], sub: int) -> float:
    """Midpoint rule for int |V_A(x)| prod_j occ_j(x_j) dx on the ``sub``-refined cells."""
    layers = fam.layers
    A = len(layers[0])
    samples = [E.sub_points(sub) for E in sets]
    counts = np.array([w.size for _, w in samples], dtype=np.int64)
    if np.any(counts == 0):
        return 0.0
    maxm = int(counts.max())
    phi = np.zeros((fam.nprime, A, maxm, A))
    weights = np.zeros((A, maxm))
    for j, (pts, w) in enumerate(samples):
        weights[j, : w.size] = w
        for k, layer in enumerate(layers):
            phi[k, j, : w.size, :] = monomial_matrix(layer, pts)
    return kernels.vandermonde_abs_sum(np.ascontiguousarray(phi), counts, weights)


def _auto_sub(sets, n, max_cells) -> int:
    base = math.prod(int(np.count_nonzero(E.occupancy)) for E in sets)
    A = len(sets)
    sub = 1
    while base * (2 * (sub + 1)) ** (n * A) <= max_cells:
        sub += 1
    return sub


def coercivity_ratio(fam: IndexFamily, sets: Sequence[GridSet], *, sub: Optional[int] = None,
                     max_cells: float = 1e7) -> CoercivityReport:
    """Sample the ratio of int |V_A| prod chi_{E_j}(x_j) to prod |E_j|^{1/p}.

    The integral is taken by the midpoint rule at refinements ``sub`` and
    ``2 sub`` and Richardson-extrapolated assuming second-order error.  The
    ratio is an empirical value, not a certified lower bound for the constant.
    """
    rep = analyze(fam)
    failed = rep.first_failure()
    if failed is not None:
        raise AdmissibilityError(failed)
    A = rep.cardinality
    if len(sets) != A:
        raise DimensionError(f"need {A} sets, got {len(sets)}")
    measures = [E.measure() for E in sets]
    if any(E.n != fam.n for E in sets):
        raise DimensionError("every set must live in R^n")
    if any(m <= 0 for m in measures):
        raise DegeneracyError("every set needs positive measure")
    p = Fraction(A, A + rep.weight)
    if sub is None:
        sub = _auto_sub(sets, fam.n, max_cells)
    coarse = vandermonde_integral(fam, sets, sub)
    fine = vandermonde_integral(fam, sets, 2 * sub)
    lhs = (4.0 * fine - coarse) / 3.0
    rhs = math.prod(m ** (1.0 / float(p)) for m in measures)
    return CoercivityReport(lhs, rhs, lhs / rhs, p, coarse, fine, sub)
