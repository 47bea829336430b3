"""Self-contained verification suites behind ``polyxform verify``.

Each suite returns a list of check records ``{"name", "pass", ...}``; every
random draw is derived from the supplied seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .admissibility import IndexFamily, full_family_exponents
from .cov import FlowSpec, i_functional_mc
from .gridset import GridSet
from .measures import (ExtremalShape, extremal_measure, extremal_measure_mc,
                       interpolation_check, monomial_measure)
from .necessity import (ExtremalFamily, LogGrowthSpec, constraint_report, extremal_sweep,
                        log_growth_fit, polygon_agreement)
from .sampled import bump_preset, gauss_preset
from .symmetrization import (SmoothTestFunction, steiner, sublevel_check, sublevel_constant)
from .transform import (DilationSpec, dilation_check, factorization_check, john_residual,
                        translation_check)
from .vandermonde import coercivity_ratio


@dataclass
class SuiteOptions:
    n: int = 1
    nprime: int = 1
    d: int = 1
    samples: int = 200_000
    seed: int = 0
    draws: int = 20


def _check(name, ok, **info):
    return {"name": name, "pass": bool(ok), **info}


def random_box_union(rng: np.random.Generator, n: int, *, res: int = 8, boxes: int = 3,
                     lo: float = -2.0, hi: float = 2.0) -> GridSet:
    bs = []
    for _ in range(boxes):
        a = rng.uniform(lo, hi, n)
        b = rng.uniform(lo, hi, n)
        bs.append((np.minimum(a, b), np.maximum(a, b)))
    return GridSet.from_boxes([lo] * n, [hi] * n, res, bs)


def random_dyadic_set(rng: np.random.Generator, n: int, res: int = 6) -> GridSet:
    """Occupancies are multiples of 1/8 so line sums are exact in binary."""
    shape = tuple(int(x) for x in rng.integers(2, res + 1, n))
    occ = rng.integers(0, 9, shape) / 8.0
    lo = rng.uniform(-2, 0, n)
    return GridSet(lo, lo + rng.uniform(1, 3, n), occ)


def random_shape(rng: np.random.Generator, n: int):
    """Random shape with a bounded extremal set and a weight inside its cone.

    Diagonally dominant rows with nonpositive off-diagonal entries give an
    entrywise nonnegative inverse, so every axis lies in the cone.
    """
    while True:
        V = np.diag(rng.uniform(1, 3, n)) - rng.uniform(0, 0.3, (n, n)) * (1 - np.eye(n))
        sig = rng.uniform(0.3, 1.5, n)
        s = V.T @ sig
        if np.all(np.linalg.inv(V.T) >= 0) and np.all(s > 0.05):
            return ExtremalShape(V, rng.uniform(0.5, 2.0, n)), s


# suites -------------------------------------------------------------------------

def suite_measures(opt: SuiteOptions):
    rng = np.random.default_rng(opt.seed)
    out = []
    cases = [(ExtremalShape([[2.0]], [1.0]), [1.0], 2.0),
             (ExtremalShape([[1, 0], [0, 1]], [1, 1]), [1, 1], 2.0),
             (ExtremalShape([[2, 0], [0, 1]], [1, 1]), [1, 1], 8.0 / 3.0)]
    for i, (shape, s, val) in enumerate(cases):
        got = extremal_measure(shape, s)
        out.append(_check(f"extremal analytic {i}", abs(got - val) <= 1e-10 * val, value=got, expected=val))
    for i in range(min(opt.draws, 10)):
        n = int(rng.integers(1, 4))
        shape, s = random_shape(rng, n)
        exact = extremal_measure(shape, s)
        est, se = extremal_measure_mc(shape, s, 200_000, rng)
        out.append(_check(f"extremal mc {i}", abs(est - exact) <= 3 * se + 1e-12 * exact, exact=exact, estimate=est,
                          stderr=se))
    eq = interpolation_check(GridSet.box([-1], [1], 4), [[2.0]], [0.5, 0.5])
    out.append(_check("interpolation equality case", abs(eq.lhs - 2) <= 1e-9 and abs(eq.rhs - 2) <= 1e-9,
                      lhs=eq.lhs, rhs=eq.rhs))
    for i in range(opt.draws):
        n = int(rng.integers(1, 3))
        E = random_box_union(rng, n)
        N = n + int(rng.integers(0, 2))
        W = rng.uniform(0.3, 3.0, (N, n))
        th = rng.dirichlet(np.ones(N + 1))
        r = interpolation_check(E, W, th)
        out.append(_check(f"interpolation random {i}", r.holds, ratio=r.ratio))
    return out


def suite_symmetrization(opt: SuiteOptions):
    rng = np.random.default_rng(opt.seed)
    out = []
    for i in range(opt.draws):
        E = random_dyadic_set(rng, int(rng.integers(1, 4)))
        axis = int(rng.integers(0, E.n))
        S = steiner(E, axis)
        same = (S.occupancy.sum() == E.occupancy.sum()
                and np.allclose(S.cell_widths, E.cell_widths, rtol=4e-16, atol=0))
        out.append(_check(f"measure preserved {i}", same,
                          cell_discrepancy=float(S.occupancy.sum() - E.occupancy.sum())))
    L = 1.5
    r1 = sublevel_check(SmoothTestFunction([0, 1], (0, L), 1), GridSet.box([0], [L], 8), 1)
    out.append(_check("k=1 analytic", math.isclose(r1.lhs, L**2 / 2) and r1.holds
                      and r1.lhs >= L**2 / 8, lhs=r1.lhs, rhs=r1.rhs))
    r2 = sublevel_check(SmoothTestFunction([0, 0, 0.5], (-L / 2, L / 2), 2),
                        GridSet.box([-L / 2], [L / 2], 8), 2)
    out.append(_check("k=2 analytic", math.isclose(r2.lhs, L**3 / 24) and math.isclose(r2.rhs, L**3 / 216),
                      lhs=r2.lhs, rhs=r2.rhs))
    for i in range(opt.draws):
        k = int(rng.integers(1, 5))
        f = SmoothTestFunction.random(k, rng)
        E = random_box_union(rng, 1, res=32, boxes=int(rng.integers(1, 4)))
        r = sublevel_check(f, E, k)
        out.append(_check(f"sublevel random {i}", r.holds, k=k, ratio=r.ratio))
    return out


def suite_coercivity(opt: SuiteOptions):
    fam = IndexFamily.full(1, 1, 1)
    out = []
    a = coercivity_ratio(fam, [GridSet.box([0], [1]), GridSet.box([0], [1])])
    out.append(_check("same interval 1/3", abs(a.ratio - 1 / 3) <= 0.005 / 3, ratio=a.ratio))
    b = coercivity_ratio(fam, [GridSet.box([0], [1]), GridSet.box([2], [3])])
    out.append(_check("separated intervals 2", abs(b.ratio - 2) <= 0.01, ratio=b.ratio))
    fam2 = IndexFamily.from_layers([[(0, 0), (1, 0), (0, 1)]])
    rng = np.random.default_rng(opt.seed)
    base = [random_box_union(rng, 2, res=2, boxes=1, lo=-1, hi=1) for _ in range(3)]
    ratios = []
    for lam in (0.25, 1.0, 4.0):
        sets = [E.dilated([lam, lam]) for E in base]
        ratios.append(coercivity_ratio(fam2, sets, sub=4).ratio)
    spread = (max(ratios) - min(ratios)) / max(ratios)
    out.append(_check("scale invariance", spread <= 0.01, ratios=ratios))
    return out


def suite_cov(opt: SuiteOptions):
    fam = IndexFamily.full(opt.n, opt.nprime, opt.d)
    D = opt.n + opt.nprime
    rng = np.random.default_rng(opt.seed)
    F = GridSet.box([0.0] * D, [1.0] * D)
    out = []
    ests = []
    for b in range(2):
        t = rng.uniform(-1, 1, opt.n) if b else np.zeros(opt.n)
        u = rng.uniform(-1, 1, fam.size) if b else np.zeros(fam.size)
        r = i_functional_mc(FlowSpec(fam, t, u, samples=opt.samples, seed=opt.seed + b), F)
        ests.append(r)
        out.append(_check(f"base point {b}", abs(r.estimate - r.target) <= 3 * r.stderr,
                          **r.to_json()))
    comb = math.hypot(ests[0].stderr, ests[1].stderr)
    out.append(_check("base point agreement", abs(ests[0].estimate - ests[1].estimate) <= 3 * comb,
                      difference=ests[0].estimate - ests[1].estimate, combined_stderr=comb))
    return out


def suite_symmetries(opt: SuiteOptions):
    rng = np.random.default_rng(opt.seed)
    fam = IndexFamily.full(1, 1, 1)
    g = gauss_preset(2)
    out = []
    for i in range(min(opt.draws, 5)):
        spec = DilationSpec(rng.uniform(0.5, 2, 1), rng.uniform(0.5, 2, 1))
        r = dilation_check(fam, g, spec, rng.uniform(-1, 1, 2))
        out.append(_check(f"dilation {i}", r.rel_err < 1e-3, rel_err=r.rel_err))
    r = factorization_check(1, 1, 2, 1, g, rng.uniform(-0.5, 0.5, 3))
    out.append(_check("factorization", r.rel_err < 1e-3, rel_err=r.rel_err))
    fam2 = IndexFamily.full(1, 1, 2)
    r = translation_check(fam2, g, [0.3], [-0.2], rng.uniform(-0.5, 0.5, 3))
    out.append(_check("translation", r.rel_err < 1e-3 and r.extra["unimodular"], rel_err=r.rel_err))
    slope, res = john_slope(fam2, seed=opt.seed)
    out.append(_check("john slope", abs(slope - 2.0) <= 0.3, slope=slope, residuals=res))
    return out


def john_slope(fam=None, *, seed: int = 0, hs=(0.2, 0.1, 0.05, 0.025), method: str = "exact"):
    """Log-log slope of the John residual for d_{u0} d_{u2} - d_{u1}^2 over halvings of h."""
    fam = fam or IndexFamily.full(1, 1, 2)
    rng = np.random.default_rng(seed)
    f = bump_preset(2, radius=1.5, resolution=129)
    u = rng.uniform(-0.3, 0.3, fam.size)
    res = [abs(john_residual(fam, f, u, (((0,), 1), ((2,), 1)), (((1,), 1), ((1,), 1)), h,
                             method=method, refine=2))
           for h in hs]
    slope = float(np.polyfit(np.log(hs), np.log(res), 1)[0])
    return slope, res


def suite_sweeps(opt: SuiteOptions):
    out = []
    for n, npr, d in [(1, 1, 1), (2, 1, 2), (1, 2, 3), (2, 2, 1)]:
        pq = full_family_exponents(n, npr, d)
        for l in range(1, d + 1):
            r = extremal_sweep(ExtremalFamily("F", n, npr, d, l), pq, seed=opt.seed)
            out.append(_check(f"sweep F ({n},{npr},{d}) l={l}", r.verdict["pass"], slopes=r.slopes))
        r = extremal_sweep(ExtremalFamily("Fprime", n, npr, d), pq, seed=opt.seed)
        out.append(_check(f"sweep F' ({n},{npr},{d})", r.verdict["pass"], slopes=r.slopes))
        cons = constraint_report(n, npr, d, pq)
        out.append(_check(f"constraint equality ({n},{npr},{d}) l=d", cons["levels"][-1]["equality"],
                          lhs=cons["levels"][-1]["lhs"], rhs=cons["levels"][-1]["rhs"]))
    for betas, m in [(((1, 1), (1, 0)), 1), (((1, 1), (1, 0)), 2), (((1, 0), (0, 1)), 0)]:
        g = log_growth_fit(LogGrowthSpec(betas, m))
        out.append(_check(f"log growth m={m}", abs(g.gamma - (2 - m)) <= 0.05, gamma=g.gamma))
    agree = polygon_agreement(opt.n, opt.nprime, opt.d)
    out.append(_check("polygon agreement", not agree["mismatches"], **agree))
    return out


SUITES = {
    "measures": suite_measures,
    "symmetrization": suite_symmetrization,
    "coercivity": suite_coercivity,
    "cov-identity": suite_cov,
    "symmetries": suite_symmetries,
    "sweeps": suite_sweeps,
}


def run_suite(name: str, opt: SuiteOptions) -> dict:
    names = list(SUITES) if name == "all" else [name]
    results = {k: SUITES[k](opt) for k in names}
    ok = all(c["pass"] for checks in results.values() for c in checks)
    return {"suites": results, "pass": ok}
