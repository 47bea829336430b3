"""Acceptance gate: one PASS/FAIL line per criterion, at the required tolerances.

Each test also enforces its wall-clock budget.  Run with ``pytest -s`` to see
the lines inline; they are repeated in the terminal summary either way.
"""
import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from polyxform import (DilationSpec, ExtremalFamily, FlowSpec, GridSet, IndexFamily,
                       LogGrowthSpec, SmoothTestFunction, analyze, coercivity_ratio,
                       dilation_check, exponents, extremal_measure, extremal_sweep,
                       factorization_check, full_family_exponents, i_functional_mc,
                       interpolation_check, kplane_exponents, log_growth_fit, steiner,
                       sublevel_check)
from polyxform.cli import main
from polyxform.measures import ExtremalShape, extremal_measure_mc
from polyxform.necessity import constraint_report
from polyxform.sampled import gauss_preset
from polyxform.suites import john_slope, random_box_union, random_dyadic_set, random_shape

F = Fraction


class Gate:
    def __init__(self, log, num, title, budget):
        self.log, self.num, self.title, self.budget = log, num, title, budget
        self.failures: list[str] = []
        self.notes: list[str] = []

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)

    def note(self, text):
        self.notes.append(text)

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        if exc_type is not None:
            self.failures.append(f"raised {exc_type.__name__}: {exc}")
        if elapsed > self.budget:
            self.failures.append(f"took {elapsed:.1f}s, budget {self.budget}s")
        status = "PASS" if not self.failures else "FAIL"
        detail = "; ".join(self.failures[:3] if self.failures else self.notes)
        line = f"[{status}] {self.num}. {self.title} ({elapsed:.2f}s) {detail}".rstrip()
        print(line)
        self.log.append(line)
        if exc_type is None:
            assert not self.failures, line
        return False


def test_polygon_vertices(acceptance_log, capsys):
    with Gate(acceptance_log, 1, "Riesz polygon vertices for (2,1,5)", 1.0) as g:
        code = main(["polygon", "--full", "2", "1", "5"])
        out = capsys.readouterr().out.splitlines()
        want = ["inv_p,inv_q", "3/4,1/4", "3/5,1/10", "1/2,1/20", "3/7,1/35", "3/8,1/56"]
        g.check(code == 0, f"exit code {code}")
        g.check(out == want, f"got {out[1:]}")
        g.note("5 vertices exact")


def test_exponent_consistency(acceptance_log):
    with Gate(acceptance_log, 2, "general exponent formula vs closed form", 1.0) as g:
        count = 0
        for n, npr, d in itertools.product(range(1, 4), range(1, 4), range(1, 5)):
            pq = exponents(analyze(IndexFamily.full(n, npr, d)))
            closed = (1 + F(npr * d, n + 1), math.comb(n + d, d) * (1 + F(npr * d, n + 1)))
            g.check((pq.p, pq.q) == closed, f"(n,n',d)=({n},{npr},{d}) gave {pq}")
            count += 1
        for amb in range(2, 6):
            for k in range(1, amb):
                pq = exponents(analyze(IndexFamily.kplane(amb, k)))
                g.check((pq.p, pq.q) == (F(amb + 1, k + 1), F(amb + 1)), f"k-plane {amb},{k} gave {pq}")
                g.check(pq == kplane_exponents(amb, k), "k-plane helper disagrees")
                count += 1
        g.note(f"{count} families exact")


def test_extremal_measure_oracle(acceptance_log):
    with Gate(acceptance_log, 3, "extremal measure: closed form vs analytic and MC", 60.0) as g:
        cases = [(ExtremalShape([[2.0]], [1.0]), [1.0], 2.0),
                 (ExtremalShape([[1, 0], [0, 1]], [1, 1]), [1, 1], 2.0),
                 (ExtremalShape([[2, 0], [0, 1]], [1, 1]), [1, 1], 8.0 / 3.0)]
        for shape, s, val in cases:
            got = extremal_measure(shape, s)
            g.check(abs(got - val) <= 1e-10 * val, f"analytic {val}: got {got!r}")
        rng = np.random.default_rng(2024)
        worst = 0.0
        for i in range(10):
            shape, s = random_shape(rng, 1 + i % 3)
            exact = extremal_measure(shape, s)
            est, se = extremal_measure_mc(shape, s, 1_000_000, rng)
            # n = 1 shapes fill their bounding interval, so se = 0 and only rounding remains
            ok = abs(est - exact) <= 3 * se + 1e-12 * exact
            g.check(ok, f"shape {i}: est {est:.6g} exact {exact:.6g} se {se:.3g}")
            if se > 0:
                worst = max(worst, abs(est - exact) / se)
        g.note(f"3 analytic at 1e-10, 10 MC shapes, worst |z| = {worst:.2f}")


def test_interpolation_lemma(acceptance_log):
    with Gate(acceptance_log, 4, "interpolation inequality on random box unions", 60.0) as g:
        eq = interpolation_check(GridSet.box([-1], [1], 4), [[2.0]], [0.5, 0.5])
        g.check(abs(eq.lhs - 2) <= 1e-9 and abs(eq.rhs - 2) <= 1e-9,
                f"equality case lhs={eq.lhs!r} rhs={eq.rhs!r}")
        rng = np.random.default_rng(7)
        worst = 0.0
        for i in range(200):
            n = 1 + i % 2
            E = random_box_union(rng, n)
            N = n + int(rng.integers(0, 2))
            W = rng.uniform(0.3, 3.0, (N, n))
            th = rng.dirichlet(np.ones(N + 1))
            r = interpolation_check(E, W, th)
            g.check(r.holds, f"set {i}: ratio {r.ratio:.6g}")
            worst = max(worst, r.ratio)
        g.note(f"200 sets, max lhs/rhs = {worst:.4f}, equality case 2 = 2")


def test_symmetrization(acceptance_log):
    with Gate(acceptance_log, 5, "Steiner symmetrization and sublevel bound", 120.0) as g:
        rng = np.random.default_rng(11)
        for i in range(100):
            E = random_dyadic_set(rng, 1 + i % 3)
            S = steiner(E, int(rng.integers(0, E.n)))
            g.check(S.occupancy.sum() == E.occupancy.sum(),
                    f"set {i}: cell discrepancy {S.occupancy.sum() - E.occupancy.sum()}")
            g.check(np.allclose(S.cell_widths, E.cell_widths, rtol=4e-16, atol=0),
                    f"set {i}: cell widths changed")
        worst = math.inf
        for i in range(500):
            k = 1 + i % 4
            f = SmoothTestFunction.random(k, rng)
            E = random_box_union(rng, 1, res=32, boxes=int(rng.integers(1, 4)))
            r = sublevel_check(f, E, k)
            g.check(r.holds, f"instance {i} (k={k}): ratio {r.ratio:.6g}")
            worst = min(worst, r.ratio)
        for L in (0.5, 1.0, 3.0):
            r1 = sublevel_check(SmoothTestFunction([0, 1], (0, L), 1), GridSet.box([0], [L], 8), 1)
            g.check(math.isclose(r1.lhs, L**2 / 2, rel_tol=1e-12), f"k=1 lhs {r1.lhs} vs L^2/2")
            g.check(r1.lhs >= L**2 / 8 and r1.holds, f"k=1 bound fails at L={L}")
            r2 = sublevel_check(SmoothTestFunction([0, 0, 0.5], (-L / 2, L / 2), 2),
                                GridSet.box([-L / 2], [L / 2], 8), 2)
            g.check(math.isclose(r2.lhs, L**3 / 24, rel_tol=1e-12), f"k=2 lhs {r2.lhs} vs L^3/24")
            g.check(math.isclose(r2.rhs, L**3 / 216, rel_tol=1e-12), f"k=2 rhs {r2.rhs} vs L^3/216")
        g.note(f"100 exact, 500 sublevel (min lhs/rhs {worst:.3f}), L^2/2 and L^3/24 vs L^3/216")


@pytest.mark.slow
def test_change_of_variables(acceptance_log):
    with Gate(acceptance_log, 6, "change-of-variables identity by Monte Carlo", 300.0) as g:
        worst_z, worst_pair = 0.0, 0.0
        rng = np.random.default_rng(31)
        for d in (1, 2):
            fam = IndexFamily.full(1, 1, d)
            sets = [GridSet.box([0, 0], [1, 1]),
                    GridSet.from_boxes([-1, -1], [1, 1], 4, [([-0.5, -1], [0.5, 0.5])]),
                    GridSet.from_boxes([-1, -1], [2, 2], 6, [([-1, -1], [0, 0]), ([0.5, 0.5], [2, 1.5])])]
            for fi, Fset in enumerate(sets):
                reps = []
                for b in range(5):
                    t = rng.uniform(-1, 1, 1)
                    u = rng.uniform(-1, 1, fam.size)
                    seed = 1000 * d + 100 * fi + b
                    r = i_functional_mc(FlowSpec(fam, t, u, samples=1_000_000, seed=seed), Fset)
                    g.check(abs(r.estimate - r.target) <= 3 * r.stderr,
                            f"d={d} F{fi} base {b}: z={r.zscore:.2f}")
                    worst_z = max(worst_z, abs(r.zscore))
                    reps.append(r)
                for a, b in itertools.combinations(reps, 2):
                    comb = math.hypot(a.stderr, b.stderr)
                    z = abs(a.estimate - b.estimate) / comb
                    g.check(z <= 3, f"d={d} F{fi}: base points disagree, z={z:.2f}")
                    worst_pair = max(worst_pair, z)
        g.note(f"30 estimates, worst |z| {worst_z:.2f}, worst pairwise z {worst_pair:.2f}")


@pytest.mark.slow
def test_symmetries(acceptance_log):
    with Gate(acceptance_log, 7, "dilation, factorization and John equation", 300.0) as g:
        rng = np.random.default_rng(5)
        coarse_f, fine_f = gauss_preset(2), gauss_preset(2, resolution=1921)
        worst = 0.0
        for i in range(20):
            fam = IndexFamily.full(1, 1, 1 + i % 2)
            spec = DilationSpec(rng.uniform(0.5, 2, 1), rng.uniform(0.5, 2, 1))
            u = rng.uniform(-1, 1, fam.size)
            a = dilation_check(fam, coarse_f, spec, u).rel_err
            b = dilation_check(fam, fine_f, spec, u).rel_err
            g.check(a < 1e-3, f"case {i}: rel_err {a:.3g}")
            g.check(b < a, f"case {i}: no decrease under refinement ({a:.3g} -> {b:.3g})")
            worst = max(worst, a)
        fr = factorization_check(1, 1, 2, 1, coarse_f, [0.1, -0.3, 0.2])
        g.check(fr.rel_err < 1e-3, f"factorization rel_err {fr.rel_err:.3g}")
        fr2 = factorization_check(1, 1, 3, 1, coarse_f, [0.2, 0.1, -0.2, 0.1])
        g.check(fr2.rel_err < 1e-3, f"factorization (d=3) rel_err {fr2.rel_err:.3g}")
        slope, res = john_slope(seed=0)
        g.check(abs(slope - 2.0) <= 0.3, f"John slope {slope:.3f}")
        g.note(f"dilation worst {worst:.2e}, factorization {max(fr.rel_err, fr2.rel_err):.1e}, "
               f"John slope {slope:.3f}")


def test_necessity_sweeps(acceptance_log):
    with Gate(acceptance_log, 8, "extremal sweeps, constraint equality, log growth", 180.0) as g:
        fits = 0
        for n in range(1, 4):
            for npr in range(1, 5 - n):
                for d in range(1, 4):
                    pq = full_family_exponents(n, npr, d)
                    fams = [ExtremalFamily("F", n, npr, d, l) for l in range(1, d + 1)]
                    fams.append(ExtremalFamily("Fprime", n, npr, d))
                    for fam in fams:
                        r = extremal_sweep(fam, pq)
                        g.check(r.verdict["pass"], f"{fam.kind} ({n},{npr},{d}) l={fam.l}: {r.slopes}")
                        fits += 1
                    lvl = constraint_report(n, npr, d, pq)["levels"][-1]
                    g.check(lvl["equality"], f"no equality at l=d for ({n},{npr},{d})")
        lvl = constraint_report(1, 1, 1, full_family_exponents(1, 1, 1))["levels"][0]
        g.check(lvl["lhs"] == lvl["rhs"] == "4/3", f"got {lvl['lhs']} vs {lvl['rhs']}")
        gammas = []
        for betas, m in [(((1, 1), (1, 0)), 1), (((1, 1), (1, 0)), 2), (((1, 0), (0, 1)), 0)]:
            rep = log_growth_fit(LogGrowthSpec(betas, m))
            g.check(abs(rep.gamma - (2 - m)) <= 0.05, f"gamma {rep.gamma:.4f} for m={m}")
            gammas.append(rep.gamma)
            if m == 1:
                g.check(np.allclose(rep.measures, 4 * np.log(rep.R), rtol=1e-12), "|E_R| != 4 ln R")
        g.note(f"{fits} sweeps within 1%, 4/3 = 4/3, gamma = {', '.join(f'{x:.3f}' for x in gammas)}")


@pytest.mark.slow
def test_coercivity(acceptance_log):
    with Gate(acceptance_log, 9, "Vandermonde coercivity ratio", 300.0) as g:
        fam = IndexFamily.full(1, 1, 1)
        a = coercivity_ratio(fam, [GridSet.box([0], [1])] * 2).ratio
        b = coercivity_ratio(fam, [GridSet.box([0], [1]), GridSet.box([2], [3])]).ratio
        g.check(abs(a - 1 / 3) <= 0.005 / 3, f"same interval ratio {a!r}")
        g.check(abs(b - 2) <= 0.005 * 2, f"separated ratio {b!r}")

        rng = np.random.default_rng(13)
        scale_fam = IndexFamily.from_layers([[(0, 0), (1, 0), (0, 1)]])
        spreads = []
        for trial in range(3):
            base2 = [random_box_union(rng, 2, res=2, boxes=1, lo=-1, hi=1) for _ in range(3)]
            base1 = [random_box_union(rng, 1, boxes=2) for _ in range(2)]
            for f_, base, sub in ((scale_fam, base2, 4), (fam, base1, None)):
                ratios = [coercivity_ratio(f_, [E.dilated([lam] * E.n) for E in base], sub=sub).ratio
                          for lam in (0.25, 1.0, 4.0)]
                spread = (max(ratios) - min(ratios)) / max(ratios)
                g.check(spread <= 0.01, f"scale spread {spread:.3g}")
                spreads.append(spread)

        fams = [IndexFamily.full(1, 1, 1), IndexFamily.full(1, 1, 2)]
        lo_res, hi_res = [], []
        for i in range(500):
            f_ = fams[i % 2]
            A = analyze(f_).cardinality
            sets = [random_box_union(rng, 1, boxes=int(rng.integers(1, 3))) for _ in range(A)]
            sets = [E if E.measure() > 0 else GridSet.box([0], [1]) for E in sets]
            lo_res.append(coercivity_ratio(f_, sets, sub=4).ratio)
            hi_res.append(coercivity_ratio(f_, sets, sub=8).ratio)
        m_lo, m_hi = min(lo_res), min(hi_res)
        g.check(m_lo > 0 and m_hi > 0, f"min ratio {m_lo}, {m_hi}")
        stable = abs(m_lo - m_hi) / max(m_lo, m_hi)
        g.check(stable <= 0.02, f"min ratio moved {stable:.3g} between resolutions")
        g.note(f"1/3 -> {a:.6f}, 2 -> {b:.6f}, max scale spread {max(spreads):.1e}, "
               f"min over 500 = {m_hi:.4g} (resolution change {stable:.1e})")
