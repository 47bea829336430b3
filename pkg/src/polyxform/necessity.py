"""Scaling experiments that show where the full operator cannot be bounded.

Extremal pairs.  For a level l in 1..d,

    F_d = {(t, y) : |t_i| <= d, |y_k| <= C d^l},   G_d = {u : |u_(a,j)| <= d^max(l - |a|, 0)},

and the primed pair takes |t_i| <= 1, |y_k| <= C d, |u| <= d.  Measures follow
the counting convention in which a side of half-width r counts as r, so

    |F_d| = C^n' d^(n + n'l),  |G_d| = d^K,  K = n' binom(n+l, n+1),
    |F'_d| = C^n' d^n',        |G'_d| = d^K', K' = n' binom(n+d, d),

and the pairings int_G T chi_F equal d^n |G_d| and |G'_d|.  The factors of 2
dropped by the convention do not move any log-log slope.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .admissibility import ExponentPair
from .errors import DegeneracyError, DomainError, FitError
from .multiindex import enumerate_multiindices
from .riesz import polygon_contains, riesz_polygon

MIN_POINTS = 5
DEAD_BAND = 0.02
KINDS = ("F", "Fprime")


def _fit_slope(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    A = np.vstack([x, np.ones_like(x)]).T
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(sol[0])


@dataclass(frozen=True)
class ExtremalFamily:
    kind: str
    n: int
    nprime: int
    d: int
    l: int = 1
    deltas: tuple = field(default_factory=lambda: tuple(2.0 ** -k for k in range(1, 9)))
    C: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"kind must be one of {KINDS}")
        if min(self.n, self.nprime, self.d) < 1:
            raise DomainError("need n, nprime, d >= 1")
        if self.kind == "F" and not 1 <= self.l <= self.d:
            raise DomainError(f"level l must lie in 1..{self.d}")
        dl = tuple(float(x) for x in self.deltas)
        if any(not 0 < x <= 1 for x in dl):
            raise DomainError("deltas must lie in (0, 1]")
        object.__setattr__(self, "deltas", dl)
        if self.C is None:
            object.__setattr__(self, "C", self.coefficient_bound() + 1.0)

    @property
    def K(self) -> int:
        if self.kind == "F":
            return self.nprime * math.comb(self.n + self.l, self.n + 1)
        return self.nprime * math.comb(self.n + self.d, self.d)

    @property
    def scale_power(self) -> int:
        """Power of delta bounding the polynomial values on F's t-range."""
        return self.l if self.kind == "F" else 1

    def u_halfwidths(self, delta: float) -> np.ndarray:
        alphas = enumerate_multiindices(self.n, self.d)
        if self.kind == "F":
            w = [delta ** max(self.l - a.degree, 0) for a in alphas]
        else:
            w = [delta] * len(alphas)
        return np.array(w)

    def t_halfwidth(self, delta: float) -> float:
        return delta if self.kind == "F" else 1.0

    def coefficient_bound(self) -> float:
        """max over the grid of sup_{t, u in G} |sum u_a t^a| / delta^power.

        The supremum of a sum of monomials over a box centred at 0 is the sum
        of the coefficient bounds times |t|^a at the corner.
        """
        alphas = enumerate_multiindices(self.n, self.d)
        best = 0.0
        for dl in self.deltas:
            w = self.u_halfwidths(dl)
            r = self.t_halfwidth(dl)
            tot = sum(wi * r ** a.degree for wi, a in zip(w, alphas))
            best = max(best, tot / dl ** self.scale_power)
        return best

    def F_measure(self, delta):
        delta = np.asarray(delta, dtype=float)
        if self.kind == "F":
            return self.C ** self.nprime * delta ** (self.n + self.nprime * self.l)
        return self.C ** self.nprime * delta ** self.nprime

    def G_measure(self, delta):
        return np.asarray(delta, dtype=float) ** self.K

    def pairing(self, delta):
        delta = np.asarray(delta, dtype=float)
        if self.kind == "F":
            return delta ** self.n * self.G_measure(delta)
        return self.G_measure(delta)

    @property
    def pairing_exponent(self) -> int:
        return (self.n if self.kind == "F" else 0) + self.K

    @property
    def F_exponent(self) -> int:
        return self.n + self.nprime * self.l if self.kind == "F" else self.nprime

    def ratio_exponent(self, inv_p: Fraction, inv_q: Fraction) -> Fraction:
        """Exact exponent of delta in pairing / (|F|^(1/p) |G|^(1/q'))."""
        return self.pairing_exponent - self.F_exponent * inv_p - self.K * (1 - inv_q)

    def containment_fraction(self, delta: float, samples: int, rng: np.random.Generator) -> float:
        """Share of (t, u) in (t-range of F) x G whose graph point stays inside F."""
        alphas = enumerate_multiindices(self.n, self.d)
        r = self.t_halfwidth(delta)
        t = rng.uniform(-r, r, size=(samples, self.n))
        w = self.u_halfwidths(delta)
        mono = np.stack([a.monomial(t) for a in alphas], axis=-1)
        bound = self.C * delta ** self.scale_power
        ok = np.ones(samples, dtype=bool)
        for _ in range(self.nprime):
            u = rng.uniform(-1, 1, size=(samples, len(alphas))) * w
            ok &= np.abs(np.sum(u * mono, axis=1)) <= bound
        return float(ok.mean())


def constraint_report(n: int, nprime: int, d: int, pq: ExponentPair) -> dict:
    """Exact evaluation of the necessary inequalities at (p, q)."""
    ip, iq = 1 / Fraction(pq.p), 1 / Fraction(pq.q)
    levels = []
    for l in range(1, d + 1):
        lhs = n + Fraction(nprime, 1) * iq * math.comb(n + l, n + 1)
        rhs = (n + l * nprime) * ip
        levels.append({"l": l, "lhs": str(lhs), "rhs": str(rhs), "holds": lhs >= rhs,
                       "equality": lhs == rhs})
    lhs2 = nprime * iq * math.comb(n + d, d)
    rhs2 = nprime * ip
    return {"levels": levels,
            "primed": {"lhs": str(lhs2), "rhs": str(rhs2), "holds": lhs2 >= rhs2,
                       "equality": lhs2 == rhs2},
            "all_hold": all(x["holds"] for x in levels) and lhs2 >= rhs2}


@dataclass
class SweepResult:
    family: ExtremalFamily
    pq: ExponentPair
    table: list
    slopes: dict
    expected: dict
    constraints: dict
    seed: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("delta,pairing,F_measure,G_measure,ratio\n")
        for row in self.table:
            buf.write(",".join(repr(float(row[k])) for k in
                               ("delta", "pairing", "F_measure", "G_measure", "ratio")) + "\n")
        return buf.getvalue()

    def to_json(self) -> dict:
        fam = self.family
        return {
            "family": {"kind": fam.kind, "n": fam.n, "nprime": fam.nprime, "d": fam.d, "l": fam.l,
                       "C": fam.C, "K": fam.K, "deltas": list(fam.deltas)},
            "p": str(self.pq.p), "q": str(self.pq.q), "seed": self.seed,
            "slopes": self.slopes, "expected": self.expected,
            "containment": [row["containment"] for row in self.table],
            "constraints": self.constraints,
            "verdict": self.verdict,
        }

    @property
    def verdict(self) -> dict:
        ok_slopes = all(abs(self.slopes[k] - self.expected[k]) <= 0.01 * max(1.0, abs(self.expected[k]))
                        for k in ("pairing", "F_power", "G_power"))
        ok_mc = all(row["containment"] == 1.0 for row in self.table)
        return {"slopes_match": ok_slopes, "pairing_cross_check": ok_mc,
                "pass": ok_slopes and ok_mc}

    def to_svg(self, size: int = 360) -> str:
        x = np.log([row["delta"] for row in self.table])
        series = {"pairing": "black", "ratio": "gray"}
        ys = {k: np.log([row[k] for row in self.table]) for k in series}
        lo = min(v.min() for v in ys.values())
        hi = max(v.max() for v in ys.values())
        hi = hi if hi > lo else lo + 1
        pad = size // 8

        def sx(v):
            return pad + (v - x.min()) / max(x.max() - x.min(), 1e-12) * size

        def sy(v):
            return pad + (hi - v) / (hi - lo) * size

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size + 2 * pad}" '
               f'height="{size + 2 * pad}">']
        for k, colour in series.items():
            pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, ys[k]))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{colour}"><title>{k}</title></polyline>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def extremal_sweep(family: ExtremalFamily, pq: ExponentPair, *, samples: int = 4096,
                   seed: int = 0, discard_largest: bool = True) -> SweepResult:
    """Closed-form pairings over the delta grid, slope fits and constraint flags."""
    dl = np.array(family.deltas)
    if dl.size < MIN_POINTS:
        raise FitError(f"need at least {MIN_POINTS} delta values, got {dl.size}")
    if np.any(np.diff(dl) >= 0):
        raise FitError("delta grid must be strictly decreasing")
    ip, iq = 1 / Fraction(pq.p), 1 / Fraction(pq.q)
    Fm, Gm, pair = family.F_measure(dl), family.G_measure(dl), family.pairing(dl)
    Fp = Fm ** float(ip)
    Gp = Gm ** float(1 - iq)
    ratio = pair / (Fp * Gp)
    table = []
    for i, d in enumerate(dl):
        rng = np.random.Generator(np.random.Philox(key=np.array([seed, i], dtype=np.uint64)))
        table.append({"delta": d, "pairing": pair[i], "F_measure": Fm[i], "G_measure": Gm[i],
                      "ratio": ratio[i],
                      "containment": family.containment_fraction(d, samples, rng)})
    keep = slice(1, None) if discard_largest else slice(None)
    if dl[keep].size < MIN_POINTS - 1:
        raise FitError("too few points left after discarding the largest delta")
    lx = np.log(dl[keep])
    slopes = {"pairing": _fit_slope(lx, np.log(pair[keep])),
              "F_power": _fit_slope(lx, np.log(Fp[keep])),
              "G_power": _fit_slope(lx, np.log(Gp[keep])),
              "ratio": _fit_slope(lx, np.log(ratio[keep]))}
    expected = {"pairing": float(family.pairing_exponent),
                "F_power": float(family.F_exponent * ip),
                "G_power": float(family.K * (1 - iq)),
                "ratio": float(family.ratio_exponent(ip, iq))}
    cons = constraint_report(family.n, family.nprime, family.d, pq)
    return SweepResult(family, pq, table, slopes, expected, cons, seed)


# boundedness classification ---------------------------------------------------

@dataclass(frozen=True)
class Classification:
    label: str
    slope: float
    exact_slope: Fraction


def boundedness_ratio_sweep(family: ExtremalFamily, point) -> Classification:
    """Classify (1/p, 1/q) by the slope of log r(delta) against log delta.

    A negative slope means the ratio blows up as delta -> 0 (an obstruction);
    slopes within the dead band count as the equality case.  This is an
    empirical heuristic, not a proof of boundedness.
    """
    ip, iq = Fraction(point[0]), Fraction(point[1])
    if not (0 <= ip <= 1 and 0 <= iq <= 1):
        raise DomainError("point must lie in the unit square")
    dl = np.array(family.deltas)
    if dl.size < MIN_POINTS:
        raise FitError(f"need at least {MIN_POINTS} delta values")
    r = family.pairing(dl) / (family.F_measure(dl) ** float(ip) * family.G_measure(dl) ** float(1 - iq))
    slope = _fit_slope(np.log(dl[1:]), np.log(r[1:]))
    label = "diverging" if slope < -DEAD_BAND else "bounded-looking"
    return Classification(label, slope, family.ratio_exponent(ip, iq))


def classify_point(n: int, nprime: int, d: int, point, deltas=None) -> Classification:
    """Combine every extremal family; the worst slope decides."""
    kw = {} if deltas is None else {"deltas": tuple(deltas)}
    fams = [ExtremalFamily("F", n, nprime, d, l, **kw) for l in range(1, d + 1)]
    fams.append(ExtremalFamily("Fprime", n, nprime, d, **kw))
    results = [boundedness_ratio_sweep(f, point) for f in fams]
    return min(results, key=lambda c: c.slope)


def polygon_agreement(n: int, nprime: int, d: int, grid: int = 20) -> dict:
    """Compare classify_point with exact polygon membership on a grid of rational points."""
    poly = riesz_polygon(n, nprime, d)
    mismatches = []
    total = 0
    for i in range(grid + 1):
        for j in range(grid + 1):
            pt = (Fraction(i, grid), Fraction(j, grid))
            inside = polygon_contains(poly, pt)
            c = classify_point(n, nprime, d, pt)
            total += 1
            if inside != (c.label == "bounded-looking"):
                mismatches.append((str(pt[0]), str(pt[1]), c.slope))
    return {"points": total, "mismatches": mismatches}


# logarithmic growth ---------------------------------------------------------------

@dataclass(frozen=True)
class LogGrowthSpec:
    betas: tuple
    m: int
    R: tuple = (1e1, 1e2, 1e3, 1e4, 1e5, 1e6)

    def __post_init__(self):
        B = tuple(tuple(float(c) for c in row) for row in np.atleast_2d(self.betas))
        n = len(B)
        if any(len(row) != n for row in B):
            raise DomainError("need n exponent vectors of length n")
        if not 0 <= self.m <= n:
            raise DomainError("m must lie in 0..n")
        object.__setattr__(self, "betas", B)
        object.__setattr__(self, "R", tuple(float(r) for r in self.R))


@dataclass(frozen=True)
class LogGrowthReport:
    R: tuple
    measures: tuple
    gamma: float
    measure: str
    exponents: tuple


def _level_integral(c: float, b: float) -> float:
    """int_1^b y^(c-1) dy."""
    if abs(c) < 1e-13:
        return math.log(b)
    return (b**c - 1.0) / c


def log_growth_fit(spec: LogGrowthSpec, measure: str = "auto") -> LogGrowthReport:
    """Measure of E_R through y_j = x^(beta_j), then fit |E_R| ~ C (ln R)^gamma.

    With y = x^B the Lebesgue element is dx = y^(c-1) dy / |det B| where
    B^T c = (1, ..., 1); under dx / prod|x_i| every exponent c is 0.
    ``measure="auto"`` takes Lebesgue measure when (1, ..., 1) lies in the span
    of the first m vectors (then the R-directions carry c = 0 and the growth is
    logarithmic) and the scale-invariant measure otherwise.
    """
    B = np.array(spec.betas)
    n = B.shape[0]
    R = np.array(spec.R)
    if R.size < MIN_POINTS:
        raise FitError(f"need at least {MIN_POINTS} R values")
    if np.any(np.diff(R) <= 0) or R[0] <= 1:
        raise FitError("R grid must be increasing and above 1")
    det = float(np.linalg.det(B))
    if abs(det) < 1e-12 or np.linalg.cond(B) > 1e10:
        raise DegeneracyError("exponent vectors are linearly dependent")
    c = np.linalg.solve(B.T, np.ones(n))
    c[np.abs(c) < 1e-12] = 0.0
    if measure == "auto":
        measure = "lebesgue" if np.all(c[spec.m:] == 0) else "mu"
    if measure == "mu":
        c = np.zeros(n)
    elif measure != "lebesgue":
        raise DomainError("measure must be 'auto', 'lebesgue' or 'mu'")
    vals = []
    for r in R:
        tot = 2.0**n / abs(det)
        for j in range(n):
            tot *= _level_integral(c[j], 2.0 if j < spec.m else r)
        vals.append(tot)
    vals = np.array(vals)
    gamma = _fit_slope(np.log(np.log(R)), np.log(vals))
    return LogGrowthReport(tuple(R.tolist()), tuple(vals.tolist()), gamma, measure,
                           tuple(c.tolist()))
