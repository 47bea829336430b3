"""Monte Carlo oracle for the change-of-variables functional I_A[F](t, u).

With s = (s_1, ..., s_{#A-1}) in (R^n)^{#A-1} and x in R^{A°} (A° drops the
constant terms),

    I_A[F](t, u) = int |V_A(t, t+s)| prod_j chi_F(pi_A phi_l^{s_j} phi_r^x (t, u)) ds dx,

and the claim being tested is I_A[F](t, u) = |F|^{#A-1} for every (t, u).

Sampling.  s is drawn uniformly from the certified box (t-range of F minus t
in every slot, padded by a fraction ``pad`` of its width), with the first coordinate stratified inside each chunk.  The
x-integral is importance sampled: for each component k the map
x -> (P_k evaluated at t+s_j)_j is affine with Jacobian matrix
[(t+s_j)^a - t^a], so x is drawn by pulling back a uniform point of F's
padded y-box^{#A-1}.  The weight is then |V_A(t, t+s)| / prod_k |det J_k| times the
box volumes, and the integrand itself is evaluated in its original form
(flows, graph map, Vandermonde product) at the pulled-back x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .admissibility import IndexFamily, analyze
from .errors import AdmissibilityError, CoverageError, DimensionError
from .gridset import GridSet
from .multiindex import MultiIndex
from .vandermonde import evaluate_V, monomial_matrix

CHUNK = 1 << 14


@dataclass(frozen=True)
class FlowSpec:
    family: IndexFamily
    t: tuple
    u: tuple
    samples: int = 100_000
    seed: int = 0
    s_box: Optional[tuple] = field(default=None)
    pad: float = 0.25

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(float(x) for x in np.atleast_1d(self.t)))
        object.__setattr__(self, "u", tuple(float(x) for x in np.atleast_1d(self.u)))
        if len(self.t) != self.family.n:
            raise DimensionError("base point t has the wrong dimension")
        if len(self.u) != self.family.size:
            raise DimensionError("base point u has the wrong dimension")
        if int(self.samples) < 2:
            raise DimensionError("need at least two samples")

    @property
    def reduced_pairs(self):
        zero = MultiIndex.zero(self.family.n)
        return [p for p in self.family.ordered_pairs() if p[0] != zero]


@dataclass(frozen=True)
class MCReport:
    estimate: float
    stderr: float
    target: float
    samples: int

    @property
    def zscore(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.estimate == self.target else math.inf
        return (self.estimate - self.target) / self.stderr

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "stderr": self.stderr, "target": self.target,
                "samples": self.samples}


def _support_box(F: GridSet):
    """Bounding box of the occupied cells."""
    occ = np.nonzero(F.occupancy > 0)
    if occ[0].size == 0:
        return None
    lo = np.array([F.edges(a)[occ[a].min()] for a in range(F.n)])
    hi = np.array([F.edges(a)[occ[a].max() + 1] for a in range(F.n)])
    return lo, hi


def flow_image(fam: IndexFamily, t, u, s, x) -> np.ndarray:
    """pi_A phi_l^{s_j} phi_r^x (t, u) for every j; shapes s (m, A-1, n), x (m, |A°|).

    Returns points of shape (m, A-1, n + n').
    """
    t = np.asarray(t, dtype=float)
    u = np.asarray(u, dtype=float)
    pairs = fam.ordered_pairs()
    zero = MultiIndex.zero(fam.n)
    reduced = [p for p in pairs if p[0] != zero]
    red_pos = {p: i for i, p in enumerate(reduced)}
    m = s.shape[0]
    # phi_r^x: shift non-constant coefficients by x and compensate in the constant term
    uh = np.broadcast_to(u, (m, u.size)).copy()
    for i, (a, j) in enumerate(pairs):
        if a == zero:
            for b, k in reduced:
                if k == j:
                    uh[:, i] -= x[:, red_pos[(b, k)]] * b.monomial(t)
        else:
            uh[:, i] += x[:, red_pos[(a, j)]]
    # phi_l^{s_j} then the graph map
    pts = t + s
    out = np.empty(s.shape[:2] + (fam.n + fam.nprime,))
    out[..., : fam.n] = pts
    for k in range(1, fam.nprime + 1):
        acc = np.zeros(s.shape[:2])
        for i, (a, j) in enumerate(pairs):
            if j == k:
                acc += uh[:, i, None] * a.monomial(pts)
        out[..., fam.n + k - 1] = acc
    return out


def i_functional_mc(spec: FlowSpec, F: GridSet) -> MCReport:
    fam = spec.family
    rep = analyze(fam)
    if not rep.dimensionality_ok:
        raise AdmissibilityError("dimensionality")
    if not rep.nondegeneracy_ok:
        raise AdmissibilityError("nondegeneracy", "the flows need the constant term in every layer")
    if F.n != fam.n + fam.nprime:
        raise DimensionError("F must live in R^{n+n'}")
    A = rep.cardinality
    target = F.measure() ** (A - 1)
    box = _support_box(F)
    if box is None:
        return MCReport(0.0, 0.0, target, int(spec.samples))
    lo, hi = box
    n, npr = fam.n, fam.nprime
    t = np.array(spec.t)
    # proposal boxes are padded past the support so chi_F genuinely varies
    marg = spec.pad * (hi - lo)
    s_lo = np.tile(lo[:n] - marg[:n] - t, A - 1)
    s_hi = np.tile(hi[:n] + marg[:n] - t, A - 1)
    if spec.s_box is not None:
        user_lo = np.asarray(spec.s_box[0], dtype=float).reshape(-1)
        user_hi = np.asarray(spec.s_box[1], dtype=float).reshape(-1)
        if np.any(user_lo > np.tile(lo[:n] - t, A - 1)) or np.any(user_hi < np.tile(hi[:n] - t, A - 1)):
            raise CoverageError("s sampling box does not cover the integrand's support")
        s_lo, s_hi = user_lo, user_hi
    y_lo, y_hi = lo[n:] - marg[n:], hi[n:] + marg[n:]
    vol = float(np.prod(s_hi - s_lo)) * float(np.prod(y_hi - y_lo)) ** (A - 1)
    layers = fam.layers
    zero = MultiIndex.zero(n)
    reduced = spec.reduced_pairs
    red_pos = {p: i for i, p in enumerate(reduced)}
    u_map = dict(zip(fam.ordered_pairs(), spec.u))

    total = int(spec.samples)
    nchunks = -(-total // CHUNK)
    sums = np.zeros(nchunks)
    sizes = np.zeros(nchunks)
    for c in range(nchunks):
        m = min(CHUNK, total - c * CHUNK)
        rng = np.random.Generator(np.random.Philox(key=np.array([spec.seed, c], dtype=np.uint64)))
        r = rng.random((m, (A - 1) * n))
        r[:, 0] = (np.arange(m) + r[:, 0]) / m      # stratify the first coordinate
        s = (s_lo + (s_hi - s_lo) * r).reshape(m, A - 1, n)
        yv = y_lo + (y_hi - y_lo) * rng.random((m, A - 1, npr))
        tp = t + s
        x = np.zeros((m, len(reduced)))
        jdet = np.ones(m)
        for k, layer in enumerate(layers):
            rest = [a for a in layer if a != zero]
            J = monomial_matrix(rest, tp) - monomial_matrix(rest, t[None, :])[None, :, :]
            # P_k(t+s_j) at x = 0 and the constant kept fixed by the flow
            base = np.zeros((m, A - 1))
            for a in layer:
                if a == zero:
                    base += u_map[(a, k + 1)]
                else:
                    base += u_map[(a, k + 1)] * a.monomial(tp)
            jdet *= np.abs(np.linalg.det(J))
            ok = jdet > 0
            sol = np.zeros((m, len(rest)))
            if ok.any():
                sol[ok] = np.linalg.solve(J[ok], (yv[ok, :, k] - base[ok])[..., None])[..., 0]
            for i, a in enumerate(rest):
                x[:, red_pos[(a, k + 1)]] = sol[:, i]
        pts = flow_image(fam, t, spec.u, s, x)
        chi = F.lookup(pts.reshape(-1, n + npr)).reshape(m, A - 1).prod(axis=1)
        full = np.concatenate([np.broadcast_to(t, (m, 1, n)), tp], axis=1)
        V = np.abs(evaluate_V(fam, full).value)
        w = np.zeros(m)
        good = jdet > 0
        w[good] = V[good] / jdet[good]
        vals = vol * w * chi
        sums[c] = vals.sum()
        sizes[c] = m
    means = sums / sizes
    est = float(sums.sum() / sizes.sum())
    if nchunks > 1:
        se = float(np.sqrt(np.sum(sizes**2 * (means - est) ** 2) / (nchunks - 1) / nchunks)
                   / sizes.mean())
    else:
        se = 0.0
    return MCReport(est, se, target, total)
