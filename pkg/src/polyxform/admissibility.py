"""Index families, the admissibility conditions and sharp Lebesgue exponents.

An index family is a set of pairs ``(alpha, j)`` with ``alpha`` a multiindex
of length ``n`` and ``j`` a component label in ``1..nprime``.  It selects
which polynomial coefficients of an ``nprime``-tuple of polynomials in ``n``
variables are free parameters of the averaging operator.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional

from ._exact import exact_rank
from .errors import AdmissibilityError, DomainError
from .multiindex import MultiIndex, as_multiindex, iter_multiindices

Pair = tuple[MultiIndex, int]


@dataclass(frozen=True)
class IndexFamily:
    n: int
    nprime: int
    d: int
    pairs: frozenset = field(repr=False)

    def __post_init__(self):
        if self.n < 1 or self.nprime < 1 or self.d < 0:
            raise DomainError(f"bad family dimensions n={self.n}, nprime={self.nprime}, d={self.d}")
        if not self.pairs:
            raise DomainError("an index family needs at least one pair")
        for alpha, j in self.pairs:
            if len(alpha) != self.n:
                raise DomainError(f"{alpha} has length {len(alpha)}, expected {self.n}")
            if alpha.degree > self.d:
                raise DomainError(f"{alpha} has degree {alpha.degree} > d={self.d}")
            if not 1 <= j <= self.nprime:
                raise DomainError(f"component label {j} outside 1..{self.nprime}")

    @classmethod
    def from_pairs(cls, n: int, nprime: int, d: int, pairs: Iterable) -> "IndexFamily":
        """Build a family, rejecting duplicate ``(alpha, j)`` pairs."""
        seen = set()
        for alpha, j in pairs:
            key = (as_multiindex(alpha), int(j))
            if key in seen:
                raise DomainError(f"duplicate pair {key}")
            seen.add(key)
        return cls(n, nprime, d, frozenset(seen))

    @classmethod
    def from_layers(cls, layers: list, d: Optional[int] = None) -> "IndexFamily":
        """Family from a list of layers; ``layers[k]`` lists the multiindices of component k+1."""
        pairs = [(as_multiindex(a), k + 1) for k, layer in enumerate(layers) for a in layer]
        n = len(pairs[0][0])
        if d is None:
            d = max(a.degree for a, _ in pairs)
        return cls.from_pairs(n, len(layers), d, pairs)

    @classmethod
    def full(cls, n: int, nprime: int, d: int) -> "IndexFamily":
        """The unrestricted family M_{n,d} x {1..nprime}."""
        return cls(n, nprime, d, frozenset((a, j) for a in iter_multiindices(n, d)
                                           for j in range(1, nprime + 1)))

    @classmethod
    def kplane(cls, ambient: int, k: int) -> "IndexFamily":
        """Affine k-planes in R^ambient, parametrised as graphs over R^k."""
        if not 1 <= k < ambient:
            raise DomainError(f"need 1 <= k < ambient, got k={k}, ambient={ambient}")
        return cls.full(k, ambient - k, 1)

    def layer(self, j: int) -> list[MultiIndex]:
        """Multiindices of component ``j`` in ascending dictionary order."""
        return sorted(a for a, k in self.pairs if k == j)

    @property
    def layers(self) -> list[list[MultiIndex]]:
        return [self.layer(j) for j in range(1, self.nprime + 1)]

    def ordered_pairs(self) -> list[Pair]:
        """Canonical ordering: by component, then dictionary order within a layer."""
        return [(a, j) for j in range(1, self.nprime + 1) for a in self.layer(j)]

    @property
    def size(self) -> int:
        return len(self.pairs)

    def is_full(self) -> bool:
        return self.size == self.nprime * math.comb(self.n + self.d, self.d)

    def relabel(self, perm: dict[int, int]) -> "IndexFamily":
        return IndexFamily(self.n, self.nprime, self.d,
                           frozenset((a, perm[j]) for a, j in self.pairs))

    def to_json(self) -> dict:
        return {"n": self.n, "nprime": self.nprime, "d": self.d,
                "pairs": [[a.to_json(), j] for a, j in self.ordered_pairs()]}

    @classmethod
    def from_json(cls, data) -> "IndexFamily":
        if isinstance(data, (str, Path)):
            text = str(data)
            if not text.lstrip().startswith("{"):
                text = Path(text).read_text()
            data = json.loads(text)
        unknown = set(data) - {"n", "nprime", "d", "pairs"}
        if unknown:
            raise DomainError(f"unknown keys in family JSON: {sorted(unknown)}")
        return cls.from_pairs(int(data["n"]), int(data["nprime"]), int(data["d"]),
                              [(MultiIndex(tuple(a)), int(j)) for a, j in data["pairs"]])


@dataclass(frozen=True)
class AdmissibilityReport:
    dimensionality_ok: bool
    cardinality: Optional[int]
    scaling_ok: bool
    weight: Optional[int]
    spanning_ok: bool
    strengthened_spanning_ok: bool
    betas: tuple
    nondegeneracy_ok: bool

    CONDITIONS = ("dimensionality", "scaling", "spanning", "strengthened spanning", "nondegeneracy")

    @property
    def admissible(self) -> bool:
        return self.first_failure() is None

    def first_failure(self, require_nondegeneracy: bool = True) -> Optional[str]:
        flags = [self.dimensionality_ok, self.scaling_ok, self.spanning_ok,
                 self.strengthened_spanning_ok, self.nondegeneracy_ok or not require_nondegeneracy]
        for name, ok in zip(self.CONDITIONS, flags):
            if not ok:
                return name
        return None

    def to_json(self) -> dict:
        return {
            "dimensionality_ok": self.dimensionality_ok,
            "cardinality": self.cardinality,
            "scaling_ok": self.scaling_ok,
            "weight": self.weight,
            "spanning_ok": self.spanning_ok,
            "strengthened_spanning_ok": self.strengthened_spanning_ok,
            "betas": [list(b) for b in self.betas],
            "nondegeneracy_ok": self.nondegeneracy_ok,
            "admissible": self.admissible,
        }


def strengthened_betas(fam: IndexFamily) -> tuple:
    """Row sums beta_i = sum_k alpha_{i,k}, alpha_{i,k} the i-th smallest element of layer k.

    Empty when the layers have different sizes.
    """
    layers = fam.layers
    sizes = {len(layer) for layer in layers}
    if len(sizes) != 1:
        return ()
    (size,) = sizes
    return tuple(tuple(sum(layer[i][c] for layer in layers) for c in range(fam.n))
                 for i in range(size))


def analyze(fam: IndexFamily) -> AdmissibilityReport:
    layers = fam.layers
    sizes = {len(layer) for layer in layers}
    dim_ok = len(sizes) == 1
    card = next(iter(sizes)) if dim_ok else None

    total = [sum(a[c] for a, _ in fam.pairs) for c in range(fam.n)]
    scale_ok = len(set(total)) == 1
    weight = total[0] if scale_ok else None

    union = {a for a, _ in fam.pairs}
    span_ok = exact_rank([list(a) for a in union]) == fam.n

    betas = strengthened_betas(fam)
    strong_ok = bool(betas) and exact_rank([list(b) for b in betas]) == fam.n

    zero = MultiIndex.zero(fam.n)
    nondeg_ok = all(zero in layer for layer in layers)

    return AdmissibilityReport(dim_ok, card, scale_ok, weight, span_ok, strong_ok, betas, nondeg_ok)


@dataclass(frozen=True)
class ExponentPair:
    p: Fraction
    q: Fraction

    def __str__(self):
        return f"p = {self.p}, q = {self.q}"

    @property
    def inverse(self) -> tuple[Fraction, Fraction]:
        return (1 / self.p, 1 / self.q)


def exponents(report: AdmissibilityReport, *, allow_degenerate: bool = False) -> ExponentPair:
    """The unique pair (p, q) = ((|A| + #A)/#A, |A| + #A) for an admissible family.

    ``allow_degenerate`` skips the nondegeneracy requirement (zero multiindex in
    every layer).  Only use it for experiments: that condition is part of the
    hypothesis under which the bound is proved.
    """
    failed = report.first_failure(require_nondegeneracy=not allow_degenerate)
    if failed is not None:
        raise AdmissibilityError(failed)
    card, weight = report.cardinality, report.weight
    return ExponentPair(Fraction(weight + card, card), Fraction(weight + card))


def full_family_exponents(n: int, nprime: int, d: int) -> ExponentPair:
    """Closed form for the unrestricted family: p = 1 + n'd/(n+1), q = |M_{n,d}| p."""
    p = 1 + Fraction(nprime * d, n + 1)
    return ExponentPair(p, math.comb(n + d, d) * p)


def kplane_exponents(ambient: int, k: int) -> ExponentPair:
    return ExponentPair(Fraction(ambient + 1, k + 1), Fraction(ambient + 1))
