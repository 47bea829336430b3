"""Exact rank and determinant by fraction-free (Bareiss) elimination."""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence


def _to_rational_rows(rows):
    out = []
    for r in rows:
        out.append([x if isinstance(x, (int, Fraction)) else Fraction(x) for x in r])
    return out


def _clear_denominators(rows):
    # Bareiss divisions are exact over the integers; scale each row to integers.
    res = []
    for r in rows:
        den = 1
        for x in r:
            if isinstance(x, Fraction):
                den = den * x.denominator // gcd(den, x.denominator)
        res.append([int(x * den) for x in r])
    return res



def exact_rank(rows: Sequence[Sequence]) -> int:
    """Rank of a matrix with integer or rational entries."""
    m = _clear_denominators(_to_rational_rows(rows))
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][col]
        for r in range(rank + 1, nrows):
            for c in range(col + 1, ncols):
                m[r][c] = (p * m[r][c] - m[r][col] * m[rank][c]) // prev
            m[r][col] = 0
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def exact_det(rows: Sequence[Sequence]) -> Fraction:
    """Determinant of a square rational matrix."""
    m = [[Fraction(x) for x in r] for r in rows]
    size = len(m)
    if any(len(r) != size for r in m):
        raise ValueError("matrix is not square")
    if size == 0:
        return Fraction(1)
    den = 1
    for r in m:
        for x in r:
            den = den * x.denominator // gcd(den, x.denominator)
    a = [[int(x * den) for x in r] for r in m]
    sign = 1
    prev = 1
    for k in range(size - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, size) if a[r][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return Fraction(sign * a[-1][-1], den**size)
