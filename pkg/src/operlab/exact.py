"""Small exact linear algebra over the rationals.

The matrices we meet are tiny (a grading level of E8 has at most eight
elements), so a plain Gauss-Jordan elimination on ``Fraction`` entries is both
fast and transparent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence

Matrix = List[List[Fraction]]


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = to_fraction_matrix(rows)
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        p = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def nullspace(rows: Sequence[Sequence], n_cols: int | None = None) -> Matrix:
    """Basis of the right kernel, one vector per free column.

    Each basis vector has a 1 in its free column, so the basis is
    deterministic given the column order.
    """
    if not rows:
        if n_cols is None:
            raise ValueError("n_cols is required for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(n_cols)] for i in range(n_cols)]
    n_cols = len(rows[0])
    m, pivots = rref(rows)
    free = [c for c in range(n_cols) if c not in pivots]
    basis: Matrix = []
    for fc in free:
        v = [Fraction(0)] * n_cols
        v[fc] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            v[pc] = -m[row_idx][fc]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve the square system ``a x = b`` exactly; raises on singular input."""
    n = len(a)
    aug = [list(row) + [bi] for row, bi in zip(to_fraction_matrix(a), b)]
    m, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular system")
    return [m[i][n] for i in range(n)]


def inverse(a: Sequence[Sequence]) -> Matrix:
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(to_fraction_matrix(a))]
    m, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in m]


def fraction_str(q: Fraction) -> str:
    """Serialize an exact rational as ``"p/q"`` (``"p"`` when integral)."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_fraction(s: str) -> Fraction:
    return Fraction(s)


@dataclass(frozen=True)
class Surd:
    """The real number ``coef * sqrt(radicand)`` with rational data."""

    coef: Fraction
    radicand: Fraction = Fraction(1)

    def __float__(self) -> float:
        return float(self.coef) * math.sqrt(self.radicand)

    def square(self) -> Fraction:
        return self.coef * self.coef * self.radicand

    def simplified(self) -> "Surd":
        num, den = self.radicand.numerator, self.radicand.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return Surd(self.coef * Fraction(rn, rd), Fraction(1))
        return self

    def is_rational(self) -> bool:
        return self.simplified().radicand == 1 or self.coef == 0

    def as_fraction(self) -> Fraction:
        s = self.simplified()
        if s.coef == 0:
            return Fraction(0)
        if s.radicand != 1:
            raise ValueError(f"{self} is irrational")
        return s.coef

    def __str__(self) -> str:
        s = self.simplified()
        if s.radicand == 1 or s.coef == 0:
            return fraction_str(s.coef)
        return f"{fraction_str(s.coef)}*sqrt({fraction_str(s.radicand)})"
