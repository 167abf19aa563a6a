"""Exact root systems and Chevalley bases of the simple complex Lie algebras.

Roots are integer vectors in the basis of simple roots, so the height of a
root is the sum of its coordinates. Cartan matrices follow the Kac convention
``a[i][j] = <alpha_i^vee, alpha_j>`` with Bourbaki's numbering of the nodes.

Structure constants are produced by the extraspecial-pair recursion: fix a
total order on positive roots (height, then lexicographic), declare
``N(a, b) = +(p + 1)`` on every extraspecial pair and propagate the signs with
the standard quadratic and quartic relations between the ``N``. All
structure constants of a Chevalley basis are integers.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidRank
from .exact import fraction_str

Root = Tuple[int, ...]
Element = Dict[int, object]  # sparse basis coordinates

_MIN_RANK = {"A": 1, "B": 2, "C": 2, "D": 3, "E": 6, "F": 4, "G": 2}
_MAX_RANK = {"E": 8, "F": 4, "G": 2}


@dataclass(frozen=True, order=True)
class LieType:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in _MIN_RANK:
            raise InvalidRank(f"unknown family {self.family!r}")
        if not isinstance(self.rank, int) or self.rank < _MIN_RANK[self.family]:
            raise InvalidRank(f"{self.family}{self.rank}: rank below classification bound")
        if self.family in _MAX_RANK and self.rank > _MAX_RANK[self.family]:
            raise InvalidRank(f"{self.family}{self.rank}: rank above classification bound")
        if self.family in "EFG" and self.rank < _MIN_RANK[self.family]:
            raise InvalidRank(f"{self.family}{self.rank}: invalid rank")

    @classmethod
    def parse(cls, text: str) -> "LieType":
        m = re.fullmatch(r"\s*([A-Ga-g])_?(\d+)\s*", text)
        if not m:
            raise InvalidRank(f"cannot parse Lie type {text!r}")
        return cls(m.group(1).upper(), int(m.group(2)))

    @property
    def name(self) -> str:
        return f"{self.family}{self.rank}"

    def __str__(self) -> str:
        return self.name


def all_types(max_rank: int = 8) -> List[LieType]:
    """Every simple type of rank at most ``max_rank`` (with the usual low-rank
    coincidences D3 = A3 and C2 = B2 kept as separate labels)."""
    out: List[LieType] = []
    for fam in "ABCD":
        for n in range(_MIN_RANK[fam], max_rank + 1):
            out.append(LieType(fam, n))
    for n in (6, 7, 8):
        if n <= max_rank:
            out.append(LieType("E", n))
    if max_rank >= 4:
        out.append(LieType("F", 4))
    out.append(LieType("G", 2))
    return out


def cartan_matrix(t: LieType) -> List[List[int]]:
    n = t.rank
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, aij=-1, aji=-1):
        a[i][j] = aij
        a[j][i] = aji

    fam = t.family
    if fam in "ABCD":
        chain = n - 1 if fam != "D" else n - 2
        for i in range(chain - (0 if fam == "A" else 1)):
            link(i, i + 1)
        if fam == "A":
            pass
        elif fam == "B":
            link(n - 2, n - 1, -1, -2)
        elif fam == "C":
            link(n - 2, n - 1, -2, -1)
        else:
            link(n - 3, n - 2)
            link(n - 3, n - 1)
    elif fam == "E":
        for i, j in [(0, 2), (2, 3), (3, 4), (1, 3)] + [(k, k + 1) for k in range(4, n - 1)]:
            link(i, j)
    elif fam == "F":
        link(0, 1)
        link(1, 2, -1, -2)
        link(2, 3)
    elif fam == "G":
        link(0, 1, -3, -1)
    return a


def _simple_inner_products(a: List[List[int]]) -> List[List[Fraction]]:
    """Symmetric Gram matrix of the simple roots, long roots of length^2 2."""
    n = len(a)
    sq: List[Optional[Fraction]] = [None] * n
    sq[0] = Fraction(2)
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if j != i and a[i][j] != 0 and sq[j] is None:
                # a_ij (a_i, a_i) = a_ji (a_j, a_j)
                sq[j] = sq[i] * a[i][j] / a[j][i]
                stack.append(j)
    scale = Fraction(2) / max(sq)
    sq = [s * scale for s in sq]
    return [[a[i][j] * sq[i] / 2 for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class WeylOrbit:
    label: str  # "long" or "short"
    length_sq: Fraction
    roots: Tuple[Root, ...]
    simple_indices: Tuple[int, ...]


class RootSystem:
    """Roots, heights and the Killing form restricted to the Cartan subalgebra."""

    def __init__(self, t: LieType):
        self.type = t
        self.rank = t.rank
        self.cartan_matrix = cartan_matrix(t)
        self.inner = _simple_inner_products(self.cartan_matrix)
        n = self.rank
        self.simple_roots: Tuple[Root, ...] = tuple(
            tuple(int(i == j) for j in range(n)) for i in range(n))
        self.positive_roots: Tuple[Root, ...] = self._positive_roots()
        self.negative_roots: Tuple[Root, ...] = tuple(_neg(r) for r in self.positive_roots)
        self.all_roots: Tuple[Root, ...] = self.positive_roots + self.negative_roots
        self.root_set = frozenset(self.all_roots)
        self.heights: Dict[Root, int] = {r: sum(r) for r in self.all_roots}
        self.highest_root: Root = self.positive_roots[-1]
        # Killing form in the basis of simple coroots: sum over roots of b(h_i) b(h_j).
        self.killing_gram: List[List[Fraction]] = [
            [Fraction(sum(self.pairing(r, i) * self.pairing(r, j) for r in self.all_roots))
             for j in range(n)] for i in range(n)]

    # -- root arithmetic -------------------------------------------------

    def pairing(self, root: Root, i: int) -> int:
        """<root, alpha_i^vee>."""
        row = self.cartan_matrix[i]
        return sum(k * row[j] for j, k in enumerate(root))

    def ip(self, x: Sequence, y: Sequence) -> Fraction:
        """Inner product of two vectors in simple-root coordinates."""
        return sum((Fraction(xi) * self.inner[i][j] * yj
                    for i, xi in enumerate(x) if xi
                    for j, yj in enumerate(y) if yj), Fraction(0))

    def length_sq(self, root: Root) -> Fraction:
        return self.ip(root, root)

    def coroot(self, root: Root) -> Tuple[Fraction, ...]:
        """Coordinates of h_root in the basis of simple coroots (integers)."""
        ll = self.length_sq(root)
        return tuple(Fraction(k) * self.inner[i][i] / ll for i, k in enumerate(root))

    def is_root(self, v: Sequence[int]) -> bool:
        return tuple(v) in self.root_set

    def reflect(self, root: Root, i: int) -> Root:
        c = self.pairing(root, i)
        return tuple(k - c * int(j == i) for j, k in enumerate(root))

    def _positive_roots(self) -> Tuple[Root, ...]:
        found = set(self.simple_roots)
        level = list(self.simple_roots)
        while level:
            nxt = []
            for beta in level:
                for i in range(self.rank):
                    p = 0
                    while True:
                        cand = tuple(k - (p + 1) * int(j == i) for j, k in enumerate(beta))
                        if cand in found:
                            p += 1
                        else:
                            break
                    q = p - self.pairing(beta, i)
                    if q > 0:
                        gamma = tuple(k + int(j == i) for j, k in enumerate(beta))
                        if gamma not in found:
                            found.add(gamma)
                            nxt.append(gamma)
            level = nxt
        return tuple(sorted(found, key=lambda r: (sum(r), r)))

    # -- Killing form on the Cartan ----------------------------------------

    def killing_h(self, x: Sequence, y: Sequence) -> Fraction:
        """kappa(x, y) for x, y given in simple-coroot coordinates."""
        g = self.killing_gram
        return sum((Fraction(xi) * g[i][j] * yj for i, xi in enumerate(x) if xi
                    for j, yj in enumerate(y) if yj), Fraction(0))

    def root_on(self, root: Root, h: Sequence) -> Fraction:
        """Value of a root on a Cartan element in simple-coroot coordinates."""
        return sum((Fraction(c) * self.pairing(root, i) for i, c in enumerate(h) if c), Fraction(0))

    def kappa_coroot_sq(self, root: Root) -> Fraction:
        c = self.coroot(root)
        return self.killing_h(c, c)

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "type": self.type.name,
            "cartan_matrix": self.cartan_matrix,
            "simple_roots": [list(r) for r in self.simple_roots],
            "positive_roots": [list(r) for r in self.positive_roots],
            "highest_root": list(self.highest_root),
            "killing_gram": [[fraction_str(x) for x in row] for row in self.killing_gram],
        }


def _neg(r: Root) -> Root:
    return tuple(-k for k in r)


def _add(r: Root, s: Root) -> Root:
    return tuple(a + b for a, b in zip(r, s))


def build_root_system(t: LieType) -> RootSystem:
    return RootSystem(t)


def weyl_orbits(rs: RootSystem) -> List[WeylOrbit]:
    """Partition the roots into Weyl orbits (at most two: long and short)."""
    remaining = set(rs.all_roots)
    orbits = []
    while remaining:
        seed = min(remaining, key=lambda r: (-rs.heights[r], r))
        orbit = {seed}
        frontier = [seed]
        while frontier:
            r = frontier.pop()
            for i in range(rs.rank):
                s = rs.reflect(r, i)
                if s not in orbit:
                    orbit.add(s)
                    frontier.append(s)
        remaining -= orbit
        orbits.append(orbit)
    lengths = [rs.length_sq(next(iter(o))) for o in orbits]
    top = max(lengths)
    out = []
    for o, ll in sorted(zip(orbits, lengths), key=lambda p: -p[1]):
        simple = tuple(i for i, s in enumerate(rs.simple_roots) if s in o)
        ordered = tuple(sorted(o, key=lambda r: (-rs.heights[r], r)))
        out.append(WeylOrbit("long" if ll == top else "short", ll, ordered, simple))
    return out


class ChevAlgebra:
    """A Chevalley basis {h_i} U {e_a} with integral structure constants.

    Basis order: the simple coroots h_1..h_l, then e_a for positive roots in
    (height, lexicographic) order, then e_{-a} in the same order.
    Elements are sparse dictionaries ``{basis index: coefficient}``.
    """

    def __init__(self, rs: RootSystem):
        self.rs = rs
        self.rank = rs.rank
        self.roots = rs.all_roots
        self.dim = self.rank + len(self.roots)
        self.index: Dict[Root, int] = {r: self.rank + k for k, r in enumerate(self.roots)}
        self.root_of: Dict[int, Root] = {v: k for k, v in self.index.items()}
        self._order = {r: k for k, r in enumerate(rs.positive_roots)}
        self._n_cache: Dict[Tuple[Root, Root], int] = {}
        self.bracket_table = self._build_brackets()
        self.killing_table = self._build_killing()

    # -- labels --------------------------------------------------------------

    def label(self, idx: int) -> str:
        if idx < self.rank:
            return f"h{idx + 1}"
        r = self.root_of[idx]
        sign = "e" if sum(r) > 0 else "f"
        return sign + "[" + ",".join(str(abs(k)) for k in r) + "]"

    def weight(self, idx: int) -> Root:
        if idx < self.rank:
            return tuple([0] * self.rank)
        return self.root_of[idx]

    def e(self, root: Root) -> Element:
        return {self.index[tuple(root)]: 1}

    def f(self, root: Root) -> Element:
        return {self.index[_neg(tuple(root))]: 1}

    def h(self, i: int) -> Element:
        return {i: 1}

    # -- structure constants -----------------------------------------------

    def _p_string(self, alpha: Root, beta: Root) -> int:
        p = 0
        cur = beta
        while True:
            cur = tuple(b - a for a, b in zip(alpha, cur))
            if cur in self.rs.root_set:
                p += 1
            else:
                return p

    def _extraspecial(self, xi: Root) -> Tuple[Root, Root]:
        for alpha in self.rs.positive_roots:
            beta = tuple(x - a for x, a in zip(xi, alpha))
            if beta in self.rs.root_set and sum(beta) > 0:
                return alpha, beta
        raise AssertionError("simple roots have no extraspecial pair")

    def structure_constant(self, x: Root, y: Root) -> int:
        """N_{x,y} with [e_x, e_y] = N_{x,y} e_{x+y}; zero when x+y is not a root."""
        key = (x, y)
        if key in self._n_cache:
            return self._n_cache[key]
        s = _add(x, y)
        if s not in self.rs.root_set:
            val = 0
        else:
            hx, hy = sum(x), sum(y)
            if hx > 0 and hy > 0:
                val = self._n_positive(x, y, s)
            elif hx < 0 and hy < 0:
                val = -self.structure_constant(_neg(x), _neg(y))
            elif hx < 0:
                val = -self.structure_constant(y, x)
            else:
                # x positive, y negative; z = -(x + y) closes the triangle.
                z = _neg(s)
                ip = self.rs.length_sq
                if sum(z) > 0:
                    val = ip(z) / ip(y) * self.structure_constant(z, x)
                else:
                    val = ip(z) / ip(x) * self.structure_constant(y, z)
        if isinstance(val, Fraction):
            assert val.denominator == 1, (x, y, val)
            val = int(val)
        self._n_cache[key] = val
        return val

    def _n_positive(self, a: Root, b: Root, xi: Root) -> int:
        g, d = self._extraspecial(xi)
        p = self._p_string(g, d)
        if (a, b) == (g, d):
            return p + 1
        if (b, a) == (g, d):
            return -(p + 1)
        c, dd = _neg(g), _neg(d)
        ip = self.rs.length_sq
        n_cd = -(p + 1)
        total = Fraction(0)
        bc = _add(b, c)
        if bc in self.rs.root_set:
            total += Fraction(self.structure_constant(b, c) * self.structure_constant(a, dd)) / ip(bc)
        ca = _add(c, a)
        if ca in self.rs.root_set:
            total += Fraction(self.structure_constant(c, a) * self.structure_constant(b, dd)) / ip(ca)
        val = -total * ip(xi) / n_cd
        assert val.denominator == 1 and abs(val) == self._p_string(a, b) + 1, (a, b, val)
        return int(val)

    def _build_brackets(self) -> Dict[Tuple[int, int], Tuple[Tuple[int, int], ...]]:
        rs, table = self.rs, {}
        for r in self.roots:
            ir = self.index[r]
            for i in range(self.rank):
                c = rs.pairing(r, i)
                if c:
                    table[(i, ir)] = ((ir, c),)
                    table[(ir, i)] = ((ir, -c),)
            for s in self.roots:
                js = self.index[s]
                tot = _add(r, s)
                if all(k == 0 for k in tot):
                    cor = rs.coroot(r)
                    table[(ir, js)] = tuple((i, int(c)) for i, c in enumerate(cor) if c)
                elif tot in rs.root_set:
                    table[(ir, js)] = ((self.index[tot], self.structure_constant(r, s)),)
        return table

    def _build_killing(self) -> Dict[Tuple[int, int], Fraction]:
        rs, table = self.rs, {}
        for i in range(self.rank):
            for j in range(self.rank):
                if rs.killing_gram[i][j]:
                    table[(i, j)] = rs.killing_gram[i][j]
        for r in self.roots:
            table[(self.index[r], self.index[_neg(r)])] = rs.kappa_coroot_sq(r) / 2
        return table

    # -- operations on elements ---------------------------------------------

    def bracket(self, x: Mapping[int, object], y: Mapping[int, object]) -> Element:
        out: Element = {}
        for a, xa in x.items():
            if not xa:
                continue
            for b, yb in y.items():
                if not yb:
                    continue
                entry = self.bracket_table.get((a, b))
                if entry is None:
                    continue
                prod = xa * yb
                for c, n in entry:
                    out[c] = out.get(c, 0) + n * prod
        return {k: v for k, v in out.items() if v != 0}

    def killing(self, x: Mapping[int, object], y: Mapping[int, object]):
        tot = 0
        for a, xa in x.items():
            if not xa:
                continue
            if a < self.rank:
                for b in range(self.rank):
                    yb = y.get(b, 0)
                    if yb:
                        tot += xa * yb * self.killing_table.get((a, b), 0)
            else:
                b = self.index[_neg(self.root_of[a])]
                yb = y.get(b, 0)
                if yb:
                    tot += xa * yb * self.killing_table[(a, b)]
        return tot

    @cached_property
    def involution_permutation(self) -> np.ndarray:
        perm = np.arange(self.dim)
        for r, i in self.index.items():
            perm[self.index[_neg(r)]] = i
        return perm

    def theta(self, x: Mapping[int, object]) -> Element:
        return cartan_involution(self, x)

    def structure_tensor(self, dtype=np.int64) -> np.ndarray:
        """Dense array C with [b_a, b_b] = sum_c C[a, b, c] b_c."""
        c = np.zeros((self.dim, self.dim, self.dim), dtype=dtype)
        for (a, b), entry in self.bracket_table.items():
            for k, n in entry:
                c[a, b, k] = n
        return c

    def killing_matrix(self) -> np.ndarray:
        k = np.zeros((self.dim, self.dim))
        for (a, b), v in self.killing_table.items():
            k[a, b] = float(v)
        return k

    @cached_property
    def ad_matrices(self) -> np.ndarray:
        """ad of every basis element as a float array; ``ad[a] @ y`` = [b_a, y]."""
        return np.transpose(self.structure_tensor(np.float64), (0, 2, 1)).copy()

    def ad(self, x) -> np.ndarray:
        """Numeric matrix of ad(x) in the basis for a dense or sparse element."""
        vec = self.to_vector(x)
        return np.tensordot(vec, self.ad_matrices, axes=(0, 0))

    def to_vector(self, x, dtype=complex) -> np.ndarray:
        if isinstance(x, np.ndarray):
            return x.astype(dtype)
        v = np.zeros(self.dim, dtype=dtype)
        for k, c in x.items():
            v[k] = complex(c) if dtype is complex else float(c)
        return v

    def to_dict(self) -> dict:
        return {
            "root_system": self.rs.to_dict(),
            "basis": [self.label(i) for i in range(self.dim)],
            "brackets": [
                {"a": self.label(a), "b": self.label(b),
                 "value": {self.label(c): n for c, n in entry}}
                for (a, b), entry in sorted(self.bracket_table.items()) if a < b],
            "killing": [
                {"a": self.label(a), "b": self.label(b), "value": fraction_str(v)}
                for (a, b), v in sorted(self.killing_table.items()) if a <= b],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def build_chevalley(rs: RootSystem) -> ChevAlgebra:
    return ChevAlgebra(rs)


def _conj(c):
    if isinstance(c, complex):
        return c.conjugate()
    if isinstance(c, np.ndarray):
        return np.conj(c)
    return c  # rationals and reals


def cartan_involution(a: ChevAlgebra, x):
    """Compact-form involution: e_r -> -e_{-r}, h_i -> -h_i, conjugate-linear."""
    if isinstance(x, np.ndarray):
        return -np.conj(x[a.involution_permutation])
    out: Element = {}
    for k, c in x.items():
        if k < a.rank:
            out[k] = -_conj(c)
        else:
            out[a.index[_neg(a.root_of[k])]] = -_conj(c)
    return out


def killing(a: ChevAlgebra, x, y):
    return a.killing(x, y)


_ALGEBRA_CACHE: Dict[LieType, ChevAlgebra] = {}


def algebra(t: LieType | str) -> ChevAlgebra:
    """Cached Chevalley algebra of a type (construction is deterministic)."""
    if isinstance(t, str):
        t = LieType.parse(t)
    if t not in _ALGEBRA_CACHE:
        _ALGEBRA_CACHE[t] = ChevAlgebra(RootSystem(t))
    return _ALGEBRA_CACHE[t]
