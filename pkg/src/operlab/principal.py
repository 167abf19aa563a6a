"""Principal sl2 triples, the induced grading, exponents and normalized
highest-weight vectors.

The principal triple has ``e = sum sqrt(r_i) e_{alpha_i}`` with rational
``r_i``. To stay inside exact rational arithmetic we work in a *rational
model*: conjugating by the positive torus element ``t`` that scales ``e_b`` by
``prod r_i^{k_i/2}`` turns ``(e, h, f)`` into ``(e0, h, f0)`` with
``e0 = sum e_{alpha_i}`` and ``f0 = sum r_i f_{alpha_i}``. The Killing form is
invariant under ``Ad(t)`` and the compact involution becomes the rational,
conjugate-linear map ``theta'(e_b) = -R(b) e_{-b}`` with ``R(b) = prod r_i^{k_i}``.
Every quantity built from Killing pairings of ``x`` with ``theta x`` is
therefore an exact rational (up to the square roots introduced by the
normalization of the highest-weight vectors, tracked as radicands).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from .errors import DegenerateKernel, IndexOutOfRange, SingularCartan
from .exact import Surd, fraction_str, nullspace, solve
from .liealg import ChevAlgebra, Element, LieType, algebra, cartan_involution


class PrincipalData:
    """The triple (e, h, f), the grading by ad(h) and the exponents."""

    def __init__(self, alg: ChevAlgebra):
        self.alg = alg
        rs = alg.rs
        self.rank = rs.rank
        a = rs.cartan_matrix
        # alpha_j(h) = sum_i r_i a_ij = 1 for every simple root j.
        try:
            r = solve([[a[i][j] for i in range(self.rank)] for j in range(self.rank)],
                      [Fraction(1)] * self.rank)
        except ZeroDivisionError as exc:  # pragma: no cover - valid types are never singular
            raise SingularCartan(str(exc)) from exc
        self.r_coeffs: Tuple[Fraction, ...] = tuple(r)
        self.h: Element = {i: ri for i, ri in enumerate(r)}
        simple = rs.simple_roots
        self.e0: Element = {alg.index[s]: Fraction(1) for s in simple}
        self.f0: Element = {alg.index[tuple(-k for k in s)]: ri for s, ri in zip(simple, r)}
        self.kappa_ef: Fraction = Fraction(alg.killing(self.e0, self.f0))
        self.kappa_hh: Fraction = Fraction(alg.killing(self.h, self.h))
        self.grading: Dict[int, Tuple[int, ...]] = self._grading()
        self.exponents: Tuple[int, ...] = self._exponents()
        self._verify()

    # -- construction --------------------------------------------------------

    def _grading(self) -> Dict[int, Tuple[int, ...]]:
        g: Dict[int, List[int]] = {0: list(range(self.rank))}
        for idx, root in self.alg.root_of.items():
            g.setdefault(sum(root), []).append(idx)
        return {k: tuple(sorted(v)) for k, v in sorted(g.items())}

    def _exponents(self) -> Tuple[int, ...]:
        out: List[int] = []
        top = max(self.grading)
        for i in range(1, top + 1):
            mult = len(self.grading.get(i, ())) - len(self.grading.get(i + 1, ()))
            out.extend([i] * mult)
        return tuple(out)

    def _verify(self) -> None:
        br = self.alg.bracket
        assert br(self.h, self.e0) == _clean(self.e0), "[h,e] != e"
        assert br(self.h, self.f0) == _clean({k: -v for k, v in self.f0.items()}), "[h,f] != -f"
        assert br(self.e0, self.f0) == _clean(self.h), "[e,f] != h"
        assert self.kappa_hh == self.kappa_ef
        assert self.exponents[0] == 1 and self.exponents.count(1) == 1
        assert sum(2 * m + 1 for m in self.exponents) == self.alg.dim

    # -- twisted involution and the passage to the true triple ----------------

    def torus_weight(self, idx: int) -> Fraction:
        """R(b) = prod r_i^{k_i} for the basis vector e_b (1 on the Cartan)."""
        if idx < self.rank:
            return Fraction(1)
        val = Fraction(1)
        for ri, k in zip(self.r_coeffs, self.alg.root_of[idx]):
            val *= ri ** k
        return val

    def theta_model(self, x: Mapping[int, object]) -> Element:
        """The adapted involution transported to the rational model."""
        y = cartan_involution(self.alg, x)
        # cartan_involution sends e_b to -e_{-b}; multiply by R(b) = 1/R(-b).
        return {k: v / self.torus_weight(k) for k, v in y.items()}

    @cached_property
    def torus_scale(self) -> np.ndarray:
        """sqrt(R(b)) for each basis index: the action of Ad(t)."""
        return np.array([math.sqrt(self.torus_weight(i)) for i in range(self.alg.dim)])

    def to_true(self, x) -> np.ndarray:
        """Numeric coordinates of Ad(t) x, i.e. the element in the true triple."""
        return self.alg.to_vector(x) * self.torus_scale

    @cached_property
    def e(self) -> np.ndarray:
        return self.to_true(self.e0)

    @cached_property
    def f(self) -> np.ndarray:
        return self.to_true(self.f0)

    @cached_property
    def h_vec(self) -> np.ndarray:
        return self.to_true(self.h)

    @property
    def e_radicands(self) -> Dict[int, Fraction]:
        """e = sum_i sqrt(r_i) e_{alpha_i}: basis index -> radicand r_i."""
        return {self.alg.index[s]: ri for s, ri in zip(self.alg.rs.simple_roots, self.r_coeffs)}

    @property
    def top_exponent(self) -> int:
        return self.exponents[-1]

    def grade_of(self, idx: int) -> int:
        return 0 if idx < self.rank else sum(self.alg.root_of[idx])

    def to_dict(self) -> dict:
        return {
            "type": self.alg.rs.type.name,
            "r_coeffs": [fraction_str(x) for x in self.r_coeffs],
            "exponents": list(self.exponents),
            "kappa_ef": fraction_str(self.kappa_ef),
            "kappa_hh": fraction_str(self.kappa_hh),
            "grading_dims": {str(k): len(v) for k, v in self.grading.items()},
        }


def _clean(x: Mapping[int, object]) -> Element:
    return {k: v for k, v in x.items() if v != 0}


def principal_triple(alg: ChevAlgebra) -> PrincipalData:
    return PrincipalData(alg)


def exponents(p: PrincipalData) -> Tuple[int, ...]:
    return p.exponents


class NormalizedBasis:
    """Highest-weight vectors e_{m_1} = e, ..., e_{m_l} in ker ad(e).

    ``model_vectors[i]`` lives in the rational model and
    ``e_{m_i} = sqrt(scale_sq[i]) * Ad(t) model_vectors[i]``.
    """

    def __init__(self, p: PrincipalData):
        self.p = p
        alg = p.alg
        self.exponents = p.exponents
        self.model_vectors: List[Element] = []
        self.scale_sq: List[Fraction] = []
        self.gram_schmidt_levels: List[int] = []
        for m in sorted(set(p.exponents)):
            mult = p.exponents.count(m)
            vecs = self._kernel_at(m)
            if len(vecs) != mult:
                raise DegenerateKernel(f"level {m}: kernel dim {len(vecs)} != multiplicity {mult}")
            if m == 1:
                vecs = [dict(p.e0)]
            if mult > 1:
                vecs = self._gram_schmidt(vecs)
                self.gram_schmidt_levels.append(m)
            for v in vecs:
                v = _positive_phase(v)
                norm = self.form(v, v)
                self.model_vectors.append(v)
                self.scale_sq.append(p.kappa_ef / norm)
        assert self.scale_sq[0] == 1

    def form(self, x: Mapping[int, object], y: Mapping[int, object]) -> Fraction:
        """-kappa(x, theta y) in the rational model (positive definite on reals)."""
        return -Fraction(self.p.alg.killing(x, self.p.theta_model(y)))

    def _kernel_at(self, m: int) -> List[Element]:
        p, alg = self.p, self.p.alg
        src = p.grading.get(m, ())
        dst = p.grading.get(m + 1, ())
        if not dst:
            return [{i: Fraction(1)} for i in src] if len(src) else []
        col_images = [alg.bracket(p.e0, {i: Fraction(1)}) for i in src]
        rows = [[Fraction(img.get(j, 0)) for img in col_images] for j in dst]
        basis = nullspace(rows)
        return [{src[k]: c for k, c in enumerate(vec) if c != 0} for vec in basis]

    def _gram_schmidt(self, vecs: List[Element]) -> List[Element]:
        out: List[Element] = []
        for v in vecs:
            w = dict(v)
            for u in out:
                coef = self.form(w, u) / self.form(u, u)
                for k, c in u.items():
                    w[k] = w.get(k, 0) - coef * c
            out.append(_clean(w))
        return out

    @cached_property
    def e_vectors(self) -> List[np.ndarray]:
        return [math.sqrt(s) * self.p.to_true(v) for v, s in zip(self.model_vectors, self.scale_sq)]

    @property
    def l(self) -> int:
        return len(self.exponents)

    # -- the structural tensor ------------------------------------------------

    @cached_property
    def _theta_brackets(self) -> Dict[Tuple[int, int], Element]:
        alg, th = self.p.alg, self.p.theta_model
        vs = self.model_vectors
        return {(i, j): alg.bracket(vs[i], th(vs[j]))
                for i in range(self.l) for j in range(self.l)}

    def c_exact(self, i: int, j: int, k: int, l: int) -> Surd:
        """c_ijkl (1-based indices) as an exact surd."""
        n = self.l
        for x in (i, j, k, l):
            if not 1 <= x <= n:
                raise IndexOutOfRange(f"index {x} outside 1..{n}")
        i, j, k, l = i - 1, j - 1, k - 1, l - 1
        m = self.exponents
        if m[i] + m[k] != m[j] + m[l]:
            return Surd(Fraction(0))
        b = self._theta_brackets
        val = Fraction(self.p.alg.killing(b[(i, j)], b[(k, l)])) / self.p.kappa_ef
        rad = self.scale_sq[i] * self.scale_sq[j] * self.scale_sq[k] * self.scale_sq[l]
        return Surd(val, rad).simplified()

    @cached_property
    def c_array(self) -> np.ndarray:
        """Dense float array c[i, j, k, l] with 0-based indices."""
        n = self.l
        c = np.zeros((n, n, n, n))
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for l in range(n):
                        c[i, j, k, l] = float(self.c_exact(i + 1, j + 1, k + 1, l + 1))
        return c

    def to_dict(self) -> dict:
        entries = []
        n = self.l
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                for k in range(1, n + 1):
                    for l in range(1, n + 1):
                        s = self.c_exact(i, j, k, l)
                        if s.coef != 0:
                            entries.append({"ijkl": [i, j, k, l], "value": str(s), "float": float(s)})
        return {
            "exponents": list(self.exponents),
            "scale_sq": [fraction_str(s) for s in self.scale_sq],
            "gram_schmidt_levels": self.gram_schmidt_levels,
            "c_tensor": entries,
        }


def _positive_phase(v: Element) -> Element:
    lead = v[min(v)]
    return dict(v) if lead > 0 else {k: -c for k, c in v.items()}


def highest_weight_basis(p: PrincipalData) -> NormalizedBasis:
    return NormalizedBasis(p)


def c_tensor(p: PrincipalData, nb: NormalizedBasis, i: int, j: int, k: int, l: int) -> float:
    return float(nb.c_exact(i, j, k, l))


@dataclass
class OperAlgebra:
    """Bundle of the algebra data one needs to evaluate oper geometry."""

    type: LieType
    alg: ChevAlgebra
    p: PrincipalData
    nb: NormalizedBasis


_BUNDLES: Dict[LieType, OperAlgebra] = {}


def oper_algebra(t: LieType | str) -> OperAlgebra:
    if isinstance(t, str):
        t = LieType.parse(t)
    if t not in _BUNDLES:
        alg = algebra(t)
        p = PrincipalData(alg)
        _BUNDLES[t] = OperAlgebra(t, alg, p, NormalizedBasis(p))
    return _BUNDLES[t]
