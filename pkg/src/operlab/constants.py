"""Scalar Lie-theoretic constants: orbit norms, wall angles, threshold
constants and the reference table of simple types.

Everything here is computed from the root system alone (no structure
constants), so even E8 is instantaneous. Squared quantities are exact
rationals; square roots are only taken when a float is requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import Sl2Excluded, TableMismatch
from .exact import Surd, fraction_str, solve
from .liealg import LieType, RootSystem, WeylOrbit, all_types, weyl_orbits


@dataclass(frozen=True)
class CartanData:
    """The principal semisimple element seen from the root system.

    ``h_coroot`` holds the coordinates of h in the basis of simple coroots,
    which are also the values omega_i(h) of the fundamental weights.
    """

    rs: RootSystem
    h_coroot: Tuple[Fraction, ...]
    kappa_hh: Fraction
    kappa_ef: Fraction


@lru_cache(maxsize=None)
def cartan_data(rs: RootSystem) -> CartanData:
    n = rs.rank
    a = rs.cartan_matrix
    r = solve([[a[i][j] for i in range(n)] for j in range(n)], [Fraction(1)] * n)
    h = tuple(r)
    kappa_hh = rs.killing_h(h, h)
    # kappa(e, f) = sum_i r_i kappa(e_i, f_i) and kappa(e_a, f_a) = kappa(h_a, h_a) / 2.
    kappa_ef = sum((ri * rs.kappa_coroot_sq(s) / 2 for ri, s in zip(r, rs.simple_roots)), Fraction(0))
    return CartanData(rs, h, kappa_hh, kappa_ef)


def _orbit_root(orbit: WeylOrbit) -> tuple:
    return orbit.roots[0]


def theta_norm_sq(rs: RootSystem, orbit: WeylOrbit) -> Fraction:
    """Killing-dual squared length 4 / kappa(h_a, h_a) of the orbit's roots."""
    values = {Fraction(4) / rs.kappa_coroot_sq(r) for r in orbit.roots}
    assert len(values) == 1, "norm must be constant on a Weyl orbit"
    return values.pop()


def sin_phi_simple_sq(rs: RootSystem, i: int) -> Fraction:
    """sin^2 of the angle between h and the wall ker(alpha_i).

    Computed from the general angle formula: the wall's normal is h_{alpha_i}
    so sin(phi) = kappa(h, h_i) / sqrt(kappa(h_i, h_i) kappa(h, h)).
    """
    cd = cartan_data(rs)
    hi = rs.coroot(rs.simple_roots[i])
    num = rs.killing_h(cd.h_coroot, hi)
    return num * num / (rs.killing_h(hi, hi) * cd.kappa_hh)


def sin_phi_simple_sq_closed(rs: RootSystem, i: int) -> Fraction:
    """The same quantity from alpha_i(h) = 1: sin^2 = kappa(h_i, h_i) / (4 kappa(h, h))."""
    return rs.kappa_coroot_sq(rs.simple_roots[i]) / (4 * cartan_data(rs).kappa_hh)


def sin_phi_orbit(rs: RootSystem, orbit: WeylOrbit) -> Fraction:
    """sin^2 of the minimal angle between h and the walls of the orbit's simple roots."""
    if not orbit.simple_indices:
        raise ValueError("orbit contains no simple root")
    return min(sin_phi_simple_sq(rs, i) for i in orbit.simple_indices)


def phi_min(rs: RootSystem) -> Fraction:
    """sin^2 of the minimal angle between h and any chamber wall."""
    return min(sin_phi_simple_sq(rs, i) for i in range(rs.rank))


def sin_phi_theta(rs: RootSystem) -> Fraction:
    """sin^2 of the angle between h and ker(theta), theta the highest root."""
    cd = cartan_data(rs)
    th = rs.highest_root
    k_tt = rs.kappa_coroot_sq(th)
    k_ht = Fraction(sum(th)) * k_tt / 2
    return k_ht * k_ht / (k_tt * cd.kappa_hh)


def dominant_root(rs: RootSystem, orbit: WeylOrbit) -> tuple:
    """The unique root of the orbit whose coroot lies in the closed fundamental chamber."""
    dom = [r for r in orbit.roots if all(rs.pairing(r, i) >= 0 for i in range(rs.rank))]
    assert len(dom) == 1, dom
    return dom[0]


def davalo_multiplier(rs: RootSystem, orbit: WeylOrbit) -> int:
    """min |b(h_Theta)| over roots b with nonzero pairing (always an integer)."""
    hc = rs.coroot(dominant_root(rs, orbit))
    vals = {abs(rs.root_on(b, hc)) for b in rs.all_roots}
    vals.discard(0)
    m = min(vals)
    assert m.denominator == 1
    return int(m)


def davalo_c(rs: RootSystem, orbit: WeylOrbit) -> Surd:
    """c_Theta = m / (2 ||Theta||) as the surd (m/2) * sqrt(1/||Theta||^2)."""
    m = davalo_multiplier(rs, orbit)
    return Surd(Fraction(m, 2), 1 / theta_norm_sq(rs, orbit)).simplified()


def c_l_value(rs: RootSystem) -> Fraction:
    """c_l = m_l^2 kappa(h, h) / sin^2(phi_theta), with m_l the height of theta."""
    if rs.type.family == "A" and rs.rank == 1:
        raise Sl2Excluded("the cyclic constant is not defined for sl2")
    ml = sum(rs.highest_root)
    return ml * ml * cartan_data(rs).kappa_hh / sin_phi_theta(rs)


def chern_pairings(rs: RootSystem) -> List[dict]:
    """omega_i(h) for the fundamental weights, with integrality of it and its double."""
    out = []
    for i, v in enumerate(cartan_data(rs).h_coroot):
        out.append({"index": i + 1, "value": v, "is_integer": v.denominator == 1,
                    "double_is_integer": (2 * v).denominator == 1})
    return out


def coxeter_number(rs: RootSystem) -> int:
    return sum(rs.highest_root) + 1


def dual_coxeter_number(rs: RootSystem) -> int:
    """1 + sum of the coefficients of the highest coroot in simple coroots."""
    return int(1 + sum(rs.coroot(rs.highest_root)))


@dataclass
class OrbitConstants:
    label: str
    simple_indices: Tuple[int, ...]
    norm_sq: Fraction
    sin_phi_sq: Fraction
    davalo_c: Surd

    def to_dict(self) -> dict:
        return {
            "orbit": self.label,
            "simple_roots": [i + 1 for i in self.simple_indices],
            "norm_sq": fraction_str(self.norm_sq),
            "sin_phi_sq": fraction_str(self.sin_phi_sq),
            "davalo_c": str(self.davalo_c),
            "davalo_c_float": float(self.davalo_c),
        }


@dataclass
class ConstantsReport:
    type: LieType
    orbits: List[OrbitConstants]
    phi_min_sq: Fraction
    sin_phi_theta_sq: Fraction
    c_l: Optional[Fraction]
    kappa_ef: Fraction
    kappa_hh: Fraction
    chern: List[dict]
    exponent_top: int
    coxeter: int
    dual_coxeter: int

    def orbit(self, label: str) -> OrbitConstants:
        for o in self.orbits:
            if o.label == label:
                return o
        raise KeyError(label)

    @property
    def short_orbit(self) -> OrbitConstants:
        """Theta_S: the short orbit, or the unique orbit for simply laced types."""
        return self.orbits[-1]

    def to_dict(self) -> dict:
        return {
            "type": self.type.name,
            "orbits": [o.to_dict() for o in self.orbits],
            "phi_min_sin_sq": fraction_str(self.phi_min_sq),
            "sin_phi_theta_sq": fraction_str(self.sin_phi_theta_sq),
            "c_l": None if self.c_l is None else fraction_str(self.c_l),
            "kappa_ef": fraction_str(self.kappa_ef),
            "kappa_hh": fraction_str(self.kappa_hh),
            "chern_pairings": [{**c, "value": fraction_str(c["value"])} for c in self.chern],
            "coxeter_number": self.coxeter,
            "dual_coxeter_number": self.dual_coxeter,
        }


@lru_cache(maxsize=None)
def _root_system(t: LieType) -> RootSystem:
    return RootSystem(t)


def constants_report(t: LieType | str) -> ConstantsReport:
    if isinstance(t, str):
        t = LieType.parse(t)
    return _constants_report(t)


@lru_cache(maxsize=None)
def _constants_report(t: LieType) -> ConstantsReport:
    rs = _root_system(t)
    cd = cartan_data(rs)
    orbits = [OrbitConstants(o.label, o.simple_indices, theta_norm_sq(rs, o),
                             sin_phi_orbit(rs, o), davalo_c(rs, o))
              for o in weyl_orbits(rs)]
    is_sl2 = t.family == "A" and t.rank == 1
    return ConstantsReport(
        type=t, orbits=orbits, phi_min_sq=phi_min(rs), sin_phi_theta_sq=sin_phi_theta(rs),
        c_l=None if is_sl2 else c_l_value(rs), kappa_ef=cd.kappa_ef, kappa_hh=cd.kappa_hh,
        chern=chern_pairings(rs), exponent_top=sum(rs.highest_root),
        coxeter=coxeter_number(rs), dual_coxeter=dual_coxeter_number(rs))


# -- reference table ---------------------------------------------------------

F = Fraction


@dataclass(frozen=True)
class TableRow:
    """A row of the reference table: family, orbit label and rank-dependent formulas."""

    name: str
    family: str
    orbit: str
    norm_sq: Callable[[int], Fraction]
    sin_phi_sq: Callable[[int], Fraction]
    ranks: Tuple[int, ...]


def _ranks(lo: int, hi: int = 8) -> Tuple[int, ...]:
    return tuple(range(lo, hi + 1))


TABLE_ROWS: Tuple[TableRow, ...] = (
    TableRow("A_n", "A", "long", lambda n: F(1, n + 1), lambda n: F(6, n * (n + 1) * (n + 2)), _ranks(1)),
    TableRow("B_n (Long)", "B", "long", lambda n: F(1, 2 * n - 1), lambda n: F(3, n * (n + 1) * (2 * n + 1)), _ranks(2)),
    TableRow("B_n (Short)", "B", "short", lambda n: F(1, 4 * n - 2), lambda n: F(6, n * (n + 1) * (2 * n + 1)), _ranks(2)),
    TableRow("C_n (Short)", "C", "short", lambda n: F(1, 2 * n + 2), lambda n: F(6, n * (2 * n - 1) * (2 * n + 1)), _ranks(2)),
    TableRow("C_n (Long)", "C", "long", lambda n: F(1, n + 1), lambda n: F(3, n * (2 * n - 1) * (2 * n + 1)), _ranks(2)),
    TableRow("D_n", "D", "long", lambda n: F(1, 2 * n - 2), lambda n: F(3, n * (n - 1) * (2 * n - 1)), _ranks(3)),
    TableRow("E_6", "E", "long", lambda n: F(1, 12), lambda n: F(1, 312), (6,)),
    TableRow("E_7", "E", "long", lambda n: F(1, 18), lambda n: F(1, 798), (7,)),
    TableRow("E_8", "E", "long", lambda n: F(1, 30), lambda n: F(1, 2480), (8,)),
    TableRow("F_4 (Long)", "F", "long", lambda n: F(1, 9), lambda n: F(1, 156), (4,)),
    TableRow("F_4 (Short)", "F", "short", lambda n: F(1, 18), lambda n: F(1, 78), (4,)),
    TableRow("G_2 (Long)", "G", "long", lambda n: F(1, 4), lambda n: F(1, 56), (2,)),
    TableRow("G_2 (Short)", "G", "short", lambda n: F(1, 12), lambda n: F(3, 56), (2,)),
)


@dataclass
class TableCheck:
    row: str
    type: str
    expected: Tuple[Fraction, Fraction]
    computed: Tuple[Fraction, Fraction]

    @property
    def ok(self) -> bool:
        return self.expected == self.computed


def emit_table(max_rank: int = 8, strict: bool = False) -> List[TableCheck]:
    """Compare computed (norm^2, sin^2 phi) with every reference row at every admissible rank.

    With ``strict`` the first disagreement raises :class:`TableMismatch`.
    """
    checks: List[TableCheck] = []
    for row in TABLE_ROWS:
        for n in row.ranks:
            if n > max_rank:
                continue
            t = LieType(row.family, n)
            rep = constants_report(t)
            o = rep.orbit(row.orbit)
            chk = TableCheck(row.name, t.name, (row.norm_sq(n), row.sin_phi_sq(n)),
                             (o.norm_sq, o.sin_phi_sq))
            if strict and not chk.ok:
                raise TableMismatch(f"{row.name} at {t.name}", chk.expected, chk.computed)
            checks.append(chk)
    return checks


def rows_for_type(t: LieType) -> List[TableRow]:
    return [r for r in TABLE_ROWS if r.family == t.family and t.rank in r.ranks]


def verify_type(t: LieType) -> List[TableCheck]:
    out = []
    rep = constants_report(t)
    for row in rows_for_type(t):
        o = rep.orbit(row.orbit)
        chk = TableCheck(row.name, t.name, (row.norm_sq(t.rank), row.sin_phi_sq(t.rank)),
                         (o.norm_sq, o.sin_phi_sq))
        if not chk.ok:
            raise TableMismatch(f"{row.name} at {t.name}", chk.expected, chk.computed)
        out.append(chk)
    return out


def markdown_table(reports: Sequence[ConstantsReport]) -> str:
    lines = ["| type | orbit | norm^2 | sin^2 phi | c_Theta |", "|---|---|---|---|---|"]
    for rep in reports:
        for o in rep.orbits:
            lines.append(f"| {rep.type.name} | {o.label} | {fraction_str(o.norm_sq)} | "
                         f"{fraction_str(o.sin_phi_sq)} | {o.davalo_c} |")
    return "\n".join(lines)
