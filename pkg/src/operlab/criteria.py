"""Anosov sufficient conditions for opers as signed margins.

Each criterion compares a second-fundamental-form bound (left side) with
an angle-controlled lower bound (right side).  ``margin = rhs - lhs``; a
point is certified when the margin is nonnegative and the angle
precondition holds.  Failing a criterion never means the holonomy is not
Anosov, so the negative outcome is reported as ``inconclusive``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .constants import constants_report
from .epgeom import (OperPoint, Status, _checked_quartic, _gradient_quotient, _angle_ratio,
                     _weighted_norm_sq, _require_cyclic, cyclic_constant, immersion_check)
from .errors import EmptyGrid, InputError, Sl2Excluded
from .hyperbolic import DiskDifferential
from .liealg import LieType
from .principal import OperAlgebra, oper_algebra


@dataclass(frozen=True)
class CriterionReport:
    lhs: float
    rhs: float
    status: Status
    which: str
    angle_condition_ok: bool
    details: Dict[str, float] = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def certified(self) -> bool:
        return self.status is Status.CERTIFIED

    def to_dict(self) -> dict:
        return {"which": self.which, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin,
                "status": self.status.value, "angle_condition_ok": self.angle_condition_ok,
                **self.details}


def _status(margin: float, angle_ok: bool) -> Status:
    if not angle_ok:
        return Status.PRECONDITION_FAILED
    return Status.CERTIFIED if margin >= 0 else Status.INCONCLUSIVE


def _short_angle(op: OperPoint, wall_angle: str = "stated") -> tuple[float, float]:
    """(coefficient of the main term, coefficient of the transverse term).

    ``"stated"`` gives (cos phi_S, sin phi_S); ``"proof"`` gives the pair
    (sin phi_S, cos phi_S) that the wall-angle estimate actually yields.
    """
    s2 = float(op.constants.short_orbit.sin_phi_sq)
    c, s = math.sqrt(1 - s2), math.sqrt(s2)
    if wall_angle == "stated":
        return c, s
    if wall_angle == "proof":
        return s, c
    raise InputError(f"unknown wall_angle {wall_angle!r}")


def _cos_phi_min(op: OperPoint) -> float:
    return math.sqrt(1 - float(op.constants.phi_min_sq))


# -- general opers ---------------------------------------------------------------


def max_c_root(oa: OperAlgebra) -> float:
    """max over the c-tensor of |c_ijkl|^(1/2)."""
    return float(np.sqrt(np.max(np.abs(oa.nb.c_array))))


def criterion_general(op: OperPoint, simplified: bool = False,
                      wall_angle: str = "stated") -> CriterionReport:
    """The criterion for arbitrary differentials.

    The default compares ``sqrt(P) + sqrt(Q)/2`` with
    ``2 sqrt(kappa(e,f)) (cos(phi_S)|1 - ||alpha_1||/2| - sin(phi_S) r)^2``,
    where ``r^2 = sum_{i>=2} ||alpha_i||^2 / 4``.  ``simplified=True`` uses the
    coarser one-line form: the quartic root is replaced by
    ``l max|c|^(1/2) sum ||alpha_i||^2``, the gradient quotient by the plain
    gradient sum, and the right side by ``2 sqrt(kappa) cos^2(2 phi_S)``
    times the squared angle denominator.  ``wall_angle`` selects the
    trigonometric weights (see :func:`_short_angle`).
    """
    cs, ss = _short_angle(op, wall_angle)
    k = op.kappa_ef
    n = op.norms
    t = 1 - n[0] / 2
    r = math.sqrt(0.25 * float(np.sum(n[1:] ** 2)))
    immersed = immersion_check(op)
    angle_ok = immersed and t > 0 and _angle_ratio(op) >= _cos_phi_min(op)
    if not simplified:
        p = _weighted_norm_sq(op) + _gradient_quotient(op)
        q = _checked_quartic(op)
        lhs = math.sqrt(p) + 0.5 * math.sqrt(q)
        inner = cs * abs(t) - ss * r
        angle_ok = angle_ok and inner > 0
        rhs = 2 * math.sqrt(k) * inner ** 2
        details = {"P": p, "Q": q, "form": 0.0}
    else:
        l = len(op.exponents)
        grad = float(np.sum(op.grad_norms ** 2))
        num = math.sqrt(_weighted_norm_sq(op) + grad) + 0.5 * l * max_c_root(op.algebra) * float(np.sum(n ** 2))
        den = t * t + r * r
        lhs = num / den if den > 0 else math.inf
        cos2 = cs * cs - ss * ss
        rhs = 2 * math.sqrt(k) * cos2 * cos2
        details = {"form": 1.0}
    return CriterionReport(lhs, rhs, _status(rhs - lhs, angle_ok), "general", angle_ok, details)


# -- cyclic opers ------------------------------------------------------------------


def _cyclic_sides(x: float, g: float, ml: int, c: float, k: float, cs: float, ss: float):
    lhs = 2 * ml * x * x + 2 * g * g / (1 + x * x / 4) + c * x ** 4
    inner = cs - ss * x / 2
    rhs = 16 * k * inner ** 4
    return lhs, rhs, inner


def criterion_cyclic(op: OperPoint, c_value: str = "stated",
                     wall_angle: str = "stated") -> CriterionReport:
    """The criterion for cyclic opers.

    ``c_value="stated"`` uses the closed-form constant c_l; ``"bracket"``
    uses the sharp c_llll from the c-tensor (smaller, so more permissive and
    still sound).  The angle precondition is ``1/(1 + ||alpha||^2/4) >= cos(phi_min)``
    and the factor ``cos(phi_S) - sin(phi_S)||alpha||/2`` must stay positive.
    """
    _require_cyclic(op)
    cs, ss = _short_angle(op, wall_angle)
    x = float(op.norms[-1])
    g = float(op.grad_norms[-1])
    c = cyclic_constant(op, c_value)
    lhs, rhs, inner = _cyclic_sides(x, g, op.exponents[-1], c, op.kappa_ef, cs, ss)
    angle_ok = 1 / (1 + x * x / 4) >= _cos_phi_min(op) and inner > 0
    return CriterionReport(lhs, rhs, _status(rhs - lhs, angle_ok), "cyclic", angle_ok,
                           {"c_llll": c})


def cyclic_margin(t: LieType | str | OperAlgebra, x: float, g: float = 0.0,
                  c_value: str = "stated", wall_angle: str = "stated") -> float:
    oa = t if isinstance(t, OperAlgebra) else oper_algebra(t)
    return criterion_cyclic(OperPoint.cyclic(oa, x, g), c_value, wall_angle).margin


def cyclic_threshold(t: LieType | str | OperAlgebra, c_value: str = "stated",
                     tol: float = 1e-9, wall_angle: str = "stated") -> float:
    """r*: the largest constant norm (zero gradient) certified by the cyclic criterion.

    The margin is strictly decreasing in the norm while the angle factor is
    positive, so bisection on the certified status finds a unique root.
    """
    oa = t if isinstance(t, OperAlgebra) else oper_algebra(t)
    if len(oa.p.exponents) == 1:
        raise Sl2Excluded("the cyclic criterion excludes sl2")

    def ok(x):
        return criterion_cyclic(OperPoint.cyclic(oa, x), c_value, wall_angle).certified

    lo, hi = 0.0, 1.0
    while ok(hi):
        lo, hi = hi, 2 * hi
        if hi > 1e6:
            raise InputError("no finite threshold")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


# -- sup-norm criterion ---------------------------------------------------------------


def cauchy_threshold(t: LieType | str, C: float, angle: str = "theta",
                     gradient: str = "linear") -> float:
    """Largest admissible ||alpha||^2 from the biquadratic inequality.

    ``x = ||alpha||^2`` must satisfy ``c_l x^2 + 2(m_l + G) x <= 16 kappa(e,f) w^4``
    where ``G = C`` (``gradient="linear"``) or ``C^2`` (``"squared"``) and
    ``w = cos(phi_theta)`` (``angle="theta"``), ``cos(2 phi_theta)``
    (``"two_theta"``) or ``cos(2 phi_S)`` (``"two_short"``).
    """
    rep = constants_report(t)
    if rep.c_l is None:
        raise Sl2Excluded("the sup-norm criterion is for cyclic opers of rank >= 2")
    if C < 0:
        raise InputError("C must be nonnegative")
    s_theta = float(rep.sin_phi_theta_sq)
    if angle == "theta":
        w2 = 1 - s_theta
    elif angle == "two_theta":
        w2 = (1 - 2 * s_theta) ** 2
    elif angle == "two_short":
        w2 = (1 - 2 * float(rep.short_orbit.sin_phi_sq)) ** 2
    else:
        raise InputError(f"unknown angle convention {angle!r}")
    if gradient == "linear":
        gterm = C
    elif gradient == "squared":
        gterm = C * C
    else:
        raise InputError(f"unknown gradient convention {gradient!r}")
    ml = rep.exponent_top
    c = float(rep.c_l)
    k = float(rep.kappa_ef)
    b = ml + gterm
    return (-b + math.sqrt(b * b + 16 * c * k * w2 * w2)) / c


def criterion_cauchy(sup_norm: float, C: float, t: LieType | str, angle: str = "theta",
                     gradient: str = "linear") -> CriterionReport:
    """Certify a cyclic differential from its sup norm and the constant C(X)."""
    if sup_norm < 0:
        raise InputError("sup_norm must be nonnegative")
    thr = cauchy_threshold(t, C, angle, gradient)
    lhs = sup_norm * sup_norm
    return CriterionReport(lhs, thr, _status(thr - lhs, True), "cauchy", True, {"C": C})


# -- grids and the connected-component witness ----------------------------------------


Criterion = Callable[[OperPoint], CriterionReport]


def _resolve(criterion: str | Criterion, **opts) -> Criterion:
    if callable(criterion):
        return criterion
    if criterion == "cyclic":
        return lambda op: criterion_cyclic(op, **opts)
    if criterion == "general":
        return lambda op: criterion_general(op, **opts)
    raise InputError(f"unknown criterion {criterion!r}")


@dataclass
class GridReport:
    points: List[complex]
    reports: List[CriterionReport]
    homotopy_levels: List[float]
    failed_levels: List[float]

    @property
    def pointwise_certified(self) -> bool:
        return all(r.certified for r in self.reports)

    @property
    def status(self) -> Status:
        if self.pointwise_certified and not self.failed_levels:
            return Status.CERTIFIED
        if any(r.status is Status.PRECONDITION_FAILED for r in self.reports):
            return Status.PRECONDITION_FAILED
        return Status.INCONCLUSIVE

    @property
    def certified(self) -> bool:
        return self.status is Status.CERTIFIED

    @property
    def min_margin(self) -> float:
        return min(r.margin for r in self.reports)

    def summary(self) -> dict:
        margins = [r.margin for r in self.reports]
        return {"status": self.status.value, "points": len(self.points),
                "certified_points": sum(r.certified for r in self.reports),
                "min_margin": min(margins), "max_margin": max(margins),
                "homotopy_levels": len(self.homotopy_levels),
                "failed_levels": self.failed_levels}


def certify_grid(t: LieType | str | OperAlgebra, diffs: Sequence[Optional[DiskDifferential]],
                 grid: Sequence[complex], criterion: str | Criterion = "cyclic",
                 levels: int = 16, **opts) -> GridReport:
    """Pointwise certification plus the straight-line homotopy witness.

    The homotopy scales every differential by ``k / levels`` for
    ``k = 1..levels`` and requires every grid point to stay certified, a
    sampled witness that the differentials lie in the component of 0.
    """
    oa = t if isinstance(t, OperAlgebra) else oper_algebra(t)
    pts = [complex(z) for z in grid]
    if not pts:
        raise EmptyGrid("the grid has no points")
    crit = _resolve(criterion, **opts)
    base = [OperPoint.from_differentials(oa, diffs, z) for z in pts]
    reports = [crit(op) for op in base]
    lv = [k / levels for k in range(1, levels + 1)]
    failed = []
    for s in lv:
        if s == 1.0:
            ok = all(r.certified for r in reports)
        else:
            ok = all(crit(op.scaled(s)).certified for op in base)
        if not ok:
            failed.append(s)
    return GridReport(pts, reports, lv, failed)
