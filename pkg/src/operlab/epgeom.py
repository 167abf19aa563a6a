"""Pointwise geometry of the Epstein-Poincare surface of an oper.

An oper on the disk is encoded by holomorphic differentials ``alpha_i`` of
degree ``m_i + 1`` (one per exponent).  At a single point ``z`` the induced
metric, the Levi-Civita curvature term and the second-fundamental-form
bounds only depend on the values ``alpha_i(z)``, the Chern derivatives
``nabla alpha_i(z)`` and ``H(z)``; :class:`OperPoint` stores exactly that.

Conventions used throughout:

* ``||alpha_i|| = |alpha_i| / H^((m_i+1)/2)`` and
  ``||nabla alpha_i|| = |nabla alpha_i| / H^((m_i+2)/2)``.
* A complexified metric is ``a dz^2 + b dz dzbar + conj(a) dzbar^2``, whose
  real form is ``b |dz|^2 + 2 Re(a dz^2)``.
* Second-fundamental-form norms refer to the half-length direction vector
  ``u = (e^{-i phi} d_z + e^{i phi} d_zbar) / 2``; the coordinate unit vector
  ``cos(phi) d_x + sin(phi) d_y`` is ``2u`` and has 16 times the squared norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .constants import ConstantsReport, constants_report
from .errors import (DegenerateMetric, InputError, NegativeRadicand, NotCyclic,
                     NotImmersed, Sl2Excluded)
from .hyperbolic import DiskDifferential, density, dlog_density
from .liealg import LieType, cartan_involution
from .principal import OperAlgebra, oper_algebra

ZERO_TOL = 1e-12


class Status(str, Enum):
    CERTIFIED = "certified"
    INCONCLUSIVE = "inconclusive"
    PRECONDITION_FAILED = "precondition-failed"


# -- the data of an oper at one point ---------------------------------------


@dataclass(frozen=True)
class OperPoint:
    """Values of the differentials and their Chern derivatives at one point."""

    algebra: OperAlgebra
    H: float
    values: Tuple[complex, ...]
    chern_values: Tuple[complex, ...]
    z: Optional[complex] = None

    def __post_init__(self):
        l = len(self.algebra.p.exponents)
        if len(self.values) != l or len(self.chern_values) != l:
            raise InputError(f"expected {l} differentials, got {len(self.values)}")
        if not self.H > 0:
            raise InputError("the density H must be positive")
        object.__setattr__(self, "values", tuple(complex(v) for v in self.values))
        object.__setattr__(self, "chern_values", tuple(complex(v) for v in self.chern_values))

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_differentials(cls, t: LieType | str | OperAlgebra,
                           diffs: Sequence[Optional[DiskDifferential]], z: complex) -> "OperPoint":
        """Evaluate differentials at ``z``; ``None`` entries stand for zero."""
        oa = t if isinstance(t, OperAlgebra) else oper_algebra(t)
        ms = oa.p.exponents
        if len(diffs) != len(ms):
            raise InputError(f"{oa.type.name} needs {len(ms)} differentials, got {len(diffs)}")
        vals, ders = [], []
        for d, m in zip(diffs, ms):
            if d is None:
                vals.append(0j)
                ders.append(0j)
                continue
            if d.degree != m + 1:
                raise InputError(f"differential for exponent {m} must have degree {m + 1}, got {d.degree}")
            vals.append(complex(d.value(z)))
            ders.append(complex(d.chern(z)))
        return cls(oa, float(density(z)), tuple(vals), tuple(ders), complex(z))

    @classmethod
    def from_norms(cls, t: LieType | str | OperAlgebra, norms: Sequence[float],
                   grad_norms: Optional[Sequence[float]] = None, z: complex = 0j,
                   phases: Optional[Sequence[complex]] = None) -> "OperPoint":
        """A point with prescribed pointwise norms (real positive values by default)."""
        oa = t if isinstance(t, OperAlgebra) else oper_algebra(t)
        ms = oa.p.exponents
        if len(norms) != len(ms):
            raise InputError(f"{oa.type.name} needs {len(ms)} norms, got {len(norms)}")
        grad_norms = [0.0] * len(ms) if grad_norms is None else list(grad_norms)
        phases = [1.0] * len(ms) if phases is None else list(phases)
        if any(x < 0 for x in norms) or any(g < 0 for g in grad_norms):
            raise InputError("norms must be nonnegative")
        H = float(density(z))
        vals = tuple(x * ph * H ** ((m + 1) / 2) for x, ph, m in zip(norms, phases, ms))
        ders = tuple(g * H ** ((m + 2) / 2) for g, m in zip(grad_norms, ms))
        return cls(oa, H, vals, ders, complex(z))

    @classmethod
    def cyclic(cls, t: LieType | str | OperAlgebra, norm: float, grad_norm: float = 0.0,
               z: complex = 0j) -> "OperPoint":
        oa = t if isinstance(t, OperAlgebra) else oper_algebra(t)
        l = len(oa.p.exponents)
        norms = [0.0] * (l - 1) + [norm]
        grads = [0.0] * (l - 1) + [grad_norm]
        return cls.from_norms(oa, norms, grads, z)

    # -- normalized quantities -----------------------------------------------

    @property
    def exponents(self) -> Tuple[int, ...]:
        return self.algebra.p.exponents

    @property
    def kappa_ef(self) -> float:
        return float(self.algebra.p.kappa_ef)

    @property
    def constants(self) -> ConstantsReport:
        return constants_report(self.algebra.type)

    @property
    def unit_values(self) -> np.ndarray:
        """alpha_i / H^((m_i+1)/2): modulus is the norm, phase is kept."""
        return np.array([v / self.H ** ((m + 1) / 2) for v, m in zip(self.values, self.exponents)])

    @property
    def unit_chern(self) -> np.ndarray:
        return np.array([v / self.H ** ((m + 2) / 2) for v, m in zip(self.chern_values, self.exponents)])

    @property
    def norms(self) -> np.ndarray:
        return np.abs(self.unit_values)

    @property
    def grad_norms(self) -> np.ndarray:
        return np.abs(self.unit_chern)

    @property
    def is_cyclic(self) -> bool:
        return bool(np.all(self.norms[:-1] <= ZERO_TOL) and np.all(self.grad_norms[:-1] <= ZERO_TOL))

    def scaled(self, t: float) -> "OperPoint":
        """The point of the oper t * alpha (same z)."""
        return OperPoint(self.algebra, self.H, tuple(t * v for v in self.values),
                         tuple(t * v for v in self.chern_values), self.z)

    def to_dict(self) -> dict:
        return {"type": self.algebra.type.name, "z": None if self.z is None else [self.z.real, self.z.imag],
                "H": self.H, "norms": self.norms.tolist(), "grad_norms": self.grad_norms.tolist()}


def _require_cyclic(op: OperPoint) -> None:
    if len(op.exponents) == 1:
        raise Sl2Excluded("the cyclic estimates exclude sl2")
    if not op.is_cyclic:
        raise NotCyclic("only the top differential may be nonzero")


# -- first fundamental form --------------------------------------------------


@dataclass(frozen=True)
class MetricAtPoint:
    """The symmetric form ``a dz^2 + b dz dzbar + conj(a) dzbar^2``."""

    a: complex
    b: float

    @property
    def det_c(self) -> float:
        return abs(self.a) ** 2 - (self.b / 2) ** 2

    @property
    def is_riemannian(self) -> bool:
        return self.b > 0 and self.det_c < 0

    def real_form(self) -> np.ndarray:
        """Gram matrix in the coordinates (x, y)."""
        a = self.a
        return np.array([[self.b + 2 * a.real, -2 * a.imag],
                         [-2 * a.imag, self.b - 2 * a.real]])

    def to_dict(self) -> dict:
        return {"a": [self.a.real, self.a.imag], "b": self.b, "det_c": self.det_c}


def induced_metric(op: OperPoint) -> MetricAtPoint:
    k = op.kappa_ef
    s = 1 + 0.25 * float(np.sum(op.norms ** 2))
    return MetricAtPoint(4 * k * op.values[0], 8 * k * op.H * s)


def immersion_check(op: OperPoint, tol: float = ZERO_TOL) -> bool:
    """False exactly when ||alpha_1|| = 2 and every other differential vanishes."""
    n = op.norms
    return not (abs(n[0] - 2) <= tol and bool(np.all(n[1:] <= tol)))


def _angle_ratio(op: OperPoint) -> float:
    n = op.norms
    t = 1 - n[0] / 2
    rest = 0.25 * float(np.sum(n[1:] ** 2))
    return t / math.sqrt(t * t + rest)


def regularity_margin(op: OperPoint) -> float:
    """Positive when the angle test certifies a regular immersion."""
    if not immersion_check(op):
        raise NotImmersed("the surface is not immersed at this point")
    cos_min = math.sqrt(1 - float(op.constants.phi_min_sq))
    return _angle_ratio(op) - cos_min


def regularity_status(op: OperPoint) -> Status:
    if not immersion_check(op):
        return Status.PRECONDITION_FAILED
    return Status.CERTIFIED if regularity_margin(op) > 0 else Status.INCONCLUSIVE


# -- the quartic form and the curvature of the ambient space -----------------


def quartic_sum(op: OperPoint) -> float:
    """sum c_ijkl a_i conj(a_j) a_k conj(a_l) over the normalized values a_i."""
    a = op.unit_values
    c = op.algebra.nb.c_array
    q = np.einsum("ijkl,i,j,k,l->", c, a, np.conj(a), a, np.conj(a))
    return float(q.real)


def quartic_sum_killing(op: OperPoint) -> float:
    """The same quartic form computed as kappa([A, theta A], [A, theta A]) / kappa(e, f).

    ``A = sum a_i e_{m_i}`` is assembled in the numeric Chevalley basis, so
    this route never touches the c-tensor.
    """
    oa = op.algebra
    alg = oa.alg
    vecs = oa.nb.e_vectors
    A = sum(ai * v for ai, v in zip(op.unit_values, vecs))
    tA = cartan_involution(alg, np.asarray(A, dtype=complex))
    x = alg.ad(A) @ tA
    kap = alg.killing_matrix()
    return float((x @ kap @ x).real) / op.kappa_ef


def _checked_quartic(op: OperPoint) -> float:
    q = quartic_sum(op)
    if q < -1e-10 * max(1.0, float(np.sum(op.norms ** 2)) ** 2):
        raise NegativeRadicand(f"quartic form evaluated to {q}")
    return max(q, 0.0)


def _gradient_quotient(op: OperPoint) -> float:
    """(sum ||nabla a_i||^2 + 1/4 sum_{i<j} ||nabla a_i a_j - a_i nabla a_j||^2) / S."""
    a, b = op.unit_values, op.unit_chern
    total = float(np.sum(np.abs(b) ** 2))
    cross = 0.0
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            cross += abs(b[i] * a[j] - a[i] * b[j]) ** 2
    s = 1 + 0.25 * float(np.sum(np.abs(a) ** 2))
    return (total + 0.25 * cross) / s


def _weighted_norm_sq(op: OperPoint) -> float:
    return float(np.dot(op.exponents, op.norms ** 2))


def rlc_term(op: OperPoint) -> float:
    """The ambient curvature R^LC(d_z, d_zbar, d_zbar, d_z) along the surface."""
    q = quartic_sum(op)
    return 4 * op.H ** 2 * op.kappa_ef * (1 - 0.5 * _weighted_norm_sq(op) + q / 16)


def rg_bound(op: OperPoint) -> float:
    """Upper bound for R^g(d_z, d_zbar, d_zbar, d_z); an equality when alpha_1 = 0."""
    return 4 * op.kappa_ef * op.H ** 2 * (1 - 0.25 * _weighted_norm_sq(op)
                                           + 0.25 * _gradient_quotient(op))


# -- second fundamental form -------------------------------------------------


def cyclic_constant(op: OperPoint, c_value: str = "bracket") -> float:
    """c_llll either from the bracket definition or from the stated closed form c_l."""
    if c_value == "bracket":
        return float(op.algebra.nb.c_array[-1, -1, -1, -1])
    if c_value == "stated":
        return float(op.constants.c_l)
    raise InputError(f"unknown c_value {c_value!r}; use 'bracket' or 'stated'")


def second_form_cyclic_sq(op: OperPoint, c_value: str = "bracket") -> float:
    """||II(u, u)||^2 for cyclic data; independent of the direction.

    With ``c_value="bracket"`` this is the exact value.  ``"stated"`` uses the
    larger closed-form constant and is then an upper bound.
    """
    _require_cyclic(op)
    x = op.norms[-1]
    g = op.grad_norms[-1]
    ml = op.exponents[-1]
    c = cyclic_constant(op, c_value)
    return (op.H ** 2 * op.kappa_ef / 16) * (2 * ml * x * x + 2 * g * g / (1 + x * x / 4) + c * x ** 4)


def second_form_general_bound_sq(op: OperPoint) -> float:
    """Upper bound for ||II(u, u)||^2 valid for arbitrary differentials."""
    p = _weighted_norm_sq(op) + _gradient_quotient(op)
    q = _checked_quartic(op)
    return (op.H ** 2 * op.kappa_ef / 4) * (math.sqrt(p) + 0.5 * math.sqrt(q)) ** 2


def cyclic_lemma_rhs(op: OperPoint, rg: float, form: str = "corrected") -> float:
    """Right side of the identity expressing ||II||^2 through R^LC and R^g.

    ``form="stated"`` weights (R^LC, R^g) by (1, 2); the Gauss equation
    gives (2, 1), which is the default.
    """
    _require_cyclic(op)
    base = 12 * op.H ** 2 * op.kappa_ef * (1 - 0.5 * op.exponents[-1] * op.norms[-1] ** 2)
    rlc = rlc_term(op)
    if form == "corrected":
        return (2 * rlc + rg - base) / 8
    if form == "stated":
        return (rlc + 2 * rg - base) / 8
    raise InputError(f"unknown form {form!r}")


@dataclass(frozen=True)
class Sl2SecondForm:
    """II = (dz2 dz^2 + dzdzbar dz dzbar + dzbar2 dzbar^2) tensored with h."""

    dz2: complex
    dzdzbar: float
    dzbar2: complex
    kappa_hh: float = 2.0

    def on_direction(self, phi: float) -> float:
        """Coefficient of h in II(v, v) for v = cos(phi) d_x + sin(phi) d_y."""
        w = complex(math.cos(phi), math.sin(phi))
        return float((self.dz2 * w * w + self.dzbar2 * np.conj(w) ** 2).real + self.dzdzbar)

    def norm_sq(self, phi: float) -> float:
        return self.kappa_hh * self.on_direction(phi) ** 2


def sl2_second_form(alpha1: complex, H: float, sign: str = "stated") -> Sl2SecondForm:
    """Second fundamental form of the sl2 surface at a point.

    ``sign="stated"`` returns coefficients (-alpha_1, H||alpha_1||^2,
    -conj(alpha_1)).  The surface developed numerically has the middle term
    with the opposite sign relative to the outer two; ``sign="measured"``
    returns that version.
    """
    alpha1 = complex(alpha1)
    mid = H * (abs(alpha1) / H) ** 2
    if sign == "stated":
        return Sl2SecondForm(-alpha1, mid, -alpha1.conjugate())
    if sign == "measured":
        return Sl2SecondForm(-alpha1, -mid, -alpha1.conjugate())
    raise InputError(f"unknown sign convention {sign!r}")


def simplification_pairing(op: OperPoint) -> complex:
    """Diagnostic <II_zz, II_zzbar> = 1/2 sum H a_i conj(a_j) a_k kappa([e_i, f], [theta e_j, e_k]).

    Only index triples with m_i - 1 = m_j - m_k contribute.  Values are the
    normalized ones, so the result carries the weight of the diagonal term.
    """
    oa = op.algebra
    alg = oa.alg
    vecs = oa.nb.e_vectors
    f = oa.p.f
    kap = alg.killing_matrix()
    ms = op.exponents
    a = op.unit_values
    total = 0j
    for i in range(len(ms)):
        left = alg.ad(vecs[i]) @ f
        for j in range(len(ms)):
            th = cartan_involution(alg, np.asarray(vecs[j], dtype=complex))
            for k in range(len(ms)):
                if ms[i] - 1 != ms[j] - ms[k]:
                    continue
                right = alg.ad(th) @ vecs[k]
                total += a[i] * np.conj(a[j]) * a[k] * (left @ kap @ right)
    return 0.5 * op.H * total / op.kappa_ef


# -- curvature of a complexified metric --------------------------------------


@dataclass(frozen=True)
class ConformalMetric:
    """A conformal metric ``beta |dz|^2`` with value, d_z log(beta) and curvature."""

    value: Callable[[complex], float]
    dlog: Callable[[complex], complex]
    curvature: Callable[[complex], float]

    @classmethod
    def hyperbolic(cls, scale: float = 1.0) -> "ConformalMetric":
        """``scale * H``, whose curvature is -2 / scale."""
        return cls(lambda z: scale * float(density(z)), lambda z: complex(dlog_density(z)),
                   lambda z: -2.0 / scale)


@dataclass(frozen=True)
class CurvatureComparison:
    k_bar: float
    a_norm_sq: float
    grad_norm_sq: float
    first: float
    second: float

    @property
    def k_g(self) -> float:
        return self.first + self.second


def curvature_comparison(a: DiskDifferential, beta: ConformalMetric, z: complex,
                         form: str = "corrected") -> CurvatureComparison:
    """K^g for ``g = a dz^2 + beta dz dzbar + conj``, from the curvature of ``beta``.

    The gradient term carries weight 2 by default, which is what the exact
    Brioschi curvature of the explicit metric gives (``form="corrected"``).
    ``form="stated"`` uses weight 4 and is kept for comparison only.
    """
    if a.degree != 2:
        raise InputError("the comparison formula needs a quadratic differential")
    if form not in ("corrected", "stated"):
        raise InputError(f"unknown comparison form {form!r}")
    weight = 2.0 if form == "corrected" else 4.0
    b = beta.value(z)
    av = complex(a.value(z))
    na = abs(av) ** 2 / b ** 2
    denom = 1 - 4 * na
    if denom <= 0:
        raise DegenerateMetric(f"1 - 4||a||^2 = {denom} <= 0")
    grad = complex(a.derivative(z)) - 2 * beta.dlog(z) * av
    ng = abs(grad) ** 2 / b ** 3
    kb = beta.curvature(z)
    return CurvatureComparison(kb, na, ng, kb / denom, weight * ng / denom ** 2)


def brioschi_curvature(E: Callable, F: Callable, G: Callable, x: float, y: float,
                       step: float = 1e-3) -> float:
    """Gaussian curvature of ``E dx^2 + 2F dx dy + G dy^2`` by the Brioschi formula.

    All derivatives are central finite differences of the given coefficient
    functions, so the truncation error is O(step^2).
    """
    s = step

    def d(fn, ox, oy):
        return fn(x + ox, y + oy)

    def dx(fn):
        return (d(fn, s, 0) - d(fn, -s, 0)) / (2 * s)

    def dy(fn):
        return (d(fn, 0, s) - d(fn, 0, -s)) / (2 * s)

    def dxx(fn):
        return (d(fn, s, 0) - 2 * d(fn, 0, 0) + d(fn, -s, 0)) / s ** 2

    def dyy(fn):
        return (d(fn, 0, s) - 2 * d(fn, 0, 0) + d(fn, 0, -s)) / s ** 2

    def dxy(fn):
        return (d(fn, s, s) - d(fn, s, -s) - d(fn, -s, s) + d(fn, -s, -s)) / (4 * s * s)

    e, f, g = E(x, y), F(x, y), G(x, y)
    ex, ey, fx, fy, gx, gy = dx(E), dy(E), dx(F), dy(F), dx(G), dy(G)
    m1 = np.array([
        [-0.5 * dyy(E) + dxy(F) - 0.5 * dxx(G), 0.5 * ex, fx - 0.5 * ey],
        [fy - 0.5 * gx, e, f],
        [0.5 * gy, f, g],
    ])
    m2 = np.array([
        [0.0, 0.5 * ey, 0.5 * gx],
        [0.5 * ey, e, f],
        [0.5 * gx, f, g],
    ])
    return float((np.linalg.det(m1) - np.linalg.det(m2)) / (e * g - f * f) ** 2)


def metric_curvature_fd(a: Callable[[complex], complex], b: Callable[[complex], float],
                        z: complex, step: float = 1e-3) -> float:
    """Brioschi curvature of ``b |dz|^2 + 2 Re(a dz^2)`` at ``z``."""
    def E(x, y):
        w = complex(x, y)
        return b(w) + 2 * complex(a(w)).real

    def F(x, y):
        return -2 * complex(a(complex(x, y))).imag

    def G(x, y):
        w = complex(x, y)
        return b(w) - 2 * complex(a(w)).real

    return brioschi_curvature(E, F, G, z.real, z.imag, step)


def induced_metric_field(t: LieType | str | OperAlgebra,
                         diffs: Sequence[Optional[DiskDifferential]]) -> Tuple[Callable, Callable]:
    """The coefficient functions (a(z), b(z)) of the induced metric of an oper."""
    oa = t if isinstance(t, OperAlgebra) else oper_algebra(t)

    def a(z):
        return induced_metric(OperPoint.from_differentials(oa, diffs, z)).a

    def b(z):
        return induced_metric(OperPoint.from_differentials(oa, diffs, z)).b

    return a, b


def induced_curvature_tensor(t: LieType | str | OperAlgebra,
                             diffs: Sequence[Optional[DiskDifferential]], z: complex,
                             step: float = 1e-3) -> float:
    """R^g(d_z, d_zbar, d_zbar, d_z) = K^g det_C(g), with K^g from finite differences."""
    a, b = induced_metric_field(t, diffs)
    k = metric_curvature_fd(a, b, complex(z), step)
    det = abs(a(z)) ** 2 - (b(z) / 2) ** 2
    return k * det
