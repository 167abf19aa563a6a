"""Holomorphic differentials on the unit disk with the curvature -2 metric.

The hyperbolic density is ``H(z) = 2 / (1 - |z|^2)^2``: the metric is
``H |dz|^2`` (so ``H(0) = 2``), its Gaussian curvature is -2, and an
l-differential ``alpha dz^l`` has pointwise norm ``|alpha| / H^(l/2)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence, Tuple, Union

import numpy as np

from .errors import CriticalPoint, InputError, OutsideDomain, StencilOutOfDomain

ArrayLike = Union[complex, np.ndarray]

DEFAULT_R_MAX = 0.95
DEFAULT_FD_STEP = 1e-3


def density(z: ArrayLike) -> ArrayLike:
    """H(z) = 2 / (1 - |z|^2)^2."""
    return 2.0 / (1.0 - np.abs(z) ** 2) ** 2


def dlog_density(z: ArrayLike) -> ArrayLike:
    """d/dz log H = 2 conj(z) / (1 - |z|^2)."""
    return 2.0 * np.conj(z) / (1.0 - np.abs(z) ** 2)


def unit_density(z: ArrayLike) -> ArrayLike:
    """The curvature -1 line-element density rho = 2 / (1 - |z|^2); H = rho^2 / 2."""
    return 2.0 / (1.0 - np.abs(z) ** 2)


@dataclass(frozen=True)
class DiskDifferential:
    """``alpha(z) dz^degree`` with alpha a polynomial (ascending coefficients)."""

    degree: int
    coeffs: Tuple[complex, ...]
    r_max: float = DEFAULT_R_MAX

    def __post_init__(self):
        if self.degree < 1:
            raise InputError(f"degree must be >= 1, got {self.degree}")
        if not 0 < self.r_max < 1:
            raise InputError(f"r_max must lie in (0, 1), got {self.r_max}")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs) or (0j,))

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, degree: int, r_max: float = DEFAULT_R_MAX) -> "DiskDifferential":
        return cls(degree, (0j,), r_max)

    @classmethod
    def constant(cls, degree: int, value: complex, r_max: float = DEFAULT_R_MAX) -> "DiskDifferential":
        return cls(degree, (complex(value),), r_max)

    @classmethod
    def from_dict(cls, d: dict) -> "DiskDifferential":
        try:
            degree = int(d["degree"])
            coeffs = [complex(float(c[0]), float(c[1])) for c in d["coefficients"]]
            r_max = float(d.get("r_max", DEFAULT_R_MAX))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InputError(f"malformed differential: {exc}") from exc
        return cls(degree, tuple(coeffs), r_max)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "DiskDifferential":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read differential from {path}: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {"degree": self.degree,
                "coefficients": [[c.real, c.imag] for c in self.coeffs],
                "r_max": self.r_max}

    def scaled(self, t: complex) -> "DiskDifferential":
        return DiskDifferential(self.degree, tuple(t * c for c in self.coeffs), self.r_max)

    # -- evaluation ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def _check(self, z: ArrayLike) -> None:
        if np.any(np.abs(z) > self.r_max + 1e-15):
            raise OutsideDomain(f"|z| exceeds r_max = {self.r_max}")

    def value(self, z: ArrayLike) -> ArrayLike:
        self._check(z)
        return np.polynomial.polynomial.polyval(z, np.array(self.coeffs))

    def derivative(self, z: ArrayLike) -> ArrayLike:
        self._check(z)
        c = np.array(self.coeffs)
        if len(c) == 1:
            return np.zeros_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 0j
        return np.polynomial.polynomial.polyval(z, c[1:] * np.arange(1, len(c)))

    def norm(self, z: ArrayLike) -> ArrayLike:
        return hyp_norm(self, z)

    def chern(self, z: ArrayLike) -> ArrayLike:
        """Coefficient of the (l+1)-differential nabla alpha at z."""
        return self.derivative(z) - self.degree * dlog_density(z) * self.value(z)

    def chern_norm(self, z: ArrayLike) -> ArrayLike:
        return np.abs(self.chern(z)) / density(z) ** ((self.degree + 1) / 2)

    def sup_norm(self, radius: float, n_radial: int = 48, n_angular: int = 256,
                 n_boundary: int = 4096, weight: Callable = None) -> float:
        """Sampled sup of the norm over the closed Euclidean disk |z| <= radius.

        The supremum is approximated on a polar grid plus a dense boundary
        circle, so the value is a lower estimate of the true sup.
        ``weight`` overrides the density used in the norm (default H^(l/2)).
        """
        if radius > self.r_max:
            raise OutsideDomain(f"radius {radius} exceeds r_max = {self.r_max}")
        w = weight or (lambda z: density(z) ** (self.degree / 2))
        rs = np.linspace(0.0, radius, n_radial)
        th = np.linspace(0.0, 2 * np.pi, n_angular, endpoint=False)
        pts = (rs[:, None] * np.exp(1j * th[None, :])).ravel()
        edge = radius * np.exp(1j * np.linspace(0.0, 2 * np.pi, n_boundary, endpoint=False))
        pts = np.concatenate([pts, edge])
        return float(np.max(np.abs(self.value(pts)) / w(pts)))


def hyp_norm(d: DiskDifferential, z: ArrayLike) -> ArrayLike:
    """||alpha||(z) = |alpha(z)| / H(z)^(l/2)."""
    return np.abs(d.value(z)) / density(z) ** (d.degree / 2)


def chern_derivative(d: DiskDifferential) -> Callable[[ArrayLike], ArrayLike]:
    """Evaluator for nabla alpha; not holomorphic, so it is returned as a function."""
    return d.chern


# -- finite-difference machinery ---------------------------------------------


def laplacian_fd(f: Callable[[ArrayLike], ArrayLike], z: complex, step: float,
                 order: int = 2) -> float:
    """Flat Laplacian d_xx + d_yy of a real function at z.

    ``order=2`` is the 5-point stencil; ``order=4`` uses the 9-point cross
    with weights (-1, 16, -30, 16, -1) / 12 along each axis.
    """
    if order == 2:
        pts = np.array([z + step, z - step, z + 1j * step, z - 1j * step, z])
        v = f(pts)
        return float((v[0] + v[1] + v[2] + v[3] - 4 * v[4]) / step ** 2)
    if order == 4:
        offs = [step, -step, 1j * step, -1j * step]
        pts = np.array([z + o for o in offs] + [z + 2 * o for o in offs] + [z])
        v = f(pts)
        return float((16 * v[0:4].sum() - v[4:8].sum() - 60 * v[8]) / (12 * step ** 2))
    raise InputError(f"unsupported stencil order {order}")


def _stencil_check(z: complex, step: float, r_max: float) -> None:
    if abs(z) + step * math.sqrt(2) > r_max:
        raise StencilOutOfDomain(f"stencil around {z} with step {step} leaves |z| <= {r_max}")


def bochner_residual(d: DiskDifferential, z: complex, fd_step: float = DEFAULT_FD_STEP,
                     order: int = 2) -> float:
    """|1/2 Lap ||alpha||^2 - 2 ||nabla alpha||^2 - l K ||alpha||^2| with K = -2.

    The Laplacian of the metric is (4/H) d_z d_zbar = (1/H) (flat Laplacian).
    """
    _stencil_check(z, fd_step * (order // 2), d.r_max)
    nsq = lambda w: hyp_norm(d, w) ** 2
    lap = laplacian_fd(nsq, z, fd_step, order) / density(z)
    rhs = 2 * d.chern_norm(z) ** 2 + d.degree * (-2.0) * nsq(z)
    return float(abs(0.5 * lap - rhs))


def gaussian_curvature_conformal(lam_sq: Callable[[ArrayLike], ArrayLike], z: complex,
                                 step: float = DEFAULT_FD_STEP) -> float:
    """K = -(1 / (2 lam^2)) Lap_0 log(lam^2) for the metric lam^2 |dz|^2."""
    return -laplacian_fd(lambda w: np.log(lam_sq(w)), z, step) / (2 * lam_sq(z))


# -- Cauchy estimates -----------------------------------------------------------


def cauchy_lemma_bound(l: int, radius: float) -> float:
    """1/2 coth(R/2) cosh^(2l)(R/2) for a hyperbolic radius R (curvature -1)."""
    return 0.5 / math.tanh(radius / 2) * math.cosh(radius / 2) ** (2 * l)


@dataclass(frozen=True)
class CauchyConstant:
    value: float
    branch: str  # "radius" when the injectivity radius is small, "optimal" otherwise


def cauchy_C(l: int, inj: float) -> CauchyConstant:
    """Constant with sup ||nabla alpha|| <= C sup ||alpha|| given the injectivity radius.

    Below the branch point the estimate is applied at radius ``inj``; above it,
    its bound is minimized at tanh(R/2) = 1/sqrt(2l+1).
    """
    if l < 1 or inj <= 0:
        raise InputError("need l >= 1 and inj > 0")
    if math.tanh(inj / 2) <= 1 / math.sqrt(2 * l + 1):
        return CauchyConstant(cauchy_lemma_bound(l, inj), "radius")
    return CauchyConstant(0.5 * math.sqrt(2 * l + 1) * (1 + 1 / (2 * l)) ** l, "optimal")


@dataclass(frozen=True)
class CauchyLemmaCheck:
    lhs: float
    bound: float
    euclidean_radius: float

    @property
    def ok(self) -> bool:
        return self.lhs <= self.bound * (1 + 1e-12) + 1e-15


def cauchy_lemma_check(d: DiskDifferential, radius: float) -> CauchyLemmaCheck:
    """Check ||nabla alpha||(0) <= bound * sup_{D(0,R)} ||alpha|| natively.

    The estimate lives in the curvature -1 normalization: norms are
    |alpha| / rho^l with rho = 2 / (1 - |z|^2), and the hyperbolic radius R
    corresponds to the Euclidean radius tanh(R/2).
    """
    r_eu = math.tanh(radius / 2)
    l = d.degree
    lhs = abs(d.chern(0j)) / unit_density(0j) ** (l + 1)
    sup = d.sup_norm(r_eu, weight=lambda z: unit_density(z) ** l)
    return CauchyLemmaCheck(lhs, cauchy_lemma_bound(l, radius) * sup, r_eu)


# -- Schwarzian -----------------------------------------------------------------


class HolomorphicMap:
    """A holomorphic map with its first three derivatives."""

    def derivatives(self, z: complex) -> Tuple[complex, complex, complex, complex]:
        raise NotImplementedError

    def __call__(self, z: complex) -> complex:
        return self.derivatives(z)[0]


@dataclass(frozen=True)
class PowerSeries(HolomorphicMap):
    coeffs: Tuple[complex, ...]

    def derivatives(self, z):
        p = np.polynomial.Polynomial(np.array(self.coeffs, dtype=complex))
        return tuple(complex(p.deriv(k)(z)) if k else complex(p(z)) for k in range(4))


@dataclass(frozen=True)
class Mobius(HolomorphicMap):
    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise InputError("degenerate Mobius map")

    def derivatives(self, z):
        a, b, c, d = self.a, self.b, self.c, self.d
        det = a * d - b * c
        w = c * z + d
        return ((a * z + b) / w, det / w ** 2, -2 * c * det / w ** 3, 6 * c * c * det / w ** 4)

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "Mobius") -> "Mobius":
        """self o other."""
        a, b, c, d = self.a, self.b, self.c, self.d
        p, q, r, s = other.a, other.b, other.c, other.d
        return Mobius(a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s)


@dataclass(frozen=True)
class Composite(HolomorphicMap):
    """outer o inner, with derivatives by the chain rule (Faa di Bruno to order 3)."""

    outer: HolomorphicMap
    inner: HolomorphicMap

    def derivatives(self, z):
        g0, g1, g2, g3 = self.inner.derivatives(z)
        f0, f1, f2, f3 = self.outer.derivatives(g0)
        return (f0, f1 * g1, f2 * g1 ** 2 + f1 * g2, f3 * g1 ** 3 + 3 * f2 * g1 * g2 + f1 * g3)


def schwarzian(phi: Union[HolomorphicMap, Sequence[complex]], z: complex) -> complex:
    """S phi = (phi''/phi')' - 1/2 (phi''/phi')^2 = phi'''/phi' - 3/2 (phi''/phi')^2."""
    if not isinstance(phi, HolomorphicMap):
        phi = PowerSeries(tuple(phi))
    _, d1, d2, d3 = phi.derivatives(z)
    if abs(d1) < 1e-300:
        raise CriticalPoint(f"phi'({z}) = 0")
    return d3 / d1 - 1.5 * (d2 / d1) ** 2


def transform_quadratic(alpha: Callable[[complex], complex], phi: HolomorphicMap,
                        w: complex) -> complex:
    """Coefficient of the projective-connection term in the new coordinate w, z = phi(w):
    alpha_new(w) = alpha(phi(w)) phi'(w)^2 - 1/2 S phi(w)."""
    z0, d1, _, _ = phi.derivatives(w)
    return alpha(z0) * d1 ** 2 - 0.5 * schwarzian(phi, w)
