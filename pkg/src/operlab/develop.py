"""Numerical developing maps for opers on the disk.

The oper connection is written in a trivialization as ``d + A`` with

    A = (-d_z log(H) h + f + sum_i alpha_i(z) e_{m_i}) dz + H e dzbar,

and a frame is a matrix-valued solution of ``dG = G A`` with ``G = I`` at the
basepoint.  Flatness of ``A`` makes ``G`` path independent.  Matrices are
taken either in the adjoint representation (any simple type) or, for the
concrete surface computations, in the defining representation of SL_n.

In the defining representation the Fuchsian Cartan involution at ``z`` is
``X -> -P X^dagger P^-1`` with ``P = H^h``; transporting it by the frame gives
the point ``P(z) = G H^h G^dagger`` of the symmetric space of positive
Hermitian matrices, which is how surfaces are built here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm, sqrtm

from .errors import InputError, MismatchedBasepoint, RayTooShort, StepUnderflow
from .hyperbolic import DiskDifferential, density, dlog_density
from .liealg import LieType
from .principal import OperAlgebra, oper_algebra

DEFAULT_TOL = 1e-9
DEFAULT_MAX_STEP = 1e-2


# -- representations -----------------------------------------------------------


@dataclass(frozen=True)
class Representation:
    """Matrices of the principal triple and of the highest-weight vectors."""

    name: str
    h: np.ndarray
    e: np.ndarray
    f: np.ndarray
    highest: Tuple[np.ndarray, ...]
    exponents: Tuple[int, ...]
    kappa_ef: float
    is_defining: bool = False

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    @classmethod
    def adjoint(cls, t: LieType | str | OperAlgebra) -> "Representation":
        oa = t if isinstance(t, OperAlgebra) else oper_algebra(t)
        alg, p, nb = oa.alg, oa.p, oa.nb
        return cls(f"ad {oa.type.name}", alg.ad(p.h_vec), alg.ad(p.e), alg.ad(p.f),
                   tuple(alg.ad(v) for v in nb.e_vectors), p.exponents, float(p.kappa_ef))

    @classmethod
    def defining(cls, n: int) -> "Representation":
        """SL_n on C^n with e = sum sqrt(i(n-i)/2) E_{i,i+1}, f its transpose."""
        if n < 2:
            raise InputError("SL_n needs n >= 2")
        r = [i * (n - i) / 2 for i in range(1, n)]
        h = np.diag([(n - 1) / 2 - k for k in range(n)]).astype(complex)
        e = np.zeros((n, n), dtype=complex)
        for i in range(n - 1):
            e[i, i + 1] = math.sqrt(r[i])
        f = e.T.copy()
        kappa_ef = 2 * n * sum(r)
        highest = []
        for m in range(1, n):
            p = np.linalg.matrix_power(e, m)
            # normalize so that -kappa(x, theta x) = 2n tr(x x^dagger) = kappa(e, f)
            p = p * math.sqrt(kappa_ef / (2 * n * np.trace(p @ p.conj().T).real))
            highest.append(p)
        return cls(f"SL{n}", h, e, f, tuple(highest), tuple(range(1, n)), kappa_ef, True)


# -- the connection ------------------------------------------------------------


@dataclass(frozen=True)
class ConnectionField:
    """The flat oper connection for a representation and a tuple of differentials."""

    rep: Representation
    diffs: Tuple[Optional[DiskDifferential], ...]

    def __post_init__(self):
        diffs = tuple(self.diffs)
        if len(diffs) != len(self.rep.exponents):
            raise InputError(f"{self.rep.name} needs {len(self.rep.exponents)} differentials")
        for d, m in zip(diffs, self.rep.exponents):
            if d is not None and d.degree != m + 1:
                raise InputError(f"exponent {m} needs a differential of degree {m + 1}")
        object.__setattr__(self, "diffs", diffs)

    @classmethod
    def zero(cls, rep: Representation) -> "ConnectionField":
        return cls(rep, (None,) * len(rep.exponents))

    @classmethod
    def cyclic(cls, rep: Representation, top: DiskDifferential) -> "ConnectionField":
        return cls(rep, (None,) * (len(rep.exponents) - 1) + (top,))

    def coefficients(self, z: complex) -> Tuple[np.ndarray, np.ndarray]:
        """The dz and dzbar coefficient matrices at z."""
        rep = self.rep
        az = -complex(dlog_density(z)) * rep.h + rep.f
        for d, x in zip(self.diffs, rep.highest):
            if d is not None:
                az = az + complex(d.value(z)) * x
        azb = float(density(z)) * rep.e
        return az, azb

    def along(self, z: complex, dz: complex) -> np.ndarray:
        az, azb = self.coefficients(z)
        return az * dz + azb * np.conj(dz)

    def curvature_fd(self, z: complex, step: float = 1e-4) -> float:
        """Max entry of d_z A_zbar - d_zbar A_z + [A_z, A_zbar], by central differences."""
        def partial(k, direction):
            p = self.coefficients(z + step * direction)[k]
            m = self.coefficients(z - step * direction)[k]
            return (p - m) / (2 * step)

        d_z = lambda k: 0.5 * (partial(k, 1) - 1j * partial(k, 1j))
        d_zb = lambda k: 0.5 * (partial(k, 1) + 1j * partial(k, 1j))
        az, azb = self.coefficients(z)
        curv = d_z(1) - d_zb(0) + az @ azb - azb @ az
        return float(np.max(np.abs(curv)))


# -- frames --------------------------------------------------------------------


@dataclass(frozen=True)
class FrameCurve:
    path: Tuple[complex, ...]
    frames: Tuple[np.ndarray, ...]

    @property
    def end(self) -> np.ndarray:
        return self.frames[-1]


def _transport_segment(cf: ConnectionField, g0: np.ndarray, z0: complex, z1: complex,
                       rtol: float, atol: float, max_step: float) -> np.ndarray:
    d = z1 - z0
    if d == 0:
        return g0
    n = g0.shape[0]

    def rhs(t, y):
        g = y.reshape(n, n)
        return (g @ cf.along(z0 + t * d, d)).ravel()

    sol = solve_ivp(rhs, (0.0, 1.0), g0.astype(complex).ravel(), method="RK45",
                    rtol=rtol, atol=atol, max_step=max_step / abs(d))
    if sol.status != 0:
        raise StepUnderflow(f"integrator failed on [{z0}, {z1}]: {sol.message}")
    return sol.y[:, -1].reshape(n, n)


def integrate_frame(cf: ConnectionField, path: Sequence[complex], tol: float = DEFAULT_TOL,
                    max_step: float = DEFAULT_MAX_STEP, g0: Optional[np.ndarray] = None,
                    rtol: Optional[float] = None) -> FrameCurve:
    """Parallel frames along a polyline; the first frame is ``g0`` (identity by default)."""
    if tol <= 0:
        raise InputError("tol must be positive")
    n = cf.rep.dim
    g = np.eye(n, dtype=complex) if g0 is None else np.asarray(g0, dtype=complex)
    pts = tuple(complex(z) for z in path)
    if not pts:
        return FrameCurve((), (g,))
    frames = [g]
    for a, b in zip(pts[:-1], pts[1:]):
        g = _transport_segment(cf, g, a, b, tol if rtol is None else rtol, tol, max_step)
        frames.append(g)
    return FrameCurve(pts, tuple(frames))


def frame_at(cf: ConnectionField, z: complex, base: complex = 0j, tol: float = DEFAULT_TOL,
             rtol: Optional[float] = None) -> np.ndarray:
    """Frame at ``z`` along the straight segment from ``base``."""
    return integrate_frame(cf, (base, z), tol, rtol=rtol).end


def square_loop(center: complex, side: float) -> Tuple[complex, ...]:
    s = side / 2
    c = complex(center)
    return (c + complex(-s, -s), c + complex(s, -s), c + complex(s, s), c + complex(-s, s),
            c + complex(-s, -s))


def plaquette_holonomy(cf: ConnectionField, loop: Sequence[complex]) -> np.ndarray:
    """Product of midpoint exponentials along the edges of a closed polyline.

    For a flat connection the curvature term of order side^2 cancels, so the
    deviation from the identity is of order side^3; a curved connection
    would leave an order side^2 defect.
    """
    g = np.eye(cf.rep.dim, dtype=complex)
    for a, b in zip(loop[:-1], loop[1:]):
        g = g @ expm(cf.along((a + b) / 2, b - a))
    return g


def loop_deviation(cf: ConnectionField, center: complex, side: float, method: str = "adaptive",
                   tol: float = DEFAULT_TOL) -> float:
    """Max-entry distance from the identity of the transport around a square."""
    loop = square_loop(center, side)
    if method == "adaptive":
        g = integrate_frame(cf, loop, tol, rtol=tol).end
    elif method == "plaquette":
        g = plaquette_holonomy(cf, loop)
    else:
        raise InputError(f"unknown method {method!r}")
    return float(np.max(np.abs(g - np.eye(cf.rep.dim))))


@dataclass(frozen=True)
class FlatnessStudy:
    sides: Tuple[float, ...]
    deviations: Tuple[float, ...]

    @property
    def orders(self) -> Tuple[float, ...]:
        s, d = self.sides, self.deviations
        return tuple(math.log(d[i] / d[i + 1]) / math.log(s[i] / s[i + 1]) for i in range(len(s) - 1))

    @property
    def order(self) -> float:
        """Least-squares slope of log deviation against log side."""
        return float(np.polyfit(np.log(self.sides), np.log(self.deviations), 1)[0])


def flatness_study(cf: ConnectionField, center: complex, side: float = 0.08,
                   levels: int = 4) -> FlatnessStudy:
    sides = tuple(side / 2 ** k for k in range(levels))
    devs = tuple(loop_deviation(cf, center, s, "plaquette") for s in sides)
    return FlatnessStudy(sides, devs)


# -- osculating maps -----------------------------------------------------------


def osculating_map(first: FrameCurve, second: FrameCurve, index: int = -1) -> np.ndarray:
    """Osc = G1 G2^-1 at a common path vertex of two frame curves."""
    if first.path != second.path:
        raise MismatchedBasepoint("frame curves follow different paths")
    if not np.allclose(first.frames[0], second.frames[0], atol=1e-12):
        raise MismatchedBasepoint("frame curves start from different frames")
    return first.frames[index] @ np.linalg.inv(second.frames[index])


def osculating_log_derivative(cf1: ConnectionField, cf2: ConnectionField, z: complex,
                              direction: complex = 1.0, step: float = 1e-4,
                              tol: float = 1e-11) -> Tuple[np.ndarray, np.ndarray]:
    """(Osc^-1 dOsc/ds, G2 (A1 - A2)(direction) G2^-1) at z, both from the basepoint 0.

    The first is a finite difference of the osculating map along ``direction``,
    the second is its predicted value.
    """
    def osc(w):
        g1 = frame_at(cf1, w, tol=tol, rtol=tol)
        g2 = frame_at(cf2, w, tol=tol, rtol=tol)
        return g1 @ np.linalg.inv(g2), g2

    o, g2 = osc(z)
    op, _ = osc(z + step * direction)
    om, _ = osc(z - step * direction)
    numeric = np.linalg.inv(o) @ (op - om) / (2 * step)
    diff = cf1.along(z, direction) - cf2.along(z, direction)
    predicted = g2 @ diff @ np.linalg.inv(g2)
    return numeric, predicted


# -- points of the symmetric space ---------------------------------------------


def fuchsian_form(rep: Representation, z: complex) -> np.ndarray:
    """P0(z) = H(z)^h, the Hermitian form of the Fuchsian involution (defining rep)."""
    if not rep.is_defining:
        raise InputError("Hermitian forms are only built in the defining representation")
    return np.diag(float(density(z)) ** np.diag(rep.h).real).astype(complex)


def ep_point(rep: Representation, frame: np.ndarray, z: complex) -> np.ndarray:
    """The developed point P = G H^h G^dagger."""
    return frame @ fuchsian_form(rep, z) @ frame.conj().T


def upper_half_space(p: np.ndarray) -> Tuple[complex, float]:
    """(w, t) in the upper half-space for a positive Hermitian 2x2 matrix of determinant 1."""
    q = p / math.sqrt(abs(np.linalg.det(p)))
    return complex(q[0, 1] / q[1, 1]), float(1.0 / q[1, 1].real)


def hyperboloid(p: np.ndarray) -> np.ndarray:
    """Minkowski coordinates (x0, x1, x2, x3) with P = [[x0 + x3, x1 + i x2], [x1 - i x2, x0 - x3]]."""
    q = p / math.sqrt(abs(np.linalg.det(p)))
    return np.array([(q[0, 0] + q[1, 1]).real / 2, q[0, 1].real, q[0, 1].imag,
                     (q[0, 0] - q[1, 1]).real / 2])


def adjoint_fuchsian_involution(oa: OperAlgebra, z: complex) -> np.ndarray:
    """Matrix M with Theta0(x) = M conj(x) in the Chevalley basis: Ad(H^h) composed with theta."""
    alg, p = oa.alg, oa.p
    hz = float(density(z))
    perm = alg.involution_permutation
    m = np.zeros((alg.dim, alg.dim), dtype=complex)
    for k in range(alg.dim):
        m[perm[k], k] = -1.0
    scale = np.array([hz ** p.grade_of(k) for k in range(alg.dim)])
    return np.diag(scale) @ m


def developed_involution(oa: OperAlgebra, frame: np.ndarray, z: complex) -> np.ndarray:
    """M(z) with Theta(x) = M conj(x), transported by an adjoint frame."""
    m0 = adjoint_fuchsian_involution(oa, z)
    return frame @ m0 @ np.linalg.inv(np.conj(frame))


def involution_defect(m: np.ndarray) -> float:
    """Distance of Theta o Theta from the identity for Theta(x) = M conj(x)."""
    return float(np.max(np.abs(m @ np.conj(m) - np.eye(m.shape[0]))))


def _sl2_adjoint_of(g: np.ndarray) -> np.ndarray:
    """Ad(g) in the Chevalley basis (h_1, e, f) of sl2 for g in SL_2."""
    basis = [np.array([[1, 0], [0, -1]], dtype=complex), np.array([[0, 1], [0, 0]], dtype=complex),
             np.array([[0, 0], [1, 0]], dtype=complex)]
    gi = np.linalg.inv(g)
    cols = []
    for b in basis:
        y = g @ b @ gi
        cols.append([y[0, 0], y[0, 1], y[1, 0]])
    return np.array(cols).T


@dataclass(frozen=True)
class SurfaceSample:
    z: complex
    ep_point: Tuple[complex, float]
    hermitian_form: np.ndarray
    involution_matrix: np.ndarray

    def to_row(self) -> dict:
        w, t = self.ep_point
        return {"z_re": self.z.real, "z_im": self.z.imag, "w_re": w.real, "w_im": w.imag, "t": t,
                "involution_defect": involution_defect(self.involution_matrix)}


def ep_surface_pgl2(alpha1: Optional[DiskDifferential], grid: Sequence[complex],
                    tol: float = DEFAULT_TOL) -> List[SurfaceSample]:
    """Develop the sl2 surface to the upper half-space, frame fixed to I at z = 0."""
    rep = Representation.defining(2)
    cf = ConnectionField(rep, (alpha1,))
    oa = oper_algebra("A1")
    out = []
    for z in grid:
        z = complex(z)
        g = frame_at(cf, z, tol=tol, rtol=tol)
        p = ep_point(rep, g, z)
        m = developed_involution(oa, _sl2_adjoint_of(g / np.sqrt(np.linalg.det(g))), z)
        out.append(SurfaceSample(z, upper_half_space(p), p, m))
    return out


def planarity_residual(samples: Sequence[SurfaceSample]) -> float:
    """How far the points are from one totally geodesic plane of H^3.

    Points of a totally geodesic plane span a 3-dimensional linear subspace in
    the hyperboloid model; the residual is the smallest singular value of the
    stacked Minkowski vectors divided by the largest.
    """
    if len(samples) < 4:
        raise InputError("need at least four samples")
    x = np.array([hyperboloid(s.hermitian_form) for s in samples])
    sv = np.linalg.svd(x, compute_uv=False)
    return float(sv[-1] / sv[0])


def disk_grid(n: int, radius: float = 0.5) -> List[complex]:
    """An n x n square grid clipped to the disk of the given radius."""
    if n < 1:
        raise InputError("grid size must be positive")
    xs = np.linspace(-radius, radius, n) if n > 1 else np.array([0.0])
    return [complex(x, y) for x in xs for y in xs if x * x + y * y <= radius * radius + 1e-15]


# -- the finite-difference surface oracle ---------------------------------------


def _bracket(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


class SurfaceOracle:
    """Second-order jets of the developed surface in the defining representation of SL_n.

    Frames are integrated from ``z0`` (a left translation of the frame based
    at 0, hence an isometry), then the first and second fundamental forms are
    obtained from a 3x3 finite-difference stencil of the developed points.
    The ambient metric is ``2n tr(P^-1 dP P^-1 dP)``, which is the Killing form.
    """

    def __init__(self, cf: ConnectionField, z0: complex, step: float = 1e-3, tol: float = 1e-13):
        if not cf.rep.is_defining:
            raise InputError("the surface oracle needs the defining representation")
        self.cf, self.z0, self.step = cf, complex(z0), step
        rep = cf.rep
        self._c = 2 * rep.dim
        pts = {}
        for a in (-1, 0, 1):
            for b in (-1, 0, 1):
                w = self.z0 + step * complex(a, b)
                g = frame_at(cf, w, base=self.z0, tol=tol * 0.1, rtol=tol)
                pts[(a, b)] = ep_point(rep, g, w)
        s = step
        p0 = pts[(0, 0)]
        self.P = p0
        self._pinv = np.linalg.inv(p0)
        self.Px = (pts[(1, 0)] - pts[(-1, 0)]) / (2 * s)
        self.Py = (pts[(0, 1)] - pts[(0, -1)]) / (2 * s)
        pxx = (pts[(1, 0)] - 2 * p0 + pts[(-1, 0)]) / s ** 2
        pyy = (pts[(0, 1)] - 2 * p0 + pts[(0, -1)]) / s ** 2
        pxy = (pts[(1, 1)] - pts[(1, -1)] - pts[(-1, 1)] + pts[(-1, -1)]) / (4 * s * s)
        self.gram = np.array([[self.ip(u, v).real for v in (self.Px, self.Py)]
                              for u in (self.Px, self.Py)])
        self.IIxx = self._normal(self._hessian(pxx, self.Px, self.Px))
        self.IIyy = self._normal(self._hessian(pyy, self.Py, self.Py))
        self.IIxy = self._normal(self._hessian(pxy, self.Px, self.Py))

    def ip(self, x: np.ndarray, y: np.ndarray) -> complex:
        """Complex-bilinear extension of the ambient metric at P."""
        pi = self._pinv
        return complex(self._c * np.trace(pi @ x @ pi @ y))

    def _hessian(self, pij, pi_, pj_):
        return pij - 0.5 * (pi_ @ self._pinv @ pj_ + pj_ @ self._pinv @ pi_)

    def _normal(self, x):
        coef = np.linalg.solve(self.gram, [self.ip(x, t).real for t in (self.Px, self.Py)])
        return x - coef[0] * self.Px - coef[1] * self.Py

    # -- fundamental forms --------------------------------------------------

    def metric(self) -> np.ndarray:
        return self.gram

    def second_form(self, phi: float) -> np.ndarray:
        """II(v, v) for the coordinate unit vector v = cos(phi) d_x + sin(phi) d_y."""
        c, s = math.cos(phi), math.sin(phi)
        return c * c * self.IIxx + 2 * c * s * self.IIxy + s * s * self.IIyy

    def second_form_norm_sq(self, phi: float) -> float:
        x = self.second_form(phi)
        return self.ip(x, x).real

    def complex_components(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(II_zz, II_zzbar, II_zbarzbar)."""
        xx, yy, xy = self.IIxx, self.IIyy, self.IIxy
        return (xx - yy - 2j * xy) / 4, (xx + yy) / 4, (xx - yy + 2j * xy) / 4

    # -- ambient curvature --------------------------------------------------

    def _at_identity(self, x: np.ndarray) -> np.ndarray:
        r = np.linalg.inv(sqrtm(self.P))
        return r @ x @ r

    def _curv(self, a, b, c, d) -> complex:
        return complex(self._c * np.trace(-0.25 * _bracket(_bracket(a, b), c) @ d))

    def rlc(self) -> float:
        """R^LC(d_z, d_zbar, d_zbar, d_z) of the ambient space along the surface."""
        x, y = self._at_identity(self.Px), self._at_identity(self.Py)
        xz, xzb = (x - 1j * y) / 2, (x + 1j * y) / 2
        return self._curv(xz, xzb, xzb, xz).real

    def ambient_plane_curvature(self) -> float:
        x, y = self._at_identity(self.Px), self._at_identity(self.Py)
        ip0 = lambda u, v: self._c * np.trace(u @ v).real
        num = self._curv(x, y, y, x).real
        return num / (ip0(x, x) * ip0(y, y) - ip0(x, y) ** 2)

    def gauss_rg(self) -> float:
        """R^g from the Gauss equation: R^LC + <II_zz, II_zbarzbar> - <II_zzbar, II_zzbar>."""
        zz, zzb, zbzb = self.complex_components()
        return self.rlc() + self.ip(zz, zbzb).real - self.ip(zzb, zzb).real

    # -- codimension one ----------------------------------------------------

    def unit_normal(self) -> np.ndarray:
        """Unit normal of the surface in the 3-dimensional symmetric space of SL_2."""
        if self.cf.rep.dim != 2:
            raise InputError("a unit normal exists only in codimension one (SL_2)")
        root = sqrtm(self.P)
        paulis = [np.array([[1, 0], [0, -1]]), np.array([[0, 1], [1, 0]]),
                  np.array([[0, -1j], [1j, 0]])]
        best = None
        for sgm in paulis:
            v = self._normal(root @ sgm @ root)
            nrm = math.sqrt(abs(self.ip(v, v).real))
            if best is None or nrm > best[0]:
                best = (nrm, v / nrm)
        return best[1]

    def principal_curvatures(self, normalize: bool = True) -> Tuple[float, float]:
        """Eigenvalues of the shape operator; rescaled to ambient curvature -1 if asked."""
        nu = self.unit_normal()
        b = np.array([[self.ip(self.IIxx, nu).real, self.ip(self.IIxy, nu).real],
                      [self.ip(self.IIxy, nu).real, self.ip(self.IIyy, nu).real]])
        shape = np.linalg.solve(self.gram, b)
        ev = np.sort(np.linalg.eigvals(shape).real)
        if normalize:
            ev = ev / math.sqrt(-self.ambient_plane_curvature())
        return float(ev[0]), float(ev[1])


# -- transversality --------------------------------------------------------------


def bottom_left_minors(g: np.ndarray) -> List[complex]:
    """det of the bottom-left i x i blocks, i = 1..n-1.

    With the basis ordered from highest to lowest weight these are the
    coefficients of the lowest-weight vector of the i-th fundamental
    representation in g applied to its highest-weight vector.
    """
    n = g.shape[0]
    return [complex(np.linalg.det(g[n - i:, :i])) for i in range(1, n)]


@dataclass(frozen=True)
class TransversalityReport:
    z0: complex
    lengths: Tuple[float, ...]
    minors: Tuple[Tuple[float, ...], ...]
    slopes: Tuple[float, ...]
    exponents: Tuple[int, ...]

    @property
    def orders(self) -> Tuple[int, ...]:
        return tuple(int(round(s)) for s in self.slopes)

    @property
    def weight_orders(self) -> Tuple[int, ...]:
        """i(n - i): the height of the lowest weight in the i-th fundamental representation."""
        n = len(self.exponents) + 1
        return tuple(i * (n - i) for i in range(1, n))

    def to_dict(self) -> dict:
        return {"basepoint": [self.z0.real, self.z0.imag], "orders": list(self.orders),
                "slopes": list(self.slopes), "exponents": list(self.exponents),
                "weight_orders": list(self.weight_orders)}


def transversality_orders(cf: ConnectionField, z0: complex, direction: complex = 1.0,
                          length: float = 0.05, levels: int = 6,
                          tol: float = 1e-14) -> TransversalityReport:
    """Vanishing orders at z0 of the Schubert minors of G(z0)^-1 G(z) along a ray."""
    if not cf.rep.is_defining:
        raise InputError("transversality minors need the defining representation")
    if levels < 3 or length < 1e-6:
        raise RayTooShort("need at least three levels on a ray longer than 1e-6")
    u = complex(direction) / abs(direction)
    lengths = tuple(length / 2 ** k for k in range(levels))
    rows = []
    for s in lengths:
        g = frame_at(cf, complex(z0) + s * u, base=complex(z0), tol=tol, rtol=1e-12)
        rows.append(tuple(abs(m) for m in bottom_left_minors(g)))
    logs = np.log(np.array(lengths))
    data = np.log(np.maximum(np.array(rows), 1e-300))
    k = min(3, levels)
    slopes = tuple(float(np.polyfit(logs[-k:], data[-k:, i], 1)[0]) for i in range(data.shape[1]))
    return TransversalityReport(complex(z0), lengths, tuple(rows), slopes, cf.rep.exponents)


def veronese_residual(cf: ConnectionField, points: Sequence[complex], tol: float = 1e-12) -> float:
    """How far the curve z -> G(z) e_1 is from a projective image of z -> (1, z, ..., z^(n-1)).

    G(z) e_1 is holomorphic because e kills the highest-weight vector.  The
    residual is the smallest singular value (relative to the largest) of the
    linear system for a matrix L with G(z_k) e_1 parallel to L v(z_k).
    """
    n = cf.rep.dim
    rows = []
    for z in points:
        c = frame_at(cf, complex(z), tol=tol, rtol=tol)[:, 0]
        v = np.array([complex(z) ** k for k in range(n)])
        # c is parallel to L v iff c_a (L v)_b - c_b (L v)_a = 0 for all a < b
        for a in range(n):
            for b in range(a + 1, n):
                row = np.zeros((n, n), dtype=complex)
                row[b, :] += c[a] * v
                row[a, :] -= c[b] * v
                rows.append(row.ravel())
    sv = np.linalg.svd(np.array(rows), compute_uv=False)
    return float(sv[-1] / sv[0])


# -- the extended connection on disk x R ------------------------------------------


@dataclass(frozen=True)
class ExtendedConnection:
    """A~ = Ad(e^{t x}) A - x dt on the product of the disk with the real line."""

    base: ConnectionField
    x: np.ndarray

    def along(self, z: complex, t: float, dz: complex, dt: float) -> np.ndarray:
        u = expm(t * self.x)
        ui = expm(-t * self.x)
        return u @ self.base.along(z, dz) @ ui - dt * self.x


def _transport_extended(ec: ExtendedConnection, g0, p0, p1, tol):
    (z0, t0), (z1, t1) = p0, p1
    dz, dt = z1 - z0, t1 - t0
    n = g0.shape[0]

    def rhs(s, y):
        g = y.reshape(n, n)
        return (g @ ec.along(z0 + s * dz, t0 + s * dt, dz, dt)).ravel()

    sol = solve_ivp(rhs, (0.0, 1.0), g0.ravel(), method="RK45", rtol=tol, atol=tol,
                    max_step=DEFAULT_MAX_STEP / max(abs(dz), abs(dt), 1e-300))
    if sol.status != 0:
        raise StepUnderflow(sol.message)
    return sol.y[:, -1].reshape(n, n)


@dataclass(frozen=True)
class ExtendedCheck:
    loop_deviation: float
    normal_residual: float
    tangency_residual: float


def extended_connection_check(cf: ConnectionField, x: Optional[np.ndarray] = None,
                              center: Tuple[complex, float] = (0j, 0.0), side: float = 1e-2,
                              plane: str = "xt", tol: float = DEFAULT_TOL) -> ExtendedCheck:
    """Flatness of the extended connection and normality of the t-direction.

    The loop is a square of the given side in the (Re z, t) plane
    (``plane="xt"``), the (Im z, t) plane (``"yt"``) or at constant t
    (``"xy"``).  With ``x = h`` in the defining representation the developed
    points ``P(z, t)`` also give: the t-velocity ``P^-1/2 dP/dt P^-1/2`` must
    have the spectrum of ``-2h`` (``normal_residual``) and be orthogonal to the
    surface (``tangency_residual``).
    """
    rep = cf.rep
    x = rep.h if x is None else np.asarray(x, dtype=complex)
    ec = ExtendedConnection(cf, x)
    z0, t0 = complex(center[0]), float(center[1])
    s = side / 2
    offsets = [(-s, -s), (s, -s), (s, s), (-s, s), (-s, -s)]
    if plane == "xt":
        loop = [(z0 + a, t0 + b) for a, b in offsets]
    elif plane == "yt":
        loop = [(z0 + 1j * a, t0 + b) for a, b in offsets]
    elif plane == "xy":
        loop = [(z0 + complex(a, b), t0) for a, b in offsets]
    else:
        raise InputError(f"unknown plane {plane!r}")
    g = np.eye(rep.dim, dtype=complex)
    for p, q in zip(loop[:-1], loop[1:]):
        g = _transport_extended(ec, g, p, q, tol)
    dev = float(np.max(np.abs(g - np.eye(rep.dim))))

    normal_res = tangency_res = float("nan")
    if rep.is_defining:
        def point(z, t):
            gz = frame_at(cf, z, tol=tol * 1e-3, rtol=tol * 1e-3)
            gt = _transport_extended(ec, gz, (z, 0.0), (z, t), tol * 1e-3) if t != 0 else gz
            return ep_point(rep, gt, z)

        hstep = 1e-4
        p0 = point(z0, t0)
        pt = (point(z0, t0 + hstep) - point(z0, t0 - hstep)) / (2 * hstep)
        r = np.linalg.inv(sqrtm(p0))
        vel = r @ pt @ r
        ev = np.sort(np.linalg.eigvals(vel).real)
        target = np.sort(np.linalg.eigvals(-2 * x).real)
        normal_res = float(np.max(np.abs(ev - target)))
        px = (point(z0 + hstep, t0) - point(z0 - hstep, t0)) / (2 * hstep)
        py = (point(z0 + 1j * hstep, t0) - point(z0 - 1j * hstep, t0)) / (2 * hstep)
        pinv = np.linalg.inv(p0)
        ipp = lambda a, b: np.trace(pinv @ a @ pinv @ b).real
        tangency_res = float(max(abs(ipp(pt, px)), abs(ipp(pt, py)))
                             / math.sqrt(ipp(pt, pt) * max(ipp(px, px), ipp(py, py))))
    return ExtendedCheck(dev, normal_res, tangency_res)
