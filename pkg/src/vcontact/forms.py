"""Pointwise 1-forms, Reeb fields, compatible complex structures, energy kernels.

Everything lives on the trivial circle bundle over the disk with coordinates
(t, x, y), t taken mod 1.  Vectors and covectors are plain numpy arrays of
shape (3,) in the frame (dt, dx, dy) / (d/dt, d/dx, d/dy); 2-forms store the
three independent components (w_tx, w_ty, w_xy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .hyperbolic import Isometry

__all__ = [
    "CoverPoint",
    "TwoFormValue",
    "OneFormField",
    "MetricField",
    "Jet",
    "ContactFrame",
    "NonContactError",
    "product_metric",
    "euclidean_metric",
    "radial_one_form",
    "constant_form",
    "contact_volume",
    "reeb_vector",
    "kernel_field",
    "project_xi",
    "compatible_acs",
    "cylinder_acs",
    "cylinder_metric",
    "pullback_form",
    "average_form",
    "pullback_vector",
    "pushforward_vector",
    "energy_density",
    "energy_integrand",
    "cr_residual",
    "hofer_select",
    "check_d_consistency",
]

_FD_STEP = 1e-4


class NonContactError(ValueError):
    """The form fails to be contact at the requested point."""


@dataclass(frozen=True)
class CoverPoint:
    """Point (t, z) of S^1 x D, t normalized to [0, 1), |z| < 1."""

    t: float
    z: complex

    def __post_init__(self):
        object.__setattr__(self, "t", self.t % 1.0)
        if abs(self.z) >= 1.0 - 1e-12:
            raise ValueError("disk coordinate too close to the boundary")

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.t, self.z.real, self.z.imag])

    @property
    def r(self) -> float:
        return abs(self.z)

    def shift(self, dt: float = 0.0, dx: float = 0.0, dy: float = 0.0) -> "CoverPoint":
        return CoverPoint(self.t + dt, self.z + complex(dx, dy))


@dataclass(frozen=True)
class TwoFormValue:
    """2-form at a point: components against dt^dx, dt^dy, dx^dy."""

    wtx: float
    wty: float
    wxy: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [0.0, self.wtx, self.wty],
                [-self.wtx, 0.0, self.wxy],
                [-self.wty, -self.wxy, 0.0],
            ]
        )

    def apply(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(u @ self.matrix @ v)

    def contract(self, v: np.ndarray) -> np.ndarray:
        """Interior product: the covector omega(v, .)."""
        return v @ self.matrix

    def kernel_candidate(self) -> np.ndarray:
        """Vector spanning ker(omega) when the rank is 2 (unnormalized)."""
        return np.array([self.wxy, -self.wty, self.wtx])

    def norm(self) -> float:
        return math.sqrt(self.wtx**2 + self.wty**2 + self.wxy**2)


@dataclass
class OneFormField:
    """1-form given by a pointwise evaluator, optionally with analytic d.

    eval maps CoverPoint -> (c_t, c_x, c_y).  When d_eval is omitted the
    exterior derivative falls back to central finite differences with
    h = 1e-4.  Test fixtures may supply a d_eval unrelated to eval; use
    check_d_consistency to validate genuine forms.
    """

    eval: Callable[[CoverPoint], np.ndarray]
    d_eval: Optional[Callable[[CoverPoint], TwoFormValue]] = None
    name: str = ""

    def __call__(self, p: CoverPoint) -> np.ndarray:
        return np.asarray(self.eval(p), dtype=float)

    def pair(self, p: CoverPoint, v: np.ndarray) -> float:
        return float(self(p) @ np.asarray(v, dtype=float))

    def d(self, p: CoverPoint) -> TwoFormValue:
        if self.d_eval is not None:
            return self.d_eval(p)
        return self._fd_d(p)

    def _fd_d(self, p: CoverPoint, h: float = _FD_STEP) -> TwoFormValue:
        def comp(q):
            return self(q)

        dt = (comp(p.shift(dt=h)) - comp(p.shift(dt=-h))) / (2 * h)
        dx = (comp(p.shift(dx=h)) - comp(p.shift(dx=-h))) / (2 * h)
        dy = (comp(p.shift(dy=h)) - comp(p.shift(dy=-h))) / (2 * h)
        return TwoFormValue(
            wtx=dt[1] - dx[0],
            wty=dt[2] - dy[0],
            wxy=dx[2] - dy[1],
        )


def check_d_consistency(form: OneFormField, points, tol: float = 1e-6) -> float:
    """Max deviation between analytic d and central differences (h = 1e-4)."""
    if form.d_eval is None:
        return 0.0
    worst = 0.0
    for p in points:
        a = form.d_eval(p)
        b = form._fd_d(p)
        worst = max(
            worst, abs(a.wtx - b.wtx), abs(a.wty - b.wty), abs(a.wxy - b.wxy)
        )
    if worst > tol:
        raise ValueError(f"analytic exterior derivative off by {worst:.3e}")
    return worst


@dataclass
class MetricField:
    """Riemannian metric as a map CoverPoint -> SPD 3x3 matrix."""

    eval: Callable[[CoverPoint], np.ndarray]
    name: str = ""

    def mat(self, p: CoverPoint) -> np.ndarray:
        return np.asarray(self.eval(p), dtype=float)

    def inner(self, p: CoverPoint, u, v) -> float:
        return float(np.asarray(u) @ self.mat(p) @ np.asarray(v))

    def norm(self, p: CoverPoint, v) -> float:
        return math.sqrt(max(self.inner(p, v, v), 0.0))

    def dual_norm(self, p: CoverPoint, c) -> float:
        m = self.mat(p)
        return math.sqrt(max(float(np.asarray(c) @ np.linalg.solve(m, np.asarray(c))), 0.0))


def product_metric() -> MetricField:
    """dt^2 plus the curvature -4 Poincare metric on the disk factor."""

    def ev(p: CoverPoint) -> np.ndarray:
        u = 1.0 - abs(p.z) ** 2
        s = 1.0 / u**2
        return np.diag([1.0, s, s])

    return MetricField(ev, name="product")


def euclidean_metric() -> MetricField:
    return MetricField(lambda p: np.eye(3), name="euclidean")


def radial_one_form(A, Aprime, W, Wprime, name: str = "") -> OneFormField:
    """Form A(r) dt + W(r) (x dy - y dx) with analytic exterior derivative.

    d = A'(r) dr^dt + (r W'(r) + 2 W(r)) dx^dy.  The callables take the
    Euclidean radius; W absorbs the 1/r^2 of dphi so the axis is regular.
    """

    def ev(p: CoverPoint) -> np.ndarray:
        x, y = p.z.real, p.z.imag
        r = abs(p.z)
        w = W(r)
        return np.array([A(r), -w * y, w * x])

    def dev(p: CoverPoint) -> TwoFormValue:
        x, y = p.z.real, p.z.imag
        r = abs(p.z)
        ap = Aprime(r)
        if r > 1e-14:
            wtx, wty = -ap * x / r, -ap * y / r
        else:
            wtx = wty = 0.0
        return TwoFormValue(wtx=wtx, wty=wty, wxy=r * Wprime(r) + 2.0 * W(r))

    return OneFormField(ev, dev, name=name)


def constant_form(c, name: str = "") -> OneFormField:
    c = np.asarray(c, dtype=float)
    return OneFormField(
        lambda p: c,
        lambda p: TwoFormValue(0.0, 0.0, 0.0),
        name=name,
    )


# --- pullbacks -------------------------------------------------------------

def _bundle_jacobian(g: Isometry, z: complex) -> np.ndarray:
    """Differential of (t, z) -> (t, g(z)) as a real 3x3 matrix."""
    gp = g.deriv(z)
    return np.array(
        [
            [1.0, 0.0, 0.0],
            [0.0, gp.real, -gp.imag],
            [0.0, gp.imag, gp.real],
        ]
    )


def pushforward_vector(g: Isometry, p: CoverPoint, v) -> np.ndarray:
    return _bundle_jacobian(g, p.z) @ np.asarray(v, dtype=float)


def pullback_vector(g: Isometry, p: CoverPoint, v) -> np.ndarray:
    """dg^{-1} applied to a vector at g(p)."""
    return np.linalg.solve(_bundle_jacobian(g, p.z), np.asarray(v, dtype=float))


def apply_isometry(g: Isometry, p: CoverPoint) -> CoverPoint:
    return CoverPoint(p.t, complex(g(p.z)))


def pullback_form(form: OneFormField, g: Isometry) -> OneFormField:
    """g^* form: (g^*a)(p)(v) = a(g p)(dg v); d commutes with the pullback."""

    def ev(p: CoverPoint) -> np.ndarray:
        J = _bundle_jacobian(g, p.z)
        return J.T @ form(apply_isometry(g, p))

    def dev(p: CoverPoint) -> TwoFormValue:
        J = _bundle_jacobian(g, p.z)
        m = J.T @ form.d(apply_isometry(g, p)).matrix @ J
        return TwoFormValue(wtx=m[0, 1], wty=m[0, 2], wxy=m[1, 2])

    return OneFormField(ev, dev, name=f"pullback({form.name})")


def average_form(form: OneFormField, group_elements) -> OneFormField:
    """Arithmetic mean of the pullbacks over a finite list of isometries."""
    elements = list(group_elements)
    if not elements:
        raise ValueError("need at least one group element")
    pulls = [pullback_form(form, g) for g in elements]

    def ev(p: CoverPoint) -> np.ndarray:
        return sum(f(p) for f in pulls) / len(pulls)

    def dev(p: CoverPoint) -> TwoFormValue:
        mats = sum(f.d(p).matrix for f in pulls) / len(pulls)
        return TwoFormValue(wtx=mats[0, 1], wty=mats[0, 2], wxy=mats[1, 2])

    return OneFormField(ev, dev, name=f"avg({form.name})")


# --- contact-geometry operations -------------------------------------------

def contact_volume(lam: OneFormField, p: CoverPoint) -> float:
    """Coefficient of lam ^ d(lam) against dt^dx^dy; positive iff contact."""
    c = lam(p)
    w = lam.d(p)
    return float(c[0] * w.wxy - c[1] * w.wty + c[2] * w.wtx)


def reeb_vector(lam: OneFormField, p: CoverPoint) -> np.ndarray:
    """The unique X with d(lam)(X, .) = 0 and lam(X) = 1."""
    w = lam.d(p)
    k = w.kernel_candidate()
    vol = contact_volume(lam, p)  # equals lam(k)
    scale = max(w.norm(), 1.0)
    if abs(vol) < 1e-14 * scale:
        raise NonContactError(f"lam ^ dlam vanishes at {p}")
    return k / vol


def kernel_field(
    omega: Callable[[CoverPoint], TwoFormValue],
    p: CoverPoint,
    metric: Optional[MetricField] = None,
    orientation=None,
) -> np.ndarray:
    """Metric-unit spanning vector of ker(omega), oriented along a frame.

    orientation is a reference vector (or callable point -> vector); the
    sign is fixed so the Euclidean pairing with it is positive.  Default
    reference is d/dt.
    """
    metric = metric or product_metric()
    w = omega(p)
    k = w.kernel_candidate()
    nk = np.linalg.norm(k)
    if nk < 1e-12 * max(w.norm(), 1.0) or w.norm() == 0.0:
        raise ValueError(f"2-form is rank deficient at {p}")
    residual = np.max(np.abs(w.contract(k)))
    if residual > 1e-10 * max(nk, 1.0) * max(w.norm(), 1.0):
        raise ValueError("kernel candidate fails to annihilate the form")
    unit = k / metric.norm(p, k)
    ref = orientation(p) if callable(orientation) else orientation
    if ref is None:
        ref = np.array([1.0, 0.0, 0.0])
    if float(unit @ np.asarray(ref, dtype=float)) < 0.0:
        unit = -unit
    return unit


def project_xi(lam: OneFormField, p: CoverPoint, v) -> np.ndarray:
    """Projection onto ker(lam) along the Reeb direction."""
    v = np.asarray(v, dtype=float)
    x = reeb_vector(lam, p)
    return v - lam.pair(p, v) * x


@dataclass
class ContactFrame:
    """Contact data of (lam, metric) at a point.

    E1, E2 is an m-orthonormal basis of ker(lam); J2 is the compatible
    complex structure in that basis, rescaled so that J^2 = -1; c is the
    positive scalar with  m(pi u, pi v) = d(lam)(pi u, c J pi v).
    """

    p: CoverPoint
    lam_val: np.ndarray
    dlam: TwoFormValue
    X: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    omega12: float
    c: float
    J2: np.ndarray
    metric: MetricField

    def lam(self, v) -> float:
        return float(self.lam_val @ np.asarray(v, dtype=float))

    def project(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return v - self.lam(v) * self.X

    def xi_coords(self, v) -> np.ndarray:
        m = self.metric.mat(self.p)
        w = self.project(v)
        return np.array([self.E1 @ m @ w, self.E2 @ m @ w])

    def J(self, v) -> np.ndarray:
        """Ambient action of J on the xi-part of v (kills the Reeb part)."""
        a = self.J2 @ self.xi_coords(v)
        return a[0] * self.E1 + a[1] * self.E2

    def xi_norm2(self, v) -> float:
        a = self.xi_coords(v)
        return float(a @ a)


def compatible_acs(lam: OneFormField, metric: MetricField, p: CoverPoint) -> ContactFrame:
    """Construct the metric-compatible complex structure on ker(lam).

    The defining relation m(pi k1, pi k2) = dlam(pi k1, J pi k2) forces, in
    two dimensions, J^2 = -c^2 id for the scalar c = |dlam(E1, E2)|^-1 in
    an m-orthonormal basis; we return the rescaled J with J^2 = -1 along
    with c.
    """
    lam_val = lam(p)
    dlam = lam.d(p)
    X = reeb_vector(lam, p)
    m = metric.mat(p)

    def proj(v):
        v = np.asarray(v, dtype=float)
        return v - float(lam_val @ v) * X

    candidates = [
        np.array([0.0, 1.0, 0.0]),
        np.array([0.0, 0.0, 1.0]),
        np.array([1.0, 0.0, 0.0]),
    ]
    basis = []
    for cand in candidates:
        w = proj(cand)
        for e in basis:
            w = w - float(e @ m @ w) * e
        n = math.sqrt(max(float(w @ m @ w), 0.0))
        if n > 1e-8:
            basis.append(w / n)
        if len(basis) == 2:
            break
    if len(basis) < 2:
        raise NonContactError("could not build a basis of the contact plane")
    E1, E2 = basis

    omega12 = dlam.apply(E1, E2)
    if abs(omega12) < 1e-14:
        raise NonContactError("dlam degenerates on the contact plane")
    c = 1.0 / abs(omega12)
    sign = 1.0 if omega12 > 0 else -1.0
    J2 = sign * np.array([[0.0, -1.0], [1.0, 0.0]])
    return ContactFrame(
        p=p,
        lam_val=lam_val,
        dlam=dlam,
        X=X,
        E1=E1,
        E2=E2,
        omega12=float(omega12),
        c=float(c),
        J2=J2,
        metric=metric,
    )


def cylinder_acs(frame: ContactFrame) -> np.ndarray:
    """4x4 complex structure on R x (S^1 x D) in the basis (d/da, d/dt, d/dx, d/dy).

    (h, k) -> (-lam(k), J pi k + h X).
    """
    M = np.zeros((4, 4))
    M[1:, 0] = frame.X
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        M[0, 1 + i] = -frame.lam(e)
        M[1:, 1 + i] = frame.J(e)
    return M


def cylinder_metric(frame: ContactFrame) -> np.ndarray:
    """4x4 metric h1 h2 + lam(k1) lam(k2) + m(pi k1, pi k2)."""
    G = np.zeros((4, 4))
    G[0, 0] = 1.0
    m = frame.metric.mat(frame.p)
    for i in range(3):
        ei = np.zeros(3)
        ei[i] = 1.0
        for j in range(3):
            ej = np.zeros(3)
            ej[j] = 1.0
            G[1 + i, 1 + j] = frame.lam(ei) * frame.lam(ej) + float(
                frame.project(ei) @ m @ frame.project(ej)
            )
    return G


# --- energy kernels ---------------------------------------------------------

@dataclass(frozen=True)
class Jet:
    """First-order data of a cylinder map at a point: (a_s, a_t, u_s, u_t)."""

    p: CoverPoint
    a_s: float
    a_t: float
    u_s: np.ndarray
    u_t: np.ndarray


def energy_density(
    lam: OneFormField,
    phi_prime: float,
    phi_val: float,
    jet: Jet,
    metric: Optional[MetricField] = None,
) -> tuple[float, float]:
    """Split the energy integrand: returns (diamond, star).

    diamond = a_s^2 + a_t^2 + lam(u_s)^2 + lam(u_t)^2 collects the Reeb and
    cylinder directions; star = |pi u_s|^2 + |pi u_t|^2 the contact-plane
    part.  The integrand itself is phi'/2 * diamond + phi/2 * star.
    """
    if phi_prime < 0 or not 0.0 <= phi_val <= 1.0:
        raise ValueError("need phi' >= 0 and phi in [0, 1]")
    metric = metric or product_metric()
    frame = compatible_acs(lam, metric, jet.p)
    ls, lt = frame.lam(jet.u_s), frame.lam(jet.u_t)
    diamond = jet.a_s**2 + jet.a_t**2 + ls**2 + lt**2
    star = frame.xi_norm2(jet.u_s) + frame.xi_norm2(jet.u_t)
    return float(diamond), float(star)


def energy_integrand(
    lam: OneFormField,
    phi_prime: float,
    phi_val: float,
    jet: Jet,
    metric: Optional[MetricField] = None,
) -> float:
    d, s = energy_density(lam, phi_prime, phi_val, jet, metric)
    return 0.5 * phi_prime * d + 0.5 * phi_val * s


def cr_residual(lam: OneFormField, frame: ContactFrame, jet: Jet) -> float:
    """Pointwise defect of the holomorphic-cylinder system.

    Zero iff pi u_s + J pi u_t = 0, lam(u_s) = -a_t and lam(u_t) = a_s.
    """
    w = frame.project(jet.u_s) + frame.J(jet.u_t)
    m = frame.metric.mat(frame.p)
    plane = float(w @ m @ w)
    r1 = frame.lam(jet.u_s) + jet.a_t
    r2 = frame.lam(jet.u_t) - jet.a_s
    return math.sqrt(max(plane, 0.0) + r1**2 + r2**2)


def hofer_select(R, points, x0, eps0: float, metric=None, max_iter: int = 200):
    """Select (x, eps) with R(x0) eps0 <= R(x) eps and R <= 2 R(x) near x.

    Standard halving iteration on a sampled metric space: while some
    sampled y within eps of x has R(y) > 2 R(x), move there and halve eps.
    Guarantees d(x, x0) <= 2 eps0 by the geometric series.
    """
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    if metric is None:
        metric = lambda a, b: float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))
    x, eps = x0, float(eps0)
    for _ in range(max_iter):
        rx = R(x)
        worse = None
        for y in points:
            if metric(x, y) <= eps and R(y) > 2.0 * rx:
                worse = y
                break
        if worse is None:
            return x, eps
        x, eps = worse, eps / 2.0
    raise RuntimeError("hofer_select failed to terminate; R unbounded near x0?")
