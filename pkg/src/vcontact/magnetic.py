"""Twisted cotangent dynamics over the hyperbolic disk and critical-value bounds.

The configuration space is the disk with the curvature -4 metric
(dx^2+dy^2)/(1-r^2)^2; the default magnetic field is twice its area form,
2 dx^dy/(1-r^2)^2, with bounded primitive theta0 = r^2 dphi/(1-r^2).  The
kinetic energy threshold separating bounded from escaping motion for this
normalization is 1/2, which the primitive-based upper bound reproduces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from .dynamics import BoundaryEscapeError, Trajectory

__all__ = [
    "MagneticSystem",
    "theta_zero",
    "dual_norm",
    "mane_upper_bound",
    "magnetic_flow",
    "closure_time",
]

_BOUNDARY = 1.0 - 1e-6


def theta_zero(z: complex) -> complex:
    """Default primitive r^2 dphi/(1-r^2) as a complex covector c_x + i c_y."""
    return 1j * z / (1.0 - abs(z) ** 2)


def _dtheta_zero(z: complex) -> float:
    return 2.0 / (1.0 - abs(z) ** 2) ** 2


def _default_sigma(z: complex) -> float:
    return 2.0 / (1.0 - abs(z) ** 2) ** 2


@dataclass
class MagneticSystem:
    """Hamiltonian (|p|^2/2 + U) with a closed 2-form twisting on the disk.

    sigma gives the dx^dy coefficient of the twist; theta is a primitive of
    sigma as a complex covector field (c_x + i c_y); U is the potential and
    grad_U its Euclidean gradient (finite differences when omitted).
    """

    sigma: Callable[[complex], float] = _default_sigma
    theta: Callable[[complex], complex] = theta_zero
    U: Callable[[complex], float] = lambda z: 0.0
    grad_U: Optional[Callable[[complex], complex]] = None

    def conformal(self, z: complex) -> float:
        """Inverse metric factor: g^{-1} = (1-r^2)^2 id."""
        return (1.0 - abs(z) ** 2) ** 2

    def hamiltonian(self, z: complex, p: complex) -> float:
        return 0.5 * self.conformal(z) * abs(p) ** 2 + self.U(z)

    def _grad_U(self, z: complex) -> complex:
        if self.grad_U is not None:
            return self.grad_U(z)
        h = 1e-6
        ux = (self.U(z + h) - self.U(z - h)) / (2 * h)
        uy = (self.U(z + 1j * h) - self.U(z - 1j * h)) / (2 * h)
        return complex(ux, uy)

    def check_primitive(self, points, tol: float = 1e-8, h: float = 1e-5) -> float:
        """Verify d(theta) = sigma by central differences at sample points."""
        worst = 0.0
        for z in points:
            dcy_dx = (self.theta(z + h).imag - self.theta(z - h).imag) / (2 * h)
            dcx_dy = (self.theta(z + 1j * h).real - self.theta(z - 1j * h).real) / (2 * h)
            worst = max(worst, abs(dcy_dx - dcx_dy - self.sigma(z)))
        if worst > tol:
            raise ValueError(f"theta is not a primitive of sigma (defect {worst:.2e})")
        return worst


def dual_norm(theta: Callable[[complex], complex], q: complex) -> float:
    """Metric dual norm of the covector at q: (1-r^2) |theta(q)|."""
    return (1.0 - abs(q) ** 2) * abs(theta(q))


def mane_upper_bound(
    sys: MagneticSystem,
    r_max: float,
    grid: tuple[int, int] = (400, 32),
) -> float:
    """sup over the sampled disk of |theta|^2/2 + U, for the fixed primitive.

    An upper bound for the critical value restricted to the supplied
    primitive; monotone non-decreasing in r_max.  The infimum over all
    primitives is an infinite-dimensional problem and is not attempted.
    """
    if not 0.0 < r_max < 1.0:
        raise ValueError("r_max must lie in (0, 1)")
    n_r, n_phi = grid
    best = -math.inf
    for r in np.linspace(0.0, r_max, n_r):
        for ph in np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False):
            z = r * complex(math.cos(ph), math.sin(ph))
            val = 0.5 * dual_norm(sys.theta, z) ** 2 + sys.U(z)
            best = max(best, val)
    return float(best)


def magnetic_flow(
    sys: MagneticSystem,
    x0: tuple[complex, complex],
    T: float,
    tol: float = 1e-10,
) -> Trajectory:
    """Integrate the twisted Hamilton equations in disk coordinates.

        qdot = (1-r^2)^2 p
        pdot = -dH/dq - sigma(q) (qdot rotated by -90 deg)

    States are (qx, qy, px, py); the energy along the run is stored in the
    diagnostics and its drift should stay below 100x the tolerance.  Raises
    BoundaryEscapeError with the partial trajectory when the orbit leaves
    the disk region |q| < 1 - 1e-6.
    """
    q0, p0 = x0
    y0 = np.array([q0.real, q0.imag, p0.real, p0.imag])
    H0 = sys.hamiltonian(q0, p0)
    if not math.isfinite(H0):
        raise ValueError("initial energy is not finite")

    def rhs(t, y):
        z = complex(y[0], y[1])
        p = complex(y[2], y[3])
        u = 1.0 - abs(z) ** 2
        qdot = u**2 * p
        # kinetic part of dH/dq: grad of u^2/2 is -2 u z, times |p|^2
        dHdq = -2.0 * u * z * abs(p) ** 2 + sys._grad_U(z)
        pdot = -dHdq - 1j * sys.sigma(z) * qdot
        return np.array([qdot.real, qdot.imag, pdot.real, pdot.imag])

    def boundary(t, y):
        return y[0] ** 2 + y[1] ** 2 - _BOUNDARY**2

    boundary.terminal = True
    boundary.direction = 1.0

    sol = solve_ivp(
        rhs,
        (0.0, T),
        y0,
        method="RK45",
        rtol=tol,
        atol=tol * 1e-2,
        events=[boundary],
        dense_output=True,
    )
    energies = np.array(
        [sys.hamiltonian(complex(y[0], y[1]), complex(y[2], y[3])) for y in sol.y.T]
    )
    traj = Trajectory(
        times=sol.t.copy(),
        states=sol.y.T.copy(),
        diagnostics={
            "energies": energies,
            "energy_drift": float(np.max(np.abs(energies - H0))),
            "H0": H0,
            "nfev": sol.nfev,
            "dense": sol.sol,
        },
        escaped=sol.status == 1,
    )
    if traj.escaped:
        raise BoundaryEscapeError("magnetic orbit left the disk region", traj)
    return traj


def closure_time(traj: Trajectory, t_min: float = 0.5) -> tuple[float, float]:
    """(time, phase-space distance) of the closest return to the start.

    Scans the dense output for the first near-return after t_min and
    polishes with a bounded scalar minimization.
    """
    dense = traj.diagnostics.get("dense")
    y0 = traj.states[0]
    if dense is None:
        ds = np.linalg.norm(traj.states - y0, axis=1)
        ok = traj.times > t_min
        i = int(np.argmin(np.where(ok, ds, np.inf)))
        return float(traj.times[i]), float(ds[i])

    def dist(t):
        return float(np.linalg.norm(dense(t) - y0))

    ts = np.linspace(t_min, traj.times[-1], 4000)
    ds = np.array([dist(t) for t in ts])
    i = int(np.argmin(ds))
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, len(ts) - 1)]
    res = minimize_scalar(dist, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    if res.fun < ds[i]:
        return float(res.x), float(res.fun)
    return float(ts[i]), float(ds[i])
