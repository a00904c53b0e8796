"""Flow integration, Poincare-section orbit search, and homotopy certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .forms import CoverPoint
from .lutz import LutzData

__all__ = [
    "Trajectory",
    "OrbitRecord",
    "Section",
    "BoundaryEscapeError",
    "NonConvergenceError",
    "integrate_flow",
    "find_periodic_orbit",
    "homotopy_data",
    "phi_section",
    "t_section",
]

_BOUNDARY = 1.0 - 1e-6


class BoundaryEscapeError(RuntimeError):
    """Trajectory approached the rim of the covered region."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class NonConvergenceError(RuntimeError):
    pass


@dataclass
class Trajectory:
    """Sampled integral curve on the cover; t is stored unwrapped."""

    times: np.ndarray
    states: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    escaped: bool = False

    @property
    def start(self) -> np.ndarray:
        return self.states[0]

    @property
    def end(self) -> np.ndarray:
        return self.states[-1]

    @property
    def t_advance(self) -> float:
        return float(self.states[-1, 0] - self.states[0, 0])

    def closure_residual(self) -> float:
        dt = self.t_advance
        dt_wrapped = dt - round(dt)
        dz = self.states[-1, 1:] - self.states[0, 1:]
        return math.sqrt(dt_wrapped**2 + float(dz @ dz))


@dataclass
class OrbitRecord:
    seed: CoverPoint
    period: float
    closure_residual: float
    t_winding: int
    contractible: bool
    tube_id: Optional[int] = None
    trajectory: Optional[Trajectory] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("period must be positive")
        if self.contractible and self.t_winding != 0:
            raise ValueError("a contractible orbit cannot wind in t")


def _as_state(x0) -> np.ndarray:
    if isinstance(x0, CoverPoint):
        return np.array([x0.t, x0.z.real, x0.z.imag])
    return np.asarray(x0, dtype=float).copy()


def integrate_flow(
    fld,
    x0,
    T: float,
    tol: float = 1e-10,
    interface_events: Optional[list] = None,
    raise_on_escape: bool = True,
    max_step: float = np.inf,
) -> Trajectory:
    """Adaptive RK45 integration with restarts at region interfaces.

    fld maps a raw state (t, x, y) to its velocity; interface events are
    scalar functions whose zero crossings mark non-smooth loci of the
    field.  Crossing times are located to solver precision and integration
    restarts there, so the formal order of the scheme is preserved on each
    smooth piece.  Trajectories reaching |z| > 1 - 1e-6 stop; by default
    that raises BoundaryEscapeError carrying the partial trajectory.
    """
    y0 = _as_state(x0)
    if hasattr(fld, "raw"):
        rhs = lambda t, y: fld.raw(y)
    else:
        rhs = lambda t, y: np.asarray(fld(y), dtype=float)

    def boundary(t, y):
        return y[1] ** 2 + y[2] ** 2 - _BOUNDARY**2

    boundary.terminal = True
    boundary.direction = 1.0

    events = [boundary]
    interface_events = interface_events or []
    for ev in interface_events:
        wrapped = (lambda f: (lambda t, y: f(y)))(ev)
        wrapped.terminal = True
        wrapped.direction = 0.0
        events.append(wrapped)

    times = [0.0]
    states = [y0.copy()]
    t_now, y_now = 0.0, y0.copy()
    escaped = False
    n_events = 0
    nfev = 0
    for _ in range(1000):
        sol = solve_ivp(
            rhs,
            (t_now, T),
            y_now,
            method="RK45",
            rtol=tol,
            atol=tol * 1e-2,
            events=events,
            dense_output=False,
            max_step=max_step,
        )
        nfev += sol.nfev
        times.extend(sol.t[1:].tolist())
        states.extend(sol.y.T[1:])
        t_now, y_now = float(sol.t[-1]), sol.y[:, -1].copy()
        if sol.status == 1:  # event
            if sol.t_events[0].size > 0:
                escaped = True
                break
            n_events += 1
            # restart just past the interface along the flow
            h = max(1e-12, 1e-12 * abs(T))
            y_now = y_now + h * rhs(t_now, y_now)
            t_now += h
            if t_now >= T:
                break
            continue
        break

    traj = Trajectory(
        times=np.asarray(times),
        states=np.asarray(states),
        diagnostics={"nfev": nfev, "interface_crossings": n_events, "tol": tol},
        escaped=escaped,
    )
    if escaped and raise_on_escape:
        raise BoundaryEscapeError("trajectory left the covered region", traj)
    return traj


# --- sections ------------------------------------------------------------------

@dataclass
class Section:
    """Transverse hypersurface for return maps.

    value vanishes on the section (continuous near it); chart/embed
    identify the section with a 2d parameter plane.
    """

    value: Callable[[np.ndarray], float]
    chart: Callable[[np.ndarray], np.ndarray]
    embed: Callable[[np.ndarray], np.ndarray]
    direction: float = -1.0
    name: str = ""


def phi_section(t_ref: float = 0.0, direction: float = -1.0) -> Section:
    """Section {phi = 0, x > 0} in the central tube, charted by (t, r)."""

    def value(y):
        return math.atan2(y[2], y[1])

    def chart(y):
        return np.array([y[0], math.hypot(y[1], y[2])])

    def embed(xi):
        return np.array([xi[0], xi[1], 0.0])

    return Section(value=value, chart=chart, embed=embed, direction=direction, name="phi=0")


def t_section(t0: float = 0.0, direction: float = 1.0) -> Section:
    """Section {t = t0 mod 1}, charted by (x, y)."""

    def value(y):
        s = (y[0] - t0 + 0.5) % 1.0 - 0.5
        return s

    def chart(y):
        return np.array([y[1], y[2]])

    def embed(xi):
        return np.array([t0, xi[0], xi[1]])

    return Section(value=value, chart=chart, embed=embed, direction=direction, name="t=t0")


def _return_map(fld, section: Section, y0, tol, horizon, interface_events=None):
    """Integrate to the first directed section crossing after a short blackout."""
    rhs = (lambda y: fld.raw(y)) if hasattr(fld, "raw") else (lambda y: np.asarray(fld(y), dtype=float))
    t_min = 1e-3 * horizon
    t_now, y_now = 0.0, _as_state(y0)
    all_t = [0.0]
    all_y = [y_now.copy()]
    for _ in range(64):
        sol = solve_ivp(
            lambda t, y: rhs(y),
            (t_now, t_now + horizon),
            y_now,
            method="RK45",
            rtol=tol,
            atol=tol * 1e-2,
            dense_output=True,
            max_step=horizon / 50.0,
        )
        ts = np.linspace(sol.t[0], sol.t[-1], 400)
        vals = np.array([section.value(sol.sol(t)) for t in ts])
        for i in range(len(ts) - 1):
            if ts[i + 1] <= t_min:
                continue
            a, b = vals[i], vals[i + 1]
            if abs(b - a) > 0.5:  # chart wrap, not a crossing
                continue
            if a == 0.0 and b == 0.0:
                continue
            crossed = (a < 0.0 <= b) if section.direction > 0 else (a > 0.0 >= b)
            if not crossed:
                continue
            t_hit = brentq(lambda t: section.value(sol.sol(t)), ts[i], ts[i + 1], xtol=1e-14)
            if t_hit <= t_min:
                continue
            y_hit = sol.sol(t_hit)
            all_t.append(t_hit)
            all_y.append(y_hit.copy())
            return y_hit, float(t_hit), Trajectory(np.array(all_t), np.array(all_y))
        t_now, y_now = float(sol.t[-1]), sol.y[:, -1].copy()
        all_t.append(t_now)
        all_y.append(y_now.copy())
        if y_now[1] ** 2 + y_now[2] ** 2 >= _BOUNDARY**2:
            raise BoundaryEscapeError("escaped during return map")
    raise NonConvergenceError("no section crossing found within the horizon budget")


def find_periodic_orbit(
    fld,
    section: Section,
    seed: CoverPoint,
    max_iter: int = 25,
    tol: float = 1e-11,
    horizon: float = 4.0,
    data: Optional[LutzData] = None,
) -> OrbitRecord:
    """Newton iteration on the Poincare return map.

    The Jacobian comes from finite differences of the return chart; the
    least-squares step handles the rank deficiency of translation-invariant
    directions.  Converged means the full-state closure residual of the
    returned loop is below 1e-8.
    """
    y_seed = _as_state(seed)
    rhs = (lambda y: fld.raw(y)) if hasattr(fld, "raw") else (lambda y: np.asarray(fld(y), dtype=float))
    v = rhs(y_seed)
    g = _fd_grad(section.value, y_seed)
    if abs(float(g @ v)) < 1e-10 * max(1.0, float(np.linalg.norm(v))):
        raise ValueError("section is not transverse to the field at the seed")

    xi = section.chart(y_seed)
    h = 1e-7 * max(1.0, float(np.linalg.norm(xi)))
    last = None
    for _ in range(max_iter):
        y0 = section.embed(xi)
        y1, period, traj = _return_map(fld, section, y0, tol, horizon)
        res = _closure(y0, y1)
        last = (y0, y1, period, traj, res)
        if res < 1e-8:
            t_winding = int(round(y1[0] - y0[0]))
            tube_id, contractible = homotopy_data_raw(traj, data)
            contractible = contractible and t_winding == 0
            return OrbitRecord(
                seed=CoverPoint(float(y0[0]), complex(y0[1], y0[2])),
                period=float(period),
                closure_residual=float(res),
                t_winding=t_winding,
                contractible=contractible,
                tube_id=tube_id,
                trajectory=traj,
            )
        F = section.chart(y1) - xi
        J = np.empty((2, 2))
        for k in range(2):
            d = np.zeros(2)
            d[k] = h
            yk, _, _ = _return_map(fld, section, section.embed(xi + d), tol, horizon)
            J[:, k] = (section.chart(yk) - (xi + d) - F) / h
        step, *_ = np.linalg.lstsq(J, -F, rcond=None)
        if float(np.linalg.norm(step)) < 1e-15:
            raise NonConvergenceError(
                f"stalled with closure residual {res:.3e}; no periodic orbit nearby"
            )
        xi = xi + step
    raise NonConvergenceError(
        f"no convergence after {max_iter} iterations "
        f"(last closure residual {last[4]:.3e})"
    )


def _fd_grad(f, y, h: float = 1e-7) -> np.ndarray:
    g = np.empty(len(y))
    for k in range(len(y)):
        d = np.zeros(len(y))
        d[k] = h
        g[k] = (f(y + d) - f(y - d)) / (2 * h)
    return g


def _closure(y0, y1) -> float:
    dt = (y1[0] - y0[0]) - round(y1[0] - y0[0])
    dz = y1[1:] - y0[1:]
    return math.sqrt(dt**2 + float(dz @ dz))


def homotopy_data_raw(trajectory: Trajectory, data: Optional[LutzData]):
    """(tube index or None, loop-in-one-tube flag) for the disk projection."""
    if data is None:
        return None, False
    zs = trajectory.states[:, 1] + 1j * trajectory.states[:, 2]
    for i, w in enumerate(data.tube_words):
        wi = w.inverse()
        if np.max(np.abs(wi(zs))) < data.delta:
            return i, True
    return None, False


def homotopy_data(orbit: OrbitRecord, trajectory: Trajectory, data: Optional[LutzData] = None):
    """Winding of the circle coordinate and a sufficient contractibility flag.

    The loop is declared contractible when its t-winding vanishes and its
    disk projection stays inside a single covered tube, which is an
    embedded disk in the base surface; the criterion is sufficient, not
    necessary, and the False branch means "not certified".
    """
    t_winding = int(round(trajectory.t_advance))
    _, in_tube = homotopy_data_raw(trajectory, data)
    return t_winding, bool(t_winding == 0 and in_tube)
