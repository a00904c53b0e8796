"""Radial twist profiles, the twisted 1-form, and its kernel-spanning field.

The twist replaces dt + r^2 dphi/(1-r^2) inside disjoint tubes of Euclidean
radius delta around the deck orbit of 0 by f1(r) dt + f2(r) dphi, where the
C^1 profiles f1, f2 run from (-1, -r^2/(1-r^2)) at the core to
(+1, +r^2/(1-r^2)) at the rim.  All numbered constants below (case bounds,
pinned values) are re-verified by the test suite directly on the built
profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .hyperbolic import (
    FuchsianGroup,
    Isometry,
    enumerate_words,
    genus2_generators,
    validate_separation,
)
from .forms import CoverPoint, OneFormField, TwoFormValue, radial_one_form

__all__ = [
    "Profile",
    "LutzData",
    "InfeasibleProfileError",
    "base_alpha",
    "alpha_sup_norm",
    "build_profiles",
    "default_lutz_data",
    "lutz_form",
    "lutz_reeb_like",
    "ReebLikeField",
    "bound_L",
    "smooth_profiles",
    "SmoothedProfile",
]


class InfeasibleProfileError(ValueError):
    """Solved profile slopes violate the required sign pattern."""


# --- piecewise profiles ------------------------------------------------------

@dataclass(frozen=True)
class _Piece:
    lo: float
    hi: float
    kind: str  # "rational" or "poly"
    sign: float = 0.0  # rational: f = sign * r^2/(1-r^2)
    dcoef: tuple = ()  # poly: f'(r) = sum dcoef[k] * (r-lo)^k
    val_lo: float = 0.0  # poly: f(lo)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "rational":
            return self.sign * r**2 / (1.0 - r**2)
        s = r - self.lo
        out = np.full_like(s, self.val_lo)
        for k, c in enumerate(self.dcoef):
            out = out + c * s ** (k + 1) / (k + 1)
        return out

    def deriv(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "rational":
            return self.sign * 2.0 * r / (1.0 - r**2) ** 2
        s = r - self.lo
        out = np.zeros_like(s)
        for k, c in enumerate(self.dcoef):
            out = out + c * s**k
        return out

    def value_hi(self) -> float:
        return float(self.value(self.hi))


class Profile:
    """Piecewise C^1 radial profile on [lo, hi].

    Pieces are either exact rationals +- r^2/(1-r^2) or polynomials given
    through their derivative coefficients; evaluation outside the domain
    raises.  Derivative-kink locations are exposed as breakpoints.
    """

    def __init__(self, pieces: list[_Piece], name: str = ""):
        self.pieces = pieces
        self.name = name
        self.lo = pieces[0].lo
        self.hi = pieces[-1].hi

    @property
    def breakpoints(self) -> list[float]:
        return [p.lo for p in self.pieces[1:]]

    def _check_domain(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self.lo - 1e-12) or np.any(r > self.hi + 1e-12):
            raise ValueError(
                f"profile {self.name!r} evaluated outside [{self.lo}, {self.hi}]"
            )
        return np.clip(r, self.lo, self.hi)

    def _dispatch(self, r, fn: str):
        r = self._check_domain(r)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        out = np.empty_like(r)
        filled = np.zeros(r.shape, dtype=bool)
        for i, piece in enumerate(self.pieces):
            if i == len(self.pieces) - 1:
                mask = (~filled) & (r >= piece.lo - 1e-15)
            else:
                mask = (~filled) & (r < piece.hi)
            if np.any(mask):
                out[mask] = getattr(piece, fn)(r[mask])
                filled |= mask
        return float(out[0]) if scalar else out

    def value(self, r):
        return self._dispatch(r, "value")

    def deriv(self, r):
        return self._dispatch(r, "deriv")

    def piece_functions_at(self, bp: float):
        """(left, right) pieces meeting at an interior breakpoint."""
        for i, piece in enumerate(self.pieces[1:], start=1):
            if abs(piece.lo - bp) < 1e-14:
                return self.pieces[i - 1], piece
        raise KeyError(f"{bp} is not a breakpoint of {self.name!r}")

    def c1_defects(self) -> list[tuple[float, float, float]]:
        """(breakpoint, |value jump|, |derivative jump|) at each seam."""
        out = []
        for bp in self.breakpoints:
            left, right = self.piece_functions_at(bp)
            dv = abs(left.value_hi() - float(right.value(bp)))
            dd = abs(float(left.deriv(bp)) - float(right.deriv(bp)))
            out.append((bp, dv, dd))
        return out


def _poly_piece(lo, hi, dcoef, val_lo) -> _Piece:
    return _Piece(lo=lo, hi=hi, kind="poly", dcoef=tuple(dcoef), val_lo=val_lo)


def _rational_piece(lo, hi, sign) -> _Piece:
    return _Piece(lo=lo, hi=hi, kind="rational", sign=sign)


# --- the base form -----------------------------------------------------------

def base_alpha() -> OneFormField:
    """dt + r^2 dphi / (1 - r^2); exterior derivative 2/(1-r^2)^2 dx^dy."""
    return radial_one_form(
        A=lambda r: 1.0,
        Aprime=lambda r: 0.0,
        W=lambda r: 1.0 / (1.0 - r * r),
        Wprime=lambda r: 2.0 * r / (1.0 - r * r) ** 2,
        name="alpha",
    )


def alpha_sup_norm(r: float) -> float:
    """Product-metric dual norm of the base form at radius r: sqrt(1 + r^2)."""
    return math.sqrt(1.0 + r * r)


# --- profile construction ----------------------------------------------------

def build_profiles(delta: float, eps: float, C: float):
    """Assemble (f1, f2, h) from the closed-form case templates.

    f1 is exactly the quadratic/linear/quadratic chain with slope
    4/(2 delta - 3 eps) in the middle; f2 keeps the exact rational tails and
    carries a piecewise-linear derivative on the middle annulus whose two
    constant slopes s_L < 0 < s_R are solved from the pinned values
    f2(delta/2) = -4C and the two rational junction values.  The junction
    slopes are the analytic rational derivatives, so the whole profile is
    C^1 to rounding; the left one equals -eps up to O(eps^3).
    """
    if not 0.0 < delta <= 1.0 / 3.0:
        raise ValueError("delta must lie in (0, 1/3]")
    if not 0.0 < eps <= delta / 10.0:
        raise ValueError("eps must lie in (0, delta/10]")
    if C < 1.0:
        raise ValueError("C must be >= 1")

    q = 4.0 / (2.0 * eps * delta - 3.0 * eps**2)
    k = 4.0 / (2.0 * delta - 3.0 * eps)

    f1 = Profile(
        [
            _poly_piece(0.0, eps / 2, (), -1.0),
            _poly_piece(eps / 2, eps, (0.0, 2.0 * q), -1.0),
            _poly_piece(eps, delta - eps, (k,), (4 * eps - 2 * delta) / (2 * delta - 3 * eps)),
            _poly_piece(delta - eps, delta - eps / 2, (q * eps, -2.0 * q), k * (delta / 2 - eps)),
            _poly_piece(delta - eps / 2, delta, (), 1.0),
        ],
        name="f1",
    )

    def rat_neg(r):
        return -r * r / (1.0 - r * r)

    def rat_pos(r):
        return r * r / (1.0 - r * r)

    m0 = -2.0 * (eps / 2) / (1.0 - (eps / 2) ** 2) ** 2   # f2'(eps/2-), = -eps + O(eps^3)
    m1 = 2.0 * (delta - eps / 2) / (1.0 - (delta - eps / 2) ** 2) ** 2

    width = delta / 2 - 5.0 * eps / 4
    sL = (-4.0 * C - rat_neg(eps / 2) - (eps / 4) * m0) / width
    sR = (rat_pos(delta - eps / 2) + 4.0 * C - (eps / 4) * m1) / width
    if not sL < 0.0 < sR:
        raise InfeasibleProfileError(f"solved slopes sL={sL}, sR={sR} have wrong signs")

    # chain the values through the antiderivatives of the derivative pieces
    pieces = [_rational_piece(0.0, eps / 2, -1.0)]
    segs = [
        (eps / 2, eps, (m0, (sL - m0) / (eps / 2))),
        (eps, delta / 2 - eps, (sL,)),
        (delta / 2 - eps, delta / 2, (sL, -sL / eps)),
        (delta / 2, delta / 2 + eps, (0.0, sR / eps)),
        (delta / 2 + eps, delta - eps, (sR,)),
        (delta - eps, delta - eps / 2, (sR, (m1 - sR) / (eps / 2))),
    ]
    val = rat_neg(eps / 2)
    for lo, hi, dcoef in segs:
        piece = _poly_piece(lo, hi, dcoef, val)
        pieces.append(piece)
        val = piece.value_hi()
    pieces.append(_rational_piece(delta - eps / 2, delta, +1.0))
    f2 = Profile(pieces, name="f2")

    h = Profile(
        [_poly_piece(delta - eps / 2, delta, ((1.0 - m1) / (eps / 2),), m1)],
        name="h",
    )
    return f1, f2, h


@dataclass
class LutzData:
    """Twist parameters, profiles, and the covered tube system."""

    delta: float
    eps: float
    C: float
    f1: Profile
    f2: Profile
    h: Profile
    r_star: float
    tube_words: list[Isometry]
    tube_centers: np.ndarray
    group: FuchsianGroup
    depth: int
    separation_margin: float

    def _word_arrays(self):
        """Cached Mobius coefficients of the tube words and their inverses."""
        cached = getattr(self, "_warr", None)
        if cached is None:
            e = np.array([np.exp(1j * w.theta) for w in self.tube_words])
            a = np.array([w.a for w in self.tube_words])
            inv = [w.inverse() for w in self.tube_words]
            ie = np.array([np.exp(1j * w.theta) for w in inv])
            ia = np.array([w.a for w in inv])
            cached = (e, a, ie, ia)
            self._warr = cached
        return cached

    def word_images(self, z: complex) -> np.ndarray:
        """|w(z)| for every tube word at once."""
        e, a, _, _ = self._word_arrays()
        return np.abs(e * (z - a) / (1.0 - np.conjugate(a) * z))

    def inverse_images(self, z: complex) -> np.ndarray:
        """|w^{-1}(z)| for every tube word at once (tube-local radii)."""
        _, _, ie, ia = self._word_arrays()
        return np.abs(ie * (z - ia) / (1.0 - np.conjugate(ia) * z))

    def core_rate(self) -> float:
        """f2'(eps/2): the constant t-rate of the kernel field on the core."""
        return float(self.f2.deriv(self.eps / 2))

    def middle_slope(self) -> float:
        """f1'(delta/2) = 4/(2 delta - 3 eps)."""
        return float(self.f1.deriv(self.delta / 2))

    def analytic_lower_bound(self) -> float:
        """Word-independent lower bound for the twisted pairing."""
        return min(
            7.0 * self.eps / 8.0,
            12.0 * self.C / (5.0 * self.delta),
            2.0 * self.C / self.delta,
            -self.core_rate(),
            float(self.h.value(self.delta - self.eps / 2)),
            1.0,
        )

    def local_radius(self, z: complex):
        """(word index, tube-local radius) of the tube containing z, else None."""
        radii = self.inverse_images(z)
        hits = np.nonzero(radii < self.delta)[0]
        if hits.size == 0:
            return None
        if hits.size > 1:
            raise ValueError("point within 1e-10 of two tube closures")
        i = int(hits[0])
        return i, float(radii[i])


def default_lutz_data(
    group: Optional[FuchsianGroup] = None,
    delta: float = 0.3,
    eps: Optional[float] = None,
    C: Optional[float] = None,
    depth: int = 3,
) -> LutzData:
    """Defaults delta = 0.3, eps = delta/10, C = sqrt(2); delta is halved
    until the tube system separates (never needed for the octagon group)."""
    from scipy.optimize import brentq

    group = group or genus2_generators()
    while True:
        ok, margin = validate_separation(group, delta, depth)
        if ok:
            break
        delta = delta / 2.0
    eps = delta / 10.0 if eps is None else eps
    C = max(math.sqrt(2.0), 1.0) if C is None else C

    f1, f2, h = build_profiles(delta, eps, C)
    r_star = float(brentq(lambda r: f2.value(r), delta / 2, delta - eps / 2, xtol=1e-15))
    words = enumerate_words(group, depth)
    centers = np.array([complex(w(0.0 + 0.0j)) for w in words])
    return LutzData(
        delta=delta,
        eps=eps,
        C=C,
        f1=f1,
        f2=f2,
        h=h,
        r_star=r_star,
        tube_words=words,
        tube_centers=centers,
        group=group,
        depth=depth,
        separation_margin=margin,
    )


# --- the twisted form --------------------------------------------------------

def _radial_fn(impl):
    """Lift an array implementation to accept scalars and return scalars."""

    def wrapped(r):
        arr = np.atleast_1d(np.asarray(r, dtype=float))
        out = impl(arr)
        return float(out[0]) if np.ndim(r) == 0 else out

    return wrapped


def _eta_local(data: LutzData, fA: Profile, fB: Profile) -> OneFormField:
    """(f1 - 1) dt + (f2 - r^2/(1-r^2)) dphi on the central tube, 0 outside."""
    delta, eps = data.delta, data.eps

    @_radial_fn
    def A(r):
        out = np.zeros_like(r)
        inside = r < delta
        if np.any(inside):
            out[inside] = fA.value(r[inside]) - 1.0
        return out

    @_radial_fn
    def Aprime(r):
        out = np.zeros_like(r)
        inside = r < delta
        if np.any(inside):
            out[inside] = fA.deriv(r[inside])
        return out

    @_radial_fn
    def W(r):
        out = np.zeros_like(r)
        core = r < eps / 2
        mid = (r >= eps / 2) & (r < delta)
        out[core] = -2.0 / (1.0 - r[core] ** 2)
        if np.any(mid):
            rm = r[mid]
            out[mid] = (fB.value(rm) - rm**2 / (1.0 - rm**2)) / rm**2
        return out

    @_radial_fn
    def Wprime(r):
        # W = (f2 - g)/r^2 with g = r^2/(1-r^2), so W' = (f2'-g')/r^2 - 2(f2-g)/r^3
        out = np.zeros_like(r)
        core = r < eps / 2
        mid = (r >= eps / 2) & (r < delta)
        out[core] = -4.0 * r[core] / (1.0 - r[core] ** 2) ** 2
        if np.any(mid):
            rm = r[mid]
            g = rm**2 / (1.0 - rm**2)
            dg = 2.0 * rm / (1.0 - rm**2) ** 2
            out[mid] = (fB.deriv(rm) - dg) / rm**2 - 2.0 * (fB.value(rm) - g) / rm**3
        return out

    return radial_one_form(A, Aprime, W, Wprime, name="eta_local")


def lutz_form(
    data: LutzData,
    group: Optional[FuchsianGroup] = None,
    depth: Optional[int] = None,
    profiles: Optional[tuple] = None,
) -> OneFormField:
    """The twisted primitive: base form plus the pulled-back tube terms.

    Inside the central tube this equals f1(r) dt + f2(r) dphi exactly; at a
    point covered by the tube of word w it picks up the single pullback
    w^* eta evaluated locally (the tubes are disjoint).  Points outside all
    covered tubes see the untwisted form unchanged.
    """
    group = group or data.group
    depth = data.depth if depth is None else depth
    ok, _ = validate_separation(group, data.delta, depth)
    if not ok:
        raise ValueError("tube system does not separate at this delta/depth")
    words = data.tube_words if depth == data.depth else enumerate_words(group, depth)
    fA, fB = (data.f1, data.f2) if profiles is None else profiles
    eta = _eta_local(data, fA, fB)
    alpha = base_alpha()
    delta = data.delta
    w_e = np.array([np.exp(1j * w.theta) for w in words])
    w_a = np.array([w.a for w in words])

    def active_word(z: complex):
        images = np.abs(w_e * (z - w_a) / (1.0 - np.conjugate(w_a) * z))
        hits = np.nonzero(images < delta)[0]
        if hits.size == 0:
            return None
        return words[int(hits[0])]

    def ev(p: CoverPoint) -> np.ndarray:
        out = alpha(p)
        w = active_word(p.z)
        if w is not None:
            from .forms import pullback_form

            out = out + pullback_form(eta, w)(p)
        return out

    def dev(p: CoverPoint) -> TwoFormValue:
        m = alpha.d(p).matrix
        w = active_word(p.z)
        if w is not None:
            from .forms import pullback_form

            m = m + pullback_form(eta, w).d(p).matrix
        return TwoFormValue(wtx=m[0, 1], wty=m[0, 2], wxy=m[1, 2])

    form = OneFormField(ev, dev, name="alpha_twisted")
    form.words = words
    form.data = data
    return form


# --- the kernel-spanning field ----------------------------------------------

class ReebLikeField:
    """Piecewise field spanning ker(d alpha^L), normalized by the case table.

    Components in tube-local polar coordinates:
      r <= eps/2:               f2'(eps/2) d/dt            (constant core)
      eps/2 < r <= delta-eps/2: f2'(r) d/dt - f1'(r) d/phi
      delta-eps/2 < r <= delta: h(r) d/dt
      outside all tubes:        d/dt
    Extended to the other tubes by the deck action, which it commutes with
    by construction.  The optional smoothed profile pair replaces
    (f1', f2') and blends the core constant over the left seam window.
    """

    def __init__(self, data: LutzData, smoothed: Optional[tuple] = None):
        self.data = data
        self.smoothed = smoothed

    def local_components(self, r):
        """(t-rate, phi-rate) as functions of the tube-local radius."""
        d = self.data
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        vt = np.ones_like(r)
        vphi = np.zeros_like(r)
        if self.smoothed is None:
            f1d = lambda x: d.f1.deriv(x)
            f2d = lambda x: d.f2.deriv(x)
            core_rate = d.core_rate()
            seam = None
        else:
            h1n, h2n = self.smoothed
            f1d = h1n.deriv
            f2d = h2n.deriv
            core_rate = float(h2n.deriv(d.eps / 2))
            seam = h1n.window_at(d.eps / 2)

        core = r <= d.eps / 2
        mid = (r > d.eps / 2) & (r <= d.delta - d.eps / 2)
        ring = (r > d.delta - d.eps / 2) & (r <= d.delta)
        vt[core] = core_rate
        if np.any(mid):
            rm = r[mid]
            t_rate = f2d(rm)
            if seam is not None:
                lo, hi = seam
                s = _smoothstep((np.clip(rm, lo, hi) - lo) / (hi - lo))
                t_rate = (1.0 - s) * core_rate + s * t_rate
            vt[mid] = t_rate
            vphi[mid] = -f1d(rm)
        if np.any(ring):
            vt[ring] = d.h.value(r[ring])
        if scalar:
            return float(vt[0]), float(vphi[0])
        return vt, vphi

    def __call__(self, p: CoverPoint) -> np.ndarray:
        return self.raw(np.array([p.t, p.z.real, p.z.imag]))

    def raw(self, y: np.ndarray) -> np.ndarray:
        """Evaluate on a raw (t, x, y) state vector."""
        z = complex(y[1], y[2])
        hit = self.data.local_radius(z)
        if hit is None:
            return np.array([1.0, 0.0, 0.0])
        i, r = hit
        w = self.data.tube_words[i]
        zeta = complex(w.inverse()(z))
        vt, vphi = self.local_components(abs(zeta))
        disk = w.deriv(zeta) * (1j * zeta * vphi)
        return np.array([vt, complex(disk).real, complex(disk).imag])

    def interface_radii(self) -> np.ndarray:
        d = self.data
        return np.array(
            sorted(
                {d.eps / 2, d.eps, d.delta / 2 - d.eps, d.delta / 2,
                 d.delta / 2 + d.eps, d.delta - d.eps, d.delta - d.eps / 2, d.delta}
            )
        )


def lutz_reeb_like(data: LutzData, p: CoverPoint) -> np.ndarray:
    """Case-table field at a cover point (deck-equivariant across tubes)."""
    return ReebLikeField(data)(p)


def bound_L(data: LutzData, C: float, r) -> np.ndarray:
    """f1 f2' - f2 f1' - 2 C f1' on the middle annulus [eps/2, delta-eps/2]."""
    r = np.asarray(r, dtype=float)
    if np.any(r < data.eps / 2 - 1e-12) or np.any(r > data.delta - data.eps / 2 + 1e-12):
        raise ValueError("bound_L is defined on the middle annulus only")
    f1v = data.f1.value(r)
    f1d = data.f1.deriv(r)
    f2v = data.f2.value(r)
    f2d = data.f2.deriv(r)
    return f1v * f2d - f2v * f1d - 2.0 * C * f1d


# --- smoothing ----------------------------------------------------------------

def _smoothstep(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1, exp-flat at both ends."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(u > 0.0, np.exp(-1.0 / np.maximum(u, 1e-300)), 0.0)
        b = np.where(u < 1.0, np.exp(-1.0 / np.maximum(1.0 - u, 1e-300)), 0.0)
    out = a / (a + b)
    return out


_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(24)


def _integrate(fn, lo, hi):
    x = 0.5 * (hi - lo) * _GAUSS_X + 0.5 * (hi + lo)
    return 0.5 * (hi - lo) * float(np.sum(_GAUSS_W * fn(x)))


class SmoothedProfile:
    """C^1-close smooth replacement of a piecewise profile.

    The derivative is blended between the two adjacent pieces across a
    window at each kink (one-sided at the two rational junctions, so the
    core and rim stay exactly rational); values follow by integrating the
    blended derivative, which keeps the left anchor exact and moves every
    later value by at most the accumulated window drift, itself within the
    C^1 error budget.
    """

    def __init__(self, profile: Profile, windows: dict):
        self.profile = profile
        # windows: kink -> (lo, hi); blends piece left of kink into piece right of it
        self.windows = dict(sorted(windows.items()))
        self._drifts = []
        acc = 0.0
        for bp, (lo, hi) in self.windows.items():
            left, right = profile.piece_functions_at(bp)
            diff = lambda x, L=left, R=right, lo=lo, hi=hi: (
                self._blend(x, L, R, lo, hi) - profile.deriv(x)
            )
            d = 0.0
            for a, b in ((lo, bp), (bp, hi)):
                if b > a:
                    d += _integrate(diff, a, b)
            acc += d
            self._drifts.append((bp, lo, hi, left, right, acc, d))

    @staticmethod
    def _blend(x, left: _Piece, right: _Piece, lo, hi):
        s = _smoothstep((np.asarray(x, dtype=float) - lo) / (hi - lo))
        return (1.0 - s) * left.deriv(x) + s * right.deriv(x)

    def window_at(self, kink: float):
        for bp, (lo, hi) in self.windows.items():
            if abs(bp - kink) < 1e-14:
                return lo, hi
        return None

    def deriv(self, r):
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        out = np.array(self.profile.deriv(r), dtype=float, copy=True)
        for bp, lo, hi, left, right, _, _ in self._drifts:
            mask = (r > lo) & (r < hi)
            if np.any(mask):
                out[mask] = self._blend(r[mask], left, right, lo, hi)
        return float(out[0]) if scalar else out

    def value(self, r):
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        out = np.array(self.profile.value(r), dtype=float, copy=True)
        drift = np.zeros_like(out)
        for bp, lo, hi, left, right, acc, own in self._drifts:
            after = r >= hi
            drift[after] = acc
            mask = (r > lo) & (r < hi)
            if np.any(mask):
                base = acc - own
                for idx in np.nonzero(mask)[0]:
                    x = r[idx]
                    part = 0.0
                    for a, b in ((lo, min(x, bp)), (bp, x)):
                        if b > a:
                            part += _integrate(
                                lambda s, L=left, R=right: self._blend(s, L, R, lo, hi)
                                - self.profile.deriv(s),
                                a,
                                b,
                            )
                    drift[idx] = base + part
        out = out + drift
        return float(out[0]) if scalar else out

    def c1_error(self, grid) -> float:
        grid = np.asarray(grid, dtype=float)
        dv = np.max(np.abs(self.value(grid) - self.profile.value(grid)))
        dd = np.max(np.abs(self.deriv(grid) - self.profile.deriv(grid)))
        return float(dv + dd)


def smooth_profiles(data: LutzData, n: int) -> tuple[SmoothedProfile, SmoothedProfile]:
    """Smooth approximants (h1n, h2n) with windows of width (eps/4)/n.

    Interior kinks get centered windows; the two rational junctions get
    one-sided windows opening into the middle annulus, so the profiles stay
    exactly rational on the core and the rim for every n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    d, e = data.delta, data.eps
    w = (e / 4.0) / n

    def centered(kink):
        return kink, (kink - w / 2.0, kink + w / 2.0)

    def right_of(kink):
        return kink, (kink, kink + w)

    def left_of(kink):
        return kink, (kink - w, kink)

    f1_windows = dict([right_of(e / 2), centered(e), centered(d - e), left_of(d - e / 2)])
    f2_windows = dict(
        [
            right_of(e / 2),
            centered(e),
            centered(d / 2 - e),
            centered(d / 2),
            centered(d / 2 + e),
            centered(d - e),
            left_of(d - e / 2),
        ]
    )
    return (
        SmoothedProfile(data.f1, f1_windows),
        SmoothedProfile(data.f2, f2_windows),
    )
