"""Certification of the bounded-primitive conditions, tube-pairing infima,
and characteristic foliations of embedded disks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .hyperbolic import FuchsianGroup, Isometry, enumerate_words
from .forms import (
    CoverPoint,
    MetricField,
    OneFormField,
    TwoFormValue,
    contact_volume,
    kernel_field,
    product_metric,
)
from .lutz import LutzData, ReebLikeField, base_alpha

__all__ = [
    "VirtualContactStructure",
    "VerificationReport",
    "FoliationReport",
    "SingularPoint",
    "OTDisk",
    "VerifyGrid",
    "verify_virtual_contact",
    "orbit_infimum",
    "characteristic_foliation",
    "classify_singularity",
    "untwisted_structure",
    "twisted_structure",
]


@dataclass
class VirtualContactStructure:
    """Bundle of deck group, invariant 2-form, primitive, and lifted metric.

    section, when given, is the preferred spanning field of ker(omega) used
    for the pairing estimates (the case-table field for the twisted form);
    otherwise the metric-unit kernel field is used.  region_of classifies a
    cover point into a named sampling region for per-region minima.
    """

    group: FuchsianGroup
    omega: Callable[[CoverPoint], TwoFormValue]
    lam: OneFormField
    metric: MetricField
    kernel_orientation: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    section: Optional[Callable[[CoverPoint], np.ndarray]] = None
    region_of: Optional[Callable[[CoverPoint], str]] = None

    def validate(self, points, word_sample, tol: float = 1e-8) -> dict:
        """Check d(lam) = omega and deck invariance of omega on samples."""
        from .forms import pullback_form

        worst_d = 0.0
        for p in points:
            a = self.lam.d(p).matrix
            b = self.omega(p).matrix
            worst_d = max(worst_d, float(np.max(np.abs(a - b))))
        worst_g = 0.0
        for g in word_sample:
            for p in points:
                from .forms import _bundle_jacobian, apply_isometry

                J = _bundle_jacobian(g, p.z)
                pulled = J.T @ self.omega(apply_isometry(g, p)).matrix @ J
                worst_g = max(worst_g, float(np.max(np.abs(pulled - self.omega(p).matrix))))
        if worst_d > tol or worst_g > tol:
            raise ValueError(
                f"structure invariants fail: |dlam-omega| = {worst_d:.2e}, "
                f"|g*omega-omega| = {worst_g:.2e}"
            )
        return {"dlam_vs_omega": worst_d, "invariance": worst_g}


@dataclass
class VerificationReport:
    sup_norm_estimate: float
    inf_pairing_estimate: float
    sample_counts: dict
    word_depth: int
    per_region_minima: dict
    passed: bool
    derivative_sup: dict = field(default_factory=dict)
    notes: str = ""


@dataclass
class VerifyGrid:
    """Sampling plan: a Cartesian octagon grid plus seeded random points."""

    n_grid: int = 24
    n_random: int = 200
    seed: int = 0


def _octagon_samples(group: FuchsianGroup, grid: VerifyGrid) -> list[complex]:
    R = group.vertex_radius
    pts: list[complex] = []
    xs = np.linspace(-R, R, grid.n_grid)
    for x in xs:
        for y in xs:
            z = complex(x, y)
            if group.octagon_contains(z):
                pts.append(z)
    rng = np.random.default_rng(grid.seed)
    while len(pts) < grid.n_grid * grid.n_grid // 2 + grid.n_random:
        z = complex(*rng.uniform(-R, R, 2))
        if group.octagon_contains(z):
            pts.append(z)
    return pts


def verify_virtual_contact(
    s: VirtualContactStructure,
    grid: VerifyGrid,
    depth: int,
    check_structure: bool = True,
    t_slices: int = 4,
) -> VerificationReport:
    """Estimate sup ||lam|| and inf lam(X-hat) over the covered region.

    Samples the fundamental octagon and all its word translates to the
    given depth.  Refining the grid only adds sample points, so the inf
    estimate is non-increasing and the sup estimate non-decreasing under
    refinement.
    """
    words = enumerate_words(s.group, depth)
    base = _octagon_samples(s.group, grid)
    ts = np.linspace(0.0, 1.0, t_slices, endpoint=False)

    if check_structure:
        probe = [CoverPoint(float(t), z) for t, z in zip(ts, base[:: max(1, len(base) // 8)])]
        s.validate(probe[:8], words[1:4])

    sup_norm = 0.0
    inf_pair = math.inf
    region_min: dict = {}
    n_samples = 0
    for w in words:
        for z0 in base:
            z = complex(w(z0))
            if abs(z) >= 1.0 - 1e-9:
                continue
            p = CoverPoint(float(ts[n_samples % len(ts)]), z)
            n_samples += 1
            lam_val = s.lam(p)
            sup_norm = max(sup_norm, s.metric.dual_norm(p, lam_val))
            if s.section is not None:
                v = s.section(p)
            else:
                v = kernel_field(s.omega, p, s.metric, s.kernel_orientation)
            pairing = float(lam_val @ v)
            inf_pair = min(inf_pair, pairing)
            if s.region_of is not None:
                reg = s.region_of(p)
                region_min[reg] = min(region_min.get(reg, math.inf), pairing)
            else:
                region_min["all"] = min(region_min.get("all", math.inf), pairing)

    deriv_sup = _derivative_bounds(s, base[:: max(1, len(base) // 16)], words[: min(9, len(words))])
    passed = inf_pair > 0.0 and math.isfinite(sup_norm)
    return VerificationReport(
        sup_norm_estimate=float(sup_norm),
        inf_pairing_estimate=float(inf_pair),
        sample_counts={"octagon": len(base), "words": len(words), "total": n_samples},
        word_depth=depth,
        per_region_minima=region_min,
        passed=passed,
        derivative_sup=deriv_sup,
        notes=(
            "pairing uses the supplied kernel section"
            if s.section is not None
            else "pairing uses the metric-unit kernel field"
        ),
    )


def _derivative_bounds(s: VirtualContactStructure, zs, words, h: float = 1e-4) -> dict:
    """Coordinate-frame sup bounds of the first two derivatives of w*lam.

    Finite differences of the pulled-back component functions over sampled
    words; a coarse boundedness certificate for the smoothness clause (full
    verification over all orders is not finitely checkable).
    """
    from .forms import pullback_form

    sup1 = sup2 = 0.0
    for w in words:
        f = pullback_form(s.lam, w)
        for z in zs:
            p = CoverPoint(0.0, z)
            c0 = f(p)
            for shift in ("dt", "dx", "dy"):
                plus = f(p.shift(**{shift: h}))
                minus = f(p.shift(**{shift: -h}))
                sup1 = max(sup1, float(np.max(np.abs((plus - minus) / (2 * h)))))
                sup2 = max(sup2, float(np.max(np.abs((plus - 2 * c0 + minus) / h**2))))
    return {1: sup1, 2: sup2}


# --- tube-pairing infimum -----------------------------------------------------

def orbit_infimum(
    data: LutzData,
    group: Optional[FuchsianGroup] = None,
    depth: Optional[int] = None,
    grid: tuple[int, int] = (200, 200),
    t_slices: int = 0,
):
    """Minimum over tube samples and deck words of the pulled-back pairing.

    For a point p in the central tube and a deck word g,
        (g^* alpha_L)(R_L) = alpha_L(R_L) + (g^* alpha - alpha)(R_L),
    and the correction depends only on the dphi-rate of R_L because the
    deck action fixes the circle coordinate.  Everything is radial in the
    tube, so the value is independent of t and of the angle only through
    the translate; we evaluate on a full polar grid per word, vectorized.

    Returns (value, info) where info records the argmin sample, the
    region-wise minima, and the analytic lower bound.
    """
    group = group or data.group
    depth = data.depth if depth is None else depth
    words = data.tube_words if depth == data.depth else enumerate_words(group, depth)

    n_r, n_phi = grid
    rs = np.linspace(data.delta / n_r, data.delta * (1.0 - 1e-9), n_r)
    phis = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    Z = rs[:, None] * np.exp(1j * phis[None, :])
    R = np.abs(Z)

    fld = ReebLikeField(data)
    vt, vphi = fld.local_components(R.ravel())
    vt = vt.reshape(R.shape)
    vphi = vphi.reshape(R.shape)
    f1v = data.f1.value(R.ravel()).reshape(R.shape)
    f2v = _f2_extended(data, R)
    base_pairing = f1v * vt + f2v * vphi

    best = math.inf
    arg = None
    region_min: dict = {}
    regions = _region_masks(data, R)
    for name, mask in regions.items():
        if np.any(mask):
            region_min[name] = float(np.min(base_pairing[mask]))

    for wi, w in enumerate(words):
        zeta = w(Z)
        dw = w.deriv(Z)
        corr = np.real(np.conjugate(zeta) * dw * Z) / (1.0 - np.abs(zeta) ** 2) - R**2 / (
            1.0 - R**2
        )
        vals = base_pairing + vphi * corr
        i = int(np.argmin(vals))
        if vals.flat[i] < best:
            best = float(vals.flat[i])
            arg = {"word_index": wi, "z": complex(Z.flat[i]), "r": float(R.flat[i])}
        for name, mask in regions.items():
            if np.any(mask):
                region_min[name] = min(region_min[name], float(np.min(vals[mask])))

    # the pairing is independent of the circle coordinate: spot-check it
    t_check = 0.0
    if t_slices:
        from .forms import pullback_form
        from .lutz import lutz_form

        form = lutz_form(data, group, depth)
        g = words[min(1, len(words) - 1)]
        pulled = pullback_form(form, g)
        z0 = complex(Z[n_r // 2, 0])
        v0 = fld(CoverPoint(0.0, z0))
        vals_t = [
            float(pulled(CoverPoint(t, z0)) @ v0) for t in np.linspace(0, 1, t_slices, endpoint=False)
        ]
        t_check = float(np.max(np.abs(np.array(vals_t) - vals_t[0])))

    bound = data.analytic_lower_bound()
    info = {
        "argmin": arg,
        "region_minima": region_min,
        "analytic_bound": bound,
        "above_bound": best >= bound - 1e-6,
        "outside_value": 1.0,
        "t_invariance_residual": t_check,
        "samples": int(Z.size * max(1, t_slices)) * len(words),
    }
    return best, info


def _f2_extended(data: LutzData, R: np.ndarray) -> np.ndarray:
    out = np.empty_like(R)
    inside = R <= data.delta
    out[inside] = data.f2.value(R[inside])
    out[~inside] = R[~inside] ** 2 / (1.0 - R[~inside] ** 2)
    return out


def _region_masks(data: LutzData, R: np.ndarray) -> dict:
    d, e = data.delta, data.eps
    return {
        "core": R <= e / 2,
        "case_i": (R > e / 2) & (R <= e),
        "case_ii": (R > e) & (R <= d / 2 - e),
        "case_iii": (R > d / 2 - e) & (R <= d / 2 + e),
        "case_ii_mirror": (R > d / 2 + e) & (R <= d - e),
        "case_i_mirror": (R > d - e) & (R <= d - e / 2),
        "ring": (R > d - e / 2) & (R <= d),
    }


def region_bounds(data: LutzData) -> dict:
    """Named analytic lower bounds per sampling region."""
    d, e, C = data.delta, data.eps, data.C
    return {
        "core": -data.core_rate(),
        "case_i": 7.0 * e / 8.0,
        "case_ii": 12.0 * C / (5.0 * d),
        "case_iii": 2.0 * C / d,
        "case_ii_mirror": 12.0 * C / (5.0 * d),
        "case_i_mirror": 7.0 * e / 8.0,
        "ring": float(data.h.value(d - e / 2)),
        "outside": 1.0,
    }


# --- structures ----------------------------------------------------------------

def untwisted_structure(group: FuchsianGroup) -> VirtualContactStructure:
    alpha = base_alpha()
    return VirtualContactStructure(
        group=group,
        omega=alpha.d,
        lam=alpha,
        metric=product_metric(),
        section=lambda p: np.array([1.0, 0.0, 0.0]),
    )


def twisted_structure(data: LutzData, depth: Optional[int] = None) -> VirtualContactStructure:
    from .lutz import lutz_form

    form = lutz_form(data, depth=depth)
    fld = ReebLikeField(data)

    def region_of(p: CoverPoint) -> str:
        hit = data.local_radius(p.z)
        if hit is None:
            return "outside"
        for name, mask in _region_masks(data, np.array([hit[1]])).items():
            if bool(mask[0]):
                return name
        return "outside"

    return VirtualContactStructure(
        group=data.group,
        omega=form.d,
        lam=form,
        metric=product_metric(),
        section=fld,
        region_of=region_of,
    )


# --- characteristic foliation ----------------------------------------------------

@dataclass
class OTDisk:
    """Graph disk t = g(r), r <= r_boundary, sitting in the central tube.

    Any C^2 height profile with g'(0) = 0 and g' > 0 on (0, r_boundary] is
    accepted; the default is g(r) = eps r^2.
    """

    g: Callable[[float], float]
    gprime: Callable[[float], float]
    r_boundary: float

    @staticmethod
    def standard(data: LutzData) -> "OTDisk":
        e = data.eps
        return OTDisk(g=lambda r: e * r * r, gprime=lambda r: 2.0 * e * r, r_boundary=data.r_star)

    @staticmethod
    def flat(data: LutzData, height: float = 0.0, r_boundary: Optional[float] = None) -> "OTDisk":
        rb = 0.8 * data.r_star if r_boundary is None else r_boundary
        return OTDisk(g=lambda r: height, gprime=lambda r: 0.0, r_boundary=rb)

    def point(self, x: float, y: float) -> CoverPoint:
        return CoverPoint(self.g(math.hypot(x, y)), complex(x, y))

    def tangent_basis(self, x: float, y: float):
        r = math.hypot(x, y)
        gp = self.gprime(r)
        rad = gp * x / r if r > 1e-14 else 0.0
        rad_y = gp * y / r if r > 1e-14 else 0.0
        return (
            np.array([rad, 1.0, 0.0]),
            np.array([rad_y, 0.0, 1.0]),
        )


@dataclass
class SingularPoint:
    location: tuple[float, float]
    eigenvalues: tuple[complex, complex]
    classification: str


@dataclass
class FoliationReport:
    singular_points: list[SingularPoint]
    boundary_legendrian_residual: float
    leaf_samples: list[np.ndarray]
    direction_field_grid: list[tuple[float, float, float, float]]
    r_boundary: float
    angle_vs_closed_form: float = 0.0


def _beta(disk: OTDisk, lam: OneFormField, x: float, y: float) -> np.ndarray:
    """Restriction of lam to the disk: covector in the chart frame (x, y)."""
    p = disk.point(x, y)
    c = lam(p)
    t1, t2 = disk.tangent_basis(x, y)
    return np.array([float(c @ t1), float(c @ t2)])


def _hat_v(disk: OTDisk, lam: OneFormField, x: float, y: float) -> np.ndarray:
    """Canonical direction field: beta rotated by 90 degrees.

    Spans ker(beta) away from zeros and, unlike a normalized null-space
    vector, vanishes linearly at an elliptic singular point, so its finite
    difference linearization is meaningful.
    """
    b = _beta(disk, lam, x, y)
    return np.array([-b[1], b[0]])


def characteristic_foliation(
    disk: OTDisk,
    lam: OneFormField,
    grid: tuple[int, int] = (48, 48),
    data: Optional[LutzData] = None,
    n_leaves: int = 6,
) -> FoliationReport:
    """Direction field, singular points, and boundary residual of lam on the disk.

    The direction at each node is the numeric kernel of the restricted
    covector (a 90-degree rotation in the chart); singular points are found
    by bisecting the sign changes of both covector components along rays
    and polished by Newton on the rotated field; eigenvalues come from a
    central-difference Jacobian at the root.
    """
    n_r, n_phi = grid
    if data is not None and disk.r_boundary > data.delta:
        raise ValueError("disk is not contained in one tube")

    rs = np.linspace(disk.r_boundary / n_r, disk.r_boundary * (1 - 1e-9), n_r)
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    nodes = []
    for r in rs:
        for ph in phis:
            x, y = r * math.cos(ph), r * math.sin(ph)
            v = _hat_v(disk, lam, x, y)
            nodes.append((x, y, float(v[0]), float(v[1])))
    p_contact = disk.point(rs[n_r // 2], 0.0)
    if contact_volume(lam, p_contact) <= 0:
        raise ValueError("form is not contact on the disk image")

    # locate zeros of beta: scan radii along a ray for simultaneous small
    # components, then Newton-polish on the rotated field
    singular = _find_singular_points(disk, lam)

    boundary = 0.0
    for ph in phis:
        x, y = disk.r_boundary * math.cos(ph), disk.r_boundary * math.sin(ph)
        b = _beta(disk, lam, x, y)
        boundary = max(boundary, abs(b[1]))  # lam(d/dphi) direction

    leaves = _trace_leaves(disk, lam, n_leaves)
    return FoliationReport(
        singular_points=singular,
        boundary_legendrian_residual=float(boundary),
        leaf_samples=leaves,
        direction_field_grid=nodes,
        r_boundary=disk.r_boundary,
    )


def _find_singular_points(disk: OTDisk, lam: OneFormField, n_scan: int = 400) -> list[SingularPoint]:
    h = 1e-6 * max(disk.r_boundary, 1e-3)
    found: list[SingularPoint] = []

    def fv(q):
        return _hat_v(disk, lam, q[0], q[1])

    # coarse candidates: grid minima of |beta| over a Cartesian sweep
    m = 41
    xs = np.linspace(-disk.r_boundary * 0.999, disk.r_boundary * 0.999, m)
    cands = []
    vals = np.empty((m, m))
    for i, x in enumerate(xs):
        for j, y in enumerate(xs):
            if math.hypot(x, y) >= disk.r_boundary:
                vals[i, j] = math.inf
                continue
            vals[i, j] = float(np.linalg.norm(_beta(disk, lam, x, y)))
    for i in range(m):
        for j in range(m):
            if not math.isfinite(vals[i, j]):
                continue
            window = vals[max(0, i - 1) : i + 2, max(0, j - 1) : j + 2]
            if vals[i, j] == np.min(window) and vals[i, j] < np.median(vals[np.isfinite(vals)]):
                cands.append(np.array([xs[i], xs[j]]))

    for q in cands:
        q = q.copy()
        ok = False
        for _ in range(60):
            f = fv(q)
            if np.linalg.norm(f) < 1e-13:
                ok = True
                break
            J = _fd_jacobian(fv, q, h)
            try:
                step = np.linalg.solve(J, -f)
            except np.linalg.LinAlgError:
                break
            if np.linalg.norm(step) > 0.2 * disk.r_boundary:
                step = step / np.linalg.norm(step) * 0.2 * disk.r_boundary
            q = q + step
            if math.hypot(*q) >= disk.r_boundary:
                break
        if not ok:
            continue
        if any(np.linalg.norm(q - np.array(s.location)) < 1e-6 for s in found):
            continue
        J = _fd_jacobian(fv, q, h)
        ev = np.linalg.eigvals(J)
        found.append(
            SingularPoint(
                location=(float(q[0]), float(q[1])),
                eigenvalues=(complex(ev[0]), complex(ev[1])),
                classification=_classify(ev),
            )
        )
    return found


def _fd_jacobian(fv, q, h):
    J = np.empty((2, 2))
    for k in range(2):
        dq = np.zeros(2)
        dq[k] = h
        J[:, k] = (fv(q + dq) - fv(q - dq)) / (2 * h)
    return J


def _classify(ev, tol: float = 1e-8) -> str:
    det = float(np.real(ev[0] * ev[1]))
    if abs(det) < tol:
        return "degenerate"
    if max(abs(ev[0].imag), abs(ev[1].imag)) > tol:
        return "elliptic"
    return "elliptic" if det > 0 else "hyperbolic"


def classify_singularity(report: FoliationReport, index: int) -> str:
    ev = np.array(report.singular_points[index].eigenvalues)
    return _classify(ev)


def _trace_leaves(disk: OTDisk, lam: OneFormField, n_leaves: int) -> list[np.ndarray]:
    leaves = []
    r0 = 0.85 * disk.r_boundary
    step = disk.r_boundary / 160.0
    for k in range(n_leaves):
        ph = 2.0 * math.pi * k / max(n_leaves, 1)
        q = np.array([r0 * math.cos(ph), r0 * math.sin(ph)])
        pts = [q.copy()]
        for _ in range(1200):
            v = _hat_v(disk, lam, q[0], q[1])
            nv = np.linalg.norm(v)
            if nv < 1e-12:
                break
            k1 = v / nv
            mid = q + 0.5 * step * k1
            v2 = _hat_v(disk, lam, mid[0], mid[1])
            n2 = np.linalg.norm(v2)
            if n2 < 1e-12:
                break
            q = q + step * v2 / n2
            if math.hypot(*q) >= disk.r_boundary * 0.999 or math.hypot(*q) < 1e-4:
                pts.append(q.copy())
                break
            pts.append(q.copy())
        leaves.append(np.array(pts))
    return leaves


def closed_form_direction(data: LutzData, disk: OTDisk, r: float, phi: float) -> np.ndarray:
    """Oracle direction from the radial formula, in the (x, y) chart."""
    f2v = float(data.f2.value(r))
    f1v = float(data.f1.value(r))
    gp = disk.gprime(r)
    e_r = np.array([math.cos(phi), math.sin(phi)])
    e_phi = np.array([-math.sin(phi), math.cos(phi)])
    return f2v * e_r - gp * f1v * r * e_phi
