"""Poincare-disk geometry and the genus-2 deck group.

Conventions: the disk carries the metric ds^2 = (dx^2+dy^2)/(1-x^2-y^2)^2,
which has constant curvature -4.  Distance from the origin to Euclidean
radius r is then arctanh(r); the curvature -1 normalization doubles all
distances.  The octagon construction below is stated at curvature -1 and
only Euclidean positions (which do not depend on the normalization) are
stored.
"""

from __future__ import annotations

import math
import cmath
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DiskPoint",
    "Isometry",
    "FuchsianGroup",
    "hyperbolic_distance",
    "genus2_generators",
    "enumerate_words",
    "validate_separation",
]

_BOUNDARY_MARGIN = 1e-12


@dataclass(frozen=True)
class DiskPoint:
    """A point of the open unit disk, |z| < 1 strictly."""

    z: complex

    def __post_init__(self):
        if abs(self.z) >= 1.0 - _BOUNDARY_MARGIN:
            raise ValueError(f"point too close to the boundary: |z| = {abs(self.z)}")

    @property
    def xy(self) -> tuple[float, float]:
        return self.z.real, self.z.imag


def _as_complex(p) -> complex:
    return p.z if isinstance(p, DiskPoint) else complex(p)


def hyperbolic_distance(p, q) -> float:
    """Distance in the curvature -4 disk: d(0, r) = arctanh(r)."""
    zp, zq = _as_complex(p), _as_complex(q)
    w = (zq - zp) / (1.0 - zp.conjugate() * zq)
    return math.atanh(abs(w))


@dataclass(frozen=True)
class Isometry:
    """Disk automorphism z -> e^{i theta} (z - a) / (1 - conj(a) z).

    Acts on the circle bundle S^1 x D as the identity on the circle
    coordinate.  Composition goes through the 2x2 matrix representation
    [[e^{i theta}, -e^{i theta} a], [-conj(a), 1]] and is exact up to
    floating point: products of such matrices stay in the same family.
    """

    a: complex
    theta: float

    def __post_init__(self):
        if abs(self.a) >= 1.0:
            raise ValueError("|a| must be < 1")

    def __call__(self, z):
        """Apply to a complex number or ndarray of them."""
        z = z.z if isinstance(z, DiskPoint) else z
        return np.exp(1j * self.theta) * (z - self.a) / (1.0 - np.conjugate(self.a) * z)

    def deriv(self, z):
        """Complex derivative; as a real map the Jacobian is conformal."""
        z = z.z if isinstance(z, DiskPoint) else z
        return (
            np.exp(1j * self.theta)
            * (1.0 - abs(self.a) ** 2)
            / (1.0 - np.conjugate(self.a) * z) ** 2
        )

    def matrix(self) -> np.ndarray:
        e = cmath.exp(1j * self.theta)
        return np.array([[e, -e * self.a], [-self.a.conjugate(), 1.0]], dtype=complex)

    def compose(self, other: "Isometry") -> "Isometry":
        """self after other: (self @ other)(z) = self(other(z))."""
        m = self.matrix() @ other.matrix()
        a = -m[0, 1] / m[0, 0]
        theta = cmath.phase(m[0, 0] / m[1, 1])
        return Isometry(complex(a), float(theta))

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return self.compose(other)

    def inverse(self) -> "Isometry":
        return Isometry(-cmath.exp(1j * self.theta) * self.a, -self.theta)

    def is_identity(self, tol: float = 1e-12) -> bool:
        return abs(self.a) < tol and abs(cmath.exp(1j * self.theta) - 1.0) < tol


IDENTITY = Isometry(0.0 + 0.0j, 0.0)

# Probe points used to separate group elements numerically.
_PROBES = (0.0 + 0.0j, 0.31 + 0.12j, -0.22 + 0.27j)


def _action_key(g: Isometry, digits: int = 9) -> tuple:
    vals = []
    for p in _PROBES:
        w = g(p)
        vals.append(round(w.real, digits))
        vals.append(round(w.imag, digits))
    return tuple(vals)


@dataclass(frozen=True)
class FuchsianGroup:
    """Genus-2 surface group acting on the disk.

    generators holds a1, b1, a2, b2 followed by their inverses; the
    surface relation [a1,b1][a2,b2] = 1 holds up to relation_residual.
    """

    generators: tuple[Isometry, ...]
    relation_residual: float
    vertex_radius: float = 0.0
    side_midpoint_radius: float = 0.0

    @property
    def a1(self):
        return self.generators[0]

    @property
    def b1(self):
        return self.generators[1]

    @property
    def a2(self):
        return self.generators[2]

    @property
    def b2(self):
        return self.generators[3]

    def octagon_contains(self, z: complex) -> bool:
        """Membership in the open fundamental octagon (centered at 0)."""
        r_m = self.side_midpoint_radius
        d_c = (1.0 + r_m**2) / (2.0 * r_m)
        rho = (1.0 - r_m**2) / (2.0 * r_m)
        for k in range(8):
            c = d_c * cmath.exp(1j * k * math.pi / 4.0)
            if abs(z - c) <= rho:
                return False
        return abs(z) < 1.0


def _relation_residual(gens: tuple[Isometry, ...], n_samples: int = 100, seed: int = 7) -> float:
    a1, b1, a2, b2 = gens[:4]
    w = a1 @ b1 @ a1.inverse() @ b1.inverse() @ a2 @ b2 @ a2.inverse() @ b2.inverse()
    rng = np.random.default_rng(seed)
    r = 0.9 * np.sqrt(rng.uniform(0.0, 1.0, n_samples))
    phi = rng.uniform(0.0, 2.0 * np.pi, n_samples)
    zs = r * np.exp(1j * phi)
    return float(np.max(np.abs(w(zs) - zs)))


def _octagon_vertex_radius(tol: float = 1e-12) -> float:
    """Bisection on the angle-sum condition for the regular octagon.

    The interior angle of the regular hyperbolic octagon with vertices at
    curvature -1 distance d from the center satisfies
    cot(angle/2) = cosh(d) * tan(pi/8); the genus-2 gluing identifies all
    eight vertices, so the eight interior angles must sum to 2 pi, i.e.
    each angle equals pi/4.
    """

    def angle_sum(d):
        half = math.atan(1.0 / (math.cosh(d) * math.tan(math.pi / 8.0)))
        return 8.0 * (2.0 * half) - 2.0 * math.pi

    lo, hi = 1.0, 4.0
    assert angle_sum(lo) > 0 > angle_sum(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if angle_sum(mid) > 0:
            lo = mid
        else:
            hi = mid
    d = 0.5 * (lo + hi)
    return math.tanh(d / 2.0)


def genus2_generators() -> FuchsianGroup:
    """Side-pairing generators of the regular-octagon genus-2 group.

    Start from the four hyperbolic translations t_k along directions
    e^{i k pi/4} that glue opposite sides of the regular octagon; their
    translation length is 2*arccosh(cot(pi/8)) at curvature -1, and the
    single vertex cycle gives the relation
    t0 t1^-1 t2 t3^-1 t0^-1 t1 t2^-1 t3 = 1.  Rewriting the four letters
    (x, y, z, w) = (t0, t1^-1, t2, t3^-1) of that relation via the Nielsen
    substitution a1 = w^-1 z^-1 x, b1 = y z w, a2 = z^-1, b2 = w^-1 turns
    it into the standard commutator relation [a1,b1][a2,b2] = 1 without
    changing the group.
    """
    cot8 = 1.0 / math.tan(math.pi / 8.0)
    apothem = math.acosh(cot8)  # curvature -1 distance, center to side midpoint
    tau = math.tanh(apothem)  # Euclidean radius of t_k(0)

    boosts = [Isometry(-tau * cmath.exp(1j * k * math.pi / 4.0), 0.0) for k in range(4)]
    x, y, z, w = boosts[0], boosts[1].inverse(), boosts[2], boosts[3].inverse()

    a1 = w.inverse() @ z.inverse() @ x
    b1 = y @ z @ w
    a2 = z.inverse()
    b2 = w.inverse()

    gens = (a1, b1, a2, b2, a1.inverse(), b1.inverse(), a2.inverse(), b2.inverse())
    residual = _relation_residual(gens)

    vertex_radius = _octagon_vertex_radius()
    if not math.isfinite(vertex_radius) or not 0.0 < vertex_radius < 1.0:
        raise RuntimeError("octagon vertex root-find failed")

    return FuchsianGroup(
        generators=gens,
        relation_residual=residual,
        vertex_radius=vertex_radius,
        side_midpoint_radius=math.tanh(apothem / 2.0),
    )


def enumerate_words(group: FuchsianGroup, max_len: int) -> list[Isometry]:
    """All distinct group elements of word length <= max_len.

    Deduplication is by the action on three probe points rounded to 1e-9;
    free reduction alone would suffice up to length 3 (the defining
    relation has length 8) but the probe keys are robust against any
    floating-point representation of the generators.
    """
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    seen = {_action_key(IDENTITY): IDENTITY}
    frontier = [IDENTITY]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for g in group.generators:
                cand = w @ g
                k = _action_key(cand)
                if k not in seen:
                    seen[k] = cand
                    nxt.append(cand)
        frontier = nxt
    return list(seen.values())


def validate_separation(group: FuchsianGroup, delta: float, depth: int):
    """Check that the Euclidean delta-ball at 0 misses all its translates.

    The ball B_delta(0) is a hyperbolic ball of curvature -1 radius
    2 arctanh(delta) centered at 0; its image under g is the hyperbolic
    ball of the same radius about g(0), again a round Euclidean disk.  The
    gap between the two disks is realized on the ray through g(0), giving
    margin = min over words of tanh((d1(0, g(0)) - 2 arctanh(delta))/2) - delta.

    Returns (ok, margin).
    """
    if not 0.0 < delta <= 1.0 / 3.0:
        raise ValueError("delta must lie in (0, 1/3]")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    rho1 = 2.0 * math.atanh(delta)
    margin = math.inf
    for g in enumerate_words(group, depth):
        if g.is_identity(1e-9):
            continue
        d1 = 2.0 * math.atanh(abs(g(0.0 + 0.0j)))
        gap = math.tanh((d1 - rho1) / 2.0) - delta
        margin = min(margin, gap)
    return margin > 0.0, margin
