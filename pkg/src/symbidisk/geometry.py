"""Points and maps of the symmetrized bidisk.

The open symmetrized bidisk is the set of (s, p) = (z1 + z2, z1 * z2) with
both z's in the open unit disk.  Its function theory is driven by the family
of coordinate functions

    phi(alpha, s, p) = (2*alpha*p - s) / (2 - alpha*s),      |alpha| <= 1,

each a unit-ball holomorphic function of (s, p).  A pair (s, p) with |s| < 2
belongs to the open domain exactly when sup over |alpha| <= 1 of
|phi(alpha, s, p)| is < 1; since alpha -> phi(alpha, s, p) is a Moebius map
with pole at 2/s outside the closed disk, the sup is attained on the unit
circle, which is what the grid search below exploits.

All operations here are pure functions of their inputs; values are immutable
and safe to share across threads.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

# Golden-section refinement settles the circle argmax to this angular width.
_GOLDEN_BRACKET = 1e-12
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

DEFAULT_MEMBERSHIP_GRID = 4096
DEFAULT_MEMBERSHIP_TOL = 1e-10


@dataclass(frozen=True)
class GPoint:
    """A candidate point (s, p) of the symmetrized bidisk.

    Construction does not enforce membership; call :func:`membership` (or use
    :func:`require_member`) where the open-domain invariant matters.
    """

    s: complex
    p: complex

    def as_pair(self) -> tuple[complex, complex]:
        return (complex(self.s), complex(self.p))


@dataclass(frozen=True)
class BGammaPoint:
    """A point of the distinguished boundary: |p| = 1 and s = conj(s) * p."""

    s: complex
    p: complex

    TOL = 1e-8

    def __post_init__(self):
        s, p = complex(self.s), complex(self.p)
        if abs(abs(p) - 1.0) > self.TOL:
            raise ValidationError(f"boundary point needs |p| = 1, got |p| = {abs(p)}")
        if abs(s - s.conjugate() * p) > self.TOL:
            raise ValidationError("boundary point needs s = conj(s) * p")
        if abs(s) > 2.0 + self.TOL:
            raise ValidationError(f"boundary point needs |s| <= 2, got {abs(s)}")


@dataclass(frozen=True)
class MembershipReport:
    """Outcome of the sup|phi| membership test.

    ``is_member`` uses the strict open-domain reading sup < 1 - tolerance.
    ``is_boundary`` flags the band |sup - 1| <= tolerance, where the open and
    closed readings of the domain disagree; callers decide how to treat it.
    """

    is_member: bool
    sup_modulus: float
    argmax_alpha: complex
    tolerance: float
    is_boundary: bool = False
    reason: str = ""


def phi(alpha: complex, point: GPoint | tuple[complex, complex]) -> complex:
    """Coordinate function (2*alpha*p - s) / (2 - alpha*s).

    Requires |alpha| <= 1 and |s| < 2 so the denominator stays away from
    zero; a vanishing denominator signals corrupted input.
    """
    s, p = _coords(point)
    if abs(alpha) > 1.0 + 1e-12:
        raise ValidationError(f"|alpha| <= 1 required, got {abs(alpha)}")
    den = 2.0 - alpha * s
    if abs(den) < 1e-14:
        raise ValidationError("phi denominator vanished; point outside |s| < 2")
    return (2.0 * alpha * p - s) / den


def phi_values(alphas: np.ndarray, s: np.ndarray, p: np.ndarray) -> np.ndarray:
    """phi on an alpha grid times a node list, shape (len(alphas), len(s))."""
    al = np.asarray(alphas, dtype=complex).reshape(-1, 1)
    sv = np.asarray(s, dtype=complex).reshape(1, -1)
    pv = np.asarray(p, dtype=complex).reshape(1, -1)
    den = 2.0 - al * sv
    if np.any(np.abs(den) < 1e-14):
        raise ValidationError("phi denominator vanished on the grid")
    return (2.0 * al * pv - sv) / den


def symmetrize(z1: complex, z2: complex) -> GPoint:
    """Map a pair of open-disk points to (z1 + z2, z1 * z2)."""
    if abs(z1) >= 1.0 or abs(z2) >= 1.0:
        raise ValidationError(
            f"symmetrize needs |z| < 1 inputs, got |z1| = {abs(z1)}, |z2| = {abs(z2)}"
        )
    return GPoint(z1 + z2, z1 * z2)


def scale_point(point: GPoint | tuple[complex, complex], r: float) -> GPoint:
    """Radial scaling (s, p) -> (r*s, r^2*p).

    Accepts any point of the closed domain (|s| <= 2); for r < 1 the image of
    a closed-domain point lies in the open domain.
    """
    if not (0.0 <= r < 1.0):
        raise ValidationError(f"scaling radius must lie in [0, 1), got {r}")
    s, p = _coords(point)
    if abs(s) > 2.0 + 1e-12:
        raise ValidationError(f"|s| <= 2 required, got {abs(s)}")
    return GPoint(r * s, r * r * p)


def membership(
    s: complex,
    p: complex,
    grid_size: int = DEFAULT_MEMBERSHIP_GRID,
    tol: float = DEFAULT_MEMBERSHIP_TOL,
) -> MembershipReport:
    """Estimate sup over |alpha| = 1 of |phi(alpha, s, p)| and classify.

    Uniform circle grid followed by golden-section refinement around the grid
    argmax.  ``grid_size`` >= 16.  Points with |s| >= 2 are immediate
    non-members ("s out of range"); the sup is still estimated on the grid
    (skipping near-pole alphas) so the report stays informative.
    """
    if grid_size < 16:
        raise ValidationError(f"grid_size >= 16 required, got {grid_size}")
    s, p = complex(s), complex(p)

    theta = np.linspace(0.0, 2.0 * math.pi, grid_size, endpoint=False)
    alphas = np.exp(1j * theta)
    den = 2.0 - alphas * s
    safe = np.abs(den) >= 1e-12
    vals = np.full(grid_size, -np.inf)
    vals[safe] = np.abs((2.0 * alphas[safe] * p - s) / den[safe])

    k = int(np.argmax(vals))
    step = 2.0 * math.pi / grid_size
    th_star, sup = _golden_max(
        lambda t: _abs_phi(cmath.exp(1j * t), s, p), theta[k] - step, theta[k] + step
    )
    sup = max(sup, float(vals[k]))
    arg = cmath.exp(1j * th_star)

    if abs(s) >= 2.0:
        return MembershipReport(
            is_member=False,
            sup_modulus=sup,
            argmax_alpha=arg,
            tolerance=tol,
            is_boundary=abs(sup - 1.0) <= tol,
            reason="s out of range",
        )
    return MembershipReport(
        is_member=sup < 1.0 - tol,
        sup_modulus=sup,
        argmax_alpha=arg,
        tolerance=tol,
        is_boundary=abs(sup - 1.0) <= tol,
    )


def require_member(point: GPoint | tuple[complex, complex], grid_size: int = 512) -> GPoint:
    """Return the point as a GPoint, raising if it fails membership."""
    s, p = _coords(point)
    rep = membership(s, p, grid_size=grid_size)
    if not rep.is_member:
        raise ValidationError(
            f"point ({s}, {p}) is not in the open domain (sup|phi| = {rep.sup_modulus:.6g})"
        )
    return GPoint(s, p)


def pseudo_hyperbolic(a: complex, b: complex) -> float:
    """Disk pseudo-hyperbolic distance |a - b| / |1 - conj(b)*a|."""
    den = 1.0 - b.conjugate() * a
    if abs(den) < 1e-15:
        return 1.0 if abs(a - b) > 0 else 0.0
    return abs((a - b) / den)


def caratheodory_two_point(
    a: GPoint | tuple[complex, complex],
    b: GPoint | tuple[complex, complex],
    grid_size: int = DEFAULT_MEMBERSHIP_GRID,
) -> float:
    """Two-point extremal distance through the coordinate family.

    Maximizes the pseudo-hyperbolic distance of (phi(alpha, a), phi(alpha, b))
    over a refined unit-circle grid in alpha.  Serves as the two-point
    solvability oracle: a two-node problem with unit bound is solvable exactly
    when the target pseudo-hyperbolic distance does not exceed this value.
    """
    sa, pa = _coords(a)
    sb, pb = _coords(b)
    for s, p in ((sa, pa), (sb, pb)):
        rep = membership(s, p, grid_size=max(64, grid_size // 8))
        if not rep.is_member:
            raise ValidationError("caratheodory_two_point needs member points")

    theta = np.linspace(0.0, 2.0 * math.pi, grid_size, endpoint=False)
    alphas = np.exp(1j * theta)
    va = (2.0 * alphas * pa - sa) / (2.0 - alphas * sa)
    vb = (2.0 * alphas * pb - sb) / (2.0 - alphas * sb)
    den = np.abs(1.0 - vb.conj() * va)
    num = np.abs(va - vb)
    vals = np.where(den > 1e-15, num / np.maximum(den, 1e-300), 0.0)

    k = int(np.argmax(vals))
    step = 2.0 * math.pi / grid_size

    def objective(t: float) -> float:
        al = cmath.exp(1j * t)
        fa = (2.0 * al * pa - sa) / (2.0 - al * sa)
        fb = (2.0 * al * pb - sb) / (2.0 - al * sb)
        return pseudo_hyperbolic(fa, fb)

    _, refined = _golden_max(objective, theta[k] - step, theta[k] + step)
    return max(float(vals[k]), refined)


def _coords(point) -> tuple[complex, complex]:
    if isinstance(point, GPoint):
        return point.as_pair()
    s, p = point
    return complex(s), complex(p)


def _abs_phi(alpha: complex, s: complex, p: complex) -> float:
    den = 2.0 - alpha * s
    if abs(den) < 1e-12:
        return -math.inf
    return abs((2.0 * alpha * p - s) / den)


def _golden_max(f, lo: float, hi: float) -> tuple[float, float]:
    """Golden-section maximization of a unimodal-near-peak function on [lo, hi]."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > _GOLDEN_BRACKET:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    t = (a + b) / 2.0
    return t, f(t)
