"""Hyperbolic plane utilities shared across the package.

Two models are in play: the upper half-plane (UHP), where the reference
group lives as real SL(2) matrices, and the Poincare disk, used for the
boundary circle parameterization.  The fixed Cayley transform between them
is U(z) = i(1-z)/(1+z) (disk -> UHP), so the disk origin corresponds to the
UHP basepoint i.
"""

from __future__ import annotations

import numpy as np

BASEPOINT = 1j  # UHP image of the disk origin

# disk -> UHP Mobius matrix for U(z) = i(1-z)/(1+z), det-normalized
_C = np.array([[-1j, 1j], [1.0, 1.0]], dtype=complex)
DISK_TO_UHP = _C / np.sqrt(np.linalg.det(_C))
UHP_TO_DISK = np.linalg.inv(DISK_TO_UHP)


class NotHyperbolic(ValueError):
    """Matrix is not a hyperbolic isometry (|trace| <= 2)."""


def mobius_apply(M, z):
    """Apply a 2x2 Mobius matrix to a point of the boundary (inf allowed)."""
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    if np.isinf(z):
        return np.inf if abs(c) == 0 else a / c
    den = c * z + d
    if abs(den) < 1e-300:
        return np.inf
    return (a * z + b) / den


def sl2_translation_length(M) -> float:
    """Translation length 2*arccosh(|tr M|/2) of a hyperbolic M in SL(2,R)."""
    t = abs(float(np.trace(M).real)) if np.iscomplexobj(M) else abs(float(np.trace(M)))
    if t <= 2.0 + 1e-12:
        raise NotHyperbolic(f"|trace| = {t} <= 2: not a hyperbolic element")
    return 2.0 * float(np.arccosh(t / 2.0))


def sl2_fixed_points(M):
    """(attracting, repelling) fixed points on the UHP boundary R u {inf}.

    The attracting point is the one where |Mobius derivative| < 1 for the
    inverse map, i.e. where orbits accumulate under forward iteration.
    """
    a, b, c, d = (float(M[0, 0]), float(M[0, 1]), float(M[1, 0]), float(M[1, 1]))
    tr = a + d
    if abs(c) < 1e-14:
        # fixed points: inf and b/(d-a)
        other = np.inf if abs(d - a) < 1e-14 else b / (d - a)
        # derivative at inf of z -> (az+b)/d is a/d; attracting iff |a/d| > 1
        if abs(a) > abs(d):
            return np.inf, other
        return other, np.inf
    disc = tr * tr - 4.0
    if disc <= 0:
        raise NotHyperbolic(f"trace {tr} gives no real axis")
    sq = np.sqrt(disc)
    x1 = ((a - d) + sq) / (2 * c)
    x2 = ((a - d) - sq) / (2 * c)
    # attracting fixed point has |c x + d| > 1
    if abs(c * x1 + d) > abs(c * x2 + d):
        return x1, x2
    return x2, x1


def boundary_angle(x) -> float:
    """Angle in [0, 2pi) of a UHP boundary point under the inverse Cayley map."""
    if np.isinf(x):
        z = -1.0 + 0j
    else:
        z = (1j - x) / (1j + x)
    ang = float(np.angle(z)) % (2.0 * np.pi)
    return ang


def angle_to_boundary(ang: float):
    """Inverse of :func:`boundary_angle`: UHP real (or inf) of a disk angle."""
    z = np.exp(1j * ang)
    den = 1.0 + z
    if abs(den) < 1e-14:
        return np.inf
    w = 1j * (1.0 - z) / den
    return float(w.real)


def uhp_distance(z, w) -> float:
    """Hyperbolic distance between interior UHP points."""
    num = abs(z - w) ** 2
    cosh_d = 1.0 + num / (2.0 * z.imag * w.imag)
    return float(np.arccosh(max(cosh_d, 1.0)))


def cosh_displacement(M) -> float:
    """cosh of d(i, M i) for M in SL(2,R): equals ||M||_F^2 / 2."""
    return float((M * M).sum()) / 2.0


def axis_distance(M) -> float:
    """Distance from the basepoint i to the axis of a hyperbolic M.

    Uses cosh(d(x, Mx)/2) = cosh(l/2) * cosh(dist(x, Axis)).
    """
    ell = sl2_translation_length(M)
    cosh_disp = cosh_displacement(M)
    cosh_half = np.sqrt((cosh_disp + 1.0) / 2.0)
    ratio = cosh_half / np.cosh(ell / 2.0)
    return float(np.arccosh(max(ratio, 1.0)))


def geodesic_point(x_minus, x_plus, s: float):
    """Unit-speed point at parameter s on the UHP geodesic x_minus -> x_plus.

    Parameterized so s = 0 is the euclidean top of the semicircle (or height 1
    on a vertical line); increasing s moves toward x_plus.
    """
    if np.isinf(x_plus):
        return x_minus + 1j * np.exp(s)
    if np.isinf(x_minus):
        return x_plus + 1j * np.exp(-s)
    c = 0.5 * (x_minus + x_plus)
    r = 0.5 * abs(x_plus - x_minus)
    sgn = 1.0 if x_plus > x_minus else -1.0
    return c + r * (sgn * np.tanh(s) + 1j / np.cosh(s))


def geodesic_foot_parameter(x_minus, x_plus, p) -> float:
    """Parameter s of the orthogonal projection of interior point p on the axis.

    Matches the parameterization of :func:`geodesic_point`.
    """
    # Mobius-normalize the axis to (0, inf); the projection of p to the
    # vertical axis is at height |q| for the normalized image q of p.
    if np.isinf(x_plus):
        q = p - x_minus
    elif np.isinf(x_minus):
        q = -1.0 / (p - x_plus)
    else:
        q = (p - x_minus) / (p - x_plus)
    # the normalized coordinate satisfies |q(z(s))| = e^s exactly for the
    # parameterization of geodesic_point, in all three endpoint cases
    with np.errstate(divide="ignore"):
        return float(np.log(abs(q)))
