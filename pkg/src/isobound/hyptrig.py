"""Closed-form hyperbolic trigonometry kernel.

Identities for right-angled hexagons, crossed hexagons, right-angled
pentagons, trirectangles with an ideal vertex, collar half-widths and the
common perpendiculars of a hyperbolic pair of pants.  Every other module
consumes these; the plane module provides an independent geometric check.

Lengths are plain positive floats in hyperbolic units.  A boundary length of
zero encodes a cusp where a function explicitly allows it.
"""

import math

from .errors import DegenerateConfiguration, OutOfRange

# Relative tolerance for the algebraic identities themselves.
IDENTITY_RTOL = 1e-12
# Tolerance when comparing against explicit upper half-plane constructions.
ORACLE_RTOL = 1e-9

_LOG_FORM_CUTOFF = 1e150


def arccosh(x):
    """arccosh with a log-form branch so huge arguments cannot overflow."""
    if x < 1.0:
        raise OutOfRange(f"arccosh argument {x!r} < 1")
    if x > _LOG_FORM_CUTOFF:
        return math.log(2.0) + math.log(x)
    return math.acosh(x)


def _require_positive(name, value):
    if not value > 0.0:
        raise OutOfRange(f"{name} must be > 0, got {value!r}")


def _require_nonnegative(name, value):
    if not value >= 0.0:
        raise OutOfRange(f"{name} must be >= 0, got {value!r}")


def _arccosh_clamped(expr, scale, what):
    """arccosh(expr), treating values within roundoff below 1 as exactly 1.

    ``scale`` is the magnitude of the terms whose cancellation produced
    ``expr``; the clamp window grows with it so that genuinely degenerate
    configurations (expression == 1) survive floating-point noise while
    impossible ones still raise.
    """
    window = IDENTITY_RTOL * max(1.0, scale)
    if expr < 1.0 - window:
        raise DegenerateConfiguration(
            f"no such {what}: defining expression {expr!r} < 1")
    return arccosh(max(expr, 1.0))


def hexagon_third_side(a, b, gamma):
    """Side c of a right-angled hexagon with alternating sides a, gamma, b.

    Satisfies cosh(c) = sinh(a) sinh(b) cosh(gamma) - cosh(a) cosh(b).
    Returns 0 exactly at the degenerate boundary (expression equal to 1).
    """
    _require_positive("a", a)
    _require_positive("b", b)
    _require_positive("gamma", gamma)
    product = math.sinh(a) * math.sinh(b) * math.cosh(gamma)
    expr = product - math.cosh(a) * math.cosh(b)
    return _arccosh_clamped(expr, product, "right-angled hexagon")


def crossed_hexagon_diagonal(p, p_prime, c):
    """Diagonal phi of a crossed right-angled hexagon.

    cosh(phi) = sinh(p) sinh(p') cosh(c) + cosh(p) cosh(p').  Always defined
    for positive p, p' since the right-hand side is at least cosh(p + p').
    """
    _require_positive("p", p)
    _require_positive("p_prime", p_prime)
    _require_nonnegative("c", c)
    expr = (math.sinh(p) * math.sinh(p_prime) * math.cosh(c)
            + math.cosh(p) * math.cosh(p_prime))
    return arccosh(expr)


def pentagon_opposite(a, b):
    """Full length of the side opposite the a-b corner of a right pentagon.

    cosh of the half side equals sinh(a) sinh(b); the function returns the
    doubled value.  sinh(a) sinh(b) = 1 is the ideal-trirectangle limit and
    yields 0.
    """
    _require_positive("a", a)
    _require_positive("b", b)
    product = math.sinh(a) * math.sinh(b)
    return 2.0 * _arccosh_clamped(product, product, "right-angled pentagon")


def trirectangle_altitude(a):
    """Altitude b of the trirectangle with an ideal vertex: sinh(a) sinh(b) = 1."""
    _require_positive("a", a)
    return math.asinh(1.0 / math.sinh(a))


def collar_halfwidth(length):
    """Half-width of the embedded collar around a geodesic of given length.

    The collar is the set where sinh(dist) * sinh(length / 2) <= 1; the
    half-width diverges as the core geodesic shrinks.
    """
    _require_positive("length", length)
    return math.asinh(1.0 / math.sinh(0.5 * length))


def pants_perpendicular(l_i, l_j, l_k):
    """Common perpendicular between boundaries i and j of a pair of pants.

    Boundary lengths are (l_i, l_j, l_k); l_k = 0 encodes a cusp at the third
    boundary.  cosh(p) = (cosh(l_k/2) + cosh(l_i/2) cosh(l_j/2)) /
    (sinh(l_i/2) sinh(l_j/2)), which is always > 1.
    """
    _require_positive("l_i", l_i)
    _require_positive("l_j", l_j)
    _require_nonnegative("l_k", l_k)
    ci, cj = math.cosh(0.5 * l_i), math.cosh(0.5 * l_j)
    si, sj = math.sinh(0.5 * l_i), math.sinh(0.5 * l_j)
    expr = (math.cosh(0.5 * l_k) + ci * cj) / (si * sj)
    return arccosh(max(expr, 1.0))
