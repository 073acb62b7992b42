"""Elementary geometry of the upper half-plane model.

Points are complex numbers with positive imaginary part, ideal points are
reals (``math.inf`` allowed), and a geodesic is an ordered pair of distinct
ideal endpoints.  Real 2x2 matrices of determinant one act as Mobius maps;
the same matrices with determinant -1 encode reflections z -> M(conj(z)).

The module is deliberately formula-light: configurations are built from
isometries, feet and measured distances, so that it can serve as an
independent check of the closed-form trigonometry kernel.
"""

import math

from .errors import NumericalInstability, OutOfRange

INF = math.inf


class Isometry:
    """An orientation-preserving isometry of the plane: a real 2x2 matrix of
    determinant one acting as a Mobius transformation."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d, normalize=True):
        if normalize:
            det = a * d - b * c
            if not det > 0.0:
                raise OutOfRange(f"matrix determinant {det!r} not positive")
            s = math.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        self.a, self.b, self.c, self.d = a, b, c, d

    @staticmethod
    def identity():
        return Isometry(1.0, 0.0, 0.0, 1.0, normalize=False)

    @staticmethod
    def translation(t):
        """Translation by t along the imaginary axis (0 -> infinity)."""
        e = math.exp(0.5 * t)
        return Isometry(e, 0.0, 0.0, 1.0 / e, normalize=False)

    @staticmethod
    def half_turn():
        """z -> -1/z: reverses the imaginary axis, fixing the point i."""
        return Isometry(0.0, -1.0, 1.0, 0.0, normalize=False)

    def __mul__(self, other):
        # Determinants of unit-determinant factors only drift by roundoff;
        # renormalizing would recompute ad - bc with catastrophic cancellation
        # once entries are large.
        return Isometry(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            normalize=False,
        )

    def inv(self):
        return Isometry(self.d, -self.b, -self.c, self.a, normalize=False)

    def __call__(self, z):
        a, b, c, d = self.a, self.b, self.c, self.d
        if isinstance(z, complex):
            return (a * z + b) / (c * z + d)
        if z == INF or z == -INF:
            return a / c if c != 0.0 else INF
        den = c * z + d
        if den == 0.0:
            return INF
        return (a * z + b) / den

    @property
    def trace(self):
        return self.a + self.d

    def frobenius_sq(self):
        return self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d

    def to_tuple(self):
        return (self.a, self.b, self.c, self.d)

    def classify(self, tol=1e-9):
        """'hyperbolic', 'parabolic' (|tr| within tol of 2), or 'elliptic'."""
        t = abs(self.trace)
        if t > 2.0 + tol:
            return "hyperbolic"
        if t >= 2.0 - tol:
            return "parabolic"
        return "elliptic"

    def translation_length(self):
        t = abs(self.trace)
        if t <= 2.0:
            return 0.0
        return 2.0 * math.acosh(0.5 * t)

    def fixed_points(self):
        """(repelling, attracting) ideal fixed points of a hyperbolic element."""
        a, b, c, d = self.a, self.b, self.c, self.d
        tr = a + d
        if abs(tr) <= 2.0:
            raise OutOfRange("fixed_points requires a hyperbolic element")
        root = math.sqrt(tr * tr - 4.0)
        lam_big = 0.5 * (tr + math.copysign(root, tr))
        lam_small = 1.0 / lam_big
        if abs(c) > 1e-14 * (abs(a) + abs(d)):
            return ((lam_small - d) / c, (lam_big - d) / c)
        # c == 0: fixed points are infinity (multiplier a) and b / (d - a).
        finite = b / (d - a) if abs(d - a) > 0.0 else INF
        if abs(a) > abs(d):
            return (finite, INF)
        return (INF, finite)

    def __repr__(self):
        return f"Isometry({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"


def dist(z, w):
    """Hyperbolic distance between interior points."""
    q = 1.0 + abs(z - w) ** 2 / (2.0 * z.imag * w.imag)
    return math.acosh(max(q, 1.0))


def mobius_to_axis(geo):
    """Isometry sending the oriented geodesic (p, q) to (0, infinity)."""
    p, q = geo
    if p == INF:
        return Isometry(0.0, -1.0, 1.0, -q)
    if q == INF:
        return Isometry(1.0, -p, 0.0, 1.0, normalize=False)
    if p > q:
        return Isometry(1.0, -p, 1.0, -q)
    return Isometry(1.0, -p, -1.0, q)


def apply_to_geodesic(iso, geo):
    return (iso(geo[0]), iso(geo[1]))


def geodesic_through(z, w):
    """Geodesic through two interior points, oriented from z toward w."""
    if abs(z.real - w.real) < 1e-14 * max(1.0, abs(z.real)):
        if w.imag > z.imag:
            return (z.real, INF)
        return (INF, z.real)
    # Perpendicular bisector of the chord meets the real axis at the center.
    center = ((abs(w) ** 2 - abs(z) ** 2) / (2.0 * (w.real - z.real)))
    radius = abs(z - center)
    if z.real < w.real:
        return (center - radius, center + radius)
    return (center + radius, center - radius)


def dist_point_to_geodesic(z, geo):
    w = mobius_to_axis(geo)(z)
    return math.asinh(abs(w.real) / w.imag)


def is_left_of(z, geo):
    """True if z lies to the left of the oriented geodesic."""
    return mobius_to_axis(geo)(z).real < 0.0


def foot_on_geodesic(z, geo):
    """Foot of the perpendicular from z onto the geodesic."""
    m = mobius_to_axis(geo)
    w = m(z)
    return m.inv()(complex(0.0, abs(w)))


def point_along(geo, start, t):
    """Point at signed distance t from ``start`` along the oriented geodesic."""
    m = mobius_to_axis(geo)
    w = m(start)
    return m.inv()(complex(0.0, abs(w) * math.exp(t)))


def perpendicular_at(geo, z):
    """Geodesic through z perpendicular to geo, oriented right-to-left of geo."""
    m = mobius_to_axis(geo)
    s = abs(m(z))
    minv = m.inv()
    return (minv(s), minv(-s))


def geodesic_dist(g1, g2):
    """Distance between two geodesics; 0 if they meet or share an endpoint."""
    m = mobius_to_axis(g1)
    u, v = m(g2[0]), m(g2[1])
    if u == INF or v == INF:
        return 0.0
    if u * v <= 0.0:
        return 0.0
    q = abs(u + v) / abs(v - u)
    return math.acosh(max(q, 1.0))


def common_perpendicular(g1, g2):
    """The geodesic meeting two disjoint geodesics at right angles."""
    m = mobius_to_axis(g1)
    u, v = m(g2[0]), m(g2[1])
    if u == INF or v == INF or u * v <= 0.0:
        raise OutOfRange("geodesics are not disjoint; no common perpendicular")
    s = math.sqrt(u * v) * (1.0 if u > 0 else -1.0)
    minv = m.inv()
    return (minv(-s), minv(s))


def geodesics_intersection(g1, g2):
    """Intersection point of two crossing geodesics."""
    m = mobius_to_axis(g1)
    u, v = m(g2[0]), m(g2[1])
    if u == INF:
        u, v = v, u
    if v == INF:
        if u >= 0.0:
            raise OutOfRange("geodesics do not cross")
        y = math.sqrt(-u)  # circle through u orthogonal cross at height sqrt(-u)
        return m.inv()(complex(0.0, y))
    if u * v >= 0.0:
        raise OutOfRange("geodesics do not cross")
    return m.inv()(complex(0.0, math.sqrt(-u * v)))


def translation_along(geo, t):
    """Isometry translating by t along the oriented geodesic."""
    m = mobius_to_axis(geo)
    return m.inv() * Isometry.translation(t) * m


def reflection_matrix(geo):
    """Raw (a, b, c, d) with det -1; the reflection acts as z -> M(conj(z))."""
    p, q = geo
    if p == INF or q == INF:
        x0 = q if p == INF else p
        return (-1.0, 2.0 * x0, 0.0, 1.0)
    center = 0.5 * (p + q)
    radius = 0.5 * abs(q - p)
    return (center / radius, (radius * radius - center * center) / radius,
            1.0 / radius, -center / radius)


def compose_reflections(r1, r2):
    """Mobius map of the composition (reflection r1) o (reflection r2)."""
    a1, b1, c1, d1 = r1
    a2, b2, c2, d2 = r2
    return Isometry(
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
    )


def reflect_point(refl, z):
    a, b, c, d = refl
    zc = z.conjugate()
    return (a * zc + b) / (c * zc + d)


def check_residual(iso, tol, what):
    """Entrywise distance of a matrix from +-identity; raises beyond tol."""
    sign = 1.0 if iso.a + iso.d >= 0.0 else -1.0
    res = max(abs(iso.a - sign), abs(iso.b), abs(iso.c), abs(iso.d - sign))
    if res > tol:
        raise NumericalInstability(f"{what}: residual {res:.3e} > {tol:.1e}",
                                   residual=res)
    return res
