"""Transversal lengths across a glued pants curve, and their inversion.

A gluing neighborhood is two distinct pairs of pants Y, Y' sharing a curve
gamma: Y has boundaries (gamma, xi1, xi2), Y' has (gamma, eta1, eta2), glued
with twist fraction alpha.  The transversal delta is the closed geodesic
wrapping xi1 and eta2 across gamma; its length determines |alpha|, and the
hyperbolic cosine being two-to-one is exactly why a transversal length pins
the twist down to at most two values.
"""

import math
from dataclasses import dataclass, replace

from . import hyptrig
from .errors import (LoopEdgeUnsupported, OutOfRange, UnsupportedCuspCase)
from .pantsgraph import pants_slots

TWIST_RTOL = 1e-12


@dataclass(frozen=True)
class GluingNeighborhood:
    l_gamma: float
    l_xi1: float
    l_xi2: float
    l_eta1: float
    l_eta2: float
    alpha: float

    def __post_init__(self):
        if not self.l_gamma > 0.0:
            raise OutOfRange(f"glued curve length must be > 0, got {self.l_gamma!r}")
        for name in ("l_xi1", "l_xi2", "l_eta1", "l_eta2"):
            if getattr(self, name) < 0.0:
                raise OutOfRange(f"{name} must be >= 0, got {getattr(self, name)!r}")
        if not -0.5 <= self.alpha <= 0.5:
            raise OutOfRange(f"twist {self.alpha!r} outside [-1/2, 1/2]")


def neighborhood_of_edge(surface, edge_index, alpha=None):
    """Gluing neighborhood of an internal edge of a surface.

    The wrap curves xi1/eta2 and the spare curves xi2/eta1 follow the slot
    order of the serialization.  Loop edges (a pants glued to itself) have no
    closed-form transversal and are rejected.
    """
    graph = surface.graph
    if not 0 <= edge_index < len(graph.edges):
        raise OutOfRange(f"edge index {edge_index} out of range")
    u, v = graph.edges[edge_index]
    if u == v:
        raise LoopEdgeUnsupported(
            f"edge {edge_index} glues pants {u} to itself")

    def wing_lengths(node):
        slots = pants_slots(graph, node)
        s = next(i for i, slot in enumerate(slots) if slot == ("edge", edge_index))
        out = []
        for j in (1, 2):
            kind, k = slots[(s + j) % 3]
            out.append(surface.lengths[k] if kind == "edge" else 0.0)
        return out

    xi1, xi2 = wing_lengths(u)
    eta1, eta2 = wing_lengths(v)
    return GluingNeighborhood(
        l_gamma=surface.lengths[edge_index],
        l_xi1=xi1, l_xi2=xi2, l_eta1=eta1, l_eta2=eta2,
        alpha=surface.twists[edge_index] if alpha is None else alpha)


def _perpendiculars(nbhd):
    p = hyptrig.pants_perpendicular(nbhd.l_gamma, nbhd.l_xi1, nbhd.l_xi2)
    p_prime = hyptrig.pants_perpendicular(nbhd.l_gamma, nbhd.l_eta2, nbhd.l_eta1)
    return p, p_prime


def interior_perpendicular(nbhd):
    """Length of the arc joining xi1 to eta2 perpendicularly across gamma."""
    if nbhd.l_xi1 == 0.0 or nbhd.l_eta2 == 0.0:
        raise UnsupportedCuspCase(
            "xi1 and eta2 must be honest geodesics, not cusps")
    p, p_prime = _perpendiculars(nbhd)
    c = abs(nbhd.alpha) * nbhd.l_gamma
    return hyptrig.crossed_hexagon_diagonal(p, p_prime, c)


def _delta_from_cosh_phi(nbhd, cosh_phi):
    s1 = math.sinh(0.5 * nbhd.l_xi1)
    s2 = math.sinh(0.5 * nbhd.l_eta2)
    c1 = math.cosh(0.5 * nbhd.l_xi1)
    c2 = math.cosh(0.5 * nbhd.l_eta2)
    expr = s1 * s2 * cosh_phi - c1 * c2
    return 2.0 * hyptrig._arccosh_clamped(expr, s1 * s2 * cosh_phi,
                                          "transversal")


def transversal_length(nbhd):
    """Length of the transversal geodesic across the glued curve.

    cosh(delta/2) = sinh(xi1/2) sinh(eta2/2)
                    * {sinh(p) sinh(p') cosh(alpha l) + cosh(p) cosh(p')}
                    - cosh(xi1/2) cosh(eta2/2).
    """
    if nbhd.l_xi1 == 0.0 or nbhd.l_eta2 == 0.0:
        raise UnsupportedCuspCase(
            "closed-form transversal needs non-cusp xi1 and eta2")
    p, p_prime = _perpendiculars(nbhd)
    c = abs(nbhd.alpha) * nbhd.l_gamma
    cosh_phi = (math.sinh(p) * math.sinh(p_prime) * math.cosh(c)
                + math.cosh(p) * math.cosh(p_prime))
    return _delta_from_cosh_phi(nbhd, cosh_phi)


def twists_from_transversal(nbhd, delta_target):
    """All twists in [-1/2, 1/2] whose transversal has the given length.

    Returns a tuple: (-a, +a), (0.0,) or (); the alpha field of ``nbhd`` is
    ignored.  Inversion is analytic (two nested arccosh).
    """
    if not delta_target > 0.0:
        raise OutOfRange(f"target length must be > 0, got {delta_target!r}")
    if nbhd.l_xi1 == 0.0 or nbhd.l_eta2 == 0.0:
        raise UnsupportedCuspCase(
            "closed-form transversal needs non-cusp xi1 and eta2")
    p, p_prime = _perpendiculars(nbhd)
    s1 = math.sinh(0.5 * nbhd.l_xi1)
    s2 = math.sinh(0.5 * nbhd.l_eta2)
    c1 = math.cosh(0.5 * nbhd.l_xi1)
    c2 = math.cosh(0.5 * nbhd.l_eta2)
    cosh_phi = ((math.cosh(0.5 * delta_target) + c1 * c2) / (s1 * s2))
    scale = max(1.0, abs(cosh_phi))
    # cosh(alpha * l) from the crossed-hexagon relation
    num = cosh_phi - math.cosh(p) * math.cosh(p_prime)
    den = math.sinh(p) * math.sinh(p_prime)
    x = num / den
    window = TWIST_RTOL * max(1.0, scale / den)
    if x < 1.0 - window:
        return ()
    a = hyptrig.arccosh(max(x, 1.0)) / nbhd.l_gamma
    if a <= window:
        return (0.0,)
    if a > 0.5 + window:
        return ()
    a = min(a, 0.5)
    return (-a, a)


def transversal_upper_bound(B, I):
    """Bound 3B - 4 log(I) + 12 log(2) on any transversal length when all
    pants curves lie in [I, B]."""
    if not 0.0 < I <= B:
        raise OutOfRange(f"need 0 < I <= B, got I={I!r}, B={B!r}")
    return 3.0 * B - 4.0 * math.log(I) + 12.0 * math.log(2.0)


def twist_altitude_bound(B, l_gamma):
    """Altitude bound arcsinh(cosh(B/2) / sinh(l/4)) used to derive the
    transversal bound; exposed for the property checks."""
    if not 0.0 < l_gamma <= B:
        raise OutOfRange(f"need 0 < l <= B, got l={l_gamma!r}, B={B!r}")
    return math.asinh(math.cosh(0.5 * B) / math.sinh(0.25 * l_gamma))


def with_alpha(nbhd, alpha):
    return replace(nbhd, alpha=alpha)
