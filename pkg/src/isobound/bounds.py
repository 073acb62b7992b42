"""Counting bounds for length-isospectral families.

Everything is carried in natural-log space: the headline numbers overflow
doubles long before the interesting genus range does.  The final bound is a
product of three counts (graphs, length parameters, twist parameters); its
closed form is

    2 exp{2 m (2B - 2 log I + log(2g - 2 + n) + 5 log 2 + 6) + log C(g, n)}

with m = 3g - 3 + n, and the factor 2 is the two-to-one ambiguity of the
twist recovered from a transversal length.
"""

import math
from dataclasses import dataclass

from . import pantsgraph, surface as surface_mod
from .errors import OutOfRange, SignatureMismatch

LOG2 = math.log(2.0)
COMPOSITION_RTOL = 1e-12

# Constants inside the growth-rate argument: geodesics shorter than
# 2 arcsinh(1) are collar cores; points outside collars have injectivity
# radius at least arcsinh(1).
SHORT_GEODESIC_CUTOFF = 2.0 * math.asinh(1.0)
INJECTIVITY_RADIUS = math.asinh(1.0)


def _check_signature(g, n):
    if g < 0 or n < 0 or 2 * g - 2 + n < 1:
        raise OutOfRange(f"signature {(g, n)} has no pants decomposition")


def growth_rate(L, g, n):
    """f(L) = (1/2)(2g - 2 + n) exp(L + 6): bound on the number of closed
    geodesics of length <= L that are not iterates of short geodesics."""
    _check_signature(g, n)
    if L < 0.0:
        raise OutOfRange(f"L must be >= 0, got {L!r}")
    return 0.5 * (2 * g - 2 + n) * math.exp(L + 6.0)


def log_growth_rate(L, g, n):
    _check_signature(g, n)
    if L < 0.0:
        raise OutOfRange(f"L must be >= 0, got {L!r}")
    return math.log(0.5 * (2 * g - 2 + n)) + L + 6.0


def log_count_bound(g, n):
    """log of the graph-count bound C(g, n), directly in log space."""
    count_term = 0.0 if g == 0 else 3.0 * g * math.log(g)
    if n == 0:
        _check_signature(g, n)
        return count_term
    _check_signature(g, n)
    return math.log(n) + count_term + n * math.log(3 * g - 3 + 3 * n)


def length_param_count(g, n, B):
    """Log of the bound on length-parameter choices:
    m log((2g - 2 + n)/2) + m (B + 6)."""
    _check_signature(g, n)
    if B <= 0.0:
        raise OutOfRange(f"B must be > 0, got {B!r}")
    m = 3 * g - 3 + n
    return m * math.log(0.5 * (2 * g - 2 + n)) + m * (B + 6.0)


def twist_param_count(g, n, B, I):
    """Log of the bound on twist-parameter choices:
    log 2 + m log((2g - 2 + n)/2) + m (3B - 4 log I + 12 log 2 + 6)."""
    _check_signature(g, n)
    if not 0.0 < I <= B:
        raise OutOfRange(f"need 0 < I <= B, got I={I!r}, B={B!r}")
    m = 3 * g - 3 + n
    return (LOG2 + m * math.log(0.5 * (2 * g - 2 + n))
            + m * (3.0 * B - 4.0 * math.log(I) + 12.0 * LOG2 + 6.0))


@dataclass(frozen=True)
class BoundReport:
    g: int
    n: int
    B: float
    I: float
    graph_term_log: float
    length_term_log: float
    twist_term_log: float
    total_log: float
    closed_form_log: float

    def total_log10(self):
        return self.total_log / math.log(10.0)


def main_bound(g, n, B, I):
    """Bound on the size of a length-isospectral family of (g, n) surfaces
    with Bers constant B and systole at least I.

    The factored terms multiply to the closed form exactly; the twist term
    is stored without its global factor 2, which appears once in total_log.
    """
    if g < 0 or n < 0 or 2 * g - 2 + n < 1:
        raise OutOfRange(f"signature {(g, n)} has no pants decomposition")
    if not 0.0 < I <= B:
        raise OutOfRange(f"need 0 < I <= B, got I={I!r}, B={B!r}")
    m = 3 * g - 3 + n
    graph_term = log_count_bound(g, n)
    if m == 0:
        # A single pair of pants: no length or twist parameters at all.
        length_term = 0.0
        twist_term = 0.0
    else:
        length_term = length_param_count(g, n, B)
        twist_term = twist_param_count(g, n, B, I) - LOG2
    total = LOG2 + graph_term + length_term + twist_term
    closed = (LOG2 + 2.0 * m * (2.0 * B - 2.0 * math.log(I)
                                + math.log(2 * g - 2 + n) + 5.0 * LOG2 + 6.0)
              + graph_term)
    return BoundReport(g, n, float(B), float(I), graph_term, length_term,
                       twist_term, total, closed)


def buser_reference_bound(g):
    """Log of the classical exp(720 g^2) closed-surface bound."""
    if g < 2:
        raise OutOfRange(f"g must be >= 2, got {g}")
    return 720.0 * g * g


@dataclass(frozen=True)
class TheoremRow:
    label: str
    surface_class: str
    bullet_log: float
    bound_log: float
    satisfied: bool


def theorem13_bounds(g, n, I):
    """Evaluate every applicable headline bullet against main_bound computed
    with the matching table constant; reports whether the bullet dominates."""
    if I <= 0.0:
        raise OutOfRange(f"I must be > 0, got {I!r}")
    rows = []
    m = 3 * g - 3 + n
    if g > 0 and n > 0:
        B = surface_mod.bers_constant("finite-area", g, n)
        bullet = (-4.0 * m * math.log(I)
                  + 380.0 * g * g + 46.0 * n * n + 257.0 * n * g)
        bound = main_bound(g, n, B, I).total_log
        rows.append(TheoremRow("general", "finite-area", bullet, bound,
                               bound <= bullet))
    if n == 0 and g >= 2:
        B = surface_mod.bers_constant("closed", g, n)
        bullet = 12.0 * (1 - g) * math.log(I) + 171.0 * g * g
        bound = main_bound(g, n, B, I).total_log
        rows.append(TheoremRow("closed", "closed", bullet, bound,
                               bound <= bullet))
    if g == 0 and n >= 3:
        B = surface_mod.bers_constant("punctured-sphere", g, n)
        bullet = ((12.0 - 4.0 * n) * math.log(I)
                  + 300.0 * (n - 3) * math.sqrt(n - 2)
                  + 2.0 * (n - 3) * math.log(n + 3)
                  + n * math.log(n - 1) + 24.0 * n)
        bound = main_bound(g, n, B, I).total_log
        rows.append(TheoremRow("punctured-sphere", "punctured-sphere",
                               bullet, bound, bound <= bullet))
    if (g, n) == (2, 0):
        B = surface_mod.bers_constant("genus-2-closed", g, n)
        bullet = -12.0 * math.log(I) + math.log(3.8) + 53.0 * math.log(10.0)
        bound = main_bound(g, n, B, I).total_log
        rows.append(TheoremRow("genus-2", "genus-2-closed", bullet, bound,
                               bound <= bullet))
    if not rows:
        raise SignatureMismatch(f"no headline bullet covers {(g, n)}")
    return rows


def count_bound(g, n):
    """Exact integer graph-count bound; see pantsgraph.count_bound."""
    return pantsgraph.count_bound(g, n)


def format_log_value(log_value):
    """Render e**log_value in scientific notation without overflow."""
    log10 = log_value / math.log(10.0)
    exponent = math.floor(log10)
    mantissa = 10.0 ** (log10 - exponent)
    if mantissa >= 9.9999999995:
        mantissa /= 10.0
        exponent += 1
    return f"{mantissa:.4f}e{exponent:+d}"
