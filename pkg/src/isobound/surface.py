"""Fenchel-Nielsen surface records and Bers-constant data.

A surface is a pants graph together with one length and one twist per
internal edge, both indexed in edge-serialization order.  Twists are stored
as fractions of the glued curve's length, so the metric displacement of a
gluing is twist * length.
"""

import math
from dataclasses import dataclass

from . import pantsgraph
from .errors import (OutOfRange, ParseError, SignatureMismatch,
                     ValidationError)

SURFACE_CLASSES = ("finite-area", "closed", "punctured-sphere",
                   "genus-2-closed")


@dataclass(frozen=True)
class FNSurface:
    graph: pantsgraph.PantsGraph
    lengths: tuple
    twists: tuple

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(float(x) for x in self.lengths))
        object.__setattr__(self, "twists", tuple(float(x) for x in self.twists))

    def signature(self):
        return pantsgraph.validate(self.graph)


@dataclass(frozen=True)
class BersContext:
    surface_class: str
    g: int
    n: int
    B: float
    I: float


def bers_constant(surface_class, g, n):
    """Table value of the Bers constant for a class of surfaces."""
    if surface_class == "finite-area":
        if 2 * g - 2 + n < 1:
            raise SignatureMismatch(f"no pants decomposition for {(g, n)}")
        return 10.13 * (3 * g - 3 + n)
    if surface_class == "closed":
        if n != 0 or g < 2:
            raise SignatureMismatch(f"closed class needs n=0, g>=2, got {(g, n)}")
        return 12.67 * (g - 1) + 20.0
    if surface_class == "punctured-sphere":
        if g != 0 or n < 3:
            raise SignatureMismatch(
                f"punctured-sphere class needs g=0, n>=3, got {(g, n)}")
        return 30.0 * math.sqrt(2.0 * math.pi * (n - 2))
    if surface_class == "genus-2-closed":
        if (g, n) != (2, 0):
            raise SignatureMismatch(f"genus-2 class needs (2, 0), got {(g, n)}")
        return 4.45
    raise SignatureMismatch(f"unknown surface class {surface_class!r}")


def default_bers_context(g, n, I=1.0, B=None):
    """Context with the smallest applicable table constant (overridable)."""
    best_class, best = "finite-area", None
    for cls in SURFACE_CLASSES:
        try:
            value = bers_constant(cls, g, n)
        except SignatureMismatch:
            continue
        if best is None or value < best:
            best_class, best = cls, value
    if best is None:
        raise SignatureMismatch(f"no Bers constant applies to {(g, n)}")
    if B is not None:
        best = float(B)
    if not 0.0 < I <= best:
        raise OutOfRange(f"need 0 < I <= B, got I={I!r}, B={best!r}")
    return BersContext(best_class, g, n, best, float(I))


def buser_curve_bound(k, g, n):
    """Length bound for the k-th curve of a sorted pants decomposition:
    4 k log(4 pi (2g - 2 + n) / k)."""
    m = 3 * g - 3 + n
    if not 1 <= k <= m:
        raise OutOfRange(f"k must lie in [1, {m}], got {k}")
    return 4.0 * k * math.log(4.0 * math.pi * (2 * g - 2 + n) / k)


def validate_surface(surface, ctx):
    """Check arity, positivity, the twist box and I <= length <= B."""
    g, n = surface.signature()
    m = len(surface.graph.edges)
    if len(surface.lengths) != m:
        raise ValidationError(
            f"expected {m} lengths, got {len(surface.lengths)}")
    if len(surface.twists) != m:
        raise ValidationError(
            f"expected {m} twists, got {len(surface.twists)}")
    if ctx is not None and (ctx.g, ctx.n) != (g, n):
        raise ValidationError(
            f"context signature {(ctx.g, ctx.n)} differs from graph {(g, n)}")
    for i, value in enumerate(surface.lengths):
        if not value > 0.0:
            raise OutOfRange(f"length {i} must be > 0, got {value!r}",
                             index=i, which="length>0")
        if ctx is not None:
            if value < ctx.I:
                raise OutOfRange(
                    f"length {i} = {value!r} below systole bound I = {ctx.I}",
                    index=i, which="length>=I")
            if value > ctx.B:
                raise OutOfRange(
                    f"length {i} = {value!r} above Bers constant B = {ctx.B}",
                    index=i, which="length<=B")
    for i, value in enumerate(surface.twists):
        if not -0.5 <= value <= 0.5:
            raise OutOfRange(
                f"twist {i} = {value!r} outside [-1/2, 1/2]",
                index=i, which="twist")


# ---------------------------------------------------------------------------
# surface file format


def dump_surface(surface, ctx=None):
    lines = ["surface v1", "graph {"]
    lines += pantsgraph.to_text(surface.graph).strip().splitlines()
    lines.append("}")
    lines.append("lengths " + " ".join(repr(x) for x in surface.lengths))
    lines.append("twists " + " ".join(repr(x) for x in surface.twists))
    if ctx is not None:
        lines.append(f"context class={ctx.surface_class} B={ctx.B!r} I={ctx.I!r}")
    return "\n".join(lines) + "\n"


def _parse_floats(rest, what, lineno):
    try:
        return tuple(float(tok) for tok in rest.split())
    except ValueError:
        raise ParseError(f"line {lineno}: bad {what} list") from None


def load_surface(text):
    """Parse the surface format; returns (FNSurface, BersContext or None).

    Parsing is strict: unknown fields, duplicate fields and arity or range
    violations are rejected.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != "surface v1":
        raise ParseError("line 1: missing 'surface v1' header")
    graph = lengths = twists = ctx_line = None
    i = 1
    while i < len(lines):
        ln = lines[i].strip()
        lineno = i + 1
        if not ln:
            i += 1
            continue
        if ln == "graph {":
            if graph is not None:
                raise ParseError(f"line {lineno}: duplicate graph block")
            block = []
            i += 1
            while i < len(lines) and lines[i].strip() != "}":
                block.append(lines[i])
                i += 1
            if i >= len(lines):
                raise ParseError("unterminated graph block")
            graph = pantsgraph.from_text("\n".join(block))
        elif ln.startswith("lengths"):
            if lengths is not None:
                raise ParseError(f"line {lineno}: duplicate lengths")
            lengths = _parse_floats(ln[len("lengths"):], "lengths", lineno)
        elif ln.startswith("twists"):
            if twists is not None:
                raise ParseError(f"line {lineno}: duplicate twists")
            twists = _parse_floats(ln[len("twists"):], "twists", lineno)
        elif ln.startswith("context"):
            if ctx_line is not None:
                raise ParseError(f"line {lineno}: duplicate context")
            ctx_line = (ln, lineno)
        else:
            raise ParseError(f"line {lineno}: unknown field {ln.split()[0]!r}")
        i += 1
    if graph is None:
        raise ParseError("missing graph block")
    if lengths is None:
        raise ParseError("missing lengths")
    if twists is None:
        raise ParseError("missing twists")
    surface = FNSurface(graph, lengths, twists)
    g, n = pantsgraph.validate(graph)
    ctx = None
    if ctx_line is not None:
        ln, lineno = ctx_line
        fields = {}
        for tok in ln.split()[1:]:
            if "=" not in tok:
                raise ParseError(f"line {lineno}: bad context token {tok!r}")
            key, value = tok.split("=", 1)
            if key in fields:
                raise ParseError(f"line {lineno}: duplicate context key {key!r}")
            fields[key] = value
        unknown = set(fields) - {"class", "B", "I"}
        if unknown:
            raise ParseError(
                f"line {lineno}: unknown context keys {sorted(unknown)}")
        cls = fields.get("class", "finite-area")
        if cls not in SURFACE_CLASSES:
            raise ParseError(f"line {lineno}: unknown class {cls!r}")
        try:
            b_value = float(fields["B"]) if "B" in fields else None
            i_value = float(fields["I"]) if "I" in fields else 1.0
        except ValueError:
            raise ParseError(f"line {lineno}: bad numeric context value") from None
        try:
            if b_value is None:
                b_value = bers_constant(cls, g, n)
        except SignatureMismatch as exc:
            raise ValidationError(str(exc)) from None
        ctx = BersContext(cls, g, n, b_value, i_value)
    try:
        validate_surface(surface, ctx)
    except OutOfRange as exc:
        raise ValidationError(str(exc)) from None
    return surface, ctx
