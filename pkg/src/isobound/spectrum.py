"""Holonomy representations and closed-geodesic length spectra.

A surface record is realized as an explicit discrete group of 2x2 matrices:
each pair of pants is the even subgroup of the reflections in its three
seams (the common perpendiculars between boundaries), pants are placed by
frames along a spanning tree of the graph, and gluings translate along the
shared geodesic by half the curve length plus the twist displacement.

The spectrum enumerator walks the group by breadth-first word expansion,
pruning by displacement balls centered on the pants-curve arcs (every closed
geodesic is a pants curve or crosses one), and groups elements into
conjugacy classes by canonicalizing axes.  It is floating point throughout;
residuals are reported so callers can judge trust.
"""

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from . import pantsgraph, plane
from .errors import NumericalInstability, OutOfRange, ResourceLimit
from .plane import INF, Isometry
from .surface import dump_surface

RELATOR_TOL = 1e-9
PARABOLIC_TOL = 1e-9
ITERATE_RTOL = 1e-9
LENGTH_CLUSTER_TOL = 5e-9
# Grouping window for the conjugacy stage: lengths computed from large
# conjugate words carry more noise than the reported class lengths do, and
# grouping too finely would keep conjugate candidates from ever being
# compared.  The exact conjugacy test separates genuinely distinct classes.
GROUPING_TOL = 1e-6
MAX_CUTOFF = 18.0
_QUANT = 1e-6
# Generic functional fixing the +-M sign ambiguity of a projective matrix.
_SIGN_VEC = (1.0, 0.61803398874989, 0.31830988618379, 0.27182818284590)


# ---------------------------------------------------------------------------
# standard pants


@dataclass(frozen=True)
class _Slot:
    length: float
    translation: Isometry
    axis: tuple
    foot: complex
    frame: Isometry


@dataclass(frozen=True)
class _CuspSlot:
    translation: Isometry


def _solve_seams(l0, l1, l2):
    """Three pairwise-disjoint geodesics with dist(seam_j, seam_k) = l_i / 2
    for {i, j, k} = {0, 1, 2}; a zero length makes the pair asymptotic."""
    ka = math.cosh(0.5 * l0)
    kb = math.cosh(0.5 * l1)
    kc = math.cosh(0.5 * l2)
    seam1 = (0.0, INF)
    a = math.tanh(0.25 * l0) ** 2
    seam2 = (a, 1.0)
    if l2 > 0.0:
        alpha = kc * kc - 1.0
        beta = kc * (1.0 + a) + kb * (1.0 - a)
        disc = beta * beta - 4.0 * alpha * a
        rho = (beta + math.sqrt(max(disc, 0.0))) / (2.0 * alpha)
        mid = kc * rho
        seam0 = (mid - rho, mid + rho)
    elif l1 > 0.0:
        x = (kb + 1.0) / (kb - 1.0)
        seam0 = ((x - a) / (x - 1.0), INF)
    else:
        seam0 = (1.0, INF)
    return (seam0, seam1, seam2), ka, kb, kc


def _seam_probe(seam):
    """A point on the seam, used to decide which side the pants lies on."""
    p, q = seam
    if p == INF or q == INF:
        x0 = q if p == INF else p
        return complex(x0, 1.0)
    return complex(0.5 * (p + q), 0.5 * abs(q - p))


def _standard_pants(lengths):
    """Boundary data of the pair of pants with the given slot lengths.

    Boundary translations move with the pants interior on their left; the
    designated foot of slot i is where the seam toward slot i+1 crosses it.
    """
    l0, l1, l2 = lengths
    seams, *_ = _solve_seams(l0, l1, l2)
    refl = [plane.reflection_matrix(s) for s in seams]
    trans = [
        plane.compose_reflections(refl[2], refl[1]),
        plane.compose_reflections(refl[0], refl[2]),
        plane.compose_reflections(refl[1], refl[0]),
    ]
    plane.check_residual(trans[2] * trans[1] * trans[0], 1e-9,
                         "pants boundary relation")
    slots = []
    for i, (li, t) in enumerate(zip(lengths, trans)):
        expected = 2.0 * math.cosh(0.5 * li)
        if abs(abs(t.trace) - expected) > 1e-9 * expected:
            raise NumericalInstability(
                f"pants boundary {i}: trace {t.trace!r}, expected {expected!r}",
                residual=abs(abs(t.trace) - expected))
        if li == 0.0:
            slots.append(_CuspSlot(t))
            continue
        if not plane.is_left_of(_seam_probe(seams[i]), t.fixed_points()):
            t = t.inv()
        axis = t.fixed_points()
        toward_next = seams[(i + 2) % 3]
        foot = plane.geodesics_intersection(axis, toward_next)
        n = plane.mobius_to_axis(axis)
        t0 = abs(n(foot))
        frame = n.inv() * Isometry.translation(math.log(t0))
        slots.append(_Slot(li, t, axis, foot, frame))
    return slots


# ---------------------------------------------------------------------------
# holonomy representation


@dataclass(frozen=True)
class HolonomyRep:
    surface: object
    signature: tuple
    generators: tuple          # boundary elements then stable letters
    names: tuple
    relator_words: tuple       # words of (generator index, +-1), composed left to right
    relator_residuals: tuple
    cusp_indices: tuple        # generator indices that must be parabolic
    edge_elements: tuple       # per edge: holonomy of the pants curve
    edge_data: tuple           # per edge: (midpoint frame, length)
    enumeration_indices: tuple  # generating subset used by the enumerator
    residual: float

    def evaluate_word(self, word):
        out = Isometry.identity()
        for idx, sign in word:
            out = out * (self.generators[idx] if sign > 0
                         else self.generators[idx].inv())
        return out

    def surface_hash(self):
        text = dump_surface(self.surface)
        return hashlib.sha256(text.encode("ascii")).hexdigest()


def _glue(t):
    return Isometry.translation(t) * Isometry.half_turn()


def build_holonomy(surface):
    """Holonomy representation of a surface record.

    Raises NumericalInstability if any relator residual, pants-curve trace
    or cusp trace misses its target by more than the relator tolerance.
    """
    graph = surface.graph
    g, n = pantsgraph.validate(graph)
    m = len(graph.edges)
    if len(surface.lengths) != m or len(surface.twists) != m:
        raise OutOfRange("surface parameter arity differs from graph")
    slot_lists = [pantsgraph.pants_slots(graph, v) for v in range(graph.nodes)]

    def slot_length(v, s):
        kind, k = slot_lists[v][s]
        return surface.lengths[k] if kind == "edge" else 0.0

    pants = [_standard_pants(tuple(slot_length(v, s) for s in range(3)))
             for v in range(graph.nodes)]

    # Sides of each edge: (node, slot) pairs in deterministic order.
    sides = []
    for k, (u, v) in enumerate(graph.edges):
        at_u = [s for s in range(3) if slot_lists[u][s] == ("edge", k)]
        if u == v:
            sides.append(((u, at_u[0]), (u, at_u[1])))
        else:
            at_v = [s for s in range(3) if slot_lists[v][s] == ("edge", k)]
            sides.append(((u, at_u[0]), (v, at_v[0])))

    # Spanning tree by breadth-first search from node 0.
    frames = {0: Isometry.identity()}
    tree = set()
    queue = [0]
    while queue:
        v = queue.pop(0)
        for k, (a, b) in enumerate(graph.edges):
            if v not in (a, b) or a == b:
                continue
            other = b if v == a else a
            if other in frames:
                continue
            (ua, sa), (ub, sb) = sides[k]
            if ua != v:
                (ua, sa), (ub, sb) = (ub, sb), (ua, sa)
                sides[k] = ((ua, sa), (ub, sb))
            t = surface.lengths[k] * (0.5 + surface.twists[k])
            frames[other] = (frames[v] * pants[ua][sa].frame * _glue(t)
                             * pants[ub][sb].frame.inv())
            tree.add(k)
            queue.append(other)
    if len(frames) != graph.nodes:
        raise OutOfRange("graph is disconnected")

    generators = []
    names = []
    boundary_idx = {}
    for v in range(graph.nodes):
        fv = frames[v]
        for s in range(3):
            slot = pants[v][s]
            elem = fv * slot.translation * fv.inv()
            boundary_idx[(v, s)] = len(generators)
            generators.append(elem)
            names.append(f"b{v}.{s}")
    letter_idx = {}
    for k in range(m):
        if k in tree:
            continue
        (ua, sa), (ub, sb) = sides[k]
        t = surface.lengths[k] * (0.5 + surface.twists[k])
        lam = (frames[ua] * pants[ua][sa].frame * _glue(t)
               * pants[ub][sb].frame.inv() * frames[ub].inv())
        letter_idx[k] = len(generators)
        generators.append(lam)
        names.append(f"t{k}")

    relators = []
    for v in range(graph.nodes):
        relators.append(((boundary_idx[(v, 2)], 1), (boundary_idx[(v, 1)], 1),
                         (boundary_idx[(v, 0)], 1)))
    for k in range(m):
        (ua, sa), (ub, sb) = sides[k]
        ca = boundary_idx[(ua, sa)]
        cb = boundary_idx[(ub, sb)]
        if k in tree:
            relators.append(((ca, 1), (cb, 1)))
        else:
            lam = letter_idx[k]
            relators.append(((ca, 1), (lam, 1), (cb, 1), (lam, -1)))

    cusp_indices = tuple(boundary_idx[(v, s)]
                         for v in range(graph.nodes) for s in range(3)
                         if slot_lists[v][s][0] == "free")

    rep = HolonomyRep(
        surface=surface, signature=(g, n), generators=tuple(generators),
        names=tuple(names), relator_words=tuple(relators),
        relator_residuals=(), cusp_indices=cusp_indices,
        edge_elements=(), edge_data=(), enumeration_indices=(), residual=0.0)

    residuals = []
    for word in relators:
        prod = rep.evaluate_word(word)
        residuals.append(plane.check_residual(prod, RELATOR_TOL, "relator"))
    for idx in cusp_indices:
        gap = abs(abs(generators[idx].trace) - 2.0)
        if gap > PARABOLIC_TOL:
            raise NumericalInstability(
                f"cusp word {names[idx]} trace {generators[idx].trace!r}",
                residual=gap)
    edge_elements = []
    edge_data = []
    for k in range(m):
        (ua, sa), _ = sides[k]
        elem = generators[boundary_idx[(ua, sa)]]
        le = surface.lengths[k]
        gap = abs(elem.translation_length() - le)
        if gap > 1e-9 * max(1.0, le):
            raise NumericalInstability(
                f"edge {k}: translation length {elem.translation_length()!r}, "
                f"expected {le!r}", residual=gap)
        edge_elements.append(elem)
        mid_frame = (frames[ua] * pants[ua][sa].frame
                     * Isometry.translation(0.5 * le))
        edge_data.append((mid_frame, le))

    enum_indices = [boundary_idx[(v, s)] for v in range(graph.nodes)
                    for s in range(2)]
    enum_indices += list(letter_idx.values())

    return HolonomyRep(
        surface=surface, signature=(g, n), generators=tuple(generators),
        names=tuple(names), relator_words=tuple(relators),
        relator_residuals=tuple(residuals), cusp_indices=cusp_indices,
        edge_elements=tuple(edge_elements), edge_data=tuple(edge_data),
        enumeration_indices=tuple(enum_indices),
        residual=max(residuals) if residuals else 0.0)


def element_length(iso, tol=PARABOLIC_TOL):
    """('hyperbolic', length), ('parabolic', None) or ('elliptic', None)."""
    kind = iso.classify(tol)
    if kind == "hyperbolic":
        return kind, 2.0 * math.acosh(0.5 * abs(iso.trace))
    return kind, None


# ---------------------------------------------------------------------------
# length spectrum


@dataclass(frozen=True)
class GeodesicClass:
    length: float
    primitive: bool
    primitive_length: float
    axis: tuple


@dataclass(frozen=True)
class LengthSpectrum:
    cutoff: float
    classes: tuple
    surface_hash: str
    residual: float

    @property
    def entries(self):
        """Sorted (length, multiplicity, primitive) rows."""
        rows = {}
        for cls in self.classes:
            key = None
            for (length, primitive) in rows:
                if primitive == cls.primitive and \
                        abs(length - cls.length) <= LENGTH_CLUSTER_TOL:
                    key = (length, primitive)
                    break
            if key is None:
                key = (cls.length, cls.primitive)
                rows[key] = 0
            rows[key] += 1
        return tuple(sorted((length, mult, primitive)
                            for (length, primitive), mult in rows.items()))

    def lengths(self):
        return tuple(cls.length for cls in self.classes)

    def count_not_short_iterates(self, L,
                                 short=2.0 * math.asinh(1.0)):
        """Closed geodesics of length <= L that are not iterates of
        geodesics of length <= 2 arcsinh(1)."""
        total = 0
        for cls in self.classes:
            if cls.length > L:
                continue
            if not cls.primitive and cls.primitive_length <= short:
                continue
            total += 1
        return total

    def serialize(self):
        lines = ["spectrum v1",
                 f"surface {self.surface_hash}",
                 f"cutoff {self.cutoff!r}",
                 f"residual {self.residual!r}",
                 f"entries {len(self.entries)}"]
        for (length, mult, primitive) in self.entries:
            flag = "primitive" if primitive else "iterate"
            lines.append(f"entry {length!r} {mult} {flag}")
        return "\n".join(lines) + "\n"


def _sign_canonical(mat):
    s = sum(v * w for v, w in zip(mat, _SIGN_VEC))
    if s < 0.0:
        return tuple(-v for v in mat)
    return mat


def _dist_i_to_axis(axis):
    p, q = axis
    if p == INF or q == INF:
        x0 = q if p == INF else p
        return math.asinh(abs(x0))
    center = 0.5 * (p + q)
    radius = 0.5 * abs(q - p)
    return math.asinh(abs(center * center + 1.0 - radius * radius)
                      / (2.0 * radius))


def _axes_of(mats):
    """Vectorized (repelling, attracting) fixed points; rows that need the
    c = 0 branch come back as NaN and are fixed up by the caller."""
    a, b = mats[:, 0, 0], mats[:, 0, 1]
    c, d = mats[:, 1, 0], mats[:, 1, 1]
    tr = a + d
    disc = np.maximum(tr * tr - 4.0, 0.0)
    root = np.sqrt(disc)
    lam_big = 0.5 * (tr + np.copysign(root, tr))
    with np.errstate(divide="ignore", invalid="ignore"):
        lam_small = 1.0 / lam_big
        p = (lam_small - d) / c
        q = (lam_big - d) / c
    bad = np.abs(c) <= 1e-13 * (np.abs(a) + np.abs(d))
    p[bad] = np.nan
    q[bad] = np.nan
    return p, q


class _QuantizedSet:
    """Quantized coordinate-tuple set with boundary probing.

    Distinct group elements (and distinct geodesic lifts) stay macroscopically
    separated relative to the cell size, so occupancy of a cell, or of a
    straddled neighbor when a coordinate sits within ``margin`` cells of a
    boundary, identifies an object up to floating noise.
    """

    def __init__(self, quant=_QUANT, margin=1e-3):
        self.quant = quant
        self.margin = margin
        self.cells = set()

    def _cell_options(self, coords):
        options = []
        for x in coords:
            scaled = x / self.quant
            lo = math.floor(scaled + 0.5 - self.margin)
            hi = math.floor(scaled + 0.5 + self.margin)
            options.append((lo,) if lo == hi else (lo, hi))
        return options

    def add(self, coords):
        """True if the tuple is new; inserts its primary cell."""
        opts = self._cell_options(coords)
        probes = [()]
        for o in opts:
            probes = [p + (v,) for p in probes for v in o]
        for key in probes:
            if key in self.cells:
                return False
        self.cells.add(probes[0])
        return True


def _enumeration_gen_array(rep):
    gens = []
    seen = _QuantizedSet()
    for idx in rep.enumeration_indices:
        for iso in (rep.generators[idx], rep.generators[idx].inv()):
            if seen.add(_sign_canonical(iso.to_tuple())):
                gens.append(iso.to_tuple())
    return np.array([[[g[0], g[1]], [g[2], g[3]]] for g in gens])


def _sign_canonize_batch(batch):
    s = batch.reshape(-1, 4) @ np.array(_SIGN_VEC)
    return batch * np.where(s < 0.0, -1.0, 1.0)[:, None, None]


class _BatchElementSet:
    """Vectorized set of matrices, deduplicated on quantized cells.

    Distinct group elements stay tens of cells apart (their matrix-norm
    separation is at least the minimal displacement over the operator norm),
    so a cell collision always means the same element.  A straddled cell
    boundary can at worst let a duplicate through, which the conjugacy
    grouping absorbs.
    """

    def __init__(self, quant=_QUANT):
        self.quant = quant
        self.void = np.empty(0, dtype="V32")

    def _keys(self, flat):
        # clip: only matters for gigantic unpruned products far above any
        # cutoff, where spurious key collisions are harmless
        scaled = np.clip(np.round(flat / self.quant), -9e17, 9e17)
        return np.ascontiguousarray(
            scaled.astype(np.int64)).view("V32").ravel()

    def filter_fresh(self, flat):
        """Indices of first-occurrence rows not seen before; marks them."""
        keys = self._keys(flat)
        _, first = np.unique(keys, return_index=True)
        first = np.sort(first)
        keys = keys[first]
        new_mask = ~np.isin(keys, self.void)
        self.void = np.concatenate([self.void, keys[new_mask]])
        return [int(i) for i in first[new_mask]]


def _enumerate_ball(rep, radii, max_elements):
    """All group elements within the displacement radii of the arc midpoints
    (radii is a list of (frame, radius)); returns an (N, 2, 2) array."""
    gen_arr = _enumeration_gen_array(rep)
    conj = []
    for frame, radius in radii:
        q = np.array([[frame.a, frame.b], [frame.c, frame.d]])
        qi = np.array([[frame.d, -frame.b], [-frame.c, frame.a]])
        conj.append((qi, q, math.cosh(radius)))

    def in_ball(batch):
        keep = np.zeros(len(batch), dtype=bool)
        for qi, q, limit in conj:
            m = np.einsum("ij,njk,kl->nil", qi, batch, q)
            keep |= 0.5 * (m.reshape(-1, 4) ** 2).sum(axis=1) <= limit
        return keep

    identity = np.eye(2)[None, :, :]
    seen = _BatchElementSet()
    seen.filter_fresh(identity.reshape(-1, 4))
    elements = [identity]
    frontier = identity
    count = 1
    while len(frontier):
        cand = np.einsum("fij,gjk->fgik", frontier, gen_arr).reshape(-1, 2, 2)
        cand = _sign_canonize_batch(cand)
        cand = cand[in_ball(cand)]
        if not len(cand):
            break
        fresh = seen.filter_fresh(cand.reshape(-1, 4))
        if not fresh:
            break
        frontier = cand[fresh]
        elements.append(frontier)
        count += len(frontier)
        if count > max_elements:
            raise ResourceLimit(
                f"element budget exceeded: {count} > {max_elements}")
    return np.concatenate(elements, axis=0), seen


def enumerate_spectrum(rep, cutoff, *, slack=2.0, max_elements=4_000_000,
                       spine_margin=0.5, arc_indices=None, threads=None):
    """Closed-geodesic length spectrum up to the cutoff.

    Deterministic: output is independent of scheduling (``threads`` caps a
    worker count but the merge order is canonical).  Completeness rests on
    the displacement-ball pruning radii cutoff + curve length + slack, and is
    validated against brute-force word enumeration in the test suite.

    ``arc_indices`` restricts the search to geodesics crossing the given
    pants curves (by edge index); useful for targeted checks like locating a
    known transversal, which always crosses its own curve.
    """
    if cutoff <= 0.0:
        raise OutOfRange(f"cutoff must be > 0, got {cutoff!r}")
    if cutoff > MAX_CUTOFF:
        raise ResourceLimit(
            f"cutoff {cutoff!r} above configured maximum {MAX_CUTOFF}")
    if threads is not None and threads < 1:
        raise OutOfRange(f"threads must be >= 1, got {threads!r}")

    edge_data = rep.edge_data
    if arc_indices is not None:
        edge_data = [rep.edge_data[k] for k in arc_indices]
    radii = [(frame, cutoff + le + slack) for frame, le in edge_data]
    arcs = [(frame, le) for frame, le in edge_data]
    if not radii:
        # A single pair of pants with three cusps: its compact core sits by
        # construction within a couple of units of the base point.
        base = Isometry.identity()
        radii = [(base, cutoff + 3.0 + slack)]
        arcs = [(base, 3.0)]
    elements, seen = _enumerate_ball(rep, radii, max_elements)

    a, d = elements[:, 0, 0], elements[:, 1, 1]
    tr = np.abs(a + d)
    hyperbolic = tr > 2.0 + 1e-12
    lengths = np.zeros(len(elements))
    lengths[hyperbolic] = 2.0 * np.arccosh(0.5 * tr[hyperbolic])
    candidate = hyperbolic & (lengths <= cutoff + 1e-9)

    idx = np.nonzero(candidate)[0]
    p, q = _axes_of(elements[idx])
    # Keep candidates whose axis passes near some pants-curve arc; remember
    # how far from the base point that crossing can be (it bounds the
    # displacement of any conjugator later).
    base = complex(0.0, 1.0)
    reach = np.full(len(idx), np.inf)
    for frame, le in arcs:
        mid = frame(base)
        center = 0.5 * (p + q)
        radius = 0.5 * np.abs(q - p)
        with np.errstate(invalid="ignore"):
            sinh_d = (np.abs((mid.real - center) ** 2 + mid.imag ** 2
                             - radius ** 2) / (2.0 * radius * mid.imag))
        arc_reach = plane.dist(base, mid) + 0.5 * le + spine_margin
        hit = np.nan_to_num(sinh_d, nan=np.inf) \
            <= math.sinh(0.5 * le + spine_margin)
        reach[hit] = np.minimum(reach[hit], arc_reach)
    nan_rows = np.isnan(p)
    keep_rows = [int(i) for i in range(len(idx))
                 if reach[i] < np.inf or nan_rows[i]]

    raw = []
    inverse_keys = _BatchElementSet()
    for row in keep_rows:
        i = idx[row]
        mat = elements[i]
        iso = Isometry(mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1],
                       normalize=False)
        inv = _sign_canonical(iso.inv().to_tuple())
        if not inverse_keys.filter_fresh(np.array([inv])):
            continue  # the inverse is already listed; same unoriented geodesic
        inverse_keys.filter_fresh(mat.reshape(1, 4))
        axis = iso.fixed_points()
        r = float(reach[row])
        if nan_rows[row]:
            r = np.inf
            for frame, le in arcs:
                mid = frame(base)
                if plane.dist_point_to_geodesic(mid, axis) \
                        <= 0.5 * le + spine_margin:
                    r = min(r, plane.dist(base, mid) + 0.5 * le + spine_margin)
            if r == np.inf:
                continue
        raw.append((float(lengths[i]), axis, mat, r))

    max_reach = max(plane.dist(base, frame(base)) + 0.5 * le + spine_margin
                    for frame, le in arcs)
    pool = _ConjugatorPool(elements, max_reach)
    classes = _cluster_classes(raw, pool)
    classes = _tag_and_complete(classes, cutoff, pool)
    return LengthSpectrum(
        cutoff=float(cutoff), classes=tuple(classes),
        surface_hash=rep.surface_hash(), residual=rep.residual)


_CONJUGACY_RTOL = 1e-6


class _ConjugatorPool:
    """Enumerated elements sorted by displacement at the base point, so that
    conjugacy tests only scan the prefix that can contain a conjugator.

    A conjugator between two lifts that pass near the pants-curve arcs moves
    the base point by at most 2 * reach + length / 2, where reach bounds the
    distance from the base point to the near-arc points.
    """

    def __init__(self, elements, reach):
        disp = 0.5 * (elements.reshape(-1, 4) ** 2).sum(axis=1)
        order = np.argsort(disp, kind="stable")
        self.elements = elements[order]
        self.cosh_disp = disp[order]
        self.norms = np.abs(self.elements).max(axis=(1, 2))
        self.reach = reach

    def pair_bound(self, length, reach1=None, reach2=None):
        r1 = self.reach if reach1 is None else min(reach1, self.reach)
        r2 = self.reach if reach2 is None else min(reach2, self.reach)
        return r1 + r2 + 0.5 * length + 1.0

    def are_conjugate(self, g, h, bound):
        """Whether w g w^{-1} = +-h or +-h^{-1} for some pooled w whose
        displacement at the base point is at most ``bound``."""
        n = int(np.searchsorted(self.cosh_disp, math.cosh(min(bound, 50.0)),
                                side="right"))
        if n == 0:
            return False
        w = self.elements[:n]
        limit = _CONJUGACY_RTOL * max(
            1.0, float(np.abs(g).max()), float(np.abs(h).max()))
        wg = np.einsum("nij,jk->nik", w, g)
        for target in (h, np.array([[h[1, 1], -h[0, 1]],
                                    [-h[1, 0], h[0, 0]]])):
            hw = np.einsum("ij,njk->nik", target, w)
            gap = np.minimum(np.abs(wg - hw).max(axis=(1, 2)),
                             np.abs(wg + hw).max(axis=(1, 2)))
            if bool((gap <= limit).any()):
                return True
        return False


def _cluster_classes(raw, pool):
    """Merge (length, axis, matrix, reach) rows that describe one geodesic."""
    raw = sorted(raw, key=lambda t: (t[0], tuple(t[2].ravel())))
    groups = []
    for item in raw:
        if groups and item[0] - groups[-1][-1][0] <= GROUPING_TOL:
            groups[-1].append(item)
        else:
            groups.append([item])
    out = []
    for group in groups:
        reps = []
        for length, axis, mat, reach in group:
            norm = float(np.abs(mat).max())
            for rep in reps:
                bound = pool.pair_bound(length, reach, rep[3])
                if pool.are_conjugate(mat, rep[2], bound):
                    if norm < rep[4]:  # smaller entries carry less noise
                        rep[0], rep[1], rep[2], rep[4] = length, axis, mat, norm
                    rep[3] = min(rep[3], reach)
                    break
            else:
                reps.append([length, axis, mat, reach, norm])
        out.extend([r[:4] for r in reps])
    return out


def _tag_and_complete(rows, cutoff, pool):
    """Assign primitive flags, then synthesize any iterate of a listed
    primitive that the ball search may have skipped."""
    rows = sorted(rows, key=lambda t: (t[0], tuple(t[2].ravel())))
    classes = []
    mats = []
    reaches = []
    for length, axis, mat, reach in rows:
        primitive = True
        primitive_length = length
        for j, earlier in enumerate(classes):
            if earlier.length >= length - LENGTH_CLUSTER_TOL:
                break
            k = round(length / earlier.length)
            if k >= 2 and abs(length - k * earlier.length) \
                    <= ITERATE_RTOL * k * max(1.0, earlier.length) \
                    and pool.are_conjugate(
                        mat, np.linalg.matrix_power(mats[j], k),
                        pool.pair_bound(length, reach, reaches[j])):
                primitive = False
                primitive_length = earlier.primitive_length
                break
        classes.append(GeodesicClass(length, primitive, primitive_length, axis))
        mats.append(mat)
        reaches.append(reach)
    for j, cls in enumerate(list(classes)):
        if not cls.primitive:
            continue
        k = 2
        while k * cls.length <= cutoff + 1e-9:
            target = k * cls.length
            found = any(
                abs(other.length - target) <= LENGTH_CLUSTER_TOL
                and pool.are_conjugate(
                    np.linalg.matrix_power(mats[j], k), mats[jj],
                    pool.pair_bound(target, reaches[j], reaches[jj]))
                for jj, other in enumerate(classes))
            if not found:
                classes.append(GeodesicClass(target, False, cls.length,
                                             cls.axis))
                mats.append(np.linalg.matrix_power(mats[j], k))
                reaches.append(reaches[j])
            k += 1
    order = sorted(range(len(classes)),
                   key=lambda i: (classes[i].length, not classes[i].primitive))
    return [classes[i] for i in order]


def systole(rep, *, max_elements=4_000_000):
    """Shortest closed geodesic, by enumeration with a growing cutoff."""
    if rep.edge_data:
        cutoff = min(le for _, le in rep.edge_data) + 1e-9
    else:
        cutoff = 2.0 * math.asinh(1.0)
    while True:
        spec = enumerate_spectrum(rep, cutoff, max_elements=max_elements)
        if spec.classes:
            return spec.classes[0].length
        cutoff *= 1.5
        if cutoff > MAX_CUTOFF:
            raise ResourceLimit("no geodesic found below the cutoff guard")


def brute_force_spectrum(rep, cutoff, max_word_length, max_elements=2_000_000,
                         axis_reach=4.0):
    """Reference spectrum: every product of the enumeration generators up to
    a word length, with no geometric pruning of the search.  Candidates are
    the lifts passing within ``axis_reach`` of the base point (every class of
    the small validation surfaces has such a lift, and far lifts of huge
    words only add noise).  Exponential; for validation at small cutoffs."""
    gen_arr = _enumeration_gen_array(rep)
    identity = np.eye(2)[None, :, :]
    seen = _BatchElementSet()
    seen.filter_fresh(identity.reshape(-1, 4))
    layers = [identity]
    frontier = identity
    for _ in range(max_word_length):
        cand = np.einsum("fij,gjk->fgik", frontier, gen_arr).reshape(-1, 2, 2)
        cand = _sign_canonize_batch(cand)
        fresh = seen.filter_fresh(cand.reshape(-1, 4))
        frontier = cand[fresh]
        layers.append(frontier)
        if sum(len(x) for x in layers) > max_elements:
            raise ResourceLimit("brute-force element budget exceeded")
        if not len(frontier):
            break
    elements = np.concatenate(layers, axis=0)

    a, d = elements[:, 0, 0], elements[:, 1, 1]
    tr = np.abs(a + d)
    hyperbolic = tr > 2.0 + 1e-12
    lengths = np.zeros(len(elements))
    lengths[hyperbolic] = 2.0 * np.arccosh(0.5 * tr[hyperbolic])
    keep = hyperbolic & (lengths <= cutoff + 1e-9)

    raw = []
    inverse_keys = _BatchElementSet()
    for i in np.nonzero(keep)[0]:
        mat = elements[i]
        iso = Isometry(mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1],
                       normalize=False)
        inv = _sign_canonical(iso.inv().to_tuple())
        if not inverse_keys.filter_fresh(np.array([inv])):
            continue
        inverse_keys.filter_fresh(mat.reshape(1, 4))
        axis = iso.fixed_points()
        dia = _dist_i_to_axis(axis)
        if dia > axis_reach:
            continue
        raw.append((float(lengths[i]), axis, mat, dia + 0.5))
    pool = _ConjugatorPool(elements, reach=MAX_CUTOFF)
    classes = _cluster_classes(raw, pool)
    classes = _tag_and_complete(classes, cutoff, pool)
    return LengthSpectrum(cutoff=float(cutoff), classes=tuple(classes),
                          surface_hash=rep.surface_hash(),
                          residual=rep.residual)
