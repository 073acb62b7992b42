"""Pseudo-3-regular multigraphs encoding pants decompositions.

A graph has ``nodes`` pants, a multiset of internal edges (loops allowed) and
a count of free edges per node; every node carries exactly three half-edges.
Free edges are unlabeled and interchangeable at a node, so isomorphism is
multigraph isomorphism preserving per-node free-edge counts.
"""

import itertools
from dataclasses import dataclass

from .errors import InvalidEdge, InvalidGraph, ParseError, UnsupportedSignature


@dataclass(frozen=True)
class PantsGraph:
    nodes: int
    edges: tuple
    free: tuple

    def __post_init__(self):
        edges = tuple(sorted((min(u, v), max(u, v)) for (u, v) in self.edges))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "free", tuple(self.free))

    def degree(self, v):
        deg = self.free[v]
        for (a, b) in self.edges:
            if a == v:
                deg += 1
            if b == v:
                deg += 1
        return deg

    def loops_at(self, v):
        return sum(1 for (a, b) in self.edges if a == v and b == v)

    def relabel(self, perm):
        """New graph with node v renamed perm[v]."""
        inv = [0] * self.nodes
        for old, new in enumerate(perm):
            inv[new] = old
        edges = [(perm[a], perm[b]) for (a, b) in self.edges]
        free = [self.free[inv[v]] for v in range(self.nodes)]
        return PantsGraph(self.nodes, tuple(edges), tuple(free))


@dataclass(frozen=True)
class CanonicalForm:
    code: bytes


def validate(graph):
    """Check all invariants; return the (genus, cusps) signature."""
    if graph.nodes <= 0:
        raise InvalidGraph("graph has no nodes")
    if len(graph.free) != graph.nodes:
        raise InvalidGraph("free-edge list length differs from node count")
    for (a, b) in graph.edges:
        if not (0 <= a < graph.nodes and 0 <= b < graph.nodes):
            raise InvalidGraph(f"edge ({a},{b}) references a missing node")
    for v in range(graph.nodes):
        if graph.free[v] < 0:
            raise InvalidGraph(f"negative free-edge count at node {v}")
        deg = graph.degree(v)
        if deg != 3:
            raise InvalidGraph(f"node {v} has {deg} half-edges, expected 3")
    if not _is_connected(graph):
        raise InvalidGraph("graph is disconnected")
    n = sum(graph.free)
    if (graph.nodes - n + 2) % 2 != 0:
        raise InvalidGraph("node/cusp counts admit no integer genus")
    g = (graph.nodes - n + 2) // 2
    if g < 0:
        raise InvalidGraph("node/cusp counts give negative genus")
    if len(graph.edges) != 3 * g - 3 + n:
        raise InvalidGraph(
            f"{len(graph.edges)} internal edges, expected {3 * g - 3 + n}")
    return (g, n)


def _is_connected(graph):
    if graph.nodes == 1:
        return True
    adj = [[] for _ in range(graph.nodes)]
    for (a, b) in graph.edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == graph.nodes


def pants_slots(graph, v):
    """The three boundary slots of pants v, in serialization order.

    Each slot is ("edge", k) for an incidence with edge k (a loop occupies
    two slots) or ("free", j).  Lengths/twists of a surface are indexed by k.
    """
    slots = []
    for k, (a, b) in enumerate(graph.edges):
        if a == v and b == v:
            slots.append(("edge", k))
            slots.append(("edge", k))
        elif a == v or b == v:
            slots.append(("edge", k))
    for j in range(graph.free[v]):
        slots.append(("free", j))
    return slots


# ---------------------------------------------------------------------------
# canonical form


def _incidence(graph):
    """Per-node multiset of neighbors; loops recorded under the node itself."""
    inc = [dict() for _ in range(graph.nodes)]
    for (a, b) in graph.edges:
        inc[a][b] = inc[a].get(b, 0) + 1
        if a != b:
            inc[b][a] = inc[b].get(a, 0) + 1
    return inc


def _refine(graph, colors, inc):
    """Iterate neighborhood refinement to a stable coloring."""
    n = graph.nodes
    while True:
        sigs = []
        for v in range(n):
            neigh = tuple(sorted((colors[u], m) for u, m in inc[v].items()))
            sigs.append((colors[v], neigh))
        ranked = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = tuple(ranked[s] for s in sigs)
        if new == colors:
            return colors
        colors = new


def _search_labelings(graph, colors, inc, out):
    cells = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    target = None
    for c in sorted(cells):
        if len(cells[c]) > 1:
            target = cells[c]
            break
    if target is None:
        order = sorted(range(graph.nodes), key=lambda v: colors[v])
        perm = [0] * graph.nodes
        for new, old in enumerate(order):
            perm[old] = new
        out.append(tuple(perm))
        return
    fresh = max(colors) + 1
    for v in target:
        branched = tuple(fresh if u == v else colors[u]
                         for u in range(graph.nodes))
        _search_labelings(graph, _refine(graph, branched, inc), inc, out)


def _encode(graph, perm):
    inv = [0] * graph.nodes
    for old, new in enumerate(perm):
        inv[new] = old
    free = ",".join(str(graph.free[inv[v]]) for v in range(graph.nodes))
    edges = sorted((min(perm[a], perm[b]), max(perm[a], perm[b]))
                   for (a, b) in graph.edges)
    body = f"{graph.nodes}|{free}|" + ";".join(f"{a}-{b}" for a, b in edges)
    return body.encode("ascii")


def canonical_form(graph):
    """Isomorphism-invariant code: two graphs (with free edges counted per
    node) get equal codes exactly when they are isomorphic."""
    inc = _incidence(graph)
    colors = tuple(
        (graph.free[v], graph.loops_at(v)) for v in range(graph.nodes))
    ranked = {c: i for i, c in enumerate(sorted(set(colors)))}
    colors = _refine(graph, tuple(ranked[c] for c in colors), inc)
    labelings = []
    _search_labelings(graph, colors, inc, labelings)
    return CanonicalForm(min(_encode(graph, p) for p in labelings))


def are_isomorphic(g1, g2):
    return canonical_form(g1) == canonical_form(g2)


# ---------------------------------------------------------------------------
# attachment moves


def _remove_one_edge(edges, edge):
    edge = (min(edge), max(edge))
    edges = list(edges)
    try:
        edges.remove(edge)
    except ValueError:
        raise InvalidEdge(f"edge {edge} not in graph") from None
    return edges


def attach_one_cusp(graph, edge):
    """Subdivide an internal edge with a new node carrying one free edge."""
    u, v = edge
    edges = _remove_one_edge(graph.edges, edge)
    w = graph.nodes
    edges += [(u, w), (w, v)]
    return PantsGraph(graph.nodes + 1, tuple(edges), graph.free + (1,))


def attach_two_cusps(graph, edge):
    """Subdivide an internal edge and hang a node carrying two free edges."""
    u, v = edge
    edges = _remove_one_edge(graph.edges, edge)
    w1, w2 = graph.nodes, graph.nodes + 1
    edges += [(u, w1), (w1, v), (w1, w2)]
    return PantsGraph(graph.nodes + 2, tuple(edges), graph.free + (0, 2))


def _delete_nodes(graph, doomed, new_edges):
    keep = [v for v in range(graph.nodes) if v not in doomed]
    rename = {old: new for new, old in enumerate(keep)}
    edges = tuple((rename[a], rename[b]) for (a, b) in new_edges)
    free = tuple(graph.free[v] for v in keep)
    return PantsGraph(len(keep), edges, free)


def detach_one_cusp(graph, node):
    """Reverse of attach_one_cusp: splice out a node with one free edge."""
    if graph.free[node] != 1:
        raise InvalidEdge(f"node {node} does not carry exactly one free edge")
    if graph.loops_at(node):
        raise InvalidEdge(f"node {node} carries a loop; nothing to splice")
    ends = []
    edges = []
    for (a, b) in graph.edges:
        if a == node:
            ends.append(b)
        elif b == node:
            ends.append(a)
        else:
            edges.append((a, b))
    edges.append((ends[0], ends[1]))
    return _delete_nodes(graph, {node}, edges)


def detach_two_cusps(graph, node):
    """Reverse of attach_two_cusps: remove a two-free-edge node and its
    subdivision neighbor, splicing the neighbor's remaining incidences."""
    if graph.free[node] != 2:
        raise InvalidEdge(f"node {node} does not carry exactly two free edges")
    neighbor = None
    for (a, b) in graph.edges:
        if a == node:
            neighbor = b
        elif b == node:
            neighbor = a
    if neighbor is None or neighbor == node:
        raise InvalidEdge(f"node {node} has no distinct neighbor")
    if graph.free[neighbor] != 0:
        raise InvalidEdge(f"neighbor {neighbor} carries free edges")
    ends = []
    edges = []
    for (a, b) in graph.edges:
        if node in (a, b):
            continue
        if a == neighbor and b == neighbor:
            raise InvalidEdge(f"neighbor {neighbor} carries a loop")
        if a == neighbor:
            ends.append(b)
        elif b == neighbor:
            ends.append(a)
        else:
            edges.append((a, b))
    edges.append((ends[0], ends[1]))
    return _delete_nodes(graph, {node, neighbor}, edges)


# ---------------------------------------------------------------------------
# enumeration


def count_bound(g, n):
    """Upper bound on the number of graph classes for signature (g, n):
    n g^{3g} (3g-3+3n)^n for n > 0, g^{3g} for n = 0, with 0^0 = 1."""
    if g < 0 or n < 0 or 2 * g - 2 + n < 1:
        raise UnsupportedSignature(f"no pants decomposition for {(g, n)}")
    g_pow = 1 if g == 0 else g ** (3 * g)
    if n == 0:
        return g_pow
    return n * g_pow * (3 * g - 3 + 3 * n) ** n


_BASE_PANTS = PantsGraph(1, (), (3,))
_BASE_SPHERE4 = PantsGraph(2, ((0, 1),), (2, 2))
_BASE_TORUS1 = PantsGraph(1, ((0, 0),), (1,))
_BASE_TORUS2 = PantsGraph(2, ((0, 0), (0, 1)), (0, 2))


def enumerate_graphs(g, n):
    """All isomorphism classes for signature (g, n), sorted by canonical code.

    3-regular graphs come from half-edge pairing; cusped graphs from closing
    the two attachment moves over the cusp-free classes.  Reversing the moves
    stalls on four small graphs (the pair of pants, the four-cusped sphere
    and two one-holed-torus graphs), so those seed the g <= 1 families.
    """
    if g < 0 or n < 0 or 2 * g - 2 + n < 1:
        raise UnsupportedSignature(f"no pants decomposition for {(g, n)}")
    if n == 0:
        classes = _cubic_classes(2 * g - 2)
    elif g >= 2:
        classes = _attachment_closure(_cubic_classes(2 * g - 2), n)
    elif g == 1:
        classes = _attachment_closure([_BASE_TORUS1], n - 1)
        if n >= 2:
            classes += _attachment_closure([_BASE_TORUS2], n - 2)
    elif n == 3:
        classes = [_BASE_PANTS]
    else:
        classes = _attachment_closure([_BASE_SPHERE4], n - 4)
    coded = {canonical_form(h).code: h for h in classes}
    return [coded[code] for code in sorted(coded)]


def _attachment_closure(seeds, extra_cusps):
    """Close a seed set under the one- and two-cusp attachment moves until
    ``extra_cusps`` additional cusps are attached."""
    levels = {0: {canonical_form(h).code: h for h in seeds}}
    for k in range(extra_cusps):
        for h in levels.get(k, {}).values():
            for edge in set(h.edges):
                one = attach_one_cusp(h, edge)
                levels.setdefault(k + 1, {})[canonical_form(one).code] = one
                if k + 2 <= extra_cusps:
                    two = attach_two_cusps(h, edge)
                    levels.setdefault(k + 2, {})[canonical_form(two).code] = two
    return list(levels.get(extra_cusps, {}).values())


def _cubic_classes(m):
    """Connected 3-regular multigraph classes on m nodes via half-edge
    pairing with untouched-node symmetry reduction."""
    if m <= 0 or m % 2 != 0:
        raise UnsupportedSignature(f"no 3-regular graph on {m} nodes")
    found = {}
    remaining = [3] * m

    def rec(edges, next_fresh):
        u = -1
        for v in range(next_fresh):
            if remaining[v] > 0:
                u = v
                break
        if u < 0:
            if next_fresh < m:
                return  # untouched nodes would form a separate component
            h = PantsGraph(m, tuple(edges), (0,) * m)
            if _is_connected(h):
                found[canonical_form(h).code] = h
            return
        remaining[u] -= 1
        # loop at u
        if remaining[u] >= 1:
            remaining[u] -= 1
            edges.append((u, u))
            rec(edges, next_fresh)
            edges.pop()
            remaining[u] += 1
        # partner with a touched node
        for v in range(next_fresh):
            if v != u and remaining[v] > 0:
                remaining[v] -= 1
                edges.append((u, v))
                rec(edges, next_fresh)
                edges.pop()
                remaining[v] += 1
        # partner with the first untouched node (all untouched interchangeable)
        if next_fresh < m:
            remaining[next_fresh] -= 1
            edges.append((u, next_fresh))
            rec(edges, next_fresh + 1)
            edges.pop()
            remaining[next_fresh] += 1
        remaining[u] += 1

    rec([], 1)
    return list(found.values())


def brute_force_classes(g, n):
    """Reference enumeration: raw pairing over labeled half-edges with free
    assignments, deduplicated only at the end.  Exponential; small (g, n)."""
    if g < 0 or n < 0 or 2 * g - 2 + n < 1:
        raise UnsupportedSignature(f"no pants decomposition for {(g, n)}")
    m = 2 * g - 2 + n
    half_edges = [(v, i) for v in range(m) for i in range(3)]
    found = {}

    def pairings(items):
        if not items:
            yield []
            return
        first = items[0]
        for j in range(1, len(items)):
            rest = items[1:j] + items[j + 1:]
            for tail in pairings(rest):
                yield [(first, items[j])] + tail

    for free_set in itertools.combinations(half_edges, n):
        internal = [h for h in half_edges if h not in free_set]
        free = [0] * m
        for (v, _) in free_set:
            free[v] += 1
        for pairing in pairings(internal):
            edges = tuple((a[0], b[0]) for (a, b) in pairing)
            h = PantsGraph(m, edges, tuple(free))
            if not _is_connected(h):
                continue
            found[canonical_form(h).code] = h
    return list(found.values())


# ---------------------------------------------------------------------------
# serialization


def to_text(graph):
    lines = ["pantsgraph v1", f"nodes {graph.nodes}"]
    lines += [f"edge {a} {b}" for (a, b) in graph.edges]
    lines += [f"free {v} {graph.free[v]}" for v in range(graph.nodes)]
    return "\n".join(lines) + "\n"


def from_text(text):
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if not lines or lines[0] != "pantsgraph v1":
        raise ParseError("missing 'pantsgraph v1' header")
    if len(lines) < 2 or not lines[1].startswith("nodes "):
        raise ParseError("missing 'nodes' line")
    try:
        nodes = int(lines[1].split()[1])
    except (IndexError, ValueError):
        raise ParseError(f"bad nodes line: {lines[1]!r}") from None
    edges = []
    free = [0] * max(nodes, 0)
    seen_free = set()
    for ln in lines[2:]:
        if not ln:
            continue
        parts = ln.split()
        if parts[0] == "edge" and len(parts) == 3:
            try:
                a, b = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError(f"bad edge line: {ln!r}") from None
            edges.append((a, b))
        elif parts[0] == "free" and len(parts) == 3:
            try:
                v, k = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError(f"bad free line: {ln!r}") from None
            if not 0 <= v < nodes:
                raise ParseError(f"free line for missing node: {ln!r}")
            if v in seen_free:
                raise ParseError(f"duplicate free line for node {v}")
            seen_free.add(v)
            free[v] = k
        else:
            raise ParseError(f"unknown line in pantsgraph block: {ln!r}")
    graph = PantsGraph(nodes, tuple(edges), tuple(free))
    validate(graph)
    return graph
