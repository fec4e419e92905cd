"""Tanner graphs of two-block codes and their layouts on a torus.

Vertices are labelled ``(type, Monomial)`` with type one of ``L``, ``R``
(data qubits of the left/right block) and ``X``, ``Z`` (checks). With
``H_X = [A|B]`` and ``H_Z = [B^T|A^T]`` the edges are

    X(a) - L(a + A_t)    X(a) - R(a + B_t)
    Z(b) - L(b - B_t)    Z(b) - R(b - A_t)

each tagged with its origin term ``(block, t)``.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import permutations

import networkx as nx
import numpy as np

from .code_builder import CssCode, Monomial, TbCode
from .gf2_core import BinaryMatrix

TYPES = ("L", "R", "X", "Z")
CHECKS = ("X", "Z")


class LayoutError(ValueError):
    """The requested layout does not exist or its preconditions fail."""


class UnsupportedWeight(ValueError):
    """No constructive bi-planar split is known for this term pattern."""


Vertex = tuple[str, Monomial]


@dataclass
class TannerGraph:
    l: int
    m: int
    vertices: list[Vertex]
    # (check vertex index, data vertex index, (block, 0-based term index))
    edges: list[tuple[int, int, tuple[str, int]]]
    pattern: tuple[int, int] = (0, 0)
    _index: dict[Vertex, int] = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        self._index = {v: i for i, v in enumerate(self.vertices)}
        if len(self._index) != len(self.vertices):
            raise ValueError("duplicate vertex labels")

    def index(self, v: Vertex) -> int:
        return self._index[v]

    def __contains__(self, v: Vertex) -> bool:
        return v in self._index

    def neighbours(self) -> list[list[int]]:
        nb = [[] for _ in self.vertices]
        for c, d, _ in self.edges:
            nb[c].append(d)
            nb[d].append(c)
        return nb

    def degrees(self) -> np.ndarray:
        deg = np.zeros(len(self.vertices), dtype=int)
        for c, d, _ in self.edges:
            deg[c] += 1
            deg[d] += 1
        return deg

    def edge_labels(self) -> set[tuple[Vertex, Vertex, tuple[str, int]]]:
        return {(self.vertices[c], self.vertices[d], o) for c, d, o in self.edges}

    def to_networkx(self, edges=None) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(len(self.vertices)))
        g.add_edges_from((c, d) for c, d, _ in (self.edges if edges is None else edges))
        return g

    def check_matrices(self) -> tuple[BinaryMatrix, BinaryMatrix, list[Vertex]]:
        """Induced (H_X, H_Z) with data columns ordered L then R by label."""
        key = lambda v: (v[0], v[1])
        data = sorted((v for v in self.vertices if v[0] in "LR"), key=key)
        xs = sorted((v for v in self.vertices if v[0] == "X"), key=key)
        zs = sorted((v for v in self.vertices if v[0] == "Z"), key=key)
        col = {v: i for i, v in enumerate(data)}
        hx = np.zeros((len(xs), len(data)), dtype=np.uint8)
        hz = np.zeros((len(zs), len(data)), dtype=np.uint8)
        row = {v: i for i, v in enumerate(xs)} | {v: i for i, v in enumerate(zs)}
        for c, d, _ in self.edges:
            cv, dv = self.vertices[c], self.vertices[d]
            (hx if cv[0] == "X" else hz)[row[cv], col[dv]] ^= 1
        return BinaryMatrix.from_dense(hx), BinaryMatrix.from_dense(hz), data

    def subcode(self) -> CssCode:
        hx, hz, _ = self.check_matrices()
        return CssCode(hx, hz)


def _labels(l: int, m: int) -> list[Monomial]:
    return [Monomial(a, b) for a in range(l) for b in range(m)]


def build_tanner(code: TbCode) -> TannerGraph:
    spec = code.spec
    l, m = spec.l, spec.m
    labels = _labels(l, m)
    vertices = [(t, a) for t in TYPES for a in labels]
    lm = l * m
    idx = lambda t, a: TYPES.index(t) * lm + a.ex * m + a.ey
    edges = []
    for a in labels:
        for t, mono in enumerate(spec.a_terms):
            edges.append((idx("X", a), idx("L", a.mul(mono, l, m)), ("A", t)))
        for t, mono in enumerate(spec.b_terms):
            edges.append((idx("X", a), idx("R", a.mul(mono, l, m)), ("B", t)))
        for t, mono in enumerate(spec.b_terms):
            edges.append((idx("Z", a), idx("L", a.mul(mono.inverse(l, m), l, m)), ("B", t)))
        for t, mono in enumerate(spec.a_terms):
            edges.append((idx("Z", a), idx("R", a.mul(mono.inverse(l, m), l, m)), ("A", t)))
    return TannerGraph(l, m, vertices, edges, spec.pattern)


def matrix_edges(code: CssCode) -> set[tuple[str, int, int]]:
    """Support of [h_x; h_z] as (check type, row, column) triples."""
    out = set()
    for kind, h in (("X", code.h_x), ("Z", code.h_z)):
        r, c = np.nonzero(h.to_dense())
        out |= {(kind, int(i), int(j)) for i, j in zip(r, c)}
    return out


def tanner_matrix_edges(g: TannerGraph) -> set[tuple[str, int, int]]:
    """Tanner edges in matrix coordinates (label index ex*m+ey, R shifted by lm)."""
    lm = g.l * g.m
    pos = lambda a: a.ex * g.m + a.ey
    out = set()
    for c, d, _ in g.edges:
        (ct, ca), (dt, da) = g.vertices[c], g.vertices[d]
        out.add((ct, pos(ca), pos(da) + (lm if dt == "R" else 0)))
    return out


# connectivity -------------------------------------------------------------------


def connected_components(g: TannerGraph) -> list[TannerGraph]:
    nb = g.neighbours()
    seen = [False] * len(g.vertices)
    comps = []
    for s in range(len(g.vertices)):
        if seen[s]:
            continue
        seen[s] = True
        queue, members = deque([s]), []
        while queue:
            v = queue.popleft()
            members.append(v)
            for w in nb[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        comps.append(sorted(members))
    out = []
    for members in comps:
        keep = set(members)
        remap = {old: new for new, old in enumerate(members)}
        edges = [(remap[c], remap[d], o) for c, d, o in g.edges if c in keep]
        out.append(TannerGraph(g.l, g.m, [g.vertices[i] for i in members], edges, g.pattern))
    return out


def _translate(g: TannerGraph, shift: Monomial) -> set:
    mv = lambda v: (v[0], v[1].mul(shift, g.l, g.m))
    return {(mv(c), mv(d), o) for c, d, o in g.edge_labels()}


def translation_between(g: TannerGraph, h: TannerGraph) -> Monomial | None:
    """A group element whose label translation maps g onto h, if any."""
    if (g.l, g.m) != (h.l, h.m):
        raise ValueError("components come from codes over different groups")
    if len(g.vertices) != len(h.vertices) or len(g.edges) != len(h.edges):
        return None
    target = h.edge_labels()
    anchor = g.vertices[0]
    for vt, lab in h.vertices:
        if vt != anchor[0]:
            continue
        shift = Monomial((lab.ex - anchor[1].ex) % g.l, (lab.ey - anchor[1].ey) % g.m)
        if _translate(g, shift) == target:
            return shift
    return None


def components_translation_isomorphic(comps: list[TannerGraph]) -> bool:
    if len({(c.l, c.m) for c in comps}) > 1:
        raise ValueError("components come from codes over different groups")
    return all(translation_between(comps[0], c) is not None for c in comps[1:])


# toric layouts ---------------------------------------------------------------------


def _subgroup_size(gens: list[Monomial], l: int, m: int) -> int:
    seen = {Monomial(0, 0)}
    frontier = [Monomial(0, 0)]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = a.mul(g, l, m)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return len(seen)


def _ratio(s: Monomial, t: Monomial, l: int, m: int) -> Monomial:
    """s t^T as a group element."""
    return s.mul(t.inverse(l, m), l, m)


def toric_layout_tuples(code: TbCode) -> list[tuple[int, int, int, int, int, int]]:
    """All (i, j, g, h, mu, lambda), 1-based, meeting the toric criterion, in lexicographic order."""
    spec = code.spec
    l, m = spec.l, spec.m
    out = []
    na, nb = len(spec.a_terms), len(spec.b_terms)
    for i, j in permutations(range(na), 2):
        p = _ratio(spec.a_terms[i], spec.a_terms[j], l, m)
        mu = p.order(l, m)
        for g, h in permutations(range(nb), 2):
            q = _ratio(spec.b_terms[g], spec.b_terms[h], l, m)
            lam = q.order(l, m)
            if mu * lam == l * m and _subgroup_size([p, q], l, m) == l * m:
                out.append((i + 1, j + 1, g + 1, h + 1, mu, lam))
    return sorted(out)


def toric_layout_check(code: TbCode) -> tuple[int, int, int, int, int, int] | None:
    found = toric_layout_tuples(code)
    return found[0] if found else None


@dataclass
class ToricLayout:
    mu: int
    lam: int
    indices: tuple[int, int, int, int]
    coords: dict[Vertex, tuple[int, int]]
    unit_edges: list[tuple[Vertex, Vertex, tuple[str, int]]]
    # (check, data, origin, interaction vector check - data)
    long_edges: list[tuple[Vertex, Vertex, tuple[str, int], tuple[int, int]]]

    @property
    def shape(self) -> tuple[int, int]:
        return (2 * self.mu, 2 * self.lam)

    def wrap(self, dx: int, dy: int) -> tuple[int, int]:
        """Torus difference in the symmetric range (-mu, mu] x (-lambda, lambda]."""
        w, h = self.shape
        dx, dy = dx % w, dy % h
        return (dx - w if dx > self.mu else dx, dy - h if dy > self.lam else dy)

    def vector(self, check: Vertex, data: Vertex) -> tuple[int, int]:
        (cx, cy), (dx, dy) = self.coords[check], self.coords[data]
        return self.wrap(cx - dx, cy - dy)

    def long_range_families(self) -> dict[tuple[str, tuple[str, int]], tuple[int, int]]:
        """Long-edge vector per (check type, origin term); built layouts guarantee uniqueness."""
        fam: dict = {}
        for c, _, o, vec in self.long_edges:
            fam.setdefault((c[0], o), set()).add(vec)
        return {key: next(iter(v)) for key, v in sorted(fam.items()) if len(v) == 1}


def build_toric_layout(code: TbCode, i: int, j: int, g: int, h: int) -> ToricLayout:
    """Place the Tanner graph on a 2mu x 2lambda torus from a qualifying (i, j, g, h).

    X(p^u q^v) sits at (2u, 2v) with p = A_i A_j^T, q = B_g B_h^T. The
    L qubit X(a) reaches through A_i sits at (2u+1, 2v), the R qubit it
    reaches through B_g at (2u, 2v+1), and the Z check adjacent to both at
    (2u+1, 2v+1). Terms i, j, g, h give the unit edges; all other terms are
    long-range.
    """
    spec = code.spec
    l, m = spec.l, spec.m
    if (i, j, g, h) not in {t[:4] for t in toric_layout_tuples(code)}:
        raise LayoutError(f"(i, j, g, h) = {(i, j, g, h)} fails the toric criterion")
    ai, aj = spec.a_terms[i - 1], spec.a_terms[j - 1]
    bg, bh = spec.b_terms[g - 1], spec.b_terms[h - 1]
    p, q = _ratio(ai, aj, l, m), _ratio(bg, bh, l, m)
    mu, lam = p.order(l, m), q.order(l, m)
    coords: dict[Vertex, tuple[int, int]] = {}
    alpha = Monomial(0, 0)
    for u in range(mu):
        beta = alpha
        for v in range(lam):
            coords[("X", beta)] = (2 * u, 2 * v)
            coords[("L", beta.mul(ai, l, m))] = (2 * u + 1, 2 * v)
            coords[("R", beta.mul(bg, l, m))] = (2 * u, 2 * v + 1)
            coords[("Z", beta.mul(ai, l, m).mul(bg, l, m))] = (2 * u + 1, 2 * v + 1)
            beta = beta.mul(q, l, m)
        alpha = alpha.mul(p, l, m)
    if len(coords) != 4 * l * m or len(set(coords.values())) != 4 * l * m:
        raise AssertionError("toric coordinates are not a bijection")
    graph = build_tanner(code)
    unit_origins = {("A", i - 1), ("A", j - 1), ("B", g - 1), ("B", h - 1)}
    layout = ToricLayout(mu, lam, (i, j, g, h), coords, [], [])
    for c, d, o in graph.edges:
        cv, dv = graph.vertices[c], graph.vertices[d]
        if o in unit_origins:
            layout.unit_edges.append((cv, dv, o))
        else:
            layout.long_edges.append((cv, dv, o, layout.vector(cv, dv)))
    _check_toric(layout, graph)
    return layout


def _check_toric(layout: ToricLayout, graph: TannerGraph) -> None:
    for cv, dv, _ in layout.unit_edges:
        dx, dy = layout.vector(cv, dv)
        if abs(dx) + abs(dy) != 1:
            raise AssertionError(f"unit edge {cv}-{dv} has vector {(dx, dy)}")
    vecs = defaultdict(set)
    for c, d, o in graph.edges:
        cv, dv = graph.vertices[c], graph.vertices[d]
        vecs[(cv[0], dv[0], o)].add(layout.vector(cv, dv))
    if any(len(v) != 1 for v in vecs.values()):
        raise AssertionError("interaction vectors are not translation invariant")


# tangled layouts ------------------------------------------------------------------


@dataclass
class TangledLayout:
    mu: int
    lam: int
    sigma: list[int]  # top row column x wraps to bottom row column sigma[x]
    tau: list[int]  # right column row y wraps to left column row tau[y]
    coords: dict[Vertex, tuple[int, int]]

    def grid(self) -> dict[tuple[int, int], Vertex]:
        return {xy: v for v, xy in self.coords.items()}

    def edge_set(self) -> set[frozenset]:
        """Edges implied by the grid plus the tangled boundary identifications."""
        w, h = 2 * self.mu, 2 * self.lam
        at = self.grid()
        out = set()
        for x in range(w):
            for y in range(h):
                if x + 1 < w:
                    out.add(frozenset((at[x, y], at[x + 1, y])))
                if y + 1 < h:
                    out.add(frozenset((at[x, y], at[x, y + 1])))
        for y in range(h):
            out.add(frozenset((at[w - 1, y], at[0, self.tau[y]])))
        for x in range(w):
            out.add(frozenset((at[x, h - 1], at[self.sigma[x], 0])))
        return out


_PARITY_TYPE = {(0, 0): "X", (1, 0): "L", (0, 1): "R", (1, 1): "Z"}


def tangled_layout_weight4(code: TbCode | TannerGraph, mu: int, lam: int) -> TangledLayout:
    """Tangling permutations of a degree-4 two-block Tanner graph.

    A base X check goes to the grid origin with one L neighbour to its right
    and one R neighbour above. Every further site is forced: it is the
    neighbour of the site below (or, in the first row, to the left) of the
    parity-determined type that is not already placed and that also touches
    the site to its left. The leftover edges of the right column and top row
    give tau and sigma.
    """
    g = code if isinstance(code, TannerGraph) else build_tanner(code)
    if g.pattern != (2, 2) or set(g.degrees()) != {4}:
        raise LayoutError("tangled layout algorithm needs a degree-4 graph with two A and two B terms")
    if 4 * mu * lam != len(g.vertices):
        raise LayoutError(f"grid 2*{mu} x 2*{lam} does not hold {len(g.vertices)} vertices")
    nb = [set(s) for s in g.neighbours()]
    w, h = 2 * mu, 2 * lam
    at: dict[tuple[int, int], int] = {}
    placed: set[int] = set()

    def of_type(vs, t):
        return {v for v in vs if g.vertices[v][0] == t}

    def put(xy, v):
        if v in placed:
            raise LayoutError(f"vertex {g.vertices[v]} placed twice; no tangled layout with these parameters")
        at[xy] = v
        placed.add(v)

    base = min(v for v, (t, _) in enumerate(g.vertices) if t == "X")
    put((0, 0), base)
    for y in range(h):
        for x in range(w):
            if (x, y) == (0, 0):
                continue
            want = _PARITY_TYPE[(x % 2, y % 2)]
            if y == 0:
                cand = of_type(nb[at[x - 1, 0]], want) - placed
            else:
                cand = of_type(nb[at[x, y - 1]], want) - placed
                if x > 0:
                    cand &= nb[at[x - 1, y]]
            if not cand:
                raise LayoutError(f"no vertex fits site {(x, y)}")
            if len(cand) > 1 and not ((x, y) in ((1, 0), (0, 1))):
                raise LayoutError(f"site {(x, y)} is ambiguous")
            put((x, y), min(cand))
    coords = {g.vertices[v]: xy for xy, v in at.items()}
    pos = {v: xy for xy, v in at.items()}

    def leftover(xy):
        x, y = xy
        inner = {at[p] for p in ((x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)) if p in at}
        return [pos[v] for v in nb[at[xy]] - inner]

    tau, sigma = [], []
    for y in range(h):
        rest = [p for p in leftover((w - 1, y)) if p[0] == 0]
        if len(rest) != 1:
            raise LayoutError(f"right boundary site {(w - 1, y)} does not wrap to the left column")
        tau.append(rest[0][1])
    for x in range(w):
        rest = [p for p in leftover((x, h - 1)) if p[1] == 0]
        if len(rest) != 1:
            raise LayoutError(f"top boundary site {(x, h - 1)} does not wrap to the bottom row")
        sigma.append(rest[0][0])
    if sorted(tau) != list(range(h)) or sorted(sigma) != list(range(w)):
        raise LayoutError("boundary matching is not a bijection")
    layout = TangledLayout(mu, lam, sigma, tau, coords)
    expected = {frozenset((g.vertices[c], g.vertices[d])) for c, d, _ in g.edges}
    if layout.edge_set() != expected:
        raise LayoutError("grid with tangled boundaries does not reproduce the Tanner graph")
    return layout


# planarity ---------------------------------------------------------------------------


def planarity_test(graph) -> bool:
    """Left-right planarity test; parallel edges are irrelevant and collapsed."""
    if not isinstance(graph, nx.Graph) or graph.is_multigraph():
        graph = nx.Graph(graph)
    planar, _ = nx.check_planarity(graph)
    return planar


@dataclass
class BiplanarSplit:
    part1: list[tuple[int, int, tuple[str, int]]]
    part2: list[tuple[int, int, tuple[str, int]]]
    planar1: bool
    planar2: bool
    terms1: tuple[tuple[str, int], ...] = ()
    terms2: tuple[tuple[str, int], ...] = ()

    @property
    def certified(self) -> bool:
        return self.planar1 and self.planar2


# pattern -> origin terms (0-based) of the first layer; the rest form the second
_SPLITS = {
    (2, 2): {("A", 0), ("B", 0)},
    (2, 3): {("A", 0), ("B", 0), ("B", 1)},
    (3, 3): {("A", 0), ("B", 0), ("B", 1)},
    (2, 4): {("A", 0), ("B", 0), ("B", 1)},
}


def biplanar_split(code: TbCode) -> BiplanarSplit:
    """Split edges by origin term into two layers and test each for planarity.

    Each layer holds at most one A term against two B terms (or the mirror),
    which makes every component a ring of 4-cycles.
    """
    pattern = code.spec.pattern
    if pattern not in _SPLITS:
        raise UnsupportedWeight(f"no bi-planar construction for |A|, |B| = {pattern}")
    g = build_tanner(code)
    first = _SPLITS[pattern]
    part1 = [e for e in g.edges if e[2] in first]
    part2 = [e for e in g.edges if e[2] not in first]
    terms2 = sorted({e[2] for e in part2})
    return BiplanarSplit(part1, part2, planarity_test(g.to_networkx(part1)),
                         planarity_test(g.to_networkx(part2)), tuple(sorted(first)), tuple(terms2))
