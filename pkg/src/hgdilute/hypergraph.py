"""Immutable hypergraphs: duals, primal graphs, paths, and isomorphism.

A hypergraph is a finite vertex set together with a *set* of edges, each edge
a subset of the vertices.  Because the edge family is a set, duplicate edges
collapse automatically; empty edges and isolated vertices are representable.
All values are frozen and all operations are pure, so everything here is safe
for unrestricted concurrent use.

Isomorphism is decided through a canonical certificate computed by iterated
partition refinement with individualization backtracking.  The certificate is
also what search code uses to deduplicate states up to isomorphism.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import BudgetExceededError, InvalidInputError

Edge = frozenset  # edges are frozensets of vertex names

#: default number of refinement-tree nodes explored before giving up
DEFAULT_ISO_BUDGET = 10**6


@dataclass(frozen=True)
class Hypergraph:
    vertices: frozenset[str]
    edges: frozenset[frozenset[str]]

    def __post_init__(self):
        covered = set().union(*self.edges) if self.edges else set()
        if not covered <= self.vertices:
            missing = sorted(covered - self.vertices)
            raise InvalidInputError(f"edge vertices not in vertex set: {missing}")

    @classmethod
    def make(cls, edges, vertices=()) -> "Hypergraph":
        """Build from any iterables; vertex set is the union plus extras."""
        es = frozenset(frozenset(e) for e in edges)
        vs = frozenset(vertices) | frozenset(v for e in es for v in e)
        return cls(vs, es)

    # -- local structure ---------------------------------------------------

    def incidence(self, v: str) -> frozenset[frozenset[str]]:
        """All edges containing v (the *vertex type* of v)."""
        if v not in self.vertices:
            raise InvalidInputError(f"unknown vertex {v!r}")
        return frozenset(e for e in self.edges if v in e)

    def degree(self, v: str) -> int:
        return len(self.incidence(v))

    def max_degree(self) -> int:
        counts = {v: 0 for v in self.vertices}
        for e in self.edges:
            for v in e:
                counts[v] += 1
        return max(counts.values(), default=0)

    def rank(self) -> int:
        return max((len(e) for e in self.edges), default=0)

    def is_reduced(self) -> bool:
        """No degree-0 vertex, no empty edge, no two vertices of equal type."""
        if frozenset() in self.edges:
            return False
        inc: dict[str, set] = {v: set() for v in self.vertices}
        for e in self.edges:
            for v in e:
                inc[v].add(e)
        if any(not s for s in inc.values()):
            return False
        types = [frozenset(s) for s in inc.values()]
        return len(set(types)) == len(types)

    def induced(self, keep) -> "Hypergraph":
        """Subhypergraph on ``keep``: every edge restricted, duplicates collapse."""
        keep = frozenset(keep)
        if not keep <= self.vertices:
            raise InvalidInputError("induced set contains unknown vertices")
        return Hypergraph(keep, frozenset(e & keep for e in self.edges))


def edge_key(e) -> tuple:
    """Deterministic sort key for edges: by size, then by sorted contents."""
    return (len(e), tuple(sorted(e)))


# -- dual ------------------------------------------------------------------


def dual_with_map(h: Hypergraph) -> tuple[Hypergraph, dict[frozenset, str]]:
    """Dual hypergraph plus the bijection original-edge -> dual-vertex name.

    Dual vertices are H's edges; dual edges are the incidence sets of H's
    vertices (deduplicated).  Generated names render the edge contents, which
    keeps them stable across calls.
    """
    names = {}
    for e in sorted(h.edges, key=edge_key):
        names[e] = "{" + ",".join(sorted(e)) + "}"
    if len(set(names.values())) != len(names):
        raise InvalidInputError("vertex names make dual edge names ambiguous")
    dual_edges = frozenset(
        frozenset(names[e] for e in h.edges if v in e) for v in h.vertices
    )
    return Hypergraph(frozenset(names.values()), dual_edges), names


def dual(h: Hypergraph) -> Hypergraph:
    return dual_with_map(h)[0]


def primal_graph(h: Hypergraph) -> Hypergraph:
    """2-uniform co-occurrence graph on the same vertex set (no loops)."""
    pairs = set()
    for e in h.edges:
        pairs.update(frozenset(p) for p in itertools.combinations(sorted(e), 2))
    return Hypergraph(h.vertices, frozenset(pairs))


# -- paths and connectivity -------------------------------------------------


@dataclass(frozen=True)
class Path:
    """Alternating vertex/edge sequence; no vertex or edge repeats."""

    path_vertices: tuple[str, ...]
    path_edges: tuple[frozenset[str], ...]

    def check(self, h: Hypergraph) -> str | None:
        """Return None if valid in h, else the first violated condition."""
        vs, es = self.path_vertices, self.path_edges
        if len(vs) != len(es) + 1 or not vs:
            return "length mismatch between vertices and edges"
        if any(v not in h.vertices for v in vs):
            return "path vertex not in hypergraph"
        if any(e not in h.edges for e in es):
            return "path edge not in hypergraph"
        for i, e in enumerate(es):
            if not {vs[i], vs[i + 1]} <= e:
                return f"edge {i} does not contain both endpoints"
        if len(set(vs)) != len(vs):
            return "repeated vertex"
        if len(set(es)) != len(es):
            return "repeated edge"
        return None


def find_path(h: Hypergraph, u: str, v: str) -> Path | None:
    """Shortest alternating path from u to v, or None when none exists."""
    if u == v:
        raise InvalidInputError("path endpoints must be distinct")
    if u not in h.vertices or v not in h.vertices:
        raise InvalidInputError("path endpoints must be vertices")
    prev: dict[str, tuple[str, frozenset]] = {}
    seen = {u}
    frontier = [u]
    adj: dict[str, list[tuple[str, frozenset]]] = {w: [] for w in h.vertices}
    for e in sorted(h.edges, key=edge_key):
        for a in e:
            for b in e:
                if a != b:
                    adj[a].append((b, e))
    while frontier:
        nxt = []
        for a in sorted(frontier):
            for b, e in adj[a]:
                if b not in seen:
                    seen.add(b)
                    prev[b] = (a, e)
                    nxt.append(b)
        if v in seen:
            break
        frontier = nxt
    if v not in seen:
        return None
    verts, edges = [v], []
    while verts[-1] != u:
        a, e = prev[verts[-1]]
        edges.append(e)
        verts.append(a)
    return Path(tuple(reversed(verts)), tuple(reversed(edges)))


def is_connected(h: Hypergraph) -> bool:
    """Union-find over edges; singleton hypergraphs count as connected."""
    if len(h.vertices) <= 1:
        return True
    parent = {v: v for v in h.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in h.edges:
        it = iter(sorted(e))
        first = next(it, None)
        if first is None:
            continue
        for w in it:
            parent[find(w)] = find(first)
    roots = {find(v) for v in h.vertices}
    return len(roots) == 1


# -- isomorphism -------------------------------------------------------------


@dataclass(frozen=True)
class IsoWitness:
    """Vertex bijection inducing an edge bijection between two hypergraphs."""

    mapping: tuple[tuple[str, str], ...]

    def as_dict(self) -> dict[str, str]:
        return dict(self.mapping)

    def check(self, h1: Hypergraph, h2: Hypergraph) -> bool:
        m = self.as_dict()
        if set(m) != set(h1.vertices) or set(m.values()) != set(h2.vertices):
            return False
        if len(set(m.values())) != len(m):
            return False
        return frozenset(frozenset(m[v] for v in e) for e in h1.edges) == h2.edges


_cert_cache: dict[Hypergraph, tuple] = {}
_CERT_CACHE_MAX = 1 << 18


def canonical_form(h: Hypergraph, budget: int = DEFAULT_ISO_BUDGET):
    """Hashable canonical certificate of h, equal iff hypergraphs isomorphic."""
    return _canonical(h, budget)[0]


def _canonical(h: Hypergraph, budget: int):
    cached = _cert_cache.get(h)
    if cached is not None:
        return cached
    verts = sorted(h.vertices)
    n = len(verts)
    vidx = {v: i for i, v in enumerate(verts)}
    edges = [frozenset(vidx[v] for v in e) for e in h.edges]
    if n == 0:
        cert = (0, tuple(sorted(tuple(sorted(e)) for e in edges)))
        result = (cert, {})
        _cert_cache[h] = result
        return result
    inc: list[list[int]] = [[] for _ in range(n)]
    for ei, e in enumerate(edges):
        for v in e:
            inc[v].append(ei)

    def refine(cells):
        while True:
            color = [0] * n
            for ci, cell in enumerate(cells):
                for v in cell:
                    color[v] = ci
            out, changed = [], False
            for cell in cells:
                if len(cell) == 1:
                    out.append(cell)
                    continue
                groups: dict[tuple, list[int]] = {}
                for v in cell:
                    sig = tuple(
                        sorted(
                            (len(edges[ei]), tuple(sorted(color[w] for w in edges[ei])))
                            for ei in inc[v]
                        )
                    )
                    groups.setdefault(sig, []).append(v)
                if len(groups) == 1:
                    out.append(cell)
                else:
                    changed = True
                    for sig in sorted(groups):
                        out.append(sorted(groups[sig]))
            cells = out
            if not changed:
                return cells

    best: list = [None, None]
    nodes = 0

    def descend(cells):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceededError(
                f"isomorphism search exceeded {budget} refinement nodes"
            )
        cells = refine(cells)
        split_at = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if split_at is None:
            lab = [0] * n
            for pos, cell in enumerate(cells):
                lab[cell[0]] = pos
            cert = tuple(sorted(tuple(sorted(lab[v] for v in e)) for e in edges))
            if best[0] is None or cert < best[0]:
                best[0], best[1] = cert, lab
            return
        cell = cells[split_at]
        for v in cell:
            descend(
                cells[:split_at]
                + [[v], [w for w in cell if w != v]]
                + cells[split_at + 1 :]
            )

    descend([list(range(n))])
    cert = (n, best[0])
    labeling = {verts[i]: best[1][i] for i in range(n)}
    result = (cert, labeling)
    if len(_cert_cache) < _CERT_CACHE_MAX:
        _cert_cache[h] = result
    return result


def _iso_invariant(h: Hypergraph) -> tuple:
    degs = {v: 0 for v in h.vertices}
    for e in h.edges:
        for v in e:
            degs[v] += 1
    return (
        len(h.vertices),
        len(h.edges),
        tuple(sorted(len(e) for e in h.edges)),
        tuple(sorted(degs.values())),
    )


def isomorphic(
    h1: Hypergraph, h2: Hypergraph, budget: int = DEFAULT_ISO_BUDGET
) -> IsoWitness | None:
    """Witness bijection when isomorphic, None otherwise.

    Absence is definitive; running out of budget raises instead.
    """
    if _iso_invariant(h1) != _iso_invariant(h2):
        return None
    cert1, lab1 = _canonical(h1, budget)
    cert2, lab2 = _canonical(h2, budget)
    if cert1 != cert2:
        return None
    by_label = {lab: v for v, lab in lab2.items()}
    mapping = tuple(sorted((v, by_label[lab]) for v, lab in lab1.items()))
    witness = IsoWitness(mapping)
    if not witness.check(h1, h2):  # pragma: no cover - canonical labeling bug
        raise AssertionError("canonical labelings disagree with certificate")
    return witness
