"""Graph minors in hypergraphs, jigsaw extraction, pre-jigsaw machinery.

A minor map sends each vertex of a pattern graph to a connected, pairwise
disjoint branch set of the host, with host edges witnessing pattern adjacency.
``find_minor`` is an exhaustive model search (complete; budget-guarded), good
for hosts of roughly 14 vertices and below.

``jigsaw_from_grid_minor`` turns a grid minor of the dual of a degree-2
hypergraph into an explicit dilution sequence onto the grid's dual, by merging
each branch set's edge region along a spanning set of interior degree-2
vertices and then restricting to the junction vertices shared between adjacent
regions.  ``minor_from_dilution`` goes the other way, reading the branch sets
off the edge-provenance labels of a verified sequence.

Expressive minor maps add an injective edge assignment whose inter-edge
connectivity avoids all assigned edges; dualizing one produces a pre-jigsaw
witness: a corner embedding of a jigsaw plus disjoint edge regions whose
internal paths realize each jigsaw edge.  Degree-2 pre-jigsaws collapse back
onto the jigsaw by merging each region.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .dilution import (
    DeleteSubedge,
    DeleteVertex,
    DilutionSequence,
    MergeOn,
    apply_sequence,
    reduce_hypergraph,
    track_labels,
    verify_dilution,
)
from .errors import (
    BudgetExceededError,
    ConstructionError,
    InvalidInputError,
)
from .hypergraph import Hypergraph, Path, dual, dual_with_map, edge_key

DEFAULT_MINOR_BUDGET = 10**6
MINOR_COMPLETENESS_LIMIT = 14  # documented host size for practical completeness


@dataclass(frozen=True)
class MinorMap:
    """Pattern vertex -> branch set (host vertex subset)."""

    branch_sets: tuple[tuple[str, frozenset[str]], ...]

    def as_dict(self) -> dict[str, frozenset[str]]:
        return dict(self.branch_sets)

    @classmethod
    def of(cls, mapping) -> "MinorMap":
        return cls(tuple(sorted((v, frozenset(s)) for v, s in dict(mapping).items())))


def _check_graph(g: Hypergraph, name: str = "pattern"):
    if any(len(e) != 2 for e in g.edges):
        raise InvalidInputError(f"{name} must be 2-uniform")


def _vertex_set_connected(h: Hypergraph, vs: frozenset) -> bool:
    """Connectivity of the subhypergraph induced on vs."""
    if len(vs) <= 1:
        return True
    parent = {v: v for v in vs}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in h.edges:
        inside = sorted(e & vs)
        for w in inside[1:]:
            parent[find(w)] = find(inside[0])
    return len({find(v) for v in vs}) == 1


def _edge_connects(e: frozenset, a: frozenset, b: frozenset) -> bool:
    return bool(e & a) and bool(e & b)


def validate_minor_map(
    g: Hypergraph, host: Hypergraph, mm: MinorMap, require_onto: bool = False
) -> tuple[bool, str | None]:
    """All minor-map conditions; reports the first violation."""
    _check_graph(g)
    images = mm.as_dict()
    if set(images) != set(g.vertices):
        return False, "branch sets do not cover exactly the pattern vertices"
    taken: set[str] = set()
    for v in sorted(images):
        s = images[v]
        if not s:
            return False, f"branch set of {v} is empty"
        if not s <= host.vertices:
            return False, f"branch set of {v} leaves the host"
        if s & taken:
            return False, f"branch set of {v} overlaps another"
        taken |= s
        if not _vertex_set_connected(host, s):
            return False, f"branch set of {v} is not connected"
    for e in sorted(g.edges, key=edge_key):
        u, v = sorted(e)
        if not any(_edge_connects(f, images[u], images[v]) for f in host.edges):
            return False, f"no host edge connects branch sets of {u} and {v}"
    if require_onto and taken != set(host.vertices):
        return False, "branch sets do not cover the host"
    return True, None


# -- exhaustive minor search --------------------------------------------------


def _connected_subsets(host: Hypergraph) -> list[frozenset]:
    """Every connected vertex subset, each exactly once, small sets first."""
    adj: dict[str, set[str]] = {v: set() for v in host.vertices}
    for e in host.edges:
        for a in e:
            for b in e:
                if a != b:
                    adj[a].add(b)
    out: list[frozenset] = []

    for v in sorted(host.vertices):
        # subsets whose minimum element is v live entirely above v
        def expand(current: frozenset, banned: frozenset):
            out.append(current)
            options = sorted(
                w
                for w in set().union(*(adj[x] for x in current))
                if w > v and w not in current and w not in banned
            )
            local_ban = set(banned)
            for u in options:
                expand(current | {u}, frozenset(local_ban))
                local_ban.add(u)

        expand(frozenset({v}), frozenset())
    out.sort(key=lambda s: (len(s), tuple(sorted(s))))
    return out


def find_minor(
    g: Hypergraph,
    host: Hypergraph,
    budget: int = DEFAULT_MINOR_BUDGET,
) -> MinorMap | None:
    """Exhaustive search for a minor model of connected pattern g in host.

    None means proven absence; exceeding the budget raises.
    """
    _check_graph(g)
    from .hypergraph import is_connected

    if not is_connected(g):
        raise InvalidInputError("pattern must be connected")
    if len(g.vertices) > len(host.vertices):
        return None

    order: list[str] = []
    seen: set[str] = set()
    gadj: dict[str, set[str]] = {v: set() for v in g.vertices}
    for e in g.edges:
        a, b = sorted(e)
        gadj[a].add(b)
        gadj[b].add(a)
    start = min(g.vertices)
    queue = deque([start])
    seen.add(start)
    while queue:
        x = queue.popleft()
        order.append(x)
        for y in sorted(gadj[x]):
            if y not in seen:
                seen.add(y)
                queue.append(y)
    earlier = [
        [order.index(w) for w in gadj[t] if order.index(w) < i]
        for i, t in enumerate(order)
    ]
    host_edges = sorted(host.edges, key=edge_key)
    subsets = _connected_subsets(host)
    attempts = 0

    def place(i: int, used: frozenset, images: list[frozenset]):
        nonlocal attempts
        if i == len(order):
            return list(images)
        room = len(host.vertices) - len(used) - (len(order) - i - 1)
        for s in subsets:
            if len(s) > room or s & used:
                continue
            attempts += 1
            if attempts > budget:
                raise BudgetExceededError(
                    f"minor search exceeded {budget} placement attempts"
                )
            ok = all(
                any(_edge_connects(f, s, images[j]) for f in host_edges)
                for j in earlier[i]
            )
            if not ok:
                continue
            images.append(s)
            res = place(i + 1, used | s, images)
            if res is not None:
                return res
            images.pop()
        return None

    model = place(0, frozenset(), [])
    if model is None:
        return None
    return MinorMap.of({order[i]: model[i] for i in range(len(order))})


def extend_to_onto(g: Hypergraph, host: Hypergraph, mm: MinorMap) -> MinorMap:
    """Absorb every unused host vertex into an adjacent branch set."""
    images = {v: set(s) for v, s in mm.as_dict().items()}
    adj: dict[str, set[str]] = {v: set() for v in host.vertices}
    for e in host.edges:
        for a in e:
            for b in e:
                if a != b:
                    adj[a].add(b)
    free = set(host.vertices) - set().union(*images.values())
    while free:
        hit = None
        for u in sorted(free):
            for v in sorted(images):
                if adj[u] & images[v]:
                    hit = (u, v)
                    break
            if hit:
                break
        if hit is None:
            raise InvalidInputError(
                "host has vertices unreachable from the model; cannot make the map onto"
            )
        images[hit[1]].add(hit[0])
        free.remove(hit[0])
    out = MinorMap.of(images)
    ok, why = validate_minor_map(g, host, out, require_onto=True)
    if not ok:  # pragma: no cover - absorption invariant
        raise AssertionError(f"onto extension broke the map: {why}")
    return out


def find_grid_minor(
    host: Hypergraph, n: int, budget: int = DEFAULT_MINOR_BUDGET
) -> MinorMap | None:
    """Onto minor map of the n x n grid into host, or proven absence.

    Complete in practice for hosts of about 14 vertices and below; beyond
    that the budget decides.  The host must be connected for the returned
    map to be onto.
    """
    from .generators import grid

    g = grid(n, n)
    mm = find_minor(g, host, budget=budget)
    if mm is None:
        return None
    return extend_to_onto(g, host, mm)


# -- jigsaw extraction ---------------------------------------------------------


def _region_merge_spine(
    h: Hypergraph, region: frozenset, protected: set[str]
) -> list[str]:
    """Interior vertices whose merges fuse the edge region into one edge.

    Candidates are degree-2 vertices with both incident edges in the region;
    a lexicographic Kruskal sweep picks a spanning spine of minimum size.
    """
    edges = sorted((e for e in region if e), key=edge_key)
    if len(edges) <= 1:
        return []
    parent = {e: e for e in edges}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    spine: list[str] = []
    for w in sorted({v for e in edges for v in e}):
        if w in protected:
            continue
        holders = [e for e in edges if w in e]
        if len(holders) != 2:
            continue
        if len([e for e in h.edges if w in e]) != 2:
            continue
        a, b = find(holders[0]), find(holders[1])
        if a != b:
            parent[a] = b
            spine.append(w)
    if len({find(e) for e in edges}) != 1:
        raise ConstructionError(
            "edge region is not linked by interior degree-2 vertices"
        )
    return spine


def jigsaw_from_grid_minor(
    h: Hypergraph, g: Hypergraph, mm: MinorMap
) -> DilutionSequence:
    """Dilution sequence from degree-2 h onto the dual of g.

    Requires an onto minor map of the connected graph g into the dual of the
    reduced form of h, with branch sets named by that dual's vertex names.
    The sequence reduces h, merges each branch set's edge region along an
    interior spanning spine, and deletes everything but one junction vertex
    per pattern edge.  The result is verified before returning.
    """
    from .hypergraph import is_connected

    _check_graph(g)
    if h.max_degree() > 2:
        raise InvalidInputError("hypergraph degree must be at most 2")
    if not is_connected(g):
        raise InvalidInputError("pattern must be connected")
    h_red, seq0 = reduce_hypergraph(h)
    d, edge_to_name = dual_with_map(h_red)
    name_to_edge = {name: e for e, name in edge_to_name.items()}
    ok, why = validate_minor_map(g, d, mm, require_onto=True)
    if not ok:
        raise InvalidInputError(f"minor map invalid for the dual: {why}")
    images = mm.as_dict()
    region = {
        u: frozenset(name_to_edge[x] for x in images[u]) for u in g.vertices
    }

    inc: dict[str, list] = {v: [] for v in h_red.vertices}
    for e in h_red.edges:
        for v in e:
            inc[v].append(e)

    junction: dict[frozenset, str] = {}
    junctions_of: dict[str, set[str]] = {u: set() for u in g.vertices}
    for ge in sorted(g.edges, key=edge_key):
        u, v = sorted(ge)
        cands = sorted(
            w
            for w in h_red.vertices
            if any(e in region[u] for e in inc[w])
            and any(e in region[v] for e in inc[w])
        )
        if not cands:
            raise ConstructionError(f"no junction vertex for pattern edge {u}-{v}")
        junction[ge] = cands[0]
        junctions_of[u].add(cands[0])
        junctions_of[v].add(cands[0])
    kept = set(junction.values())

    steps: list = []
    for u in sorted(g.vertices):
        spine = _region_merge_spine(h_red, region[u], protected=set())
        if set(spine) & kept:
            raise ConstructionError(
                "merge spine would consume a junction vertex"
            )
        steps.extend(MergeOn(w) for w in spine)
    cur = h_red
    for s in steps:
        from .dilution import apply_step

        cur = apply_step(cur, s)
    steps.extend(DeleteVertex(v) for v in sorted(cur.vertices - kept))
    seq = seq0.then(steps)
    ok, _ = verify_dilution(h, seq, dual(g))
    if not ok:
        raise ConstructionError("extracted sequence does not reach the dual pattern")
    return seq


def minor_from_dilution(
    h: Hypergraph, seq: DilutionSequence, g: Hypergraph
) -> MinorMap:
    """Branch sets of g in the dual of h, read off a verified dilution.

    The edge-provenance labels of the sequence, grouped by the target edge
    they end on, are exactly the branch sets once edges are renamed to dual
    vertices.  Needs at least 3 pattern vertices so that the dual of g keeps
    one edge per pattern vertex.
    """
    from .hypergraph import is_connected

    _check_graph(g)
    if h.max_degree() > 2:
        raise InvalidInputError("hypergraph degree must be at most 2")
    if len(g.vertices) < 3:
        raise InvalidInputError("pattern needs at least 3 vertices")
    if not is_connected(g):
        raise InvalidInputError("pattern must be connected")
    dg, gedge_name = dual_with_map(g)
    result = apply_sequence(h, seq)
    from .hypergraph import isomorphic

    wit = isomorphic(result, dg)
    if wit is None:
        raise InvalidInputError("sequence does not reach the dual of the pattern")
    to_dg = wit.as_dict()
    labels = track_labels(h, seq).as_dict()
    _, edge_to_name = dual_with_map(h)
    images = {}
    for v in sorted(g.vertices):
        dg_edge = frozenset(
            gedge_name[e] for e in g.edges if v in e
        )
        matches = [
            f
            for f in result.edges
            if frozenset(to_dg[x] for x in f) == dg_edge
        ]
        if len(matches) != 1:
            raise ConstructionError(
                f"dual edge of pattern vertex {v} is not uniquely matched"
            )
        images[v] = frozenset(edge_to_name[e] for e in labels[matches[0]])
    mm = MinorMap.of(images)
    ok, why = validate_minor_map(g, dual(h), mm)
    if not ok:
        raise ConstructionError(f"label-derived branch sets invalid: {why}")
    return mm


# -- expressive minors ---------------------------------------------------------


@dataclass(frozen=True)
class ExpressiveMinorMap:
    """Onto minor map plus an injective pattern-edge -> host-edge assignment."""

    mu: MinorMap
    rho: tuple[tuple[frozenset[str], frozenset[str]], ...]

    def rho_dict(self) -> dict[frozenset, frozenset]:
        return dict(self.rho)

    @classmethod
    def of(cls, mu, rho) -> "ExpressiveMinorMap":
        mm = mu if isinstance(mu, MinorMap) else MinorMap.of(mu)
        return cls(
            mm,
            tuple(
                sorted(
                    ((frozenset(k), frozenset(v)) for k, v in dict(rho).items()),
                    key=lambda kv: edge_key(kv[0]),
                )
            ),
        )


def _edges_linked_avoiding(
    host: Hypergraph, a: frozenset, b: frozenset, marked: frozenset
) -> bool:
    """Whether edges a and b touch or connect via unmarked-edge paths."""
    if a & b:
        return True
    allowed = [e for e in host.edges if e not in marked]
    reached = set(a)
    frontier = set(a)
    while frontier:
        nxt = set()
        for e in allowed:
            if e & frontier:
                nxt |= e - reached
        if nxt & b:
            return True
        reached |= nxt
        frontier = nxt
    return bool(reached & b)


def validate_expressive_minor(
    g: Hypergraph, host: Hypergraph, emm: ExpressiveMinorMap
) -> tuple[bool, str | None]:
    """Expressive-minor conditions on top of an onto minor map."""
    ok, why = validate_minor_map(g, host, emm.mu, require_onto=True)
    if not ok:
        return False, why
    rho = emm.rho_dict()
    if set(rho) != set(g.edges):
        return False, "edge assignment does not cover exactly the pattern edges"
    values = list(rho.values())
    if len(set(values)) != len(values):
        return False, "edge assignment is not injective"
    if any(v not in host.edges for v in values):
        return False, "edge assignment leaves the host"
    images = emm.mu.as_dict()
    for e in sorted(g.edges, key=edge_key):
        u, v = sorted(e)
        if not _edge_connects(rho[e], images[u], images[v]):
            return False, f"assigned edge for {u}-{v} does not connect the branch sets"
    marked = frozenset(values)
    glist = sorted(g.edges, key=edge_key)
    for i, e1 in enumerate(glist):
        for e2 in glist[i + 1 :]:
            if not (e1 & e2):
                continue
            if not _edges_linked_avoiding(host, rho[e1], rho[e2], marked):
                return (
                    False,
                    f"assigned edges of incident pattern edges "
                    f"{sorted(e1)}/{sorted(e2)} only connect through assigned edges",
                )
    return True, None


def expressive_from_minor(
    g: Hypergraph, host: Hypergraph, mm: MinorMap
) -> ExpressiveMinorMap:
    """Canonical edge assignment for rank-2 hosts, where every minor is expressive."""
    if host.rank() > 2:
        raise InvalidInputError("automatic edge assignment needs a rank-2 host")
    mm = extend_to_onto(g, host, mm)
    images = mm.as_dict()
    rho = {}
    for e in sorted(g.edges, key=edge_key):
        u, v = sorted(e)
        cands = sorted(
            (f for f in host.edges if _edge_connects(f, images[u], images[v])),
            key=edge_key,
        )
        if not cands:
            raise InvalidInputError("map is not a minor map; missing connecting edge")
        rho[e] = cands[0]
    emm = ExpressiveMinorMap.of(mm, rho)
    ok, why = validate_expressive_minor(g, host, emm)
    if not ok:  # pragma: no cover - rank-2 guarantee
        raise ConstructionError(f"rank-2 edge assignment failed: {why}")
    return emm


# -- pre-jigsaws ---------------------------------------------------------------


@dataclass(frozen=True)
class PreJigsawWitness:
    """Corner embedding of an (n, m) jigsaw with edge regions and fixed paths.

    ``corners`` maps each jigsaw vertex to a host vertex; ``edge_groups`` maps
    each jigsaw edge (a frozenset of jigsaw vertices) to a disjoint set of
    host edges; ``fixed_paths`` realizes every pair of corners sharing a
    jigsaw edge by a path inside that edge's region.
    """

    rows: int
    cols: int
    corners: tuple[tuple[str, str], ...]
    edge_groups: tuple[tuple[frozenset[str], frozenset[frozenset[str]]], ...]
    fixed_paths: tuple[tuple[tuple[str, str], Path], ...]

    def corner_dict(self) -> dict[str, str]:
        return dict(self.corners)

    def group_dict(self) -> dict[frozenset, frozenset]:
        return dict(self.edge_groups)

    def path_dict(self) -> dict[tuple[str, str], Path]:
        return dict(self.fixed_paths)


@dataclass(frozen=True)
class PreJigsawReport:
    valid: bool
    reason: str | None
    pi_injective: bool


def trivial_prejigsaw_witness(n: int, m: int) -> PreJigsawWitness:
    """Identity witness showing a jigsaw is its own pre-jigsaw."""
    from .generators import jigsaw_named_edges

    named = jigsaw_named_edges(n, m)
    jedges = sorted(set(named.values()), key=edge_key)
    corners = sorted({v for e in jedges for v in e})
    paths = {}
    for e in jedges:
        mem = sorted(e)
        for i, a in enumerate(mem):
            for b in mem[i + 1 :]:
                paths[(a, b)] = Path((a, b), (e,))
    return PreJigsawWitness(
        rows=n,
        cols=m,
        corners=tuple((v, v) for v in corners),
        edge_groups=tuple((e, frozenset([e])) for e in jedges),
        fixed_paths=tuple(sorted(paths.items())),
    )


def validate_prejigsaw(
    h: Hypergraph, n: int, m: int, witness: PreJigsawWitness
) -> PreJigsawReport:
    """All pre-jigsaw conditions plus the vertex-coverage clause.

    Injectivity of the corner map is reported separately and does not affect
    validity on its own (a non-injective map already fails the path checks).
    """
    from .generators import jigsaw_named_edges

    if (witness.rows, witness.cols) != (n, m):
        return PreJigsawReport(False, "witness dimensions disagree", True)
    named = jigsaw_named_edges(n, m)
    jedges = set(named.values())
    jverts = {v for e in jedges for v in e}
    pi = witness.corner_dict()
    injective = len(set(pi.values())) == len(pi)

    def fail(reason):
        return PreJigsawReport(False, reason, injective)

    if set(pi) != jverts:
        return fail("corner map does not cover exactly the jigsaw vertices")
    if not set(pi.values()) <= h.vertices:
        return fail("corner map leaves the host")
    groups = witness.group_dict()
    if set(groups) != jedges:
        return fail("edge groups do not cover exactly the jigsaw edges")
    claimed: set[frozenset] = set()
    for je in sorted(groups, key=edge_key):
        grp = groups[je]
        if not grp <= h.edges:
            return fail(f"group of {sorted(je)} contains non-edges")
        if grp & claimed:
            return fail(f"group of {sorted(je)} overlaps another group")
        claimed |= grp
    if claimed != set(h.edges):
        return fail("groups do not exhaust the host edges")

    paths = witness.path_dict()
    wanted = set()
    pi_image = set(pi.values())
    for je in sorted(jedges, key=edge_key):
        mem = sorted(je)
        for i, a in enumerate(mem):
            for b in mem[i + 1 :]:
                wanted.add((a, b))
    if set(paths) != wanted:
        return fail("fixed paths do not cover exactly the same-edge corner pairs")
    for (a, b), p in sorted(paths.items()):
        je = next(e for e in jedges if a in e and b in e)
        bad = p.check(h)
        if bad:
            return fail(f"fixed path {a},{b}: {bad}")
        ends = {p.path_vertices[0], p.path_vertices[-1]}
        if ends != {pi[a], pi[b]}:
            return fail(f"fixed path {a},{b} does not join the mapped corners")
        if not set(p.path_edges) <= groups[je]:
            return fail(f"fixed path {a},{b} uses edges outside its group")
        interior = set(p.path_vertices[1:-1])
        if interior & pi_image:
            return fail(f"fixed path {a},{b} passes through a mapped corner")
    on_paths = {v for _, p in paths.items() for v in p.path_vertices}
    if not set(h.vertices) <= (pi_image | on_paths):
        return fail("some host vertex is neither a corner nor on a fixed path")
    return PreJigsawReport(True, None, injective)


def prejigsaw_to_jigsaw(h: Hypergraph, witness: PreJigsawWitness) -> DilutionSequence:
    """Collapse a degree-2 pre-jigsaw onto its jigsaw by merging each region."""
    from .dilution import apply_step
    from .generators import jigsaw

    if h.max_degree() > 2:
        raise InvalidInputError("hypergraph degree must be at most 2")
    n, m = witness.rows, witness.cols
    report = validate_prejigsaw(h, n, m, witness)
    if not report.valid:
        raise InvalidInputError(f"witness invalid: {report.reason}")
    if not report.pi_injective:
        raise InvalidInputError("corner map must be injective to collapse")
    pi_image = set(witness.corner_dict().values())
    groups = witness.group_dict()
    steps: list = []
    for je in sorted(groups, key=edge_key):
        region = frozenset(e for e in groups[je] if e)
        if len(region) <= 1:
            continue
        spine = _region_merge_spine(h, region, protected=pi_image)
        steps.extend(MergeOn(w) for w in spine)
    cur = h
    for s in steps:
        cur = apply_step(cur, s)
    if frozenset() in cur.edges:
        steps.append(DeleteSubedge(frozenset()))
        cur = apply_step(cur, steps[-1])
    steps.extend(DeleteVertex(v) for v in sorted(cur.vertices - pi_image))
    seq = DilutionSequence.for_source(h, steps)
    ok, _ = verify_dilution(h, seq, jigsaw(n, m))
    if not ok:
        raise ConstructionError("collapse does not reach the jigsaw")
    return seq


def prejigsaw_from_expressive_minor(
    h: Hypergraph, n: int, emm: ExpressiveMinorMap
) -> tuple[DilutionSequence, PreJigsawWitness]:
    """Dualize an expressive n x n grid minor of the dual into a pre-jigsaw.

    The corner map sends each jigsaw vertex to the host vertex whose incidence
    set is the assigned dual edge; regions dualize the branch sets.  Fixed
    paths are shortest paths inside each region avoiding other corners; the
    dilution deletes everything off those paths and drops the resulting empty
    edge.  The witness is validated on the diluted hypergraph before return.
    """
    from .generators import _grid_edge_names, grid, jigsaw_named_edges

    h_red, seq0 = reduce_hypergraph(h)
    d, edge_to_name = dual_with_map(h_red)
    name_to_edge = {name: e for e, name in edge_to_name.items()}
    g = grid(n, n)
    ok, why = validate_expressive_minor(g, d, emm)
    if not ok:
        raise InvalidInputError(f"expressive minor invalid for the dual: {why}")

    dual_edge_to_vertex = {}
    for w in h_red.vertices:
        de = frozenset(edge_to_name[e] for e in h_red.edges if w in e)
        dual_edge_to_vertex[de] = w
    rho = emm.rho_dict()
    images = emm.mu.as_dict()

    grid_edges = _grid_edge_names(n, n)
    named_jedges = jigsaw_named_edges(n, n)
    pi: dict[str, str] = {}
    for jv, ge in grid_edges.items():
        pi[jv] = dual_edge_to_vertex[rho[ge]]
    groups: dict[frozenset, frozenset] = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            je = named_jedges[f"e{i}_{j}"]
            groups[je] = frozenset(name_to_edge[x] for x in images[f"x{i}_{j}"])

    pi_image = set(pi.values())
    paths: dict[tuple[str, str], Path] = {}
    for je in sorted(set(named_jedges.values()), key=edge_key):
        region = groups[je]
        mem = sorted(je)
        for i, a in enumerate(mem):
            for b in mem[i + 1 :]:
                forbidden = pi_image - {pi[a], pi[b]}
                p = _region_path(h_red, region, pi[a], pi[b], forbidden)
                if p is None:
                    raise ConstructionError(
                        f"no region path between corners {a} and {b}"
                    )
                paths[(a, b)] = p

    keep = pi_image | {v for p in paths.values() for v in p.path_vertices}
    steps: list = [DeleteVertex(v) for v in sorted(h_red.vertices - keep)]
    cur = h_red
    from .dilution import apply_step

    for s in steps:
        cur = apply_step(cur, s)
    if frozenset() in cur.edges:
        steps.append(DeleteSubedge(frozenset()))
        cur = apply_step(cur, steps[-1])

    restricted_groups: dict[frozenset, frozenset] = {}
    seen_edges: set[frozenset] = set()
    for je, region in groups.items():
        rg = frozenset(e & cur.vertices for e in region) - {frozenset()}
        if rg & seen_edges:
            raise ConstructionError("restricted regions collide between jigsaw edges")
        seen_edges |= rg
        restricted_groups[je] = rg
    restricted_paths = {
        key: Path(p.path_vertices, tuple(e & cur.vertices for e in p.path_edges))
        for key, p in paths.items()
    }
    witness = PreJigsawWitness(
        rows=n,
        cols=n,
        corners=tuple(sorted(pi.items())),
        edge_groups=tuple(
            sorted(restricted_groups.items(), key=lambda kv: edge_key(kv[0]))
        ),
        fixed_paths=tuple(sorted(restricted_paths.items())),
    )
    report = validate_prejigsaw(cur, n, n, witness)
    if not report.valid:
        raise ConstructionError(f"dualized witness invalid: {report.reason}")
    return seq0.then(steps), witness


def _region_path(
    h: Hypergraph,
    region: frozenset,
    start: str,
    goal: str,
    forbidden: set[str],
) -> Path | None:
    """Shortest path from start to goal using only region edges.

    Interior vertices avoid ``forbidden``; deterministic BFS order.
    """
    if start == goal:
        return None
    edges = sorted((e for e in region), key=edge_key)
    prev: dict[str, tuple[str, frozenset]] = {}
    seen = {start}
    frontier = [start]
    while frontier and goal not in seen:
        nxt = []
        for a in sorted(frontier):
            for e in edges:
                if a not in e:
                    continue
                for b in sorted(e):
                    if b in seen or (b != goal and b in forbidden):
                        continue
                    seen.add(b)
                    prev[b] = (a, e)
                    nxt.append(b)
        frontier = nxt
    if goal not in seen:
        return None
    verts, pedges = [goal], []
    while verts[-1] != start:
        a, e = prev[verts[-1]]
        pedges.append(e)
        verts.append(a)
    return Path(tuple(reversed(verts)), tuple(reversed(pedges)))
