"""Dilution steps, sequences, reduction, bounded-exhaustive search, labels.

The three step kinds: deleting a vertex (from the vertex set and every edge),
deleting an edge that is a proper subset of another edge, and merging on a
vertex v (all edges at v are replaced by their union minus v).  Merging also
drops v from the vertex set; it can no longer occur in any edge and keeping it
would only leave an isolated vertex behind.

Every step strictly shrinks the vertex or the edge count and never grows
either, which bounds sequence length and lets the exhaustive search prune by
size.  Search states are deduplicated by canonical form, so a ``None`` result
means proven absence, while running out of budget raises.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field

from .errors import BudgetExceededError, InvalidInputError, InvalidStepError
from .hypergraph import (
    Hypergraph,
    IsoWitness,
    canonical_form,
    edge_key,
    isomorphic,
)

DEFAULT_SEARCH_BUDGET = 10**5


@dataclass(frozen=True)
class DeleteVertex:
    vertex: str


@dataclass(frozen=True)
class DeleteSubedge:
    edge: frozenset[str]


@dataclass(frozen=True)
class MergeOn:
    vertex: str


Step = DeleteVertex | DeleteSubedge | MergeOn


@dataclass(frozen=True)
class DilutionSequence:
    """Ordered dilution steps, optionally pinned to a source size fingerprint."""

    steps: tuple[Step, ...] = ()
    source_vertices: int | None = None
    source_edges: int | None = None

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    @classmethod
    def for_source(cls, h: Hypergraph, steps) -> "DilutionSequence":
        return cls(tuple(steps), len(h.vertices), len(h.edges))

    def then(self, more) -> "DilutionSequence":
        return DilutionSequence(
            self.steps + tuple(more), self.source_vertices, self.source_edges
        )


# -- single steps ------------------------------------------------------------


def delete_vertex(h: Hypergraph, v: str) -> Hypergraph:
    if v not in h.vertices:
        raise InvalidStepError(f"cannot delete unknown vertex {v!r}")
    return Hypergraph(
        h.vertices - {v}, frozenset(e - {v} for e in h.edges)
    )


def delete_subedge(h: Hypergraph, e) -> Hypergraph:
    e = frozenset(e)
    if e not in h.edges:
        raise InvalidStepError(f"edge {sorted(e)} not present")
    if not any(e < f for f in h.edges):
        raise InvalidStepError(f"edge {sorted(e)} is not a proper subset of another edge")
    return Hypergraph(h.vertices, h.edges - {e})


def merge_on(h: Hypergraph, v: str) -> Hypergraph:
    if v not in h.vertices:
        raise InvalidStepError(f"cannot merge on unknown vertex {v!r}")
    incident = frozenset(e for e in h.edges if v in e)
    if not incident:
        raise InvalidStepError(f"vertex {v!r} has degree 0, nothing to merge")
    merged = frozenset().union(*incident) - {v}
    return Hypergraph(h.vertices - {v}, (h.edges - incident) | {merged})


def apply_step(h: Hypergraph, step: Step) -> Hypergraph:
    if isinstance(step, DeleteVertex):
        return delete_vertex(h, step.vertex)
    if isinstance(step, DeleteSubedge):
        return delete_subedge(h, step.edge)
    if isinstance(step, MergeOn):
        return merge_on(h, step.vertex)
    raise InvalidStepError(f"unknown step {step!r}")


def valid_steps(h: Hypergraph) -> list[Step]:
    """All steps applicable to h, in a fixed deterministic order."""
    steps: list[Step] = [DeleteVertex(v) for v in sorted(h.vertices)]
    for e in sorted(h.edges, key=edge_key):
        if any(e < f for f in h.edges):
            steps.append(DeleteSubedge(e))
    for v in sorted(h.vertices):
        if any(v in e for e in h.edges):
            steps.append(MergeOn(v))
    return steps


# -- sequences ---------------------------------------------------------------


def _check_fingerprint(h: Hypergraph, seq: DilutionSequence):
    if seq.source_vertices is not None and seq.source_vertices != len(h.vertices):
        raise InvalidStepError(
            f"sequence fingerprint expects {seq.source_vertices} vertices, "
            f"source has {len(h.vertices)}"
        )
    if seq.source_edges is not None and seq.source_edges != len(h.edges):
        raise InvalidStepError(
            f"sequence fingerprint expects {seq.source_edges} edges, "
            f"source has {len(h.edges)}"
        )


def apply_sequence(h: Hypergraph, seq: DilutionSequence) -> Hypergraph:
    return apply_sequence_states(h, seq)[-1]


def apply_sequence_states(h: Hypergraph, seq: DilutionSequence) -> list[Hypergraph]:
    """All intermediate hypergraphs, source first, result last."""
    _check_fingerprint(h, seq)
    states = [h]
    for i, step in enumerate(seq):
        try:
            states.append(apply_step(states[-1], step))
        except InvalidStepError as err:
            raise InvalidStepError(str(err), index=i) from None
    return states


def verify_dilution(
    h_src: Hypergraph, seq: DilutionSequence, h_target: Hypergraph
) -> tuple[bool, IsoWitness | None]:
    """Whether applying seq to the source lands on the target up to isomorphism."""
    result = apply_sequence(h_src, seq)
    witness = isomorphic(result, h_target)
    return (witness is not None), witness


# -- reduction ---------------------------------------------------------------


def reduce_hypergraph(h: Hypergraph) -> tuple[Hypergraph, DilutionSequence]:
    """Reduced form of h together with a dilution sequence reaching it.

    Reduced means: no degree-0 vertices, no empty edge, and no two vertices
    sharing a vertex type (the smallest-named vertex of each type class is
    kept).  The lone unremovable case is a hypergraph whose only edge is the
    empty edge: the empty edge is then no proper subset of anything, so it is
    kept and the result retains it.
    """
    steps: list[Step] = []
    inc: dict[str, set] = {v: set() for v in h.vertices}
    for e in h.edges:
        for v in e:
            inc[v].add(e)
    by_type: dict[frozenset, list[str]] = {}
    for v in sorted(h.vertices):
        by_type.setdefault(frozenset(inc[v]), []).append(v)
    for vtype, group in sorted(by_type.items(), key=lambda kv: kv[1][0]):
        if vtype:
            steps.extend(DeleteVertex(v) for v in group[1:])
    cur = h
    for s in steps:
        cur = apply_step(cur, s)
    for v in sorted(cur.vertices):
        if all(v not in e for e in cur.edges):
            steps.append(DeleteVertex(v))
            cur = delete_vertex(cur, v)
    if frozenset() in cur.edges and len(cur.edges) > 1:
        steps.append(DeleteSubedge(frozenset()))
        cur = delete_subedge(cur, frozenset())
    return cur, DilutionSequence.for_source(h, steps)


# -- exhaustive decision -----------------------------------------------------


def _size_ge(h: Hypergraph, target: Hypergraph) -> bool:
    return len(h.vertices) >= len(target.vertices) and len(h.edges) >= len(
        target.edges
    )


def search_dilution(
    h_src: Hypergraph,
    h_target: Hypergraph,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> DilutionSequence | None:
    """Breadth-first search for a dilution sequence from source to target.

    States are deduplicated by canonical form.  Returns None only after the
    pruned state space is exhausted, i.e. absence is proven; hitting the
    budget raises instead.  Deciding this question is NP-hard in general, so
    the budget is the contract.
    """
    target_cert = canonical_form(h_target)
    if canonical_form(h_src) == target_cert:
        return DilutionSequence.for_source(h_src, ())
    if not _size_ge(h_src, h_target):
        return None
    seen = {canonical_form(h_src)}
    queue: deque[tuple[Hypergraph, tuple[Step, ...]]] = deque([(h_src, ())])
    expanded = 0
    while queue:
        state, path = queue.popleft()
        expanded += 1
        if expanded > budget:
            raise BudgetExceededError(
                f"dilution search exceeded {budget} expanded states"
            )
        for step in valid_steps(state):
            child = apply_step(state, step)
            if not _size_ge(child, h_target):
                continue
            cert = canonical_form(child)
            if cert in seen:
                continue
            if cert == target_cert:
                return DilutionSequence.for_source(h_src, path + (step,))
            seen.add(cert)
            queue.append((child, path + (step,)))
    return None


def reachable_dilutions(
    h_src: Hypergraph,
    budget: int = DEFAULT_SEARCH_BUDGET,
    min_vertices: int = 0,
    min_edges: int = 0,
) -> set:
    """Canonical forms of every hypergraph reachable by dilution from h_src.

    Exhaustive up to the size floor; used to answer many containment queries
    against one source in a single sweep.
    """
    start = canonical_form(h_src)
    seen = {start}
    queue = deque([h_src])
    expanded = 0
    while queue:
        state = queue.popleft()
        expanded += 1
        if expanded > budget:
            raise BudgetExceededError(
                f"dilution reachability exceeded {budget} expanded states"
            )
        for step in valid_steps(state):
            child = apply_step(state, step)
            if len(child.vertices) < min_vertices or len(child.edges) < min_edges:
                continue
            cert = canonical_form(child)
            if cert not in seen:
                seen.add(cert)
                queue.append(child)
    return seen


# -- label tracking ----------------------------------------------------------


@dataclass(frozen=True)
class EdgeLabeling:
    """Maps each current edge to the set of original edges it descends from."""

    labels: tuple[tuple[frozenset, frozenset], ...]  # (current edge, originals)

    def as_dict(self) -> dict[frozenset, frozenset]:
        return dict(self.labels)

    def pairwise_disjoint(self) -> bool:
        seen: set = set()
        for _, originals in self.labels:
            if seen & originals:
                return False
            seen |= originals
        return True


def track_labels(h_src: Hypergraph, seq: DilutionSequence) -> EdgeLabeling:
    """Edge provenance through a dilution sequence.

    Rules per step: when a vertex deletion collapses edges, the surviving edge
    takes the union of their labels; deleting a subedge folds its label onto
    its smallest proper superedge; merging unions the labels of every edge
    incident to the merged vertex.  Labels of distinct surviving edges stay
    pairwise disjoint throughout.
    """
    _check_fingerprint(h_src, seq)
    labels: dict[frozenset, frozenset] = {e: frozenset([e]) for e in h_src.edges}
    cur = h_src
    for i, step in enumerate(seq):
        try:
            nxt = apply_step(cur, step)
        except InvalidStepError as err:
            raise InvalidStepError(str(err), index=i) from None
        if isinstance(step, DeleteVertex):
            new_labels: dict[frozenset, frozenset] = {}
            for e, lab in labels.items():
                shrunk = e - {step.vertex}
                new_labels[shrunk] = new_labels.get(shrunk, frozenset()) | lab
            labels = new_labels
        elif isinstance(step, DeleteSubedge):
            supers = sorted((f for f in cur.edges if step.edge < f), key=edge_key)
            host = supers[0]
            dropped = labels.pop(step.edge)
            labels[host] = labels[host] | dropped
        else:  # MergeOn
            incident = [e for e in cur.edges if step.vertex in e]
            merged = frozenset().union(*incident) - {step.vertex}
            union = frozenset().union(*(labels.pop(e) for e in incident))
            labels[merged] = labels.get(merged, frozenset()) | union
        cur = nxt
    assert set(labels) == set(cur.edges)
    return EdgeLabeling(tuple(sorted(labels.items(), key=lambda kv: edge_key(kv[0]))))
