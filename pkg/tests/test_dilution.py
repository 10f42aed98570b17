import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hgdilute.dilution import (
    DeleteSubedge,
    DeleteVertex,
    DilutionSequence,
    MergeOn,
    apply_sequence,
    apply_step,
    delete_subedge,
    delete_vertex,
    merge_on,
    reachable_dilutions,
    reduce_hypergraph,
    search_dilution,
    track_labels,
    valid_steps,
    verify_dilution,
)
from hgdilute.errors import InvalidStepError
from hgdilute.hypergraph import Hypergraph, canonical_form, is_connected, isomorphic
from hgdilute.generators import fig3_sequence, grid, jigsaw, mesh

from conftest import sample_hypergraph


def H(*edges, extra=()):
    return Hypergraph.make([set(e) for e in edges], vertices=extra)


seeds = st.integers(min_value=0, max_value=10**6)


def random_valid_sequence(h, rng, max_steps=4):
    steps = []
    cur = h
    for _ in range(rng.randint(0, max_steps)):
        options = valid_steps(cur)
        if not options:
            break
        s = rng.choice(options)
        steps.append(s)
        cur = apply_step(cur, s)
    return DilutionSequence.for_source(h, steps), cur


class TestSteps:
    def test_delete_vertex(self):
        assert delete_vertex(H("ab", "bc"), "b") == H("a", "c")

    def test_delete_vertex_triangle(self):
        assert delete_vertex(H("ab", "bc", "ac"), "c") == H("ab", "a", "b")

    def test_delete_vertex_collapse(self):
        assert delete_vertex(H("ab", "a"), "b") == H("a")

    def test_delete_vertex_unknown(self):
        with pytest.raises(InvalidStepError):
            delete_vertex(H("ab"), "z")

    def test_delete_subedge(self):
        assert delete_subedge(H("a", "ab"), {"a"}) == H("ab")

    def test_delete_empty_edge(self):
        h = Hypergraph.make([{"a", "b"}, set()])
        assert delete_subedge(h, set()) == H("ab")

    def test_delete_subedge_not_proper(self):
        with pytest.raises(InvalidStepError):
            delete_subedge(H("ab", "bc"), {"a", "b"})

    def test_merge_on(self):
        assert merge_on(H("ab", "bc"), "b") == H("ac")

    def test_merge_single_edge(self):
        assert merge_on(H("ab"), "b") == H("a")

    def test_merge_degree_zero(self):
        with pytest.raises(InvalidStepError):
            merge_on(H("ab", extra={"z"}), "z")

    def test_merge_mesh_diagonal_makes_all_incident(self):
        cur = mesh(6, 6)
        for i in range(1, 7):
            cur = merge_on(cur, f"c{i}_{i}")
        assert len(cur.edges) == 6
        assert all(a & b for a in cur.edges for b in cur.edges if a != b)


class TestSequences:
    def test_empty_sequence(self):
        h = H("ab")
        assert apply_sequence(h, DilutionSequence()) == h

    def test_fig3_sequence(self):
        ok, _ = verify_dilution(mesh(6, 6), fig3_sequence(), jigsaw(3, 2))
        assert ok

    def test_failing_step_reports_index(self):
        seq = DilutionSequence((DeleteVertex("a"), DeleteVertex("a")))
        with pytest.raises(InvalidStepError) as err:
            apply_sequence(H("ab"), seq)
        assert err.value.index == 1

    def test_fingerprint_mismatch(self):
        seq = DilutionSequence((), source_vertices=5)
        with pytest.raises(InvalidStepError):
            apply_sequence(H("ab"), seq)

    def test_verify_reports_mismatch(self):
        ok, wit = verify_dilution(H("ab"), DilutionSequence(), H("ab", extra={"z"}))
        assert not ok and wit is None

    @given(seeds)
    def test_step_monotonicity(self, seed):
        rng = random.Random(seed)
        h = sample_hypergraph(rng)
        for step in valid_steps(h):
            nxt = apply_step(h, step)
            assert len(nxt.vertices) <= len(h.vertices)
            assert len(nxt.edges) <= len(h.edges)
            assert (len(nxt.vertices), len(nxt.edges)) != (
                len(h.vertices),
                len(h.edges),
            )

    @given(seeds)
    def test_degree_never_increases(self, seed):
        rng = random.Random(seed)
        h = sample_hypergraph(rng)
        for step in valid_steps(h):
            assert apply_step(h, step).max_degree() <= h.max_degree()


class TestReduce:
    def test_isolated_vertex_removed(self):
        # b shares a's vertex type, so it goes too; then the isolated x
        r, seq = reduce_hypergraph(H("ab", extra={"x"}))
        assert r == H("a")
        assert seq.steps == (DeleteVertex("b"), DeleteVertex("x"))

    def test_distinct_types_survive(self):
        h = H("ab", "bc", extra={"x"})
        r, seq = reduce_hypergraph(h)
        assert r == H("ab", "bc")
        assert seq.steps == (DeleteVertex("x"),)

    def test_empty_edge_removed(self):
        h = Hypergraph.make([{"a", "b"}, {"b", "c"}, set()])
        r, seq = reduce_hypergraph(h)
        assert r == H("ab", "bc")
        assert DeleteSubedge(frozenset()) in seq.steps

    def test_vertex_types_deduplicated(self):
        r, seq = reduce_hypergraph(H("abc"))
        assert r == H("a")  # smallest name kept
        assert verify_dilution(H("abc"), seq, r)[0]

    def test_lone_empty_edge_kept(self):
        h = Hypergraph(frozenset(), frozenset({frozenset()}))
        r, seq = reduce_hypergraph(h)
        assert r == h and not seq.steps

    @given(seeds)
    def test_reduce_contract(self, seed):
        rng = random.Random(seed)
        h = sample_hypergraph(rng)
        r, seq = reduce_hypergraph(h)
        assert apply_sequence(h, seq) == r
        assert r.is_reduced() or r.edges == frozenset({frozenset()})
        r2, _ = reduce_hypergraph(r)
        assert isomorphic(r2, r) is not None  # idempotent up to isomorphism


class TestSearch:
    def test_self_is_empty_sequence(self):
        h = H("ab", "bc")
        seq = search_dilution(h, h)
        assert seq is not None and not seq.steps

    def test_c4_to_jigsaw22_up_to_iso(self):
        seq = search_dilution(grid(2, 2), jigsaw(2, 2))
        assert seq is not None and not seq.steps

    def test_size_obstruction_proven_absent(self):
        assert search_dilution(H("ab"), H("ab", "bc", "ca")) is None

    def test_found_sequences_verify(self):
        src = mesh(3, 3)
        target = jigsaw(2, 2)
        seq = search_dilution(src, target, budget=5 * 10**4)
        assert seq is not None
        assert verify_dilution(src, seq, target)[0]

    @given(seeds)
    @settings(max_examples=20)
    def test_random_dilutions_are_found(self, seed):
        rng = random.Random(seed)
        h = sample_hypergraph(rng, max_vertices=5, max_edges=4)
        seq, result = random_valid_sequence(h, rng, max_steps=3)
        found = search_dilution(h, result, budget=4 * 10**4)
        assert found is not None
        assert verify_dilution(h, found, result)[0]

    def test_reachable_contains_reductions(self):
        h = H("ab", "bc", extra={"z"})
        certs = reachable_dilutions(h)
        assert canonical_form(reduce_hypergraph(h)[0]) in certs


class TestLabels:
    def test_identity_labeling(self):
        h = H("ab", "bc")
        lab = track_labels(h, DilutionSequence()).as_dict()
        assert lab == {e: frozenset([e]) for e in h.edges}

    def test_merge_unions_labels(self):
        h = H("ab", "bc")
        lab = track_labels(h, DilutionSequence((MergeOn("b"),))).as_dict()
        assert lab[frozenset("ac")] == frozenset(h.edges)

    def test_subedge_label_folds_onto_superedge(self):
        h = H("a", "ab")
        lab = track_labels(h, DilutionSequence((DeleteSubedge(frozenset("a")),)))
        assert lab.as_dict()[frozenset("ab")] == frozenset(h.edges)

    def test_collapse_unions_labels(self):
        h = H("ab", "a")
        lab = track_labels(h, DilutionSequence((DeleteVertex("b"),)))
        assert lab.as_dict()[frozenset("a")] == frozenset(h.edges)

    @given(seeds)
    def test_labels_pairwise_disjoint(self, seed):
        rng = random.Random(seed)
        h = sample_hypergraph(rng)
        seq, _ = random_valid_sequence(h, rng)
        assert track_labels(h, seq).pairwise_disjoint()


class TestGhwMonotonicity:
    @given(seeds)
    @settings(max_examples=25)
    def test_ghw_never_increases(self, seed):
        from hgdilute.decomposition import exact_ghw

        rng = random.Random(seed)
        h = sample_hypergraph(rng, max_vertices=7, max_edges=5)
        seq, result = random_valid_sequence(h, rng, max_steps=3)
        before, _ = exact_ghw(h)
        after, _ = exact_ghw(result)
        assert after.width <= before.width
