import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hgdilute.cq import (
    Assignment,
    ConjunctiveQuery,
    Database,
    compute_core,
    count,
    eliminate_self_joins,
    evaluate,
    homomorphically_equivalent,
    hypergraph_of,
    project,
    query_from_hypergraph,
    reduce_along_dilution,
    semantic_ghw,
)
from hgdilute.decomposition import exact_ghw
from hgdilute.dilution import DilutionSequence, apply_sequence, apply_step, valid_steps
from hgdilute.errors import InvalidInputError, LimitExceededError
from hgdilute.generators import jigsaw
from hgdilute.hypergraph import Hypergraph

from conftest import sample_hypergraph


def Q(*atoms):
    return ConjunctiveQuery.of(atoms)


def brute_solutions(q, d):
    """All-assignments oracle, independent of the join pipeline."""
    rels = d.relations_dict()
    dom = sorted(d.active_domain())
    vs = q.variables()
    out = set()
    for combo in itertools.product(dom, repeat=len(vs)):
        a = dict(zip(vs, combo))
        if all(
            tuple(a[v] for v in atom.args) in rels.get(atom.relation, ())
            for atom in q.atoms
        ):
            out.add(Assignment.of(a))
    return frozenset(out)


def random_instance(rng, max_atoms=5, max_dom=4):
    h = sample_hypergraph(rng, max_vertices=6, max_edges=max_atoms)
    q = query_from_hypergraph(h)
    dom = [str(i) for i in range(1, rng.randint(2, max_dom) + 1)]
    rels = {}
    for atom in q.atoms:
        rels[atom.relation] = {
            tuple(rng.choice(dom) for _ in atom.args)
            for _ in range(rng.randint(0, 6))
        }
    return q, Database.of(rels)


seeds = st.integers(min_value=0, max_value=10**6)


class TestHypergraphOf:
    def test_two_atoms(self):
        h = hypergraph_of(Q(("R", "xy"), ("S", "yz")))
        assert h == Hypergraph.make([{"x", "y"}, {"y", "z"}])

    def test_same_variable_set_collapses(self):
        h = hypergraph_of(Q(("R", "xy"), ("S", "xy"), ("T", "xz")))
        assert len(h.edges) == 2

    def test_repeated_variable(self):
        h = hypergraph_of(Q(("R", "xx")))
        assert h.edges == frozenset({frozenset({"x"})})


class TestEvaluate:
    def test_single_atom(self):
        q = Q(("R", "xy"))
        d = Database.of({"R": [("1", "2"), ("3", "4")]})
        sols = evaluate(q, d)
        assert sols == frozenset(
            {
                Assignment.of({"x": "1", "y": "2"}),
                Assignment.of({"x": "3", "y": "4"}),
            }
        )

    def test_triangle(self):
        q = Q(("R", "xy"), ("S", "yz"), ("T", "zx"))
        d = Database.of({"R": [("1", "2")], "S": [("2", "3")], "T": [("3", "1")]})
        assert count(q, d) == 1

    def test_empty_relation(self):
        q = Q(("R", "xy"), ("S", "yz"))
        d = Database.of({"R": [("1", "2")], "S": []})
        assert count(q, d) == 0

    def test_cross_product_count(self):
        q = Q(("R", "x"), ("S", "y"))
        d = Database.of({"R": [("1",), ("2",)], "S": [("1",), ("2",), ("3",)]})
        assert count(q, d) == 6

    def test_unknown_relation(self):
        with pytest.raises(InvalidInputError):
            evaluate(Q(("R", "x")), Database.of({}))

    def test_repeated_var_in_atom(self):
        q = Q(("R", "xx"))
        d = Database.of({"R": [("1", "1"), ("1", "2")]})
        assert count(q, d) == 1

    @given(seeds)
    @settings(max_examples=40)
    def test_agrees_with_brute_force(self, seed):
        rng = random.Random(seed)
        q, d = random_instance(rng)
        assert evaluate(q, d) == brute_solutions(q, d)


class TestSelfJoins:
    def test_split(self):
        q = Q(("R", "xy"), ("R", "yz"))
        d = Database.of({"R": [("1", "2"), ("2", "3")]})
        q2, d2 = eliminate_self_joins(q, d)
        assert len({a.relation for a in q2.atoms}) == 2
        assert evaluate(q2, d2) == evaluate(q, d)
        assert hypergraph_of(q2) == hypergraph_of(q)

    def test_identity_when_free(self):
        q = Q(("R", "xy"), ("S", "yz"))
        d = Database.of({"R": [], "S": []})
        assert eliminate_self_joins(q, d) == (q, d)

    @given(seeds)
    @settings(max_examples=20)
    def test_counting_preserved(self, seed):
        rng = random.Random(seed)
        q, d = random_instance(rng, max_atoms=4)
        # force a self join by duplicating the first relation symbol
        if len(q.atoms) >= 2:
            atoms = [(a.relation, a.args) for a in q.atoms]
            atoms[1] = (atoms[0][0], atoms[1][1])
            rels = d.relations_dict()
            rels.pop(q.atoms[1].relation, None)
            try:
                q = ConjunctiveQuery.of(atoms)
            except InvalidInputError:
                return  # arity clash; the draw does not make a self-join
            d = Database.of(rels)
        q2, d2 = eliminate_self_joins(q, d)
        assert count(q2, d2) == count(q, d)


class TestQueryFromHypergraph:
    def test_jigsaw22(self):
        q = query_from_hypergraph(jigsaw(2, 2))
        assert len(q.atoms) == 4
        assert all(len(a.args) == 2 for a in q.atoms)
        assert all(len(set(a.args)) == len(a.args) for a in q.atoms)

    def test_single_ternary(self):
        q = query_from_hypergraph(Hypergraph.make([{"a", "b", "c"}]))
        assert len(q.atoms) == 1 and len(q.atoms[0].args) == 3

    def test_subedge_arities(self):
        q = query_from_hypergraph(Hypergraph.make([{"a"}, {"a", "b"}]))
        assert sorted(len(a.args) for a in q.atoms) == [1, 2]


class TestReduction:
    def test_empty_sequence_round_trip(self):
        h = Hypergraph.make([{"a", "b"}, {"b", "c"}])
        q = query_from_hypergraph(h)
        d = Database.of(
            {"E1": [("1", "2"), ("2", "2")], "E2": [("2", "3")]}
        )
        red = reduce_along_dilution(q, d, h, DilutionSequence.for_source(h, ()))
        sols = evaluate(red.query, red.database)
        assert red.pull_back(project(sols, set(red.rename_dict().values()))) == evaluate(q, d)
        assert len(sols) == count(q, d)

    def test_subdivided_cycle_merge(self):
        # 5-cycle merges one subdivision vertex down to a 4-cycle
        h5 = Hypergraph.make(
            [{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "e"}, {"e", "a"}]
        )
        from hgdilute.dilution import MergeOn

        seq = DilutionSequence.for_source(h5, (MergeOn("e"),))
        h4 = apply_sequence(h5, seq)
        q = query_from_hypergraph(h4)
        rng = random.Random(5)
        rels = {
            a.relation: {
                tuple(rng.choice("123") for _ in a.args) for _ in range(6)
            }
            for a in q.atoms
        }
        d = Database.of(rels)
        red = reduce_along_dilution(q, d, h5, seq)
        assert len(red.query.atoms) == 5
        sols_p = evaluate(red.query, red.database)
        sols_q = evaluate(q, d)
        assert red.pull_back(project(sols_p, set(red.rename_dict().values()))) == sols_q
        assert len(sols_p) == len(sols_q)

    def test_fresh_constant_collision_rejected(self):
        h = Hypergraph.make([{"a", "b"}])
        q = query_from_hypergraph(h)
        d = Database.of({"E1": [("_fresh_0", "x")]})
        with pytest.raises(InvalidInputError):
            reduce_along_dilution(q, d, h, DilutionSequence.for_source(h, ()))

    def test_repeated_variable_rejected(self):
        h = Hypergraph.make([{"a"}])
        q = Q(("R", "xx"))
        d = Database.of({"R": [("1", "1")]})
        with pytest.raises(InvalidInputError):
            reduce_along_dilution(q, d, h, DilutionSequence.for_source(h, ()))

    def test_mismatched_hypergraph_rejected(self):
        h = Hypergraph.make([{"a", "b"}, {"b", "c"}])
        q = Q(("R", "xy"))
        d = Database.of({"R": [("1", "2")]})
        with pytest.raises(InvalidInputError):
            reduce_along_dilution(q, d, h, DilutionSequence.for_source(h, ()))

    @given(seeds)
    @settings(max_examples=30)
    def test_random_soundness(self, seed):
        rng = random.Random(seed)
        h = sample_hypergraph(rng, max_vertices=6, max_edges=5, max_degree=2)
        steps = []
        cur = h
        for _ in range(rng.randint(0, 3)):
            options = valid_steps(cur)
            if not options:
                break
            s = rng.choice(options)
            steps.append(s)
            cur = apply_step(cur, s)
        seq = DilutionSequence.for_source(h, steps)
        target = apply_sequence(h, seq)
        covered = set().union(*target.edges) if target.edges else set()
        if covered != set(target.vertices) or not target.edges:
            return
        q = query_from_hypergraph(target)
        dom = ["1", "2", "3"]
        rels = {
            a.relation: {
                tuple(rng.choice(dom) for _ in a.args)
                for _ in range(rng.randint(0, 5))
            }
            for a in q.atoms
        }
        d = Database.of(rels)
        red = reduce_along_dilution(q, d, h, seq)
        sols_q = evaluate(q, d)
        sols_p = evaluate(red.query, red.database)
        pulled = red.pull_back(project(sols_p, set(red.rename_dict().values())))
        assert pulled == sols_q
        assert len(sols_p) == len(sols_q)
        # reserved tokens never leak into the projected solutions
        for s in pulled:
            assert not any(c.startswith("_fresh_") for c in s.as_dict().values())
        for before, after in zip(red.step_sizes, red.step_sizes[1:]):
            assert after <= 8 * max(1, h.max_degree()) * max(before, 1)


class TestCores:
    def test_loop_absorbs(self):
        core = compute_core(Q(("R", "xy"), ("R", "yy")))
        assert [(a.relation, a.args) for a in core.atoms] == [("R", ("y", "y"))]

    def test_disconnected_copy_drops(self):
        core = compute_core(Q(("R", "xy"), ("R", "uv")))
        assert len(core.atoms) == 1

    def test_self_join_free_is_own_core(self):
        q = Q(("R", "xy"), ("S", "yz"))
        assert compute_core(q) == q

    def test_limit(self):
        q = query_from_hypergraph(jigsaw(3, 3))
        with pytest.raises(LimitExceededError):
            compute_core(q, max_vars=8)

    def test_homomorphic_equivalence(self):
        q = Q(("R", "xy"), ("R", "yz"), ("R", "uv"))
        core = compute_core(q)
        assert homomorphically_equivalent(q, core)

    @given(seeds)
    @settings(max_examples=20)
    def test_against_subset_brute_force(self, seed):
        from hgdilute.cq import _homomorphism

        rng = random.Random(seed)
        syms = ["R", "S"]
        atoms = []
        variables = ["x", "y", "z", "u"][: rng.randint(2, 4)]
        for _ in range(rng.randint(1, 4)):
            sym = rng.choice(syms)
            arity = 2
            atoms.append((sym, tuple(rng.choice(variables) for _ in range(arity))))
        try:
            q = ConjunctiveQuery.of(atoms)
        except InvalidInputError:
            return
        core = compute_core(q)
        # brute force: smallest subquery with a homomorphism from q
        best = None
        uniq = sorted(set(q.atoms), key=lambda a: (a.relation, a.args))
        for r in range(1, len(uniq) + 1):
            for combo in itertools.combinations(uniq, r):
                if _homomorphism(q.atoms, combo) is not None:
                    best = combo
                    break
            if best:
                break
        assert len(core.atoms) == len(best)
        assert homomorphically_equivalent(q, core)


class TestSemanticWidth:
    def test_two_copies(self):
        assert semantic_ghw(Q(("R", "xy"), ("R", "uv"))).width == 1

    def test_acyclic(self):
        assert semantic_ghw(Q(("R", "xy"), ("S", "yz"))).width == 1

    def test_jigsaw22_query(self):
        q = query_from_hypergraph(jigsaw(2, 2))
        assert semantic_ghw(q).width == 2

    def test_equals_core_width(self):
        q = Q(("R", "xy"), ("R", "yz"), ("S", "zx"), ("S", "uu"))
        core = compute_core(q)
        assert semantic_ghw(q).width == exact_ghw(hypergraph_of(core))[0].width
