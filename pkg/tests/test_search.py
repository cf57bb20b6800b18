import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import _brute
from conftest import path_tree, random_tree, star_tree
from treecut import (
    Forest,
    InvalidInput,
    LambdaTooSmall,
    NotForestAfterDeletion,
    PrecollisionError,
    ProblemSpec,
    UnknownVertexId,
    WeightedGraph,
    build_rooted_tree,
    decide,
    decide_forest,
    decide_semisupervised,
    k_max,
    min_xi,
    oracle_min_xi,
    solve,
    tree_as_graph,
    validate_subpartition,
)
from treecut.search import _farey_predecessor


class TestFareyPredecessor:
    @pytest.mark.parametrize("x,limit,expected", [
        (Fraction(1), 4, Fraction(3, 4)),
        (Fraction(1, 2), 4, Fraction(1, 3)),
        (Fraction(2, 3), 5, Fraction(3, 5)),
        (Fraction(3), 1, Fraction(2)),
        (Fraction(0), 7, None),
    ])
    def test_known_values(self, x, limit, expected):
        assert _farey_predecessor(x, limit) == expected

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 400), st.integers(1, 400), st.integers(1, 40))
    def test_is_the_farey_neighbor(self, p, q, limit):
        x = Fraction(p, q)
        if x.denominator > limit:
            return
        prev = _farey_predecessor(x, limit)
        assert prev < x
        assert prev.denominator <= limit
        # nothing with a small denominator fits strictly between
        for den in range(1, limit + 1):
            num = (x.numerator * den - 1) // x.denominator
            assert Fraction(num, den) <= prev or Fraction(num, den) >= x


class TestProbeTripwire:
    def test_inconsistent_decisions_abort_the_search(self):
        from treecut import MonotonicityViolation
        from treecut.search import _Prober

        # yes at 1/2 but no at 3/4 can only mean a solver bug
        broken = _Prober(lambda xi: xi == Fraction(1, 2))
        assert broken(Fraction(1, 2))
        with pytest.raises(MonotonicityViolation):
            broken(Fraction(3, 4))

    def test_caches_and_counts_probes(self):
        from treecut.search import _Prober

        calls = []
        prober = _Prober(lambda xi: (calls.append(xi), True)[1])
        prober(Fraction(1))
        prober(Fraction(1))
        assert prober.calls == 1
        assert calls == [Fraction(1)]


class TestMinXi:
    def test_two_vertex_path(self):
        res = min_xi(path_tree(("a", "b")), 2, 0)
        assert res.xi_star == 1
        assert res.witness is not None
        assert res.mode == "exact"
        assert res.probes >= 3

    def test_star_whole_tree(self):
        assert min_xi(star_tree(), 1, 1).xi_star == 0

    def test_star_all_singletons(self):
        res = min_xi(star_tree(), 4, 0)
        assert res.xi_star == 3
        assert res.witness.max_expansion == 3

    def test_pigeonhole_infeasible(self):
        res = min_xi(star_tree(), 5, 0)
        assert res.xi_star is None
        assert not res.feasible
        assert res.witness is None

    def test_matches_oracle_on_random_instances(self):
        rng = random.Random(41)
        for _ in range(30):
            n = rng.randint(1, 8)
            t = random_tree(rng, n)
            kappa = rng.randint(1, 3)
            lam = rng.randint(0, 2)
            expected = oracle_min_xi(t, kappa, lam)
            got = min_xi(t, kappa, lam)
            assert got.xi_star == expected
            if expected is not None:
                spec = ProblemSpec(expected, kappa, lam)
                assert validate_subpartition(t, spec, got.witness) == []
                assert got.witness.max_expansion == expected

    def test_tolerance_mode_brackets_the_optimum(self):
        t = star_tree()
        res = min_xi(t, 4, 0, mode="tol", tol=Fraction(1, 64))
        assert res.mode == "tol"
        assert Fraction(3) <= res.xi_star <= Fraction(3) + Fraction(1, 64)
        assert decide(t, ProblemSpec(res.xi_star, 4, 0))
        assert res.witness is not None

    def test_tolerance_mode_needs_tol(self):
        with pytest.raises(InvalidInput):
            min_xi(star_tree(), 2, 0, mode="tol")
        with pytest.raises(InvalidInput):
            min_xi(star_tree(), 2, 0, mode="nonsense")

    def test_exact_on_rational_weights(self):
        t = build_rooted_tree([("a", "1/3"), ("b", "2/5")], [("a", "b", "7/11")], "a")
        res = min_xi(t, 2, 0)
        assert res.xi_star == oracle_min_xi(t, 2, 0)
        # the optimum is an actual expansion: 7/11 over min(1/3, 2/5)
        assert res.xi_star == Fraction(7, 11) / Fraction(1, 3)


class TestKMax:
    def test_unit_star(self):
        assert k_max(star_tree(), 1, 0) == 3

    def test_everything_splits_at_huge_threshold(self):
        rng = random.Random(42)
        for _ in range(8):
            t = random_tree(rng, rng.randint(1, 9))
            bound = t.total_edge_cost() / t.min_weight()
            assert k_max(t, bound, 0) == t.vertex_count

    def test_two_vertex_path_cannot_split_cheaply(self):
        assert k_max(path_tree(("a", "b")), Fraction(1, 2), 0) == 1

    def test_matches_scan_of_decisions(self):
        rng = random.Random(43)
        for _ in range(12):
            n = rng.randint(1, 8)
            t = random_tree(rng, n)
            xi = Fraction(rng.randint(0, 5), rng.randint(1, 3))
            lam = rng.randint(0, 2)
            best = 0
            for k in range(1, n + 1):
                if decide(t, ProblemSpec(xi, k, lam)):
                    best = k
            assert k_max(t, xi, lam) == best

    def test_variant_flags_flow_through(self):
        # light hub, heavy leaves: three singleton parts need the hub
        # uncovered, so forbidding it lowers the best part count
        t = build_rooted_tree(
            [("b", 1), ("a", 4), ("c", 4), ("d", 4)],
            [("b", "a", 1), ("b", "c", 1), ("b", "d", 1)], "b")
        xi = Fraction(1, 4)
        assert k_max(t, xi, 1) == 3
        # covered hub caps the count at 2: {b,a,c} u {d} works, 3 parts don't
        assert k_max(t, xi, 1, forbidden_outliers=frozenset({"b"})) == 2
        # potentials make every nonempty boundary strictly pricier
        heavy = build_rooted_tree(
            [("b", 1, 10), ("a", 4, 10), ("c", 4, 10), ("d", 4, 10)],
            [("b", "a", 1), ("b", "c", 1), ("b", "d", 1)], "b")
        assert k_max(heavy, xi, 1, use_potentials=True) == 0


class TestForest:
    def _two_edges(self):
        t1 = build_rooted_tree([("a", 1), ("b", 1)], [("a", "b", 1)], "a")
        t2 = build_rooted_tree([("c", 1), ("d", 1)], [("c", "d", 1)], "c")
        return Forest((t1, t2))

    def test_components_stay_whole_at_zero(self):
        ok, wit = decide_forest(self._two_edges(), ProblemSpec(0, 2, 0))
        assert ok
        assert {frozenset(p) for p in wit.parts} == {
            frozenset({"a", "b"}), frozenset({"c", "d"})}

    def test_splitting_an_edge_costs_one(self):
        ok, _ = decide_forest(self._two_edges(), ProblemSpec(Fraction(1, 2), 3, 0))
        assert not ok
        ok2, wit2 = decide_forest(self._two_edges(), ProblemSpec(1, 3, 0))
        assert ok2
        assert len(wit2.parts) == 3

    def test_single_tree_forest_matches_tree_tables(self):
        rng = random.Random(44)
        for _ in range(10):
            t = random_tree(rng, rng.randint(1, 8))
            xi = Fraction(rng.randint(0, 4), rng.randint(1, 3))
            spec = ProblemSpec(xi, min(3, t.vertex_count), 2)
            ok, _ = decide_forest(Forest((t,)), spec)
            tab = solve(t, spec, record_choices=False)
            assert ok == tab.feasible
            # whole grid agrees cell for cell
            from treecut.search import _tree_spec
            from treecut.solver import root_feasibility
            assert root_feasibility(t, _tree_spec(spec, t)) == [
                list(r) for r in tab.root_row()]

    def test_budget_splits_across_trees(self):
        forest = self._two_edges()
        # two parts plus two outliers: one whole component and one emptied
        ok, wit = decide_forest(forest, ProblemSpec(0, 1, 2))
        assert ok
        assert len(wit.residue) <= 2

    def test_overlapping_ids_rejected(self):
        t1 = build_rooted_tree([("a", 1)], [], "a")
        t2 = build_rooted_tree([("a", 1)], [], "a")
        with pytest.raises(InvalidInput):
            Forest((t1, t2))

    def test_min_xi_over_forest(self):
        res = min_xi(self._two_edges(), 3, 0)
        assert res.xi_star == 1
        assert len(res.witness.parts) == 3
        res4 = min_xi(self._two_edges(), 4, 0)
        assert res4.xi_star == 1


class TestSemiSupervised:
    def _path_graph(self):
        return WeightedGraph([("a", 1, 0), ("b", 1, 0), ("c", 1, 0)],
                             [("a", "b", 1, None), ("b", "c", 1, None)])

    def test_required_outlier_becomes_potential(self):
        ok, wit = decide_semisupervised(self._path_graph(), {"b"}, frozenset(),
                                        1, 2, 1)
        assert ok
        assert wit.residue == frozenset({"b"})
        assert {frozenset(p) for p in wit.parts} == {
            frozenset({"a"}), frozenset({"c"})}
        assert wit.max_expansion == 1

    def test_threshold_still_binds(self):
        ok, _ = decide_semisupervised(self._path_graph(), {"b"}, frozenset(),
                                      Fraction(1, 2), 2, 1)
        assert not ok

    def test_budget_must_cover_required_set(self):
        with pytest.raises(LambdaTooSmall):
            decide_semisupervised(self._path_graph(), {"b"}, frozenset(), 1, 2, 0)

    def test_sets_must_be_disjoint(self):
        with pytest.raises(PrecollisionError):
            decide_semisupervised(self._path_graph(), {"b"}, {"b"}, 1, 1, 1)

    def test_unknown_vertex_rejected(self):
        with pytest.raises(UnknownVertexId):
            decide_semisupervised(self._path_graph(), {"zz"}, frozenset(), 1, 1, 1)

    def test_deletion_must_leave_forest(self):
        square = WeightedGraph(
            [(v, 1, 0) for v in "abcd"],
            [("a", "b", 1, None), ("b", "c", 1, None),
             ("c", "d", 1, None), ("d", "a", 1, None)])
        with pytest.raises(NotForestAfterDeletion):
            decide_semisupervised(square, frozenset(), frozenset(), 1, 2, 0)
        # removing one vertex of the cycle fixes it
        ok, _ = decide_semisupervised(square, {"a"}, frozenset(), 2, 1, 1)
        assert ok

    def test_degenerate_case_equals_tree_decision(self):
        rng = random.Random(45)
        for _ in range(12):
            t = random_tree(rng, rng.randint(2, 8))
            graph = tree_as_graph(t)
            xi = Fraction(rng.randint(0, 4), rng.randint(1, 3))
            kappa = rng.randint(1, 3)
            lam = rng.randint(0, 2)
            ok, wit = decide_semisupervised(graph, frozenset(), frozenset(),
                                            xi, kappa, lam)
            assert ok == decide(t, ProblemSpec(xi, kappa, lam))
            if ok:
                spec = ProblemSpec(xi, kappa, lam)
                assert validate_subpartition(t, spec, wit) == []

    def test_matches_graph_brute_force(self):
        rng = random.Random(46)
        for _ in range(15):
            graph, s1, s2 = _random_semisup_instance(rng)
            kappa = rng.randint(1, 3)
            lam = len(s1) + rng.randint(0, 2)
            gm = _brute.graph_masks(graph)
            for xi in (Fraction(0), Fraction(1, 3), Fraction(1), Fraction(3)):
                expected = _brute.graph_brute_decide(graph, s1, s2, xi, kappa,
                                                     lam, gm)
                got, wit = decide_semisupervised(graph, s1, s2, xi, kappa, lam)
                assert got == expected
                if got:
                    assert s1 <= wit.residue
                    assert not (s2 & wit.residue)
                    assert len(wit.residue) <= lam
                    assert len(wit.parts) == kappa
                    assert all(graph.expansion(p) <= xi for p in wit.parts)


def _random_semisup_instance(rng):
    """Forest plus a deleted set wired back with arbitrary extra edges."""
    n = rng.randint(3, 8)
    ids = [f"v{i}" for i in range(n)]
    s1 = set(rng.sample(ids, rng.randint(0, 2)))
    rest = [v for v in ids if v not in s1]
    edges = []
    # random forest on the survivors
    for i in range(1, len(rest)):
        if rng.random() < 0.8:
            j = rng.randrange(i)
            edges.append((rest[j], rest[i], rng.randint(1, 4), None))
    # arbitrary edges incident to the deleted set
    for v in s1:
        for u in ids:
            if u != v and rng.random() < 0.5:
                key = {e[:2] for e in edges} | {e[1::-1] for e in edges}
                if (v, u) not in key and (u, v) not in key:
                    edges.append((v, u, rng.randint(1, 4), None))
    graph = WeightedGraph([(v, rng.randint(1, 4), 0) for v in ids], edges)
    s2 = set(rng.sample(rest, rng.randint(0, min(2, len(rest)))))
    return graph, frozenset(s1), frozenset(s2)
