"""Tests for the instance families and their formula ground truth."""

import json
from fractions import Fraction

import numpy as np
import pytest

import degest.generators as generators
from degest.generators import (
    GeneratedInstance,
    InfeasibleParameterError,
    gen_clique_matching,
    gen_er,
    gen_forest_union,
    gen_heavy_core,
    gen_lb_pair,
    write_instance_files,
)
from degest.graph import ground_truth, load_edge_list
from degest.graph import _arboricity_exact


# ---------------------------------------------------------- clique_matching


def test_clique_matching_small():
    inst = gen_clique_matching(10, 4, 1, seed=0)
    g = inst.graph
    assert g.n == 10
    assert g.m == 9  # C(4,2) + 3 matching edges
    assert inst.truth.avg_degree == Fraction(9, 5)
    assert sorted(g.degrees.tolist()) == [1] * 6 + [3] * 4
    assert inst.truth.arboricity_lower == inst.truth.arboricity_upper == 2
    assert inst.truth.degeneracy == 3


def test_clique_matching_formula_truth_matches_exact():
    for n, s, k, seed in [(10, 4, 1, 3), (12, 5, 2, 4), (8, 2, 1, 5), (6, 3, 2, 6)]:
        inst = gen_clique_matching(n, s, k, seed)
        t = ground_truth(inst.graph)
        assert inst.truth.avg_degree == t.avg_degree
        assert inst.truth.arboricity_lower == t.arboricity_lower
        assert inst.truth.arboricity_upper == t.arboricity_upper
        assert inst.truth.degeneracy == t.degeneracy


def test_clique_matching_pure_matching():
    inst = gen_clique_matching(4, 2, 0, seed=1)
    assert inst.graph.m == 2
    assert inst.truth.degeneracy == 1
    assert inst.truth.arboricity_lower == 1


def test_clique_matching_parity_error():
    with pytest.raises(InfeasibleParameterError, match="odd"):
        gen_clique_matching(5, 4, 1, seed=0)
    with pytest.raises(InfeasibleParameterError):
        gen_clique_matching(7, 4, 2, seed=0)  # cliques do not fit
    with pytest.raises(InfeasibleParameterError):
        gen_clique_matching(8, 1, 1, seed=0)  # clique too small


def test_clique_matching_seed_permutes_ids():
    a = gen_clique_matching(32, 4, 3, seed=1)
    b = gen_clique_matching(32, 4, 3, seed=2)
    assert a.graph.edges.tolist() != b.graph.edges.tolist()
    assert sorted(a.graph.degrees.tolist()) == sorted(b.graph.degrees.tolist())
    again = gen_clique_matching(32, 4, 3, seed=1)
    assert again.graph.edges.tolist() == a.graph.edges.tolist()


# --------------------------------------------------------------- heavy_core


def test_heavy_core_with_padding():
    inst = gen_heavy_core(20, 4, 2, matching_edges=3, seed=7)
    g = inst.graph
    assert g.m == 15
    assert sorted(g.degrees.tolist()) == [0] * 6 + [1] * 6 + [3] * 8
    assert inst.truth.avg_degree == Fraction(3, 2)
    assert inst.truth.arboricity_lower == 2
    assert inst.truth.degeneracy == 3
    t = ground_truth(g)
    assert (t.arboricity_lower, t.degeneracy) == (2, 3)


def test_heavy_core_infeasible():
    with pytest.raises(InfeasibleParameterError):
        gen_heavy_core(10, 4, 2, matching_edges=2, seed=0)  # 8 + 4 > 10


# ------------------------------------------------------------------ lb_pair


def test_lb_pair_frozen_example():
    single, double = gen_lb_pair(2**20, 8, 64, seed=0)
    assert single.params["k"] == 2048
    assert single.graph.n == double.graph.n == 2**20
    assert single.truth.avg_degree == Fraction(35, 4)  # 8.75
    assert double.truth.avg_degree == Fraction(33, 2)  # 16.5
    assert single.params["case"] == "single"
    assert double.params["case"] == "double"


def test_lb_pair_exact_ratio_identity():
    for n, d, alpha, seed in [(10**5, 16, 64, 1), (2**16, 4, 16, 2), (50000, 5, 32, 3)]:
        single, double = gen_lb_pair(n, d, alpha, seed)
        d1, d2 = single.truth.avg_degree, double.truth.avg_degree
        assert d2 == 2 * d1 - 1
        ratio = d2 / d1
        assert Fraction(3, 2) <= ratio < 2
        # no isolated vertices in either instance
        assert int(single.graph.degrees.min()) >= 1
        assert int(double.graph.degrees.min()) >= 1


def test_lb_pair_core_counts():
    single, double = gen_lb_pair(10**5, 16, 64, seed=4)
    k = single.params["k"]
    assert k == 391
    assert single.truth.avg_degree == Fraction(2 * (391 * 2016 + (10**5 - 391 * 64) // 2), 10**5)
    # degree multisets: clique vertices at alpha-1, the rest at 1
    degs = np.sort(single.graph.degrees)
    assert int(degs[-1]) == 63
    assert (degs == 63).sum() == 391 * 64
    assert (degs == 1).sum() == 10**5 - 391 * 64
    assert (np.sort(double.graph.degrees) == 63).sum() == 2 * 391 * 64


def test_lb_pair_parity_adjustment():
    single, _ = gen_lb_pair(10044, 4, 17, seed=0)
    assert single.params["k_adjusted"] is True
    assert (single.params["k"] * 17) % 2 == 0
    assert single.params["k"] in (138, 140)


def test_lb_pair_odd_n_rounds_down():
    single, double = gen_lb_pair(10**5 + 1, 16, 64, seed=0)
    assert single.params["n_use"] == 10**5
    assert single.graph.n == double.graph.n == 10**5


def test_lb_pair_regime_errors():
    with pytest.raises(InfeasibleParameterError, match="d >= 4"):
        gen_lb_pair(10**5, 3, 64, seed=0)
    with pytest.raises(InfeasibleParameterError, match="alpha/4"):
        gen_lb_pair(10**5, 20, 64, seed=0)
    with pytest.raises(InfeasibleParameterError):
        gen_lb_pair(100, 4, 64, seed=0)  # k rounds to 0


# ------------------------------------------------------------- forest_union


def test_forest_union_edge_count_and_truth():
    inst = gen_forest_union(50, 3, seed=0)
    assert inst.graph.m == 3 * 49
    assert inst.params["dropped"] == 0
    assert inst.truth.arboricity_lower == inst.truth.arboricity_upper == 3
    assert inst.truth.degeneracy <= 2 * 3 - 1
    assert inst.truth.avg_degree == Fraction(2 * 147, 50)


def test_forest_union_exact_arboricity_small():
    for seed in range(5):
        inst = gen_forest_union(8, 2, seed=seed)
        if inst.params["dropped"] == 0:
            assert _arboricity_exact(inst.graph) == 2


def test_forest_union_tiny_duplicate_skip():
    inst = gen_forest_union(2, 2, seed=0)
    assert inst.graph.m == 1  # the only possible edge
    assert inst.params["dropped"] == 1
    assert inst.truth.arboricity_lower == 1


def test_forest_union_connected_layers():
    # every layer is a spanning structure, so the union is connected:
    # n-1 <= m <= alpha*(n-1) and no isolated vertices
    inst = gen_forest_union(200, 4, seed=9)
    assert inst.graph.m == 4 * 199
    assert int(inst.graph.degrees.min()) >= 1


def test_forest_union_validation():
    with pytest.raises(InfeasibleParameterError):
        gen_forest_union(1, 2, seed=0)
    with pytest.raises(InfeasibleParameterError):
        gen_forest_union(10, 0, seed=0)


# --------------------------------------------------------------------- er


def test_er_edge_count_binomial():
    inst = gen_er(10**4, 1e-3, seed=0)
    npairs = 10**4 * (10**4 - 1) // 2
    mean = npairs * 1e-3
    sd = np.sqrt(npairs * 1e-3 * (1 - 1e-3))
    assert abs(inst.graph.m - mean) < 4 * sd
    assert inst.truth.avg_degree == Fraction(2 * inst.graph.m, 10**4)


def test_er_pair_marginals():
    # each pair is present with probability p
    counts = {}
    trials = 300
    for seed in range(trials):
        g = gen_er(5, 0.5, seed=seed).graph
        for u, v in g.edges.tolist():
            counts[(u, v)] = counts.get((u, v), 0) + 1
    assert len(counts) == 10
    band = 4 * np.sqrt(trials * 0.25)
    for c in counts.values():
        assert abs(c - trials * 0.5) < band


def test_er_sparse_path(monkeypatch):
    monkeypatch.setattr(generators, "_DENSE_PAIR_LIMIT", 1)
    n, p, trials = 40, 0.02, 200
    npairs = n * (n - 1) // 2
    total = 0
    low_half = 0
    for seed in range(trials):
        g = gen_er(n, p, seed=seed).graph
        # build_graph already rejects duplicates; check the count and spread
        total += g.m
        codes = g.edges[:, 0] * n + g.edges[:, 1]
        low_half += int((codes < n * n // 2).sum())
    mean = trials * npairs * p
    assert abs(total - mean) < 4 * np.sqrt(trials * npairs * p * (1 - p))
    # uniform pairs put about half the mass on low vertex codes
    frac_low = sum(
        1 for i in range(n) for j in range(i + 1, n) if i * n + j < n * n // 2
    ) / npairs
    assert abs(low_half - total * frac_low) < 4 * np.sqrt(total * 0.25) + 1


def test_er_edge_cases():
    assert gen_er(50, 0.0, seed=0).graph.m == 0
    assert gen_er(6, 1.0, seed=0).graph.m == 15
    assert gen_er(1, 0.7, seed=0).graph.m == 0
    with pytest.raises(InfeasibleParameterError):
        gen_er(10, 1.5, seed=0)


def test_er_deterministic():
    a = gen_er(100, 0.05, seed=42)
    b = gen_er(100, 0.05, seed=42)
    assert a.graph.edges.tolist() == b.graph.edges.tolist()


# ------------------------------------------------------------------- files


def test_write_instance_files(tmp_path):
    inst = gen_clique_matching(10, 4, 1, seed=0)
    edge_path, meta_path = write_instance_files(inst, tmp_path / "out" / "cm")
    g = load_edge_list(edge_path)
    assert g.m == inst.graph.m
    meta = json.loads(meta_path.read_text())
    assert meta["family"] == "clique_matching"
    assert meta["params"] == {"n": 10, "s": 4, "k": 1}
    assert meta["seed"] == 0
    assert meta["truth"]["avg_degree"] == [9, 5]
    assert meta["truth"]["arboricity_lower"] == 2
    assert meta["truth"]["degeneracy"] == 3
