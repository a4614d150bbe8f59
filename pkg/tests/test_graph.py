"""Tests for the graph container, partitions and exact ground truth."""

from fractions import Fraction

import numpy as np
import pytest

from degest.graph import (
    EdgeListFormatError,
    GraphError,
    build_graph,
    degeneracy,
    ground_truth,
    is_good_threshold,
    load_edge_list,
    partition_by_threshold,
    save_edge_list,
)
from degest.graph import _arboricity_exact


def star(k):
    """K_{1,k}: vertex 0 joined to 1..k."""
    return build_graph(k + 1, [(0, i) for i in range(1, k + 1)])


def clique(s):
    return build_graph(s, [(i, j) for i in range(s) for j in range(i + 1, s)])


def path(k):
    return build_graph(k, [(i, i + 1) for i in range(k - 1)])


def cycle(k):
    return build_graph(k, [(i, (i + 1) % k) for i in range(k)])


def random_graph(rng, n_max=12):
    n = int(rng.integers(2, n_max + 1))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = rng.random(len(pairs)) < rng.uniform(0.1, 0.9)
    return build_graph(n, [p for p, k in zip(pairs, keep) if k])


# ---------------------------------------------------------------- building


def test_build_basic():
    g = build_graph(3, [(0, 1), (1, 2)])
    assert g.n == 3 and g.m == 2
    assert g.degrees.tolist() == [1, 2, 1]
    assert g.degree(1) == 2


def test_build_normalises_endpoint_order():
    g = build_graph(3, [(2, 0), (1, 0)])
    assert g.edges.tolist() == [[0, 2], [0, 1]]  # input order kept, rows sorted


def test_build_empty_edge_list():
    g = build_graph(4, [])
    assert g.m == 0
    assert g.degrees.tolist() == [0, 0, 0, 0]


def test_build_rejects_bad_input():
    with pytest.raises(GraphError):
        build_graph(0, [])
    with pytest.raises(GraphError, match="out of range"):
        build_graph(3, [(0, 3)])
    with pytest.raises(GraphError, match="out of range"):
        build_graph(3, [(-1, 2)])
    with pytest.raises(GraphError, match="self-loop"):
        build_graph(3, [(1, 1)])
    with pytest.raises(GraphError, match="duplicate"):
        build_graph(3, [(0, 1), (1, 2), (1, 0)])  # reversed duplicate
    with pytest.raises(GraphError, match="shape"):
        build_graph(3, [(0, 1, 2)])


def test_duplicate_error_reports_edge_index():
    with pytest.raises(GraphError) as exc:
        build_graph(4, [(0, 1), (2, 3), (1, 0)])
    assert exc.value.edge_index == 2


# ---------------------------------------------------------------- adjacency


def test_neighbours_sorted_ascending():
    g = build_graph(5, [(3, 1), (3, 0), (3, 4), (3, 2)])
    assert g.neighbours(3).tolist() == [0, 1, 2, 4]


def test_neighbour_at():
    g = path(3)  # 0 - 1 - 2
    assert g.neighbour_at(1, 0) == 0
    assert g.neighbour_at(1, 1) == 2
    assert g.neighbour_at(1, 2) is None
    assert g.neighbour_at(0, 0) == 1
    assert g.neighbour_at(0, 1) is None
    with pytest.raises(GraphError):
        g.neighbour_at(1, -1)
    with pytest.raises(GraphError):
        g.neighbour_at(3, 0)


def test_has_edge():
    g = build_graph(4, [(0, 1), (2, 3)])
    assert g.has_edge(0, 1) and g.has_edge(1, 0)
    assert g.has_edge(3, 2)
    assert not g.has_edge(0, 2)
    assert not g.has_edge(1, 1)
    with pytest.raises(GraphError):
        g.has_edge(0, 4)


def test_arrays_are_read_only():
    g = path(3)
    with pytest.raises(ValueError):
        g.edges[0, 0] = 5
    with pytest.raises(ValueError):
        g.degrees[0] = 9


# ---------------------------------------------------------------- partition


def test_star_partition_at_tau_1():
    g = star(4)
    part = partition_by_threshold(g, 1)
    assert part.heavy.tolist() == [0]
    assert part.light.tolist() == [1, 2, 3, 4]
    assert (part.e_hh, part.e_ll, part.e_hl) == (0, 0, 4)
    assert part.m_heavy == 4
    assert part.m_light == 4
    assert part.rho_light == Fraction(1, 2)


def test_partition_all_light_at_max_degree():
    g = star(4)
    part = partition_by_threshold(g, 4)
    assert part.heavy.size == 0
    assert part.rho_light == Fraction(1)


def test_partition_empty_graph_convention():
    g = build_graph(3, [])
    assert partition_by_threshold(g, 0).rho_light == Fraction(1)


def test_partition_identities_random():
    rng = np.random.default_rng(7)
    for _ in range(40):
        g = random_graph(rng)
        tau = int(rng.integers(0, g.n))
        part = partition_by_threshold(g, tau)
        assert part.e_hh + part.e_ll + part.e_hl == g.m
        assert part.m_light + part.m_heavy == 2 * g.m
        assert part.heavy.size + part.light.size == g.n
        # brute-force the classification
        hs = {v for v in range(g.n) if g.degree(v) > tau}
        assert set(part.heavy.tolist()) == hs
        e_hl = sum(1 for u, v in g.edges.tolist() if (u in hs) != (v in hs))
        assert part.e_hl == e_hl
        assert 0 <= part.rho_light <= 1


def test_m_light_monotone_in_threshold():
    rng = np.random.default_rng(11)
    for _ in range(20):
        g = random_graph(rng)
        vals = [partition_by_threshold(g, t).m_light for t in range(g.n)]
        assert vals == sorted(vals)


def test_good_threshold():
    assert is_good_threshold(star(4), 1)  # rho = 1/2
    assert is_good_threshold(star(4), 4)  # everything light
    # K6 with a single pendant: only the pendant is light at tau=2
    edges = [(i, j) for i in range(6) for j in range(i + 1, 6)] + [(0, 6)]
    g = build_graph(7, edges)
    assert not is_good_threshold(g, 2)
    with pytest.raises(GraphError):
        is_good_threshold(build_graph(2, []), 1)


# ---------------------------------------------------------------- degeneracy


def test_degeneracy_known_values():
    assert degeneracy(path(5)) == 1
    assert degeneracy(cycle(4)) == 2
    assert degeneracy(clique(4)) == 3
    assert degeneracy(star(7)) == 1
    kbb = build_graph(6, [(i, j) for i in range(3) for j in range(3, 6)])
    assert degeneracy(kbb) == 3  # K_{3,3}
    assert degeneracy(build_graph(4, [])) == 0


def brute_degeneracy(g):
    """max over induced subgraphs of the minimum degree (the definition)."""
    best = 0
    edges = g.edges.tolist()
    for mask in range(1, 1 << g.n):
        deg = {v: 0 for v in range(g.n) if mask >> v & 1}
        for u, v in edges:
            if mask >> u & 1 and mask >> v & 1:
                deg[u] += 1
                deg[v] += 1
        best = max(best, min(deg.values()))
    return best


def test_degeneracy_matches_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(25):
        g = random_graph(rng, n_max=9)
        assert degeneracy(g) == brute_degeneracy(g)


# ---------------------------------------------------------------- arboricity


def test_arboricity_known_values():
    assert _arboricity_exact(clique(4)) == 2
    assert _arboricity_exact(clique(5)) == 3
    assert _arboricity_exact(path(6)) == 1
    assert _arboricity_exact(cycle(4)) == 2
    assert _arboricity_exact(star(9)) == 1
    petersen = build_graph(
        10,
        [(i, (i + 1) % 5) for i in range(5)]
        + [(i, i + 5) for i in range(5)]
        + [(5 + i, 5 + (i + 2) % 5) for i in range(5)],
    )
    assert _arboricity_exact(petersen) == 2


def brute_arboricity(g):
    edges = g.edges.tolist()
    best = 0
    for mask in range(1, 1 << g.n):
        k = bin(mask).count("1")
        if k < 2:
            continue
        ms = sum(1 for u, v in edges if mask >> u & 1 and mask >> v & 1)
        best = max(best, -(-ms // (k - 1)))
    return best


def test_arboricity_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(25):
        g = random_graph(rng, n_max=9)
        if g.m:
            assert _arboricity_exact(g) == brute_arboricity(g)


# ---------------------------------------------------------------- ground truth


def test_ground_truth_star():
    t = ground_truth(star(4), tau=1)
    assert t.avg_degree == Fraction(8, 5)
    assert t.rho_light == Fraction(1, 2)
    assert t.tau == 1
    assert t.arboricity_lower == t.arboricity_upper == 1
    assert t.degeneracy == 1
    assert t.arboricity_exact == 1


def test_ground_truth_default_tau_is_max_degree():
    t = ground_truth(star(4))
    assert t.tau == 4
    assert t.rho_light == Fraction(1)


def test_ground_truth_edgeless():
    t = ground_truth(build_graph(5, []))
    assert t.avg_degree == 0
    assert t.rho_light == Fraction(1)
    assert t.arboricity_lower == t.arboricity_upper == 0
    assert t.degeneracy == 0


def test_ground_truth_bounds_large_n():
    # force the bound path by lowering the exact cutoff
    g = clique(6)
    t = ground_truth(g, exact_arboricity_limit=4)
    assert t.arboricity_lower <= 3 <= t.arboricity_upper
    assert t.arboricity_upper == t.degeneracy == 5
    assert t.arboricity_exact is None


def test_sandwich_and_density_invariants():
    rng = np.random.default_rng(13)
    for _ in range(40):
        g = random_graph(rng)
        if g.m == 0:
            continue
        t = ground_truth(g)
        a = t.arboricity_exact
        assert a is not None
        assert a <= t.degeneracy <= 2 * a - 1
        assert g.m <= g.n * a
        assert t.avg_degree == Fraction(2 * g.m, g.n)


# ---------------------------------------------------------------- file io


def test_edge_list_round_trip(tmp_path):
    rng = np.random.default_rng(17)
    for i in range(10):
        g = random_graph(rng)
        p = tmp_path / f"g{i}.edges"
        save_edge_list(p, g)
        h = load_edge_list(p)
        assert h.n == g.n and h.m == g.m
        assert h.edges.tolist() == g.edges.tolist()


def test_edge_list_format(tmp_path):
    g = build_graph(3, [(2, 1), (0, 1)])
    p = tmp_path / "g.edges"
    save_edge_list(p, g)
    assert p.read_text() == "3 2\n1 2\n0 1\n"


def test_load_rejects_malformed(tmp_path):
    cases = [
        ("", 1),
        ("3\n", 1),
        ("3 x\n", 1),
        ("3 1\n", 2),  # promised an edge, none given
        ("3 1\n0 1\n0 2\n", 3),  # extra line
        ("3 1\n0\n", 2),
        ("3 1\na b\n", 2),
        ("3 2\n0 1\n1 3\n", 3),  # endpoint out of range -> line of the bad edge
        ("3 2\n0 1\n1 0\n", 3),  # duplicate
    ]
    for text, line_no in cases:
        p = tmp_path / "bad.edges"
        p.write_text(text)
        with pytest.raises(EdgeListFormatError) as exc:
            load_edge_list(p)
        assert exc.value.line_no == line_no, text


def test_load_tolerates_blank_lines(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("3 2\n\n0 1\n\n1 2\n\n")
    g = load_edge_list(p)
    assert g.m == 2
