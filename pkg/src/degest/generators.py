"""Synthetic instance families with formula-derived ground truth.

Five families:

* ``gen_clique_matching`` -- k disjoint s-cliques plus a perfect matching
  on everything else; the classic heavy-core shape.
* ``gen_heavy_core``      -- same cliques, but a partial matching and
  isolated padding, for sweeps that need the light mass pinned.
* ``gen_lb_pair``         -- the indistinguishability pair: k vs 2k
  cliques at equal n, whose true averages sit at ratio 2 - 1/d1.
* ``gen_forest_union``    -- union of alpha random spanning trees, so the
  arboricity is (normally) exactly alpha.
* ``gen_er``              -- G(n, p) with an exact Binomial edge count.

Vertex ids are always shuffled by a seeded permutation so block
structure never leaks into id order.  Ground truth comes from closed
forms where the construction pins it down, otherwise from the exact
routines in :mod:`degest.graph`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .graph import (
    Graph,
    GroundTruth,
    build_graph,
    degeneracy,
    ground_truth,
    save_edge_list,
)

__all__ = [
    "InfeasibleParameterError",
    "GeneratedInstance",
    "gen_clique_matching",
    "gen_heavy_core",
    "gen_lb_pair",
    "gen_forest_union",
    "gen_er",
    "truth_to_json",
    "write_instance_files",
]

_DENSE_PAIR_LIMIT = 1 << 22  # materialise all vertex pairs up to this count


class InfeasibleParameterError(ValueError):
    """Requested parameters admit no instance of the family."""


@dataclass(frozen=True)
class GeneratedInstance:
    family: str
    params: dict
    seed: int
    graph: Graph
    truth: GroundTruth


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def _clique_block_edges(n, s, k, matching_edges, rng):
    """Edges of k s-cliques then a matching, on permuted ids."""
    perm = rng.permutation(n)
    chunks = []
    if k:
        iu, ju = np.triu_indices(s, 1)
        off = (np.arange(k) * s)[:, None]
        chunks.append(
            np.stack(
                [(iu[None, :] + off).ravel(), (ju[None, :] + off).ravel()], axis=1
            )
        )
    if matching_edges:
        base = k * s + 2 * np.arange(matching_edges)
        chunks.append(np.stack([base, base + 1], axis=1))
    if not chunks:
        return np.empty((0, 2), dtype=np.int64)
    return perm[np.concatenate(chunks)]


def _clique_family_truth(n, s, k, matching_edges) -> GroundTruth:
    m = k * (s * (s - 1) // 2) + matching_edges
    if k and s >= 2:
        arb = (s + 1) // 2
        core = s - 1
        maxdeg = max(s - 1, 1 if matching_edges else 0)
    elif matching_edges:
        arb = core = maxdeg = 1
    else:
        arb = core = maxdeg = 0
    return GroundTruth(
        avg_degree=Fraction(2 * m, n),
        rho_light=Fraction(1),
        tau=maxdeg,
        arboricity_lower=arb,
        arboricity_upper=arb,
        degeneracy=core,
    )


def gen_heavy_core(
    n: int, s: int, k: int, matching_edges: int, seed: int
) -> GeneratedInstance:
    """k disjoint s-cliques, a matching, and isolated padding."""
    if n < 1 or k < 0 or matching_edges < 0:
        raise InfeasibleParameterError(
            f"bad sizes n={n}, k={k}, matching_edges={matching_edges}"
        )
    if k and s < 2:
        raise InfeasibleParameterError(f"clique size must be >= 2, got s={s}")
    if k * s + 2 * matching_edges > n:
        raise InfeasibleParameterError(
            f"{k} cliques of {s} plus {matching_edges} matching edges "
            f"do not fit in n={n}"
        )
    edges = _clique_block_edges(n, s, k, matching_edges, _rng(seed))
    g = build_graph(n, edges)
    return GeneratedInstance(
        family="heavy_core",
        params={"n": n, "s": s, "k": k, "matching_edges": matching_edges},
        seed=int(seed),
        graph=g,
        truth=_clique_family_truth(n, s, k, matching_edges),
    )


def gen_clique_matching(n: int, s: int, k: int, seed: int) -> GeneratedInstance:
    """k disjoint s-cliques plus a perfect matching on the rest (no padding)."""
    if n < 1 or k < 0:
        raise InfeasibleParameterError(f"bad sizes n={n}, k={k}")
    if k and s < 2:
        raise InfeasibleParameterError(f"clique size must be >= 2, got s={s}")
    rest = n - k * s
    if rest < 0:
        raise InfeasibleParameterError(f"{k} cliques of {s} need {k * s} > n={n}")
    if rest % 2:
        raise InfeasibleParameterError(
            f"n - k*s = {rest} is odd; no perfect matching on the remainder"
        )
    inst = gen_heavy_core(n, s, k, rest // 2, seed)
    return GeneratedInstance(
        family="clique_matching",
        params={"n": n, "s": s, "k": k},
        seed=int(seed),
        graph=inst.graph,
        truth=inst.truth,
    )


def gen_lb_pair(n: int, d, alpha: int, seed: int):
    """The indistinguishable pair: k vs 2k alpha-cliques at identical n.

    Requires 4 <= d <= alpha/4.  k is chosen so the single-core average
    degree lands near d; the doubled core then has average exactly
    2*d1 - 1.  Returns (single, double) as GeneratedInstance objects
    sharing n_use = n rounded down to even.
    """
    d = Fraction(d)
    alpha = int(alpha)
    if d < 4:
        raise InfeasibleParameterError(f"need d >= 4, got {d}")
    if 4 * d > alpha:
        raise InfeasibleParameterError(f"need d <= alpha/4 = {Fraction(alpha, 4)}, got {d}")
    n_use = n - (n % 2)
    k = int(Fraction(n_use) * d / alpha**2 + Fraction(1, 2))  # floor(x + 1/2)
    k_adjusted = False
    if (k * alpha) % 2:
        k_adjusted = True
        k = k + 1 if 2 * (k + 1) * alpha <= n_use else k - 1
    if k < 1:
        raise InfeasibleParameterError(
            f"n={n} too small for any alpha-clique at d={d}, alpha={alpha}"
        )
    if 2 * k * alpha > n_use:
        raise InfeasibleParameterError(
            f"doubled core 2*k*alpha = {2 * k * alpha} exceeds n_use={n_use}"
        )
    if 8 * k > n_use:
        raise InfeasibleParameterError(f"regime needs 8k <= n, got k={k}, n_use={n_use}")

    ss = np.random.SeedSequence(int(seed))
    child = [np.random.default_rng(s) for s in ss.spawn(2)]
    out = []
    for case, kk, rng in (("single", k, child[0]), ("double", 2 * k, child[1])):
        rest = n_use - kk * alpha
        edges = _clique_block_edges(n_use, alpha, kk, rest // 2, rng)
        params = {
            "n": n,
            "n_use": n_use,
            "d_target": [d.numerator, d.denominator],
            "alpha": alpha,
            "k": k,
            "k_adjusted": k_adjusted,
            "case": case,
        }
        out.append(
            GeneratedInstance(
                family="lb_pair",
                params=params,
                seed=int(seed),
                graph=build_graph(n_use, edges),
                truth=_clique_family_truth(n_use, alpha, kk, rest // 2),
            )
        )
    return tuple(out)


def _decode_pruefer(seq, n):
    """Labelled tree edges from a Pruefer sequence (linear-time pointer scan)."""
    deg = [1] * n
    for x in seq:
        deg[x] += 1
    edges = []
    ptr = 0
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    for x in seq:
        edges.append((leaf, x))
        deg[x] -= 1
        if deg[x] == 1 and x < ptr:
            leaf = x
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, n - 1))
    return edges


class _LayerForest:
    """Union-find with member lists, for resampling duplicate tree edges."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.members = [[v] for v in range(n)]

    def find(self, v):
        p = self.parent
        while p[v] != v:
            p[v] = p[p[v]]
            v = p[v]
        return v

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if len(self.members[ra]) < len(self.members[rb]):
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.members[ra].extend(self.members[rb])
        self.members[rb] = []


def gen_forest_union(n: int, alpha: int, seed: int) -> GeneratedInstance:
    """Union of alpha random spanning trees; arboricity exactly alpha when
    no tree edge had to be dropped.

    Trees are drawn via uniform Pruefer sequences.  An edge that repeats
    one from an earlier tree is resampled among pairs joining the same
    two components of the current tree, keeping the layer a spanning
    tree; if every such pair is taken (only possible at tiny n) the edge
    is dropped and the truth falls back to computed bounds.
    """
    if n < 2 or alpha < 1:
        raise InfeasibleParameterError(f"need n >= 2 and alpha >= 1, got {n}, {alpha}")
    rng = _rng(seed)
    used = set()
    edges = []
    dropped = 0
    for _ in range(alpha):
        tree = (
            _decode_pruefer(rng.integers(0, n, size=n - 2).tolist(), n)
            if n > 2
            else [(0, 1)]
        )
        forest = _LayerForest(n)
        dups = []
        for u, v in tree:
            code = u * n + v if u < v else v * n + u
            if code in used:
                dups.append((u, v))
            else:
                used.add(code)
                edges.append((u, v))
                forest.union(u, v)
        for u, v in dups:
            a, b = forest.find(u), forest.find(v)
            ma, mb = forest.members[a], forest.members[b]
            pick = None
            for _ in range(32):
                x = ma[int(rng.integers(0, len(ma)))]
                y = mb[int(rng.integers(0, len(mb)))]
                code = x * n + y if x < y else y * n + x
                if code not in used:
                    pick = (x, y, code)
                    break
            if pick is None:  # exhaustive fallback over the cross pairs
                for x in ma:
                    for y in mb:
                        code = x * n + y if x < y else y * n + x
                        if code not in used:
                            pick = (x, y, code)
                            break
                    if pick:
                        break
            if pick is None:
                dropped += 1
                continue
            x, y, code = pick
            used.add(code)
            edges.append((x, y))
            forest.union(x, y)

    g = build_graph(n, np.array(edges, dtype=np.int64))
    if dropped == 0:
        # alpha forests cover the graph, and density forces alpha back
        truth = GroundTruth(
            avg_degree=Fraction(2 * g.m, n),
            rho_light=Fraction(1),
            tau=int(g.degrees.max()),
            arboricity_lower=alpha,
            arboricity_upper=alpha,
            degeneracy=degeneracy(g),
        )
    else:
        truth = ground_truth(g)
    return GeneratedInstance(
        family="forest_union",
        params={"n": n, "alpha": alpha, "dropped": dropped},
        seed=int(seed),
        graph=g,
        truth=truth,
    )


def gen_er(n: int, p: float, seed: int) -> GeneratedInstance:
    """G(n, p): Binomial edge count, then a uniform edge subset."""
    if n < 1:
        raise InfeasibleParameterError(f"need n >= 1, got {n}")
    if not 0 <= p <= 1:
        raise InfeasibleParameterError(f"need 0 <= p <= 1, got {p}")
    rng = _rng(seed)
    npairs = n * (n - 1) // 2
    m = int(rng.binomial(npairs, p)) if npairs else 0
    if m == 0:
        edges = np.empty((0, 2), dtype=np.int64)
    elif npairs <= _DENSE_PAIR_LIMIT:
        iu, ju = np.triu_indices(n, 1)
        pick = rng.choice(npairs, size=m, replace=False)
        edges = np.stack([iu[pick], ju[pick]], axis=1)
    else:
        if m > npairs // 4:
            raise InfeasibleParameterError(
                f"sparse sampler needs m <= pairs/4, got m={m} of {npairs}"
            )
        chosen = {}
        while len(chosen) < m:
            k = max(1024, int(1.2 * (m - len(chosen))))
            us = rng.integers(0, n, size=k)
            vs = rng.integers(0, n, size=k)
            ok = us != vs
            lo = np.minimum(us[ok], vs[ok]).astype(np.int64)
            hi = np.maximum(us[ok], vs[ok]).astype(np.int64)
            for code in (lo * n + hi).tolist():
                chosen[code] = None
        codes = np.fromiter(chosen.keys(), dtype=np.int64, count=len(chosen))[:m]
        edges = np.stack([codes // n, codes % n], axis=1)
    g = build_graph(n, edges)
    return GeneratedInstance(
        family="er",
        params={"n": n, "p": p},
        seed=int(seed),
        graph=g,
        truth=ground_truth(g),
    )


# ------------------------------------------------------------------- files


def truth_to_json(truth: GroundTruth) -> dict:
    return {
        "avg_degree": [truth.avg_degree.numerator, truth.avg_degree.denominator],
        "rho_light": [truth.rho_light.numerator, truth.rho_light.denominator],
        "tau": truth.tau,
        "arboricity_lower": truth.arboricity_lower,
        "arboricity_upper": truth.arboricity_upper,
        "degeneracy": truth.degeneracy,
    }


def write_instance_files(inst: GeneratedInstance, out_prefix) -> tuple:
    """Write <prefix>.edges and a <prefix>.truth.json sidecar."""
    prefix = Path(out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    edge_path = prefix.with_name(prefix.name + ".edges")
    meta_path = prefix.with_name(prefix.name + ".truth.json")
    save_edge_list(edge_path, inst.graph)
    meta = {
        "family": inst.family,
        "params": inst.params,
        "seed": inst.seed,
        "truth": truth_to_json(inst.truth),
    }
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return edge_path, meta_path
