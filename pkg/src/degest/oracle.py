"""Query access to a graph, with exact accounting.

Algorithms in this package never touch a Graph directly; they see it
only through a QueryOracle, which exposes five query types and counts
every call:

* ``degree_random()``  -- uniform random vertex id together with its degree
* ``degree_of(v)``     -- degree of a chosen vertex
* ``rand_edge()``      -- uniform random edge, endpoint order randomised
* ``neighbour(v, i)``  -- i-th neighbour of v (ascending id), None past the degree
* ``pair(u, v)``       -- whether the edge {u, v} exists
* ``full_nbr(v)``      -- the whole neighbour list of v

Batch variants draw the same distributions vectorised and advance the
counters by the batch size.  All randomness comes from a single PCG64
generator seeded explicitly, so a (seed, call sequence) pair fully
determines every answer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .graph import Graph, GraphError

__all__ = ["EmptyEdgeSetError", "QueryCounters", "QueryOracle"]


class EmptyEdgeSetError(RuntimeError):
    """rand_edge on a graph with no edges."""


@dataclass
class QueryCounters:
    degree_random: int = 0
    degree_of: int = 0
    rand_edge: int = 0
    neighbour: int = 0
    pair: int = 0
    full_nbr: int = 0

    def snapshot(self) -> "QueryCounters":
        return replace(self)

    def as_dict(self) -> dict:
        return {
            "degree_random": self.degree_random,
            "degree_of": self.degree_of,
            "rand_edge": self.rand_edge,
            "neighbour": self.neighbour,
            "pair": self.pair,
            "full_nbr": self.full_nbr,
        }

    def total_degree(self) -> int:
        """Combined degree-query count (both flavours)."""
        return self.degree_random + self.degree_of

    def total(self) -> int:
        return sum(self.as_dict().values())


class QueryOracle:
    """Stateful query interface over an immutable graph.

    ``transcript`` may be a writable text stream; every scalar query is
    then appended as one JSON line (batch queries log the batch size
    instead of the full result).
    """

    def __init__(self, graph: Graph, seed: int, transcript=None):
        if not isinstance(seed, (int, np.integer)) or seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
        self._graph = graph
        self.seed = int(seed)
        self.rng = np.random.default_rng(np.random.SeedSequence(self.seed))
        self.counters = QueryCounters()
        self._transcript = transcript

    @property
    def n(self) -> int:
        return self._graph.n

    # ------------------------------------------------------------- scalar

    def degree_random(self) -> tuple:
        v = int(self.rng.integers(0, self._graph.n))
        d = int(self._graph.degrees[v])
        self.counters.degree_random += 1
        self._log("degree_random", (), (v, d))
        return v, d

    def degree_of(self, v: int) -> int:
        d = self._graph.degree(int(v))
        self.counters.degree_of += 1
        self._log("degree_of", (int(v),), d)
        return d

    def rand_edge(self) -> tuple:
        g = self._graph
        if g.m == 0:
            raise EmptyEdgeSetError("graph has no edges")
        e = int(self.rng.integers(0, g.m))
        flip = int(self.rng.integers(0, 2))
        u, v = (int(g.edges[e, 1]), int(g.edges[e, 0])) if flip else (
            int(g.edges[e, 0]),
            int(g.edges[e, 1]),
        )
        self.counters.rand_edge += 1
        self._log("rand_edge", (), (u, v))
        return u, v

    def neighbour(self, v: int, i: int):
        r = self._graph.neighbour_at(int(v), int(i))
        self.counters.neighbour += 1
        self._log("neighbour", (int(v), int(i)), r)
        return r

    def pair(self, u: int, v: int) -> bool:
        r = self._graph.has_edge(int(u), int(v))
        self.counters.pair += 1
        self._log("pair", (int(u), int(v)), r)
        return r

    def full_nbr(self, v: int) -> list:
        r = self._graph.neighbours(int(v)).tolist()
        self.counters.full_nbr += 1
        self._log("full_nbr", (int(v),), r)
        return r

    # -------------------------------------------------------------- batch

    def degree_random_batch(self, k: int) -> tuple:
        """k iid uniform vertices and their degrees, as int64 arrays."""
        k = self._check_batch(k)
        vs = self.rng.integers(0, self._graph.n, size=k)
        ds = self._graph.degrees[vs]
        self.counters.degree_random += k
        self._log("degree_random_batch", (k,), None)
        return vs, ds

    def degree_of_batch(self, vs) -> np.ndarray:
        vs = np.asarray(vs, dtype=np.int64)
        if vs.size and (vs.min() < 0 or vs.max() >= self._graph.n):
            raise GraphError("vertex id out of range in batch degree query")
        ds = self._graph.degrees[vs]
        self.counters.degree_of += int(vs.size)
        self._log("degree_of_batch", (int(vs.size),), None)
        return ds

    def rand_edge_batch(self, k: int) -> tuple:
        g = self._graph
        if g.m == 0:
            raise EmptyEdgeSetError("graph has no edges")
        k = self._check_batch(k)
        idx = self.rng.integers(0, g.m, size=k)
        flip = self.rng.integers(0, 2, size=k)
        us = g.edges[idx, flip]
        vs = g.edges[idx, 1 - flip]
        self.counters.rand_edge += k
        self._log("rand_edge_batch", (k,), None)
        return us, vs

    # ------------------------------------------------------------ helpers

    @staticmethod
    def _check_batch(k) -> int:
        k = int(k)
        if k < 1:
            raise ValueError(f"batch size must be >= 1, got {k}")
        return k

    def _log(self, kind: str, args: tuple, result) -> None:
        if self._transcript is None:
            return
        rec = {
            "type": kind,
            "args": list(args),
            "result": result,
            "counters": self.counters.as_dict(),
        }
        self._transcript.write(json.dumps(rec) + "\n")
