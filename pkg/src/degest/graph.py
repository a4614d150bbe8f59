"""Graph container and exact ground-truth measures.

Vertices are integers ``0..n-1``.  Graphs are simple and undirected: no
self-loops, no parallel edges.  Edges are kept both as the original
(min, max)-normalised list and as a CSR adjacency structure with
neighbours sorted by ascending id, which is what the query layer
indexes into.

Everything here is exact integer / rational arithmetic; floats never
enter the ground-truth path.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

__all__ = [
    "Graph",
    "GraphError",
    "EdgeListFormatError",
    "Partition",
    "GroundTruth",
    "build_graph",
    "partition_by_threshold",
    "is_good_threshold",
    "degeneracy",
    "ground_truth",
    "save_edge_list",
    "load_edge_list",
]


class GraphError(ValueError):
    """Invalid graph construction or query input."""

    def __init__(self, message: str, edge_index: int | None = None):
        if edge_index is not None:
            message = f"{message} (edge index {edge_index})"
        super().__init__(message)
        self.edge_index = edge_index


class EdgeListFormatError(GraphError):
    """Malformed edge-list file."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class Graph:
    """Immutable simple undirected graph.

    Instances are created through :func:`build_graph` (or
    :func:`load_edge_list`); the constructor itself performs no
    validation.
    """

    __slots__ = ("n", "m", "edges", "degrees", "_indptr", "_targets")

    def __init__(self, n, edges, degrees, indptr, targets):
        self.n = int(n)
        self.m = int(edges.shape[0])
        self.edges = edges
        self.degrees = degrees
        self._indptr = indptr
        self._targets = targets
        for arr in (edges, degrees, indptr, targets):
            arr.setflags(write=False)

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return int(self.degrees[v])

    def neighbours(self, v: int) -> np.ndarray:
        """Neighbour ids of v, ascending.  Read-only view."""
        self._check_vertex(v)
        return self._targets[self._indptr[v] : self._indptr[v + 1]]

    def neighbour_at(self, v: int, i: int) -> int | None:
        """i-th neighbour of v (0-based, ascending id), None when i >= deg(v)."""
        self._check_vertex(v)
        if i < 0:
            raise GraphError(f"neighbour index must be >= 0, got {i}")
        lo = self._indptr[v]
        if i >= self._indptr[v + 1] - lo:
            return None
        return int(self._targets[lo + i])

    def has_edge(self, u: int, v: int) -> bool:
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            return False
        row = self._targets[self._indptr[u] : self._indptr[u + 1]]
        k = int(np.searchsorted(row, v))
        return k < row.shape[0] and int(row[k]) == v

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} out of range [0, {self.n})")

    def __repr__(self):  # pragma: no cover
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(n: int, edge_list) -> Graph:
    """Validate an edge list and build the CSR structures.

    ``edge_list`` is any (m, 2)-shaped integer array-like.  Raises
    GraphError on out-of-range endpoints, self-loops or duplicate edges
    (duplicates are detected after (min, max) normalisation).
    """
    n = int(n)
    if n < 1:
        raise GraphError(f"need at least one vertex, got n={n}")
    edges = np.asarray(edge_list, dtype=np.int64)
    if edges.size == 0:
        edges = edges.reshape(0, 2)
    if edges.ndim != 2 or edges.shape[1] != 2:
        raise GraphError(f"edge list must have shape (m, 2), got {edges.shape}")
    m = edges.shape[0]

    if m > 0:
        bad = np.nonzero((edges < 0) | (edges >= n))[0]
        if bad.size:
            i = int(bad[0])
            raise GraphError(
                f"endpoint out of range [0, {n}): {tuple(edges[i])}", edge_index=i
            )
        loops = np.nonzero(edges[:, 0] == edges[:, 1])[0]
        if loops.size:
            i = int(loops[0])
            raise GraphError(f"self-loop at vertex {int(edges[i, 0])}", edge_index=i)

    edges = np.sort(edges, axis=1)  # per-row (min, max)

    if m > 1:
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        srt = edges[order]
        dup = np.nonzero((srt[1:] == srt[:-1]).all(axis=1))[0]
        if dup.size:
            p = int(dup[0])
            i = int(max(order[p], order[p + 1]))
            raise GraphError(f"duplicate edge {tuple(srt[p])}", edge_index=i)

    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    degrees = np.bincount(src, minlength=n).astype(np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degrees, out=indptr[1:])
    order = np.lexsort((dst, src))
    targets = dst[order]
    return Graph(n, edges, degrees, indptr, targets)


@dataclass(frozen=True)
class Partition:
    """Heavy/light split at a degree threshold.

    heavy holds the ids with degree strictly above the threshold; light
    the rest.  e_hh / e_ll / e_hl count edges by endpoint class.
    """

    threshold: int
    heavy: np.ndarray
    light: np.ndarray
    e_hh: int
    e_ll: int
    e_hl: int

    @property
    def m_heavy(self) -> int:
        """Sum of degrees over heavy vertices."""
        return 2 * self.e_hh + self.e_hl

    @property
    def m_light(self) -> int:
        """Sum of degrees over light vertices."""
        return 2 * self.e_ll + self.e_hl

    @property
    def rho_light(self) -> Fraction:
        """Probability that a uniform directed edge starts at a light vertex."""
        total = self.m_heavy + self.m_light
        if total == 0:
            return Fraction(1)
        return Fraction(self.m_light, total)


def partition_by_threshold(g: Graph, tau: int) -> Partition:
    """Classify vertices as heavy (degree > tau) or light (degree <= tau)."""
    tau = int(tau)
    if tau < 0:
        raise GraphError(f"threshold must be >= 0, got {tau}")
    is_heavy = g.degrees > tau
    heavy = np.nonzero(is_heavy)[0]
    light = np.nonzero(~is_heavy)[0]
    if g.m:
        eh = is_heavy[g.edges]  # (m, 2) bools
        both = eh.all(axis=1)
        neither = ~eh.any(axis=1)
        e_hh = int(both.sum())
        e_ll = int(neither.sum())
        e_hl = g.m - e_hh - e_ll
    else:
        e_hh = e_ll = e_hl = 0
    part = Partition(tau, heavy, light, e_hh, e_ll, e_hl)
    assert part.m_light == int(g.degrees[light].sum())
    return part


def is_good_threshold(g: Graph, tau: int) -> bool:
    """True when light vertices carry at least half the degree mass.

    Equivalent to rho_light >= 1/4, checked in exact integer arithmetic.
    """
    if g.m == 0:
        raise GraphError("good-threshold test needs at least one edge")
    part = partition_by_threshold(g, tau)
    return 2 * part.m_light >= g.m


def degeneracy(g: Graph) -> int:
    """Degeneracy via the linear-time bucket peel."""
    if g.m == 0:
        return 0
    n = g.n
    deg = g.degrees.tolist()
    maxdeg = max(deg)
    order = np.argsort(g.degrees, kind="stable")
    pos_arr = np.empty(n, dtype=np.int64)
    pos_arr[order] = np.arange(n)
    vert = order.tolist()
    pos = pos_arr.tolist()
    counts = np.bincount(g.degrees, minlength=maxdeg + 1)
    bin_start = np.zeros(maxdeg + 2, dtype=np.int64)
    np.cumsum(counts, out=bin_start[1:])
    bin_start = bin_start.tolist()
    indptr = g._indptr.tolist()
    targets = g._targets.tolist()

    k = 0
    for i in range(n):
        v = vert[i]
        dv = deg[v]
        if dv > k:
            k = dv
        for j in range(indptr[v], indptr[v + 1]):
            u = targets[j]
            du = deg[u]
            if du > dv:  # u still present with a larger current degree
                pu = pos[u]
                pw = bin_start[du]
                w = vert[pw]
                if u != w:
                    vert[pu] = w
                    vert[pw] = u
                    pos[u] = pw
                    pos[w] = pu
                bin_start[du] = pw + 1
                deg[u] = du - 1
    return k


def _arboricity_exact(g: Graph) -> int:
    """Exact arboricity by the density maximum over all vertex subsets.

    Subset DP over 2^n masks; only sensible for small n.
    """
    n = g.n
    adj = [0] * n
    for u, v in g.edges.tolist():
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    cnt = array("H", bytes(2 * (1 << n)))
    best = 0
    for s in range(1, 1 << n):
        v = (s & -s).bit_length() - 1
        rest = s & (s - 1)
        c = cnt[rest] + (adj[v] & rest).bit_count()
        cnt[s] = c
        if c:
            k = s.bit_count()
            a = -(-c // (k - 1))
            if a > best:
                best = a
    return best


@dataclass(frozen=True)
class GroundTruth:
    """Exact reference quantities for one graph."""

    avg_degree: Fraction
    rho_light: Fraction
    tau: int
    arboricity_lower: int
    arboricity_upper: int
    degeneracy: int

    @property
    def arboricity_exact(self) -> int | None:
        """The arboricity when the bounds pin it down, else None."""
        if self.arboricity_lower == self.arboricity_upper:
            return self.arboricity_lower
        return None


def ground_truth(
    g: Graph, exact_arboricity_limit: int = 15, tau: int | None = None
) -> GroundTruth:
    """Compute exact reference values.

    For n <= exact_arboricity_limit the arboricity bounds coincide
    (brute force over subsets); above that the lower bound comes from
    global density and the degeneracy sandwich, the upper bound from
    degeneracy.  rho_light is evaluated at ``tau`` (default: the
    maximum degree, which makes every vertex light).
    """
    avg = Fraction(2 * g.m, g.n)
    if tau is None:
        tau = int(g.degrees.max()) if g.n else 0
    rho = partition_by_threshold(g, tau).rho_light
    core = degeneracy(g)
    if g.m == 0:
        lo = hi = 0
    elif g.n <= exact_arboricity_limit:
        lo = hi = _arboricity_exact(g)
    else:
        dens = -(-g.m // (g.n - 1))
        lo = max(dens, (core + 2) // 2)  # degeneracy <= 2*arboricity - 1
        hi = core
    return GroundTruth(
        avg_degree=avg,
        rho_light=rho,
        tau=int(tau),
        arboricity_lower=lo,
        arboricity_upper=hi,
        degeneracy=core,
    )


def save_edge_list(path, g: Graph) -> None:
    """Write ``n m`` then one ``u v`` line per edge (LF, ascii)."""
    path = Path(path)
    rows = [f"{g.n} {g.m}"]
    rows.extend(f"{u} {v}" for u, v in g.edges.tolist())
    path.write_text("\n".join(rows) + "\n", encoding="ascii")


def load_edge_list(path) -> Graph:
    """Parse the ``save_edge_list`` format back into a Graph."""
    path = Path(path)
    lines = path.read_text(encoding="ascii").split("\n")
    if not lines or not lines[0].strip():
        raise EdgeListFormatError("missing header", line_no=1)
    head = lines[0].split()
    if len(head) != 2:
        raise EdgeListFormatError(f"expected 'n m', got {lines[0]!r}", line_no=1)
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise EdgeListFormatError(f"expected 'n m', got {lines[0]!r}", line_no=1)
    if m < 0:
        raise EdgeListFormatError(f"negative edge count {m}", line_no=1)

    edges = np.empty((m, 2), dtype=np.int64)
    line_of_row = np.empty(m, dtype=np.int64)
    row = 0
    for ln, text in enumerate(lines[1:], start=2):
        if not text.strip():
            continue  # tolerate blank lines
        if row >= m:
            raise EdgeListFormatError(f"extra edge line {text!r}", line_no=ln)
        tok = text.split()
        if len(tok) != 2:
            raise EdgeListFormatError(f"expected 'u v', got {text!r}", line_no=ln)
        try:
            edges[row, 0], edges[row, 1] = int(tok[0]), int(tok[1])
        except ValueError:
            raise EdgeListFormatError(f"expected 'u v', got {text!r}", line_no=ln)
        line_of_row[row] = ln
        row += 1
    if row != m:
        raise EdgeListFormatError(
            f"header promised {m} edges, found {row}", line_no=len(lines)
        )
    try:
        return build_graph(n, edges)
    except GraphError as err:
        if err.edge_index is not None:
            ln = int(line_of_row[err.edge_index])
            raise EdgeListFormatError(str(err), line_no=ln) from err
        raise
