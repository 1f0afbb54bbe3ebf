"""Rooted graphs, the four graph products and walk-count moments.

Vertices carry reduced words: tuples of letters ``(factor, vertex_id)`` where
``vertex_id`` indexes a non-root vertex of the factor graph and the empty
word is the root.  The leftmost letter is the one nearest the surface, so
``(x, u)`` means "vertex ``x`` of the copy glued at ``u``".

Infinite graphs are stored as finite balls.  Each graph remembers which of
its vertices may be missing neighbours (``unfaithful``); the faithful radius
is the distance from the root to the closest such vertex.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

Letter = tuple[int, int]
Word = tuple[Letter, ...]

DEFAULT_VERTEX_BUDGET = 2_000_000


class TruncationTooShallow(ValueError):
    """A truncated graph cannot certify the requested quantity."""


class VertexBudgetExceeded(RuntimeError):
    """A product would exceed the configured vertex budget."""


@dataclass(frozen=True, eq=False)
class RootedGraph:
    """Finite rooted graph with word labels and a faithfulness certificate.

    ``adjacency[v]`` is the sorted tuple of neighbours of vertex ``v``.
    ``unfaithful`` lists the vertices whose neighbour set may differ from
    the intended (possibly infinite) graph.
    """

    words: tuple[Word, ...]
    adjacency: tuple[tuple[int, ...], ...]
    root: int
    unfaithful: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        n = len(self.words)
        if len(self.adjacency) != n:
            raise ValueError("adjacency and words differ in length")
        if not 0 <= self.root < n:
            raise ValueError("root out of range")
        if len(set(self.words)) != n:
            raise ValueError("duplicate vertex words")
        for v, nbrs in enumerate(self.adjacency):
            for u in nbrs:
                if u == v:
                    raise ValueError(f"self-loop at {v}")
                if v not in self.adjacency[u]:
                    raise ValueError(f"asymmetric edge {v}-{u}")
        if n > 1 and len(self.distances) != n:
            raise ValueError("graph is not connected")

    @property
    def n_vertices(self) -> int:
        return len(self.words)

    @cached_property
    def index(self) -> dict[Word, int]:
        return {w: i for i, w in enumerate(self.words)}

    def index_of(self, word: Iterable[Sequence[int]]) -> int:
        key = tuple((int(a), int(b)) for a, b in word)
        try:
            return self.index[key]
        except KeyError:
            raise KeyError(f"no vertex with word {key}") from None

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(v, u) for v, nbrs in enumerate(self.adjacency) for u in nbrs if v < u]

    @property
    def non_root(self) -> list[int]:
        return [v for v in range(self.n_vertices) if v != self.root]

    @cached_property
    def distances(self) -> dict[int, int]:
        return bfs_distances(self.adjacency, [self.root])

    def distances_from(self, base: int) -> dict[int, int]:
        if base == self.root:
            return self.distances
        return bfs_distances(self.adjacency, [base])

    def radius_from(self, base: int | None = None) -> float:
        """Largest r such that every vertex closer than r to ``base`` is faithful."""
        if not self.unfaithful:
            return math.inf
        dist = self.distances_from(self.root if base is None else base)
        return min(dist[v] for v in self.unfaithful)

    @property
    def faithful_radius(self) -> float:
        return self.radius_from(self.root)

    @property
    def is_finite(self) -> bool:
        return not self.unfaithful

    @cached_property
    def diameter(self) -> int:
        return max(max(bfs_distances(self.adjacency, [v]).values()) for v in range(self.n_vertices))

    def adjacency_matrix(self, dtype=np.int64) -> sp.csr_matrix:
        rows = [v for v, nbrs in enumerate(self.adjacency) for _ in nbrs]
        cols = [u for nbrs in self.adjacency for u in nbrs]
        n = self.n_vertices
        return sp.csr_matrix((np.ones(len(rows), dtype=dtype), (rows, cols)), shape=(n, n))

    def __repr__(self) -> str:
        r = self.faithful_radius
        return f"RootedGraph(|V|={self.n_vertices}, |E|={len(self.edges())}, radius={r})"


def bfs_distances(adjacency: Sequence[Sequence[int]], sources: Iterable[int]) -> dict[int, int]:
    dist: dict[int, int] = {}
    queue: deque[int] = deque()
    for s in sources:
        if s not in dist:
            dist[s] = 0
            queue.append(s)
    while queue:
        v = queue.popleft()
        for u in adjacency[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def build_graph(
    words: Sequence[Word],
    edges: Iterable[tuple[int, int]],
    root: int,
    unfaithful: Iterable[int] = (),
) -> RootedGraph:
    """Assemble a graph and put its vertices in canonical order.

    Canonical order sorts by word length, then lexicographically by word.
    """
    order = sorted(range(len(words)), key=lambda i: (len(words[i]), words[i]))
    new = {old: k for k, old in enumerate(order)}
    nbrs: list[set[int]] = [set() for _ in order]
    for a, b in edges:
        if a == b:
            raise ValueError("self-loop")
        nbrs[new[a]].add(new[b])
        nbrs[new[b]].add(new[a])
    return RootedGraph(
        words=tuple(tuple(words[i]) for i in order),
        adjacency=tuple(tuple(sorted(s)) for s in nbrs),
        root=new[root],
        unfaithful=frozenset(new[v] for v in unfaithful),
    )


def _require_edges(*graphs: RootedGraph) -> None:
    for g in graphs:
        if g.n_vertices < 2:
            raise ValueError("graph products need factors with at least one edge")


# --------------------------------------------------------------------------
# standard families


def _single_factor(n: int, edges: Iterable[tuple[int, int]], unfaithful: Iterable[int] = ()) -> RootedGraph:
    words = [()] + [((1, v),) for v in range(1, n)]
    return build_graph(words, edges, 0, unfaithful)


def _tree(first: int, rest: int, depth: int) -> RootedGraph:
    """Ball of radius ``depth`` in the tree whose root has ``first`` children
    and every other vertex ``rest`` children."""
    edges = []
    level = [0]
    count = 1
    for d in range(depth):
        nxt = []
        for v in level:
            for _ in range(first if d == 0 else rest):
                edges.append((v, count))
                nxt.append(count)
                count += 1
        level = nxt
    boundary = level if (rest > 0 or depth == 0) else []
    return _single_factor(count, edges, boundary)


def make_standard(family: str, *params: int) -> RootedGraph:
    """Build a named rooted graph.

    ``K(n)`` complete graph on n+1 vertices, ``F(m)`` fork rooted at its
    centre, ``Z2`` one edge, ``P(k)`` path on k vertices rooted at an end.
    ``T1(depth)``, ``Z(depth)``, ``Tn(n, depth)`` and ``Hn(n, depth)`` are
    depth-balls of the half line, the integers, the n-ary rooted tree and
    the homogeneous tree of degree n.
    """
    expected = {"K": 1, "F": 1, "Z2": 0, "P": 1, "T1": 1, "Z": 1, "Tn": 2, "Hn": 2}
    if family not in expected:
        raise ValueError(f"unknown family {family!r}")
    if len(params) != expected[family]:
        raise ValueError(f"{family} takes {expected[family]} parameter(s), got {len(params)}")
    if any(int(p) != p or p < 1 for p in params):
        raise ValueError(f"{family} parameters must be positive integers")
    if family == "K":
        (n,) = params
        return _single_factor(n + 1, [(a, b) for a in range(n + 1) for b in range(a + 1, n + 1)])
    if family == "F":
        (m,) = params
        return _single_factor(m + 1, [(0, i) for i in range(1, m + 1)])
    if family == "Z2":
        return _single_factor(2, [(0, 1)])
    if family == "P":
        (k,) = params
        if k < 2:
            raise ValueError("P(k) needs k >= 2 (a single vertex has no edge)")
        return _single_factor(k, [(i, i + 1) for i in range(k - 1)])
    if family == "T1":
        return _tree(1, 1, params[0])
    if family == "Z":
        return _tree(2, 1, params[0])
    if family == "Tn":
        n, depth = params
        return _tree(n, n, depth)
    n, depth = params
    return _tree(n, n - 1, depth)


# --------------------------------------------------------------------------
# products of two rooted graphs


def _pair_word(g1: RootedGraph, x: int, g2: RootedGraph, y: int) -> Word:
    """Label of vertex ``(x, y)``: the g2 letter (if any) sits on the surface."""
    word: list[Letter] = []
    if y != g2.root:
        word.append((2, y))
    if x != g1.root:
        word.append((1, x))
    return tuple(word)


def star_product(g1: RootedGraph, g2: RootedGraph) -> RootedGraph:
    """Glue the two roots together."""
    _require_edges(g1, g2)
    words: list[Word] = [()]
    ids1 = {g1.root: 0}
    ids2 = {g2.root: 0}
    for v in g1.non_root:
        ids1[v] = len(words)
        words.append(((1, v),))
    for v in g2.non_root:
        ids2[v] = len(words)
        words.append(((2, v),))
    edges = [(ids1[a], ids1[b]) for a, b in g1.edges()]
    edges += [(ids2[a], ids2[b]) for a, b in g2.edges()]
    bad = {ids1[v] for v in g1.unfaithful} | {ids2[v] for v in g2.unfaithful}
    return build_graph(words, edges, 0, bad)


def _glued_product(g1: RootedGraph, g2: RootedGraph, skip_root: bool) -> RootedGraph:
    _require_edges(g1, g2)
    anchors = g1.non_root if skip_root else list(range(g1.n_vertices))
    ids: dict[tuple[int, int], int] = {}
    words: list[Word] = []

    def vid(x: int, y: int) -> int:
        if (x, y) not in ids:
            ids[(x, y)] = len(words)
            words.append(_pair_word(g1, x, g2, y))
        return ids[(x, y)]

    vid(g1.root, g2.root)
    edges = [(vid(a, g2.root), vid(b, g2.root)) for a, b in g1.edges()]
    for x in anchors:
        edges += [(vid(x, a), vid(x, b)) for a, b in g2.edges()]
    bad = set()
    root2_bad = g2.root in g2.unfaithful
    for (x, y), i in ids.items():
        if y == g2.root:
            if x in g1.unfaithful or (root2_bad and (x != g1.root or not skip_root)):
                bad.add(i)
        elif y in g2.unfaithful:
            bad.add(i)
    return build_graph(words, edges, ids[(g1.root, g2.root)], bad)


def comb_product(g1: RootedGraph, g2: RootedGraph) -> RootedGraph:
    """Attach a copy of ``g2`` by its root to every vertex of ``g1``."""
    return _glued_product(g1, g2, skip_root=False)


def orth_product(g1: RootedGraph, g2: RootedGraph) -> RootedGraph:
    """Attach a copy of ``g2`` by its root to every non-root vertex of ``g1``."""
    return _glued_product(g1, g2, skip_root=True)


def _branch_seed(g: RootedGraph) -> RootedGraph:
    # As an approximant of the infinite branch, only the root of g is complete.
    return RootedGraph(g.words, g.adjacency, g.root, frozenset(g.non_root) | g.unfaithful)


def orth_iter(g1: RootedGraph, g2: RootedGraph, m: int) -> RootedGraph:
    """m-th branch approximant: ``B1(m) = g1 |- B2(m-1)`` with ``B_i(0) = g_i``.

    The faithfulness certificate is relative to the infinite branch, so
    ``m = 0`` returns ``g1`` with only its root certified.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m == 0:
        return _branch_seed(g1)
    return orth_product(g1, orth_iter(g2, g1, m - 1))


# --------------------------------------------------------------------------
# free products


def count_words(factors: Sequence[RootedGraph], m: int) -> int:
    """Number of reduced words of length at most ``m``."""
    sizes = [g.n_vertices - 1 for g in factors]
    by_first = list(sizes)
    total = 1 + sum(by_first)
    for _ in range(m - 1):
        s = sum(by_first)
        by_first = [n * (s - c) for n, c in zip(sizes, by_first)]
        total += sum(by_first)
    return total


def m_free_product(
    factors: Sequence[RootedGraph], m: int, budget: int = DEFAULT_VERTEX_BUDGET
) -> RootedGraph:
    """Subgraph of the free product on reduced words of length at most ``m``.

    Letter ``(i, v)`` is vertex ``v`` of factor ``i`` (1-based).  A copy of
    factor ``j`` hangs at every word not starting with a ``j`` letter.
    """
    if len(factors) < 2:
        raise ValueError("need at least two factors")
    if m < 1:
        raise ValueError("m must be positive")
    _require_edges(*factors)
    total = count_words(factors, m)
    if total > budget:
        raise VertexBudgetExceeded(f"{total} vertices exceed the budget of {budget}")

    words: list[Word] = [()]
    index: dict[Word, int] = {(): 0}
    frontier = [()]
    for _ in range(m):
        nxt = []
        for u in frontier:
            first = u[0][0] if u else 0
            for j, g in enumerate(factors, start=1):
                if j == first:
                    continue
                for x in g.non_root:
                    w = ((j, x),) + u
                    index[w] = len(words)
                    words.append(w)
                    nxt.append(w)
        frontier = nxt

    edges = []
    for u in words:
        if len(u) == m:
            continue
        first = u[0][0] if u else 0
        iu = index[u]
        for j, g in enumerate(factors, start=1):
            if j == first:
                continue
            loc = [iu if x == g.root else index[((j, x),) + u] for x in range(g.n_vertices)]
            edges += [(loc[a], loc[b]) for a, b in g.edges()]

    if any(g.root in g.unfaithful for g in factors):
        bad = set(range(len(words)))
    else:
        bad = {
            i
            for i, w in enumerate(words)
            if len(w) == m or (w and w[0][1] in factors[w[0][0] - 1].unfaithful)
        }
    return build_graph(words, edges, 0, bad)


def induced_subgraph(g: RootedGraph, keep: Iterable[int]) -> RootedGraph:
    keep = sorted(set(keep))
    if g.root not in keep:
        raise ValueError("induced subgraph must contain the root")
    pos = {v: k for k, v in enumerate(keep)}
    edges = [(pos[a], pos[b]) for a, b in g.edges() if a in pos and b in pos]
    bad = [pos[v] for v in g.unfaithful if v in pos]
    return build_graph([g.words[v] for v in keep], edges, pos[g.root], bad)


def branch_graph(
    factors: Sequence[RootedGraph], j: int, m: int, budget: int = DEFAULT_VERTEX_BUDGET
) -> RootedGraph:
    """Branch subordinate to factor ``j``: root plus words whose last letter is from factor ``j``."""
    if len(factors) != 2 or j not in (1, 2):
        raise ValueError("branch_graph takes two factors and j in {1, 2}")
    g = m_free_product(factors, m, budget)
    return induced_subgraph(g, [i for i, w in enumerate(g.words) if not w or w[-1][0] == j])


# --------------------------------------------------------------------------
# moments and comparisons


@dataclass(frozen=True)
class VertexState:
    """Vector state at a vertex: ``a -> <a delta(base), delta(base)>``."""

    graph: RootedGraph
    base: int | None = None

    def __post_init__(self) -> None:
        if self.base is not None and not 0 <= self.base < self.graph.n_vertices:
            raise ValueError("base vertex not in graph")

    @property
    def vertex(self) -> int:
        return self.graph.root if self.base is None else self.base

    def moments(self, order: int) -> list[int]:
        return moments(self.graph, order, self.vertex)


def moments(g: RootedGraph, order: int, base: int | None = None) -> list[int]:
    """Closed-walk counts ``M_0..M_order`` at ``base`` (default: the root)."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    base = g.root if base is None else base
    need = math.ceil(order / 2)
    have = g.radius_from(base)
    if need > have:
        raise TruncationTooShallow(
            f"order {order} needs faithful radius {need} around the base vertex, have {have}"
        )
    dist = g.distances_from(base)
    ball = sorted(v for v, d in dist.items() if d <= need)
    pos = {v: k for k, v in enumerate(ball)}
    max_deg = max(g.degree(v) for v in ball)
    if order == 0 or max_deg ** order < 2**62:
        rows = [pos[v] for v in ball for u in g.adjacency[v] if u in pos]
        cols = [pos[u] for v in ball for u in g.adjacency[v] if u in pos]
        a = sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(len(ball),) * 2)
        vec = np.zeros(len(ball), dtype=np.int64)
        vec[pos[base]] = 1
        out = [1]
        for _ in range(order):
            vec = a @ vec
            out.append(int(vec[pos[base]]))
        return out
    local = [[pos[u] for u in g.adjacency[v] if u in pos] for v in ball]
    vec_py = [0] * len(ball)
    vec_py[pos[base]] = 1
    out = [1]
    for _ in range(order):
        vec_py = [sum(vec_py[u] for u in nbrs) for nbrs in local]
        out.append(vec_py[pos[base]])
    return out


def to_networkx(g: RootedGraph):
    import networkx as nx

    h = nx.Graph()
    for v in range(g.n_vertices):
        h.add_node(v, root=(v == g.root))
    h.add_edges_from(g.edges())
    return h


def isomorphic(g: RootedGraph, h: RootedGraph) -> bool:
    """Rooted-graph isomorphism (root must map to root)."""
    import networkx as nx

    if g.n_vertices != h.n_vertices or len(g.edges()) != len(h.edges()):
        return False
    return nx.is_isomorphic(
        to_networkx(g), to_networkx(h), node_match=lambda a, b: a["root"] == b["root"]
    )
