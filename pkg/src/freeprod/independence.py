"""Mixed-moment checks of freeness, orthogonality and s-freeness.

The adjacency matrix of a product graph splits into one component per
factor: an edge belongs to the factor of the surface letter of its longer
endpoint (the copy it lies in).  Mixed moments of the components in the
vacuum state at the root are then compared with what each notion of
independence predicts.  All arithmetic is exact.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .graphcore import RootedGraph, TruncationTooShallow, branch_graph, m_free_product, moments
from .transforms import CheckRecord, Distribution, boolean_conv, comb_branch_conv, mfree_conv

Operator = tuple[tuple[int, ...], ...]
Vec = dict[int, Fraction]


def edge_factor(g: RootedGraph, a: int, b: int) -> int:
    wa, wb = g.words[a], g.words[b]
    longer = wa if len(wa) >= len(wb) else wb
    return longer[0][0]


def _component(g: RootedGraph, factor: int) -> Operator:
    nbrs: list[list[int]] = [[] for _ in range(g.n_vertices)]
    for a, b in g.edges():
        if edge_factor(g, a, b) == factor:
            nbrs[a].append(b)
            nbrs[b].append(a)
    return tuple(tuple(sorted(x)) for x in nbrs)


def factors_of(g: RootedGraph) -> list[int]:
    return sorted({edge_factor(g, a, b) for a, b in g.edges()})


def free_components(g: RootedGraph, i: int) -> Operator:
    """Adjacency of all copies of factor ``i`` in a (truncated) free product."""
    return _component(g, i)


def branch_components(g: RootedGraph) -> tuple[Operator, Operator]:
    """Components of a branch graph: edges of factor-1 copies, then factor-2 copies."""
    return _component(g, 1), _component(g, 2)


def components_sum_to_adjacency(g: RootedGraph) -> bool:
    total: list[list[int]] = [[] for _ in range(g.n_vertices)]
    for f in factors_of(g):
        for v, nb in enumerate(_component(g, f)):
            total[v] += nb
    return all(sorted(t) == list(adj) for t, adj in zip(total, g.adjacency))


@dataclass(frozen=True)
class StatePair:
    """Vacuum state at the root and a second vector state at ``base``."""

    graph: RootedGraph
    base: int

    @classmethod
    def default(cls, g: RootedGraph) -> "StatePair":
        """``base`` is the least non-root vertex of factor 1 (a one-letter word)."""
        singles = [v for v, w in enumerate(g.words) if len(w) == 1 and w[0][0] == 1]
        if not singles:
            raise ValueError("graph has no factor-1 letter to host the second state")
        return cls(g, min(singles, key=lambda v: g.words[v]))


def _apply(op: Operator, vec: Vec) -> Vec:
    out: dict[int, Fraction] = defaultdict(int)
    for v, x in vec.items():
        for u in op[v]:
            out[u] += x
    return {k: x for k, x in out.items() if x}


def _combine(a: Vec, b: Vec, cb: Fraction) -> Vec:
    """``a - cb * b``."""
    out = dict(a)
    for k, x in b.items():
        out[k] = out.get(k, 0) - cb * x
    return {k: x for k, x in out.items() if x}


class _Evaluator:
    """Evaluates products of component powers on delta vectors."""

    def __init__(self, g: RootedGraph, ops: dict[int, Operator]):
        self.g = g
        self.ops = ops

    def word(self, letters: Sequence[int], vec: Vec) -> Vec:
        for f in reversed(letters):
            vec = _apply(self.ops[f], vec)
        return vec

    def state(self, letters: Sequence[int], at: int) -> Fraction:
        return Fraction(self.word(letters, {at: Fraction(1)}).get(at, 0))


def _require_radius(g: RootedGraph, max_len: int, base: int | None = None) -> None:
    need = math.ceil(max_len / 2)
    if g.faithful_radius < need or (base is not None and g.radius_from(base) < need):
        raise TruncationTooShallow(f"words of length {max_len} need faithful radius {need}")


def _compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _alternating(labels: Sequence[int], k: int) -> Iterable[tuple[int, ...]]:
    for seq in product(labels, repeat=k):
        if all(x != y for x, y in zip(seq, seq[1:])):
            yield seq


def _show(parts: Sequence[tuple[str, int]]) -> str:
    return " ".join(f"{name}^{p}" if p > 1 else name for name, p in parts)


def _words(letters: Sequence[int], max_len: int) -> list[tuple[int, ...]]:
    out = [()]
    for n in range(1, max_len + 1):
        out += list(product(letters, repeat=n))
    return out


def check_freeness(g: RootedGraph, max_len: int = 6) -> list[CheckRecord]:
    """Centered alternating products of factor components have zero vacuum mean."""
    _require_radius(g, max_len)
    labels = factors_of(g)
    ev = _Evaluator(g, {f: _component(g, f) for f in labels})
    e = g.root
    mean = {(f, n): ev.state([f] * n, e) for f in labels for n in range(1, max_len + 1)}
    records = []
    for total in range(1, max_len + 1):
        for k in range(1, total + 1):
            for powers in _compositions(total, k):
                for seq in _alternating(labels, k):
                    vec: Vec = {e: Fraction(1)}
                    for f, n in reversed(list(zip(seq, powers))):
                        vec = _combine(ev.word([f] * n, vec), vec, mean[(f, n)])
                    val = Fraction(vec.get(e, 0))
                    inst = _show([(f"(A{f}^{n}-c)", 1) for f, n in zip(seq, powers)])
                    records.append(CheckRecord("free: centered alternating product", inst, val, Fraction(0), val == 0))
    return records


def check_orthogonality(g: RootedGraph, sp: StatePair | None = None, max_len: int = 6) -> list[CheckRecord]:
    """Orthogonal independence of the factor-2 component from the factor-1 component.

    (i)  ``phi(b w) = phi(w b) = 0``;
    (ii) ``phi(w1 a1 b a2 w2) = psi(b) (phi(w1 a1 a2 w2) - phi(w1 a1) phi(a2 w2))``
    for ``a1, a2`` powers of component 1, ``b`` a power of component 2 and
    ``w1, w2`` arbitrary words in both.
    """
    sp = sp or StatePair.default(g)
    _require_radius(g, max_len, sp.base)
    ev = _Evaluator(g, {1: _component(g, 1), 2: _component(g, 2)})
    e, v = g.root, sp.base
    phi = lambda word: ev.state(word, e)  # noqa: E731
    psi = lambda word: ev.state(word, v)  # noqa: E731
    records = []
    for r in range(1, max_len + 1):
        for w in _words((1, 2), max_len - r):
            b = (2,) * r
            for name, word in (("phi(b w)", b + w), ("phi(w b)", w + b)):
                val = phi(word)
                records.append(CheckRecord(f"orth (i) {name} = 0", f"b=A2^{r}, w={w}", val, Fraction(0), val == 0))
    for p, q, r in product(range(1, max_len + 1), repeat=3):
        slack = max_len - p - q - r
        if slack < 0:
            continue
        a1, a2, b = (1,) * p, (1,) * q, (2,) * r
        for n1 in range(slack + 1):
            for w1 in product((1, 2), repeat=n1):
                for w2 in _words((1, 2), slack - n1):
                    lhs = phi(w1 + a1 + b + a2 + w2)
                    rhs = psi(b) * (phi(w1 + a1 + a2 + w2) - phi(w1 + a1) * phi(a2 + w2))
                    inst = f"w1={w1}, a1=A1^{p}, b=A2^{r}, a2=A1^{q}, w2={w2}"
                    records.append(CheckRecord("orth (ii)", inst, lhs, rhs, lhs == rhs))
    return records


def check_sfreeness(
    g: RootedGraph, sp: StatePair | None = None, max_len: int = 6, printed_form: bool = False
) -> list[CheckRecord]:
    """Freeness with subordination of the two components of a branch graph.

    The internal unit of the second algebra is the projection onto the
    complement of ``delta(root)``; it fixes every power of component 2.
    (i) centered alternating products vanish, component 1 centered by
    ``phi``, component 2 by ``psi`` times the internal unit;
    (ii) ``phi(w1 1_2 w2) = phi(w1 w2) - phi(w1) phi(w2)``.  With
    ``printed_form=True`` the right side uses ``phi(w2) phi(w2)`` instead.
    """
    sp = sp or StatePair.default(g)
    _require_radius(g, max_len, sp.base)
    ops = {1: _component(g, 1), 2: _component(g, 2)}
    ev = _Evaluator(g, ops)
    e, v = g.root, sp.base

    def unit2(vec: Vec) -> Vec:
        return {k: x for k, x in vec.items() if k != e}

    phi = lambda word: ev.state(word, e)  # noqa: E731
    records = []
    for r in range(1, max_len + 1):
        probe = {u: Fraction(1 + u) for u in range(g.n_vertices) if g.distances[u] < g.faithful_radius - r}
        lhs_l = unit2(ev.word((2,) * r, probe))
        lhs_r = ev.word((2,) * r, unit2(probe))
        target = ev.word((2,) * r, probe)
        ok = lhs_l == target and lhs_r == target
        records.append(CheckRecord("s-free: 1_2 is a unit for A2", f"A2^{r}", ok, True, ok))
    center = {
        (1, n): phi((1,) * n) for n in range(1, max_len + 1)
    } | {(2, n): ev.state((2,) * n, v) for n in range(1, max_len + 1)}
    for total in range(1, max_len + 1):
        for k in range(1, total + 1):
            for powers in _compositions(total, k):
                for seq in _alternating((1, 2), k):
                    vec: Vec = {e: Fraction(1)}
                    for f, n in reversed(list(zip(seq, powers))):
                        shifted = ev.word((f,) * n, vec)
                        base = vec if f == 1 else unit2(vec)
                        vec = _combine(shifted, base, center[(f, n)])
                    val = Fraction(vec.get(e, 0))
                    inst = _show([(f"(A{f}^{n}-c)", 1) for f, n in zip(seq, powers)])
                    records.append(CheckRecord("s-free (i) centered alternating product", inst, val, Fraction(0), val == 0))
    for n1 in range(max_len + 1):
        for w1 in product((1, 2), repeat=n1):
            for w2 in _words((1, 2), max_len - n1):
                lhs = Fraction(ev.word(w1, unit2(ev.word(w2, {e: Fraction(1)}))).get(e, 0))
                if printed_form:
                    rhs = phi(w1 + w2) - phi(w2) * phi(w2)
                else:
                    rhs = phi(w1 + w2) - phi(w1) * phi(w2)
                records.append(CheckRecord("s-free (ii)", f"w1={w1}, w2={w2}", lhs, rhs, lhs == rhs))
    return records


def decomposition_pipelines(g1: RootedGraph, g2: RootedGraph, m: int) -> dict[str, Distribution]:
    """The law of the m-free product four ways, to the certified order ``2m``.

    ``walk`` counts closed walks; ``mfree`` combines the factor laws;
    ``boolean_branches`` joins the walk laws of the two branches;
    ``comb_branch`` is the comb (monotone) law of a factor with the
    opposite branch.
    """
    order = 2 * m
    laws = [Distribution(moments(g, order)) for g in (g1, g2)]
    branches = [Distribution(moments(branch_graph([g1, g2], j, m), order)) for j in (1, 2)]
    return {
        "walk": Distribution(moments(m_free_product([g1, g2], m), order)),
        "mfree": mfree_conv(laws[0], laws[1], m, order),
        "boolean_branches": boolean_conv(branches[0], branches[1], order),
        "comb_branch": comb_branch_conv(laws[0], laws[1], m, order),
    }


def check_decomposition(g1: RootedGraph, g2: RootedGraph, m: int) -> list[CheckRecord]:
    laws = decomposition_pipelines(g1, g2, m)
    walk = laws.pop("walk")
    return [
        CheckRecord(f"walk moments = {name}", f"m={m}, orders <= {2 * m}", list(walk.moments), list(d.moments), d == walk)
        for name, d in laws.items()
    ]


def first_disagreement(a: Distribution, b: Distribution) -> int | None:
    """Lowest order where the moments differ, or ``None`` on the common range."""
    for k, (x, y) in enumerate(zip(a.moments, b.moments)):
        if x != y:
            return k
    return None


def normalized_moment_gap(g_power_moments: Sequence[int], n: int, root_degree: int, k: int) -> Fraction:
    """``|phi((A / sqrt(n kappa))^{2k}) - Catalan_k|`` for an n-fold free power."""
    catalan = math.comb(2 * k, k) // (k + 1)
    return abs(Fraction(g_power_moments[2 * k], (n * root_degree) ** k) - catalan)
