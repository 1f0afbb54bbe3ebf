"""Quantum decomposition of adjacency matrices and vacuum sets.

Vertices are graded by distance to a source set ``V0``; the adjacency
matrix splits into the parts raising, keeping and lowering that distance.
Vectors are sparse dicts ``{vertex: number}`` with exact (int or Fraction)
entries throughout.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import scipy.sparse as sp
import numpy as np

from .graphcore import RootedGraph, TruncationTooShallow, bfs_distances, m_free_product, make_standard
from .measures import SpectralMeasure, spectral_measure
from .transforms import JacobiParams, detect_tail

Vector = dict[int, Fraction]


class NotVacuum(ValueError):
    """The lowering operator does not annihilate the vector."""


class NotJVacuum(ValueError):
    """An iterate is not an eigenvector of the keeping part or of lower∘raise."""


class TailUndetected(ValueError):
    """A vacuum class has no recognizable periodic Jacobi tail in its window."""


# --------------------------------------------------------------------------
# sparse exact vectors


def _clean(v: Mapping[int, Fraction]) -> Vector:
    return {k: x for k, x in v.items() if x != 0}


def _dot(u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> Fraction:
    if len(u) > len(v):
        u, v = v, u
    return sum((x * v[k] for k, x in u.items() if k in v), Fraction(0))


def _axpy(a: Fraction, x: Mapping[int, Fraction], y: Mapping[int, Fraction]) -> Vector:
    out = dict(y)
    for k, v in x.items():
        out[k] = out.get(k, 0) + a * v
    return _clean(out)


def _is_multiple(u: Mapping[int, Fraction], v: Mapping[int, Fraction], c: Fraction) -> bool:
    keys = set(u) | set(v)
    return all(u.get(k, 0) == c * v.get(k, 0) for k in keys)


# --------------------------------------------------------------------------
# partition and components


@dataclass(frozen=True)
class DistancePartition:
    """Levels of the distance to ``sources``.

    ``certified`` is the largest ``n`` such that every vertex in levels
    ``0..n`` has its full neighbour set, so levels up to ``certified + 1``
    are exact.
    """

    graph: RootedGraph
    sources: tuple[int, ...]
    level: tuple[int, ...]
    levels: tuple[tuple[int, ...], ...]
    certified: int


def distance_partition(g: RootedGraph, sources: Iterable[int]) -> DistancePartition:
    sources = tuple(sorted(set(sources)))
    if not sources:
        raise ValueError("source set is empty")
    dist = bfs_distances(g.adjacency, sources)
    depth = max(dist.values())
    levels: list[list[int]] = [[] for _ in range(depth + 1)]
    for v in range(g.n_vertices):
        levels[dist[v]].append(v)
    bad = [dist[v] for v in g.unfaithful]
    certified = (min(bad) - 1) if bad else depth
    return DistancePartition(
        graph=g,
        sources=sources,
        level=tuple(dist[v] for v in range(g.n_vertices)),
        levels=tuple(tuple(lv) for lv in levels),
        certified=certified,
    )


@dataclass(frozen=True)
class QuantumComponents:
    """Raising, keeping and lowering parts of the adjacency matrix.

    ``up[v]`` lists the neighbours one level further out, so the raising
    operator maps ``delta(v)`` to the sum over ``up[v]``.
    """

    partition: DistancePartition
    up: tuple[tuple[int, ...], ...]
    same: tuple[tuple[int, ...], ...]
    down: tuple[tuple[int, ...], ...]

    def _apply(self, table, vec: Mapping[int, Fraction]) -> Vector:
        out: dict[int, Fraction] = defaultdict(int)
        for v, x in vec.items():
            for u in table[v]:
                out[u] += x
        return _clean(out)

    def raise_(self, vec: Mapping[int, Fraction]) -> Vector:
        return self._apply(self.up, vec)

    def keep(self, vec: Mapping[int, Fraction]) -> Vector:
        return self._apply(self.same, vec)

    def lower(self, vec: Mapping[int, Fraction]) -> Vector:
        return self._apply(self.down, vec)

    def matrix(self, which: str) -> sp.csr_matrix:
        """Sparse integer matrix of ``"plus"``, ``"zero"`` or ``"minus"``."""
        table = {"plus": self.up, "zero": self.same, "minus": self.down}[which]
        n = len(table)
        rows = [u for v in range(n) for u in table[v]]
        cols = [v for v in range(n) for _ in table[v]]
        return sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n, n))


def quantum_components(p: DistancePartition) -> QuantumComponents:
    g, lev = p.graph, p.level
    up = tuple(tuple(u for u in g.adjacency[v] if lev[u] == lev[v] + 1) for v in range(g.n_vertices))
    same = tuple(tuple(u for u in g.adjacency[v] if lev[u] == lev[v]) for v in range(g.n_vertices))
    down = tuple(tuple(u for u in g.adjacency[v] if lev[u] == lev[v] - 1) for v in range(g.n_vertices))
    return QuantumComponents(p, up, same, down)


def check_components(qc: QuantumComponents) -> dict[str, bool]:
    """Sum, adjointness and symmetry of the three parts on certified levels."""
    p = qc.partition
    g = p.graph
    region = [v for v in range(g.n_vertices) if p.level[v] <= p.certified]
    total = all(sorted(qc.up[v] + qc.same[v] + qc.down[v]) == list(g.adjacency[v]) for v in region)
    adjoint = all(v in qc.down[u] for v in region for u in qc.up[v])
    symmetric = all(v in qc.same[u] for v in region for u in qc.same[v])
    return {"sum_is_adjacency": total, "plus_minus_adjoint": adjoint, "zero_symmetric": symmetric}


# --------------------------------------------------------------------------
# J-vacua


@dataclass(frozen=True)
class JSequence:
    level: int
    alpha: tuple[Fraction, ...]
    omega: tuple[Fraction, ...]

    @property
    def key(self) -> tuple:
        return (self.alpha, self.omega)


def _vector_level(p: DistancePartition, vec: Mapping[int, Fraction]) -> int:
    levels = {p.level[v] for v in vec}
    if len(levels) != 1:
        raise ValueError("vector must be nonzero and supported on one level")
    return levels.pop()


def check_jvacuum(qc: QuantumComponents, xi: Mapping[int, Fraction], depth: int | None = None) -> JSequence:
    """Verify the J-vacuum property exactly and return the Jacobi entries.

    Entries ``n = 0..depth`` are checked; the default goes as far as the
    certified levels allow.  A vanishing raise terminates the sequence
    with ``omega_n = 0``.
    """
    p = qc.partition
    xi = _clean(xi)
    lvl = _vector_level(p, xi)
    reach = p.certified - lvl
    if reach < 0:
        raise TruncationTooShallow(f"level {lvl} lies beyond the certified level {p.certified}")
    if depth is None:
        depth = reach
    elif depth > reach:
        raise TruncationTooShallow(f"{depth + 1} entries at level {lvl} need certified level {lvl + depth}")
    if qc.lower(xi):
        raise NotVacuum("lowering part does not annihilate the vector")
    alpha: list[Fraction] = []
    omega: list[Fraction] = []
    v = xi
    norm = _dot(v, v)
    for n in range(depth + 1):
        kv = qc.keep(v)
        a = _dot(kv, v) / norm
        if not _is_multiple(kv, v, a):
            raise NotJVacuum(f"iterate {n} is not an eigenvector of the keeping part")
        alpha.append(a)
        u = qc.raise_(v)
        if not u:
            omega.append(Fraction(0))
            break
        back = qc.lower(u)
        new_norm = _dot(u, u)
        w = new_norm / norm
        if not _is_multiple(back, v, w):
            raise NotJVacuum(f"iterate {n} is not an eigenvector of lower*raise")
        omega.append(w)
        v, norm = u, new_norm
    return JSequence(lvl, tuple(alpha), tuple(omega))


@dataclass(frozen=True)
class Vacuum:
    level: int
    vector: Vector
    label: str = ""


@dataclass(frozen=True)
class VacuumSet:
    """Orthogonal J-vacua, level by level, on a truncated graph."""

    components: QuantumComponents
    vacua: tuple[Vacuum, ...]
    depth: int

    @property
    def partition(self) -> DistancePartition:
        return self.components.partition

    @property
    def graph(self) -> RootedGraph:
        return self.partition.graph

    def at_level(self, n: int) -> list[Vacuum]:
        return [x for x in self.vacua if x.level == n]


def _children_vectors(qc: QuantumComponents, parents: Iterable[int], label: str, keep_first: int = 0) -> list[Vacuum]:
    """Differences ``sum_{j<=k} delta(c_j) - k delta(c_{k+1})`` over each parent's children."""
    out = []
    lvl = qc.partition.level
    for w in parents:
        kids = sorted(qc.up[w], key=lambda c: qc.partition.graph.words[c])
        kids = kids[keep_first:] if keep_first else kids
        for k in range(1, len(kids)):
            vec: Vector = {c: Fraction(1) for c in kids[:k]}
            vec[kids[k]] = Fraction(-k)
            out.append(Vacuum(lvl[kids[k]], vec, label))
    return out


BUILTIN_FAMILIES = ("Tn", "Hn", "KnKm", "KnFm")


def builtin_graph(family: str, params: Sequence[int], depth: int) -> tuple[RootedGraph, list[int]]:
    """Truncated graph certifying levels ``0..depth`` and its source set."""
    if family == "Tn":
        (n,) = params
        g = make_standard("Tn", n, depth + 1)
        return g, [g.root]
    if family == "Hn":
        (n,) = params
        g = make_standard("Hn", n, depth + 1)
        return g, [g.root]
    if family in ("KnKm", "KnFm"):
        n, m = params
        second = make_standard("K", m) if family == "KnKm" else make_standard("F", m)
        g = m_free_product([make_standard("K", n), second], depth + 2)
        sources = [v for v, w in enumerate(g.words) if len(w) == 0 or (len(w) == 1 and w[0][0] == 1)]
        return g, sources
    raise ValueError(f"unknown family {family!r}; expected one of {BUILTIN_FAMILIES}")


def builtin_vacuum_set(family: str, params: Sequence[int], depth: int) -> VacuumSet:
    """Known orthogonal vacuum sets for trees and the two complete-graph free products.

    Trees use the root as source and, at each level, the differences of
    the children of every vertex one level up.  ``KnKm`` and ``KnFm``
    use the copy of ``K(n)`` at the root as level 0: its all-ones vector
    (``xi0``), the Helmert differences on it, and then the same
    differences over the children of every vertex, alternating factors.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    g, sources = builtin_graph(family, params, depth)
    qc = quantum_components(distance_partition(g, sources))
    levels = qc.partition.levels
    vacua: list[Vacuum] = []
    if family in ("Tn", "Hn"):
        vacua.append(Vacuum(0, {g.root: Fraction(1)}, "root"))
        for n in range(1, depth + 1):
            vacua += _children_vectors(qc, levels[n - 1], "branch")
    else:
        xs = sorted(sources, key=lambda v: g.words[v])
        vacua.append(Vacuum(0, {v: Fraction(1) for v in xs}, "xi0"))
        for i in range(1, len(xs)):
            vec: Vector = {v: Fraction(1) for v in xs[:i]}
            vec[xs[i]] = Fraction(-i)
            vacua.append(Vacuum(0, vec, "even"))
        for n in range(1, depth + 1):
            vacua += _children_vectors(qc, levels[n - 1], "odd" if n % 2 else "even")
    return VacuumSet(qc, tuple(vacua), depth)


def orthogonalize_vacuum_set(qc: QuantumComponents, raw: Iterable[Mapping[int, Fraction]], depth: int | None = None) -> VacuumSet:
    """Split vectors by level, keep J-vacua, and Gram-Schmidt within J-classes.

    Raises :class:`NotVacuum` or :class:`NotJVacuum` for a level component
    that fails the property.
    """
    p = qc.partition
    pieces: list[Vector] = []
    for vec in raw:
        by_level: dict[int, Vector] = defaultdict(dict)
        for v, x in _clean(vec).items():
            by_level[p.level[v]][v] = Fraction(x)
        pieces += [by_level[k] for k in sorted(by_level)]
    groups: dict[tuple, list[Vector]] = defaultdict(list)
    for vec in pieces:
        seq = check_jvacuum(qc, vec)
        groups[(seq.level, seq.key)].append(vec)
    vacua = []
    for (lvl, _), vecs in sorted(groups.items(), key=lambda kv: kv[0][0]):
        basis: list[Vector] = []
        for vec in vecs:
            r = dict(vec)
            for b in basis:
                r = _axpy(-_dot(r, b) / _dot(b, b), b, r)
            if r:
                basis.append(r)
        vacua += [Vacuum(lvl, b) for b in basis]
    top = max((x.level for x in vacua), default=0) if depth is None else depth
    return VacuumSet(qc, tuple(vacua), top)


# --------------------------------------------------------------------------
# generation and orthogonality audits


def _pairwise_orthogonal(vectors: Sequence[Vector]) -> tuple[bool, int]:
    """Exact check through an inverted index; returns (ok, number of nonzero pairs)."""
    holders: dict[int, list[int]] = defaultdict(list)
    for i, vec in enumerate(vectors):
        for v in vec:
            holders[v].append(i)
    dots: dict[tuple[int, int], Fraction] = defaultdict(int)
    for v, ids in holders.items():
        for i, k in combinations(ids, 2):
            dots[(i, k)] += vectors[i][v] * vectors[k][v]
    bad = sum(1 for x in dots.values() if x != 0)
    return bad == 0, bad


@dataclass(frozen=True)
class LevelReport:
    level: int
    basis_size: int
    level_size: int
    orthogonal: bool
    vacua: int

    @property
    def passed(self) -> bool:
        return self.orthogonal and self.basis_size == self.level_size

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "basis_size": self.basis_size,
            "level_size": self.level_size,
            "vacua": self.vacua,
            "orthogonal": self.orthogonal,
            "pass": self.passed,
        }


def generating_check(vs: VacuumSet, up_to_level: int | None = None) -> list[LevelReport]:
    """Grow ``B_{n+1} = raise(B_n) + Xi_{n+1}`` and compare with the level sizes."""
    qc = vs.components
    top = vs.depth if up_to_level is None else up_to_level
    if top > qc.partition.certified + 1:
        raise TruncationTooShallow(f"level {top} is not certified")
    reports = []
    current: list[Vector] = []
    for n in range(top + 1):
        fresh = [dict(x.vector) for x in vs.at_level(n)]
        current = [u for u in (qc.raise_(b) for b in current) if u] + fresh
        ok, _ = _pairwise_orthogonal(current)
        reports.append(LevelReport(n, len(current), len(qc.partition.levels[n]), ok, len(fresh)))
    return reports


def norm_recursion_check(qc: QuantumComponents, xi: Mapping[int, Fraction], depth: int | None = None) -> bool:
    """``|raise^{n+1} xi|^2 == omega_n |raise^n xi|^2`` and iterates mutually orthogonal."""
    seq = check_jvacuum(qc, xi, depth)
    iterates = [_clean(xi)]
    for _ in range(len(seq.omega) - 1):
        iterates.append(qc.raise_(iterates[-1]))
    norms = [_dot(v, v) for v in iterates]
    ok = all(norms[n + 1] == seq.omega[n] * norms[n] for n in range(len(norms) - 1))
    return ok and all(_dot(iterates[a], iterates[b]) == 0 for a, b in combinations(range(len(iterates)), 2))


# --------------------------------------------------------------------------
# spectrum


@dataclass
class VacuumClass:
    jacobi: JacobiParams
    measure: SpectralMeasure
    labels: set[str] = field(default_factory=set)
    counts: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        t = self.jacobi.tail
        return {
            "alpha": [str(a) for a in self.jacobi.alpha],
            "omega": [str(w) for w in self.jacobi.omega],
            "tail": None if t is None else {"preperiod": t.preperiod, "period": t.period},
            "labels": sorted(self.labels),
            "multiplicity": {str(k): v for k, v in sorted(self.counts.items())},
            "atoms": [[x, m] for x, m in self.measure.atoms],
            "intervals": [list(iv) for iv in self.measure.intervals],
        }


@dataclass
class SpectrumReport:
    classes: list[VacuumClass]
    point_spectrum: list[float]
    continuous_support: list[tuple[float, float]]

    def to_dict(self) -> dict:
        return {
            "classes": [c.to_dict() for c in self.classes],
            "point_spectrum": self.point_spectrum,
            "continuous_support": [list(iv) for iv in self.continuous_support],
        }


def _matches(j: JacobiParams, seq: JSequence) -> bool:
    alpha, omega = j.terms(len(seq.alpha))
    return tuple(alpha) == seq.alpha and tuple(omega[: len(seq.omega)]) == seq.omega


def spectrum(vs: VacuumSet, max_period: int = 2, reps: int = 3, atom_tol: float = 1e-8) -> SpectrumReport:
    """Group vacua by J-sequence, fit tails and collect the spectral data.

    Windows are matched longest first (lowest level first); a shorter
    window joins a class when it is a prefix of that class's sequence.
    """
    qc = vs.components
    seqs = [(x, check_jvacuum(qc, x.vector)) for x in vs.vacua]
    seqs.sort(key=lambda item: item[1].level)
    classes: list[VacuumClass] = []
    for vac, seq in seqs:
        home = next((c for c in classes if _matches(c.jacobi, seq)), None)
        if home is None:
            try:
                j = detect_tail(seq.alpha, seq.omega, max_period, reps)
            except ValueError:
                raise TailUndetected(
                    f"no tail of period <= {max_period} in the {len(seq.alpha)}-entry window at level {seq.level}"
                ) from None
            home = VacuumClass(j, spectral_measure(j))
            classes.append(home)
        if vac.label:
            home.labels.add(vac.label)
        home.counts[seq.level] = home.counts.get(seq.level, 0) + 1
    points: list[float] = []
    for c in classes:
        for x, _ in c.measure.atoms:
            if all(abs(x - y) > atom_tol for y in points):
                points.append(x)
    bands = sorted(iv for c in classes for iv in c.measure.intervals)
    merged: list[tuple[float, float]] = []
    for lo, hi in bands:
        if merged and lo <= merged[-1][1] + 1e-9:
            merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
        else:
            merged.append((lo, hi))
    return SpectrumReport(classes, sorted(points), merged)
