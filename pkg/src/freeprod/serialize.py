"""JSON and CSV formats shared by the command line and the scripts."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from typing import Iterable, Sequence

from .graphcore import RootedGraph, bfs_distances, build_graph
from .transforms import Distribution, JacobiParams, Tail, jacobi_to_moments


def frac(x) -> str:
    return str(Fraction(x))


def parse_frac(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s.strip())
    raise ValueError(f"exact values are written as integers or 'p/q' strings, got {s!r}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


# graphs


def graph_to_json(g: RootedGraph) -> dict:
    r = g.faithful_radius
    return {
        "vertices": [{"id": i, "word": [list(letter) for letter in w]} for i, w in enumerate(g.words)],
        "edges": [list(e) for e in g.edges()],
        "root": g.root,
        "faithful_radius": "inf" if r == math.inf else int(r),
        "unfaithful": sorted(g.unfaithful),
    }


def graph_from_json(data: dict) -> RootedGraph:
    """Inverse of :func:`graph_to_json`.

    Without an ``unfaithful`` list, every vertex at distance ``>= faithful_radius``
    from the root is treated as possibly incomplete.
    """
    verts = sorted(data["vertices"], key=lambda v: v["id"])
    if [v["id"] for v in verts] != list(range(len(verts))):
        raise ValueError("vertex ids must be 0..n-1")
    words = [tuple((int(a), int(b)) for a, b in v["word"]) for v in verts]
    edges = [(int(a), int(b)) for a, b in data["edges"]]
    root = int(data["root"])
    if "unfaithful" in data:
        bad = [int(v) for v in data["unfaithful"]]
    else:
        radius = data.get("faithful_radius", "inf")
        if radius == "inf":
            bad = []
        else:
            adj: list[list[int]] = [[] for _ in words]
            for a, b in edges:
                adj[a].append(b)
                adj[b].append(a)
            dist = bfs_distances(adj, [root])
            bad = [v for v, d in dist.items() if d >= int(radius)]
    return build_graph(words, edges, root, bad)


# Jacobi parameters and distributions


def jacobi_to_json(j: JacobiParams) -> dict:
    t = j.tail
    return {
        "alpha": [frac(a) for a in j.alpha],
        "omega": [frac(w) for w in j.omega],
        "tail": None if t is None else {"preperiod": t.preperiod, "period": t.period},
    }


def jacobi_from_json(data: dict) -> JacobiParams:
    t = data.get("tail")
    tail = None if t is None else Tail(int(t["preperiod"]), int(t["period"]))
    return JacobiParams(
        tuple(parse_frac(a) for a in data["alpha"]),
        tuple(parse_frac(w) for w in data["omega"]),
        tail,
    )


def distribution_to_json(d: Distribution) -> dict:
    return {"moments": [frac(m) for m in d.moments]}


def distribution_from_json(data: dict, order: int | None = None) -> Distribution:
    """Read ``{"moments": [...]}`` or a Jacobi JSON object.

    Jacobi input is expanded to ``order`` moments (required then).
    """
    if "moments" in data:
        d = Distribution([parse_frac(m) for m in data["moments"]])
        return d if order is None else d.truncate(order)
    if "alpha" in data:
        if order is None:
            raise ValueError("reading a distribution from Jacobi parameters needs an order")
        j = jacobi_from_json(data)
        if j.tail is None and j.truncated and order > 2 * len(j.omega):
            raise ValueError(f"untailed Jacobi lists of length {len(j.omega)} fix moments only to order {2 * len(j.omega)}")
        return jacobi_to_moments(j, order)
    raise ValueError("expected a 'moments' list or Jacobi 'alpha'/'omega' lists")


# density grids


def grid_points(spec: str) -> list[float]:
    """``"a:b:steps"`` -> ``steps`` evenly spaced points from a to b inclusive."""
    try:
        a, b, n = spec.split(":")
        lo, hi, steps = float(a), float(b), int(n)
    except ValueError:
        raise ValueError(f"grid must look like a:b:steps, got {spec!r}") from None
    if steps < 1:
        raise ValueError("grid needs at least one step")
    if steps == 1:
        return [lo]
    return [lo + (hi - lo) * k / (steps - 1) for k in range(steps)]


def density_csv(xs: Sequence[float], ys: Iterable[float]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "density"])
    for x, y in zip(xs, ys):
        w.writerow([repr(float(x)), repr(float(y))])
    return buf.getvalue()


def read_density_csv(text: str) -> list[tuple[float, float]]:
    rows = list(csv.reader(io.StringIO(text)))
    return [(float(x), float(y)) for x, y in rows[1:]]
