"""Command line interface.

Exit codes: 0 success, 1 domain error or failed check, 2 usage error.
Errors are written to stderr as a JSON object ``{"error", "kind"}``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import expr as ex
from . import graphcore as gc
from . import independence as ind
from . import measures as ms
from . import qdecomp as qd
from . import serialize as io_
from . import transforms as tr

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2
DEPTH_RETRIES = 8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would print plain text
        raise UsageError(message)


# --------------------------------------------------------------------------
# helpers


def _has_implicit_depth(node: ex.Expr) -> bool:
    if node.name in ex.INFINITE and len(node.args) == ex.INFINITE[node.name]:
        return True
    return any(isinstance(a, ex.Expr) and _has_implicit_depth(a) for a in node.args)


def _with_graph(text: str, depth: int | None, need: int, job):
    """Run ``job(graph)``, deepening implicit atoms until the graph certifies it."""
    node = ex.parse(text)
    start = need if depth is None else depth
    tries = DEPTH_RETRIES if depth is None and _has_implicit_depth(node) else 0
    for extra in range(tries + 1):
        g = ex.build(node, max(1, start + extra))
        try:
            return job(g)
        except (gc.TruncationTooShallow, KeyError):
            if extra == tries:
                raise


def _base_vertex(g: gc.RootedGraph, word: str | None) -> int:
    return g.root if word is None else g.index_of(ex.parse_word(word))


def _read_json(path: str):
    return json.loads(Path(path).read_text())


def _jacobi_from_graph(g: gc.RootedGraph, order: int, base: int | None = None) -> tr.JacobiParams:
    return tr.moments_to_jacobi(tr.Distribution(gc.moments(g, order, base)))


def _with_tail(j: tr.JacobiParams) -> tr.JacobiParams:
    if j.tail is not None or not j.truncated:
        return j
    return tr.detect_tail(j.alpha, j.omega)


def _load_jacobi(args) -> tr.JacobiParams:
    if args.jacobi:
        return io_.jacobi_from_json(_read_json(args.jacobi))
    if not args.expr:
        raise UsageError("give --jacobi FILE or --expr E")
    j = _with_graph(args.expr, args.depth, math.ceil(args.order / 2), lambda g: _jacobi_from_graph(g, args.order))
    return _with_tail(j)


def _emit(obj) -> None:
    print(io_.dumps(obj))


def _checks(records: list[tr.CheckRecord]) -> int:
    _emit([r.to_dict() for r in records])
    return EXIT_OK if all(r.passed for r in records) else EXIT_DOMAIN


# --------------------------------------------------------------------------
# subcommands


def cmd_graph(args) -> int:
    g = ex.build(ex.parse(args.expr), args.depth)
    _emit(io_.graph_to_json(g))
    return EXIT_OK


def cmd_moments(args) -> int:
    def job(g):
        base = _base_vertex(g, args.base)
        return gc.moments(g, args.order, base)

    _emit(_with_graph(args.expr, args.depth, math.ceil(args.order / 2), job))
    return EXIT_OK


def cmd_jacobi(args) -> int:
    def job(g):
        return _jacobi_from_graph(g, args.order, _base_vertex(g, args.base))

    j = _with_graph(args.expr, args.depth, math.ceil(args.order / 2), job)
    if args.detect_tail:
        j = _with_tail(j)
    _emit(io_.jacobi_to_json(j))
    return EXIT_OK


def cmd_density(args) -> int:
    try:
        xs = io_.grid_points(args.grid)
    except ValueError as err:
        raise UsageError(str(err)) from None
    j = _load_jacobi(args)
    ys = ms.density(j, xs, eps=ms.DEFAULT_EPS if args.richardson else None)
    table = io_.density_csv(xs, ys)
    if args.out:
        Path(args.out).write_text(table)
        _emit(ms.spectral_measure(j).to_dict(grid_file=args.out))
    else:
        sys.stdout.write(table)
    return EXIT_OK


def cmd_atoms(args) -> int:
    _emit(ms.spectral_measure(_load_jacobi(args)).to_dict())
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def cmd_spectrum(args) -> int:
    vs = qd.builtin_vacuum_set(args.family, _int_list(args.params), args.depth)
    levels = qd.generating_check(vs)
    report = qd.spectrum(vs).to_dict()
    report["levels"] = [r.to_dict() for r in levels]
    _emit(report)
    return EXIT_OK if all(r.passed for r in levels) else EXIT_DOMAIN


def _sources(g: gc.RootedGraph, spec: str) -> list[int]:
    if spec == "root":
        return [g.root]
    kind, _, rest = spec.partition(":")
    if kind == "word":
        return [g.index_of(ex.parse_word(w)) for w in rest.split(";")]
    if kind == "level0":
        factor = int(rest)
        return [v for v, w in enumerate(g.words) if not w or (len(w) == 1 and w[0][0] == factor)]
    raise UsageError(f"bad --v0 {spec!r}: use root, word:F:V,...;F:V,... or level0:FACTOR")


def _vacuum_dimensions(qc: qd.QuantumComponents) -> list[int]:
    """Dimension of the kernel of the lowering part on each certified level."""
    p = qc.partition
    dims = []
    for n in range(min(p.certified + 1, len(p.levels) - 1) + 1):
        if n == 0:
            dims.append(len(p.levels[0]))
            continue
        rows = {v: i for i, v in enumerate(p.levels[n])}
        cols = p.levels[n - 1]
        mat = np.zeros((len(rows), len(cols)))
        for k, v in enumerate(cols):
            for u in qc.up[v]:
                mat[rows[u], k] = 1.0
        dims.append(len(rows) - int(np.linalg.matrix_rank(mat)))
    return dims


def cmd_qdecomp(args) -> int:
    g = ex.build(ex.parse(args.expr), args.depth)
    qc = qd.quantum_components(qd.distance_partition(g, _sources(g, args.v0)))
    p = qc.partition
    xi = {v: Fraction(1) for v in p.levels[0]}
    try:
        seq = qd.check_jvacuum(qc, xi)
        indicator = {"alpha": [str(a) for a in seq.alpha], "omega": [str(w) for w in seq.omega]}
    except (qd.NotJVacuum, gc.TruncationTooShallow) as err:
        indicator = {"error": str(err)}
    _emit(
        {
            "certified_level": p.certified,
            "level_sizes": [len(lv) for lv in p.levels[: p.certified + 2]],
            "components": qd.check_components(qc),
            "vacuum_dimensions": _vacuum_dimensions(qc),
            "level0_indicator": indicator,
        }
    )
    return EXIT_OK


def cmd_check(args) -> int:
    kind = args.kind
    if kind in ("prop31", "decomp") and (args.a or args.b):
        a = io_.distribution_from_json(_read_json(args.a), args.order)
        b = io_.distribution_from_json(_read_json(args.b), args.order)
        fn = tr.check_prop31 if kind == "prop31" else tr.check_subordination
        return _checks(fn(a, b, args.order))
    if not args.expr:
        raise UsageError(f"check {kind} needs --expr (or --a/--b files for prop31/decomp)")
    node = ex.parse(args.expr)
    need = math.ceil(args.max_len / 2)
    if kind == "decomp":
        if node.name != "mfree" or len(node.args) != 3:
            raise UsageError("check decomp takes --expr mfree(G1,G2,m)")
        g1, g2 = (ex.build(a, args.depth or need) for a in node.args[:2])
        return _checks(ind.check_decomposition(g1, g2, node.args[2]))
    if kind == "freeness":
        return _checks(_with_graph(args.expr, args.depth, need, lambda g: ind.check_freeness(g, args.max_len)))
    if kind == "orthogonality":
        if node.name != "orth":
            raise UsageError("check orthogonality takes --expr orth(G1,G2)")

        def job(g):
            sp = ind.StatePair(g, _base_vertex(g, args.base)) if args.base else None
            return ind.check_orthogonality(g, sp, args.max_len)

        return _checks(_with_graph(args.expr, args.depth, need, job))
    if kind == "sfreeness":
        if node.name != "branch":
            raise UsageError("check sfreeness takes --expr branch(G1,G2,j,m)")

        def job(g):
            sp = ind.StatePair(g, _base_vertex(g, args.base)) if args.base else None
            return ind.check_sfreeness(g, sp, args.max_len, printed_form=args.printed_form)

        return _checks(_with_graph(args.expr, args.depth, need, job))
    raise UsageError(f"check {kind} needs --a and --b files")


CONVOLUTIONS = {
    "boolean": tr.boolean_conv,
    "monotone": tr.monotone_conv,
    "orth": tr.orth_conv,
    "sfree": tr.sfree_conv,
    "free": tr.free_conv,
}


def cmd_convolve(args) -> int:
    a = io_.distribution_from_json(_read_json(args.a), args.order)
    b = io_.distribution_from_json(_read_json(args.b), args.order)
    if args.op == "mfree":
        if args.m is None:
            raise UsageError("--op mfree needs --m")
        d = tr.mfree_conv(a, b, args.m, args.order)
    else:
        d = CONVOLUTIONS[args.op](a, b, args.order)
    out = io_.distribution_to_json(d)
    try:
        out["jacobi"] = io_.jacobi_to_json(tr.moments_to_jacobi(d))
    except ValueError:
        out["jacobi"] = None
    _emit(out)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="freeprod", description="Spectra of rooted-graph products.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def graph_args(s, order=True):
        s.add_argument("--expr", required=True)
        if order:
            s.add_argument("--order", type=int, required=True)
        s.add_argument("--depth", type=int, help="depth for infinite atoms (default: just enough)")

    s = sub.add_parser("graph", help="print a graph as JSON")
    s.add_argument("--expr", required=True)
    s.add_argument("--depth", type=int, default=4)
    s.set_defaults(fn=cmd_graph)

    s = sub.add_parser("moments", help="closed-walk counts at a vertex")
    graph_args(s)
    s.add_argument("--base", help="vertex word such as 2:1,1:2 (default: root)")
    s.set_defaults(fn=cmd_moments)

    s = sub.add_parser("jacobi", help="Jacobi parameters from walk moments")
    graph_args(s)
    s.add_argument("--base")
    s.add_argument("--detect-tail", action="store_true")
    s.set_defaults(fn=cmd_jacobi)

    for name, fn in (("density", cmd_density), ("atoms", cmd_atoms)):
        s = sub.add_parser(name)
        s.add_argument("--jacobi", help="Jacobi JSON file")
        s.add_argument("--expr")
        s.add_argument("--order", type=int, default=24, help="moment order used with --expr")
        s.add_argument("--depth", type=int)
        if name == "density":
            s.add_argument("--grid", required=True, help="a:b:steps")
            s.add_argument("--out", help="write the CSV here and print measure JSON")
            s.add_argument("--richardson", action="store_true", help="extrapolate from off-axis values instead")
        s.set_defaults(fn=fn)

    s = sub.add_parser("spectrum", help="spectrum of a builtin family via its vacuum set")
    s.add_argument("--family", required=True, choices=qd.BUILTIN_FAMILIES)
    s.add_argument("--params", required=True, help="comma-separated, e.g. 2,3")
    s.add_argument("--depth", type=int, default=6)
    s.set_defaults(fn=cmd_spectrum)

    s = sub.add_parser("qdecomp", help="distance partition and vacuum dimensions")
    s.add_argument("--expr", required=True)
    s.add_argument("--v0", default="root")
    s.add_argument("--depth", type=int, default=6)
    s.set_defaults(fn=cmd_qdecomp)

    s = sub.add_parser("check", help="independence and identity checks")
    s.add_argument("kind", choices=("freeness", "orthogonality", "sfreeness", "prop31", "decomp"))
    s.add_argument("--expr")
    s.add_argument("--depth", type=int)
    s.add_argument("--max-len", type=int, default=6)
    s.add_argument("--base")
    s.add_argument("--printed-form", action="store_true")
    s.add_argument("--a")
    s.add_argument("--b")
    s.add_argument("--order", type=int, default=12)
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("convolve", help="convolution of two moment/Jacobi files")
    s.add_argument("--op", required=True, choices=(*CONVOLUTIONS, "mfree"))
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--m", type=int)
    s.set_defaults(fn=cmd_convolve)
    return p


DOMAIN_ERRORS = (
    ValueError,
    KeyError,
    ArithmeticError,
    gc.VertexBudgetExceeded,
    OSError,
)


def _fail(kind: str, err, code: int) -> int:
    msg = err.args[0] if isinstance(err, KeyError) and err.args else str(err)
    sys.stderr.write(json.dumps({"error": msg, "kind": kind}) + "\n")
    return code


def _glue_grid(argv: list[str]) -> list[str]:
    """Let ``--grid -3:3:7`` through; argparse would read ``-3:3:7`` as an option."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok == "--grid":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--grid={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    try:
        argv = _glue_grid(sys.argv[1:] if argv is None else list(argv))
        args = build_parser().parse_args(argv)
        return args.fn(args)
    except UsageError as err:
        return _fail("usage", err, EXIT_USAGE)
    except ex.ParseError as err:
        return _fail("syntax", err, EXIT_USAGE)
    except DOMAIN_ERRORS as err:
        return _fail(type(err).__name__, err, EXIT_DOMAIN)


if __name__ == "__main__":
    sys.exit(main())
