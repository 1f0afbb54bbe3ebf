"""A small expression language for rooted graphs.

    expr := IDENT '(' args ')' | IDENT
    args := (expr | INT) (',' (expr | INT))*

Atoms: ``K(n) F(m) Z2 P(k) T1 Z Tn(n) Hn(n)``.  The infinite atoms take an
optional trailing depth (``Z(6)``, ``Tn(2,5)``); without one they are built
at whatever depth the caller asks for.  Operators: ``star(e,e)``,
``comb(e,e)``, ``orth(e,e)``, ``orthiter(e,e,m)``, ``mfree(e,e,m)``,
``mfree(e,e,e,m)`` and ``branch(e,e,j,m)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import graphcore as gc


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int, expected: frozenset[str] = frozenset()):
        self.line, self.col, self.expected = line, col, expected
        exp = f"; expected one of {sorted(expected)}" if expected else ""
        super().__init__(f"{line}:{col}: {message}{exp}")


@dataclass(frozen=True)
class Expr:
    name: str
    args: tuple[Union["Expr", int], ...] = ()
    pos: tuple[int, int] = (1, 1)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Expr) and (self.name, self.args) == (other.name, other.args)

    def __hash__(self) -> int:
        return hash((self.name, self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"


# name -> accepted signatures, "e" for a subexpression and "i" for an integer
SIGNATURES: dict[str, tuple[str, ...]] = {
    "K": ("i",),
    "F": ("i",),
    "Z2": ("",),
    "P": ("i",),
    "T1": ("", "i"),
    "Z": ("", "i"),
    "Tn": ("i", "ii"),
    "Hn": ("i", "ii"),
    "star": ("ee",),
    "comb": ("ee",),
    "orth": ("ee",),
    "orthiter": ("eei",),
    "mfree": ("eei", "eeei"),
    "branch": ("eeii",),
}
INFINITE = {"T1": 0, "Z": 0, "Tn": 1, "Hn": 1}  # atom -> number of args before the depth


def _tokens(text: str):
    i, line, col = 0, 1, 1
    while i < len(text):
        ch = text[i]
        if ch in " \t\r":
            i, col = i + 1, col + 1
        elif ch == "\n":
            i, line, col = i + 1, line + 1, 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            yield ("INT", text[i:j], line, col)
            col += j - i
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            yield ("IDENT", text[i:j], line, col)
            col += j - i
            i = j
        elif ch in "(),":
            yield (ch, ch, line, col)
            i, col = i + 1, col + 1
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    yield ("EOF", "", line, col)


class _Parser:
    def __init__(self, text: str):
        self.toks = list(_tokens(text))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, *kinds: str):
        tok = self.peek()
        if tok[0] not in kinds:
            what = "end of input" if tok[0] == "EOF" else repr(tok[1])
            raise ParseError(f"unexpected {what}", tok[2], tok[3], frozenset(kinds))
        self.i += 1
        return tok

    def expr(self) -> Expr:
        _, name, line, col = self.take("IDENT")
        args: list = []
        if self.peek()[0] == "(":
            self.take("(")
            args.append(self.arg())
            while self.peek()[0] == ",":
                self.take(",")
                args.append(self.arg())
            self.take(")", ",")
        node = Expr(name, tuple(args), (line, col))
        _check_signature(node)
        return node

    def arg(self):
        if self.peek()[0] == "INT":
            return int(self.take("INT")[1])
        if self.peek()[0] == "IDENT":
            return self.expr()
        tok = self.peek()
        raise ParseError("expected an expression or integer", tok[2], tok[3], frozenset({"IDENT", "INT"}))


def _check_signature(node: Expr) -> None:
    line, col = node.pos
    if node.name not in SIGNATURES:
        raise ParseError(f"unknown name {node.name!r}", line, col, frozenset(SIGNATURES))
    sig = "".join("e" if isinstance(a, Expr) else "i" for a in node.args)
    allowed = SIGNATURES[node.name]
    if sig not in allowed:
        shown = " or ".join(f"{node.name}({','.join('expr' if c == 'e' else 'int' for c in s)})" for s in allowed)
        raise ParseError(f"{node.name}: bad arguments, expected {shown}", line, col)
    if any(isinstance(a, int) and a < 1 for a in node.args):
        raise ParseError(f"{node.name}: integer arguments must be >= 1", line, col)


def parse(text: str) -> Expr:
    p = _Parser(text)
    node = p.expr()
    p.take("EOF")
    return node


def build(node: Expr, depth: int, budget: int = gc.DEFAULT_VERTEX_BUDGET) -> gc.RootedGraph:
    """Materialize ``node``; infinite atoms without an explicit depth use ``depth``."""
    name, args = node.name, node.args
    if name in INFINITE:
        params = list(args)
        if len(params) == INFINITE[name]:
            params.append(depth)
        return gc.make_standard(name, *params)
    if name in ("K", "F", "Z2", "P"):
        return gc.make_standard(name, *args)
    subs = [build(a, depth, budget) for a in args if isinstance(a, Expr)]
    ints = [a for a in args if isinstance(a, int)]
    if name == "star":
        return gc.star_product(*subs)
    if name == "comb":
        return gc.comb_product(*subs)
    if name == "orth":
        return gc.orth_product(*subs)
    if name == "orthiter":
        return gc.orth_iter(subs[0], subs[1], ints[0])
    if name == "mfree":
        return gc.m_free_product(subs, ints[0], budget)
    if name == "branch":
        j, m = ints
        if j not in (1, 2):
            raise ParseError("branch: j must be 1 or 2", *node.pos)
        return gc.branch_graph(subs, j, m, budget)
    raise AssertionError(name)


def parse_word(text: str) -> tuple[tuple[int, int], ...]:
    """``"2:1,1:2"`` -> ``((2, 1), (1, 2))``; the empty string is the root."""
    text = text.strip()
    if not text or text == "root":
        return ()
    out = []
    for part in text.split(","):
        try:
            f, v = part.split(":")
            out.append((int(f), int(v)))
        except ValueError:
            raise ValueError(f"bad letter {part!r}, expected factor:vertex") from None
    return tuple(out)
