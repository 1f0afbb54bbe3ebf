"""Truncated power series over the rationals.

A series is a plain list ``c`` of :class:`fractions.Fraction` standing for
``sum(c[k] * w**k)``.  Every function takes the number of coefficients to
keep, so truncation is always explicit.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Series = list[Fraction]


def as_series(coeffs: Sequence, n: int | None = None) -> Series:
    out = [Fraction(c) for c in coeffs]
    if n is None:
        return out
    return (out + [Fraction(0)] * n)[:n]


def add(a: Sequence[Fraction], b: Sequence[Fraction], n: int) -> Series:
    a, b = as_series(a, n), as_series(b, n)
    return [x + y for x, y in zip(a, b)]


def sub(a: Sequence[Fraction], b: Sequence[Fraction], n: int) -> Series:
    a, b = as_series(a, n), as_series(b, n)
    return [x - y for x, y in zip(a, b)]


def scale(a: Sequence[Fraction], s: Fraction, n: int) -> Series:
    return [s * x for x in as_series(a, n)]


def mul(a: Sequence[Fraction], b: Sequence[Fraction], n: int) -> Series:
    out = [Fraction(0)] * n
    for i, x in enumerate(a[:n]):
        if x == 0:
            continue
        for j, y in enumerate(b[: n - i]):
            if y:
                out[i + j] += x * y
    return out


def inv(a: Sequence[Fraction], n: int) -> Series:
    """Multiplicative inverse; requires a nonzero constant term."""
    a = as_series(a, n)
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    out = [Fraction(0)] * n
    out[0] = 1 / a[0]
    for k in range(1, n):
        acc = sum((a[i] * out[k - i] for i in range(1, k + 1)), Fraction(0))
        out[k] = -acc * out[0]
    return out


def compose(a: Sequence[Fraction], b: Sequence[Fraction], n: int) -> Series:
    """Return ``a(b(w))``; ``b`` must have zero constant term.

    Horner evaluation keeps the work at O(n) series products.
    """
    b = as_series(b, n)
    if n and b[0] != 0:
        raise ValueError("inner series must vanish at 0")
    a = as_series(a, n)
    out = [Fraction(0)] * n
    for coeff in reversed(a):
        out = mul(out, b, n)
        out[0] += coeff
    return out


def revert(a: Sequence[Fraction], n: int) -> Series:
    """Compositional inverse ``b`` with ``a(b(w)) = w`` by Lagrange inversion.

    ``[w^k] b = (1/k) [t^(k-1)] (t / a(t))^k``.
    """
    a = as_series(a, n + 1)
    if a[0] != 0 or a[1] == 0:
        raise ValueError("reversion needs a[0] == 0 and a[1] != 0")
    h = inv(a[1:], n)  # t / a(t)
    out = [Fraction(0)] * n
    power = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for k in range(1, n):
        power = mul(power, h, n)
        out[k] = power[k - 1] / k
    return out
