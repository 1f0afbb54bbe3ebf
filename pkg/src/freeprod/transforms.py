"""Exact moment transforms, the five convolutions and Jacobi parameters.

All series are truncated and exact.  Internally everything is a power series
in ``w = 1/z``:

* ``m(w) = sum M_n w^n``                (moment generating series)
* ``g(w) = w m(w)``                     (Cauchy transform ``G(1/w)``)
* ``k(w) = (1 - 1/m(w)) / w``           (``K(1/w)`` with ``K = z - 1/G``)

so that composition with ``F = 1/G`` becomes composition with ``g``.
A distribution known to order ``N`` (moments ``M_0..M_N``) keeps order ``N``
through every operation below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import series as ps


class NegativeOmega(ValueError):
    """Moments are not those of a probability measure (a Hankel determinant is negative)."""


@dataclass(frozen=True)
class Distribution:
    """Moments ``M_0..M_N`` of a probability measure, exact."""

    moments: tuple[Fraction, ...]

    def __init__(self, moments: Sequence) -> None:
        vals = tuple(Fraction(m) for m in moments)
        if not vals or vals[0] != 1:
            raise ValueError("moment sequences start with M_0 = 1")
        object.__setattr__(self, "moments", vals)

    @property
    def order(self) -> int:
        return len(self.moments) - 1

    def truncate(self, order: int) -> "Distribution":
        if order > self.order:
            raise ValueError(f"order {order} exceeds available order {self.order}")
        return Distribution(self.moments[: order + 1])


KINDS = ("M", "G", "K", "F", "R")


@dataclass(frozen=True)
class TransformSeries:
    """A truncated transform.

    Basis by kind: ``M`` and ``R`` use ``z**i``; ``G`` and ``K`` use
    ``z**-i``; ``F`` uses ``z**(1-i)``, so ``F.coeffs[0] == 1``.
    """

    kind: str
    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown transform kind {self.kind!r}")


# --------------------------------------------------------------------------
# w-series of a distribution


def _m(d: Distribution, n: int) -> ps.Series:
    return ps.as_series(d.moments, n)


def _g(d: Distribution, n: int | None = None) -> ps.Series:
    n = d.order + 2 if n is None else n
    return ps.as_series([0, *d.moments], n)


def _k(d: Distribution) -> ps.Series:
    n = d.order + 1
    h = ps.inv(_m(d, n), n)
    return [-c for c in h[1:]]


def _from_m(m: Sequence[Fraction]) -> Distribution:
    return Distribution(m)


def _from_g(g: Sequence[Fraction]) -> Distribution:
    if g[0] != 0:
        raise ValueError("g must vanish at w = 0")
    return Distribution(g[1:])


def _from_k(k: Sequence[Fraction]) -> Distribution:
    n = len(k) + 1
    one_minus = [Fraction(1)] + [-c for c in k]
    return Distribution(ps.inv(one_minus, n))


def _r(d: Distribution) -> ps.Series:
    """Free cumulants ``kappa_1..kappa_N`` as ``R = sum kappa_{i+1} z**i``."""
    n = d.order + 2
    ginv = ps.revert(_g(d, n), n)  # G^{-1}(z) = 1 / ginv(z)
    h = ps.inv(ginv[1:], n - 1)  # z / ginv(z)
    return h[1:]


def _from_r(r: Sequence[Fraction]) -> Distribution:
    n = len(r) + 2
    # ginv(z) = z / (1 + z R(z))
    denom = [Fraction(1)] + list(r)
    ginv = [Fraction(0)] + ps.inv(denom, n - 1)
    return _from_g(ps.revert(ginv, n))


def to_transform(d: Distribution, kind: str) -> TransformSeries:
    if kind == "M":
        coeffs = list(d.moments)
    elif kind == "G":
        coeffs = _g(d)
    elif kind == "K":
        coeffs = _k(d)
    elif kind == "F":
        coeffs = [Fraction(1)] + [-c for c in _k(d)]
    elif kind == "R":
        coeffs = _r(d)
    else:
        raise ValueError(f"unknown transform kind {kind!r}")
    return TransformSeries(kind, tuple(coeffs))


def from_transform(t: TransformSeries) -> Distribution:
    c = list(t.coeffs)
    if t.kind == "M":
        return Distribution(c)
    if t.kind == "G":
        return _from_g(c)
    if t.kind == "K":
        return _from_k(c)
    if t.kind == "F":
        if c[0] != 1:
            raise ValueError("F must start with z")
        return _from_k([-x for x in c[1:]])
    return _from_r(c)


# --------------------------------------------------------------------------
# convolutions


def _common_order(a: Distribution, b: Distribution, order: int | None) -> int:
    n = min(a.order, b.order)
    if order is not None:
        if order > n:
            raise ValueError(f"order {order} exceeds available order {n}")
        n = order
    return n


def boolean_conv(a: Distribution, b: Distribution, order: int | None = None) -> Distribution:
    """Boolean convolution: K-transforms add."""
    n = _common_order(a, b, order)
    a, b = a.truncate(n), b.truncate(n)
    return _from_k(ps.add(_k(a), _k(b), n))


def free_conv(a: Distribution, b: Distribution, order: int | None = None) -> Distribution:
    """Free additive convolution: R-transforms add."""
    n = _common_order(a, b, order)
    a, b = a.truncate(n), b.truncate(n)
    return _from_r(ps.add(_r(a), _r(b), n))


def monotone_conv(a: Distribution, b: Distribution, order: int | None = None) -> Distribution:
    """Monotone convolution: ``F_a(F_b(z))``, i.e. ``g_a(g_b(w))``."""
    n = _common_order(a, b, order)
    a, b = a.truncate(n), b.truncate(n)
    return _from_g(ps.compose(_g(a), _g(b), n + 2))


def orth_conv(a: Distribution, b: Distribution, order: int | None = None) -> Distribution:
    """Orthogonal convolution: ``K_a(F_b(z))``, i.e. ``k_a(g_b(w))``."""
    n = _common_order(a, b, order)
    a, b = a.truncate(n), b.truncate(n)
    return _from_k(ps.compose(_k(a), _g(b, n), n))


def orth_power(a: Distribution, b: Distribution, m: int, order: int | None = None) -> Distribution:
    """Alternating iterate ``a |-_m b = a |- (b |-_{m-1} a)`` with ``a |-_0 b = a``."""
    n = _common_order(a, b, order)
    a, b = a.truncate(n), b.truncate(n)
    inner_a, inner_b = a, b  # current values of a |-_k b and b |-_k a
    for _ in range(m):
        inner_a, inner_b = orth_conv(a, inner_b), orth_conv(b, inner_a)
    return inner_a


def sfree_conv(a: Distribution, b: Distribution, order: int | None = None) -> Distribution:
    """Subordination (s-free) convolution as the stable limit of ``a |-_m b``.

    Moments of ``a |-_m b`` are final up to order ``2m``, so
    ``ceil(N/2) + 1`` iterations suffice for order ``N``.
    """
    n = _common_order(a, b, order)
    return orth_power(a, b, math.ceil(n / 2) + 1, n)


def mfree_conv(a: Distribution, b: Distribution, m: int, order: int | None = None) -> Distribution:
    """``(a |-_m b)`` boolean-convolved with ``(b |-_m a)``."""
    if m < 1:
        raise ValueError("m must be positive")
    n = _common_order(a, b, order)
    return boolean_conv(orth_power(a, b, m, n), orth_power(b, a, m, n))


def comb_branch_conv(a: Distribution, b: Distribution, m: int, order: int | None = None) -> Distribution:
    """``a`` monotone-convolved with the branch law ``b |-_m a``."""
    n = _common_order(a, b, order)
    return monotone_conv(a, orth_power(b, a, m, n))


def continued_composition(a: Distribution, b: Distribution, depth: int, order: int | None = None) -> Distribution:
    """``G_a(z - K_b(z - K_a(z - ...)))`` with ``depth`` K-transforms.

    Agrees with the free convolution up to order ``2 * depth``.
    """
    n = _common_order(a, b, order)
    a, b = a.truncate(n), b.truncate(n)
    ka, kb = _k(a), _k(b)
    x = [Fraction(0), Fraction(1)] + [Fraction(0)] * n  # 1/X with X = z
    for step in range(depth):
        k = kb if (depth - step) % 2 == 1 else ka
        inner = ps.compose(k, x, n + 2)
        x = [Fraction(0)] + ps.inv(ps.sub([Fraction(1)], [Fraction(0)] + inner, n + 1), n + 1)
    return _from_g(ps.compose(_g(a), x, n + 2))


# --------------------------------------------------------------------------
# identity checks


@dataclass(frozen=True)
class CheckRecord:
    condition: str
    instantiation: str
    lhs: object
    rhs: object
    passed: bool

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "instantiation": self.instantiation,
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "pass": self.passed,
        }


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _f_series(d: Distribution) -> ps.Series:
    """``F(1/w)`` as ``[coefficient of 1/w, w^0, w^1, ...]``."""
    return [Fraction(1)] + [-c for c in _k(d)]


def check_prop31(a: Distribution, b: Distribution, order: int | None = None) -> list[CheckRecord]:
    """Check the F-transform identities of the boolean and orthogonal convolutions.

    ``F_{a (+) b} = F_a + F_b - z`` and ``F_{a |- b} = F_a(F_b) - F_b + z``,
    compared coefficient-wise up to the common order.
    """
    n = _common_order(a, b, order)
    a, b = a.truncate(n), b.truncate(n)
    fa, fb = _f_series(a), _f_series(b)
    lhs_bool = _f_series(boolean_conv(a, b))
    rhs_bool = ps.sub(ps.add(fa, fb, n + 1), [Fraction(1)], n + 1)
    # F_a(F_b(z)) = 1 / g_a(g_b(w)); reuse the monotone law for it
    fab = _f_series(monotone_conv(a, b))
    lhs_orth = _f_series(orth_conv(a, b))
    rhs_orth = ps.add(ps.sub(fab, fb, n + 1), [Fraction(1)], n + 1)
    return [
        CheckRecord("F(a boolean b) = F_a + F_b - z", f"order {n}", lhs_bool, rhs_bool, lhs_bool == rhs_bool),
        CheckRecord("F(a orth b) = F_a(F_b) - F_b + z", f"order {n}", lhs_orth, rhs_orth, lhs_orth == rhs_orth),
    ]


def check_subordination(a: Distribution, b: Distribution, order: int | None = None) -> list[CheckRecord]:
    """Free convolution through the two s-free laws.

    ``F_{a+b} = F_a(F_{b>a}) = F_b(F_{a>b})`` and the boolean splitting
    ``F_{a+b} = F_{a>b} + F_{b>a} - z`` over the two branch laws.
    """
    n = _common_order(a, b, order)
    a, b = a.truncate(n), b.truncate(n)
    free = _f_series(free_conv(a, b))
    ab, ba = sfree_conv(a, b), sfree_conv(b, a)
    left = _f_series(monotone_conv(a, ba))
    right = _f_series(monotone_conv(b, ab))
    split = ps.sub(ps.add(_f_series(ab), _f_series(ba), n + 1), [Fraction(1)], n + 1)
    return [
        CheckRecord("F(a free b) = F_a(F(b sfree a))", f"order {n}", free, left, free == left),
        CheckRecord("F(a free b) = F_b(F(a sfree b))", f"order {n}", free, right, free == right),
        CheckRecord("F(a free b) = F(a sfree b) + F(b sfree a) - z", f"order {n}", free, split, free == split),
    ]


# --------------------------------------------------------------------------
# Jacobi parameters


@dataclass(frozen=True)
class Tail:
    """The sequence is periodic with ``period`` from index ``preperiod`` on."""

    preperiod: int
    period: int


@dataclass(frozen=True)
class JacobiParams:
    """Jacobi parameters of ``G = 1/(z - a0 - w0/(z - a1 - w1/(...)))``.

    Without a tail the lists are final: the sequence terminates at the first
    zero ``omega`` (a finitely supported law).  If no ``omega`` vanishes the
    lists are a truncation: measures read them as the corresponding Gauss
    quadrature (the last ``omega`` is unused), while moment reconstruction
    uses every stored entry.  ``truncated`` reports this case.
    """

    alpha: tuple[Fraction, ...]
    omega: tuple[Fraction, ...]
    tail: Tail | None = None

    def __post_init__(self) -> None:
        alpha = tuple(Fraction(a) for a in self.alpha)
        omega = tuple(Fraction(w) for w in self.omega)
        if len(alpha) != len(omega) or not alpha:
            raise ValueError("alpha and omega must be nonempty and of equal length")
        if any(w < 0 for w in omega):
            raise NegativeOmega("negative omega")
        if self.tail is not None:
            k, p = self.tail.preperiod, self.tail.period
            if k < 0 or p < 1 or len(alpha) < k + p:
                raise ValueError("explicit lists must cover the preperiod and one period")
            for i in range(k + p, len(alpha)):
                if alpha[i] != alpha[i - p] or omega[i] != omega[i - p]:
                    raise ValueError("explicit entries contradict the declared period")
            if any(omega[i] == 0 for i in range(k + p)):
                raise ValueError("a terminating sequence cannot carry a periodic tail")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "omega", omega)

    @property
    def size(self) -> int | None:
        """Number of atoms of a finite law; ``None`` with a tail."""
        if self.tail is not None:
            return None
        for i, w in enumerate(self.omega):
            if w == 0:
                return i + 1
        return len(self.alpha)

    @property
    def truncated(self) -> bool:
        return self.tail is None and all(w != 0 for w in self.omega)

    def coeff(self, k: int) -> tuple[Fraction, Fraction]:
        if self.tail is not None:
            pre, p = self.tail.preperiod, self.tail.period
            if k >= len(self.alpha):
                k = pre + (k - pre) % p
            return self.alpha[k], self.omega[k]
        if k >= self.size:
            return Fraction(0), Fraction(0)
        return self.alpha[k], self.omega[k]

    def terms(self, n: int) -> tuple[list[Fraction], list[Fraction]]:
        pairs = [self.coeff(k) for k in range(n)]
        return [a for a, _ in pairs], [w for _, w in pairs]

    def cycle(self) -> tuple[list[Fraction], list[Fraction]]:
        if self.tail is None:
            raise ValueError("no periodic tail")
        pre, p = self.tail.preperiod, self.tail.period
        return list(self.alpha[pre : pre + p]), list(self.omega[pre : pre + p])


def jacobi_sequences(d: Distribution) -> tuple[list[Fraction], list[Fraction]]:
    """Every Jacobi entry the moments ``M_0..M_N`` determine, exactly.

    Runs the three-term recurrence for monic orthogonal polynomials under
    the moment functional.  ``alpha_k`` needs ``M_{2k+1}`` and ``omega_k``
    needs ``M_{2k+2}``, so ``alpha`` may be one entry longer than
    ``omega``.  Stops at the first ``omega == 0``.
    """
    mom = d.moments
    n = d.order

    def pair(p: Sequence[Fraction], q: Sequence[Fraction], shift: int = 0) -> Fraction:
        return sum(
            (pi * qj * mom[i + j + shift] for i, pi in enumerate(p) if pi for j, qj in enumerate(q) if qj),
            Fraction(0),
        )

    alpha: list[Fraction] = []
    omega: list[Fraction] = []
    prev: list[Fraction] = []
    cur = [Fraction(1)]
    norm = Fraction(1)
    k = 0
    while 2 * k + 1 <= n:
        a = pair(cur, cur, 1) / norm
        alpha.append(a)
        if 2 * k + 2 > n:
            break
        nxt = [Fraction(0)] + cur
        for i, c in enumerate(cur):
            nxt[i] -= a * c
        if omega:
            for i, c in enumerate(prev):
                nxt[i] -= omega[-1] * c
        new_norm = pair(nxt, nxt)
        w = new_norm / norm
        if w < 0:
            raise NegativeOmega(f"omega_{k} = {w} < 0")
        omega.append(w)
        if w == 0:
            break
        prev, cur, norm = cur, nxt, new_norm
        k += 1
    return alpha, omega


def moments_to_jacobi(d: Distribution) -> JacobiParams:
    """Jacobi parameters determined by the moments, as aligned lists.

    An ``alpha`` entry without its matching ``omega`` (odd order) is dropped;
    use :func:`jacobi_sequences` to keep it.
    """
    alpha, omega = jacobi_sequences(d)
    if not omega:
        raise ValueError("need moments up to order 2")
    return JacobiParams(tuple(alpha[: len(omega)]), tuple(omega))


def jacobi_to_moments(j: JacobiParams, order: int) -> Distribution:
    """Moments as weighted Motzkin path counts (exact)."""
    alpha, omega = j.terms(order // 2 + 2)
    vec = [Fraction(1)]  # vec[k] = weight of paths currently at height k
    out = [Fraction(1)]
    for step in range(order):
        nxt = [Fraction(0)] * (len(vec) + 1)
        for k, v in enumerate(vec):
            if not v:
                continue
            nxt[k] += alpha[k] * v
            nxt[k + 1] += v
            if k:
                nxt[k - 1] += omega[k - 1] * v
        # heights above the remaining steps cannot return to 0
        keep = min(len(nxt), order - step)
        vec = nxt[:keep]
        out.append(vec[0] if vec else Fraction(0))
    return Distribution(out)


def detect_tail(
    alpha: Sequence[Fraction], omega: Sequence[Fraction], max_period: int = 2, reps: int = 3
) -> JacobiParams:
    """Fit the smallest preperiod and period consistent with the data.

    A candidate must show ``reps`` full periods after its preperiod.
    Terminating sequences come back without a tail.  Raises
    :class:`ValueError` when nothing fits.
    """
    n = min(len(alpha), len(omega))
    alpha, omega = [Fraction(a) for a in alpha[:n]], [Fraction(w) for w in omega[:n]]
    for i, w in enumerate(omega):
        if w == 0:
            return JacobiParams(tuple(alpha[: i + 1]), tuple(omega[: i + 1]))
    for pre in range(n):
        for p in range(1, max_period + 1):
            if n - pre < reps * p:
                continue
            if all(alpha[i] == alpha[i - p] and omega[i] == omega[i - p] for i in range(pre + p, n)):
                return JacobiParams(tuple(alpha[: pre + p]), tuple(omega[: pre + p]), Tail(pre, p))
    raise ValueError("no periodic tail detected in the available window")
