"""Spectral measures from Jacobi parameters.

A law with a periodic Jacobi tail has an algebraic Cauchy transform: the
tail value ``t`` is a fixed point of the Moebius map of one period, and the
finite head is another Moebius map applied to ``t``.  Both fixed points
solve a quadratic; the physical one is picked by the Herglotz condition
(``Im G < 0`` above the axis) and, on the real axis off the bands, by
being the attracting fixed point, which is where the continued fraction
converges.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate
from scipy.linalg import eigh_tridiagonal

from .transforms import JacobiParams

DEFAULT_EPS = (1e-3, 1e-4, 1e-5)
ATOM_EPS = (1e-4, 1e-5, 1e-6)
MIN_ATOM_MASS = 1e-10
BAND_MERGE_GAP = 1e-7


class BranchAmbiguity(ArithmeticError):
    """Neither fixed point of the tail map satisfies the Herglotz condition."""


def _richardson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Value at 0 of the interpolating polynomial through ``(xs, ys)`` (Neville)."""
    p = list(ys)
    n = len(xs)
    for level in range(1, n):
        for i in range(n - level):
            x0, x1 = xs[i], xs[i + level]
            p[i] = (x1 * p[i] - x0 * p[i + 1]) / (x1 - x0)
    return p[0]


def _cycle_matrix(j: JacobiParams, z: complex) -> tuple[complex, complex, complex, complex]:
    alpha, omega = j.cycle()
    a, b, c, d = 1, 0, 0, 1
    for al, w in zip(alpha, omega):
        # right-multiply by [[0, 1], [-w, z - al]]
        a, b, c, d = -b * float(w), a + b * (z - float(al)), -d * float(w), c + d * (z - float(al))
    return a, b, c, d


def _tail_value(j: JacobiParams, z: complex) -> complex:
    a, b, c, d = _cycle_matrix(j, z)
    # fixed points solve c t^2 + (d - a) t - b = 0; stable form via q
    beta = d - a
    s = cmath.sqrt(beta * beta + 4 * b * c)
    if (complex(beta).conjugate() * s).real < 0:
        s = -s
    q = -0.5 * (beta + s)
    if q == 0 or c == 0:
        # degenerate only at isolated real points; step off the axis
        return _tail_value(j, z + 1e-13j)
    roots = [q / c, -b / q]
    gain = [abs(c * t + d) for t in roots]
    if z.imag > 0:
        tol = 1e-12 * max(1.0, *(abs(t) for t in roots))
        ok = [i for i in (0, 1) if roots[i].imag <= tol]
        if not ok:
            raise BranchAmbiguity(f"no Herglotz fixed point at z={z}")
        if len(ok) == 1:
            return roots[ok[0]]
        return roots[max(ok, key=lambda i: gain[i])]
    if abs(roots[0].imag) > 1e-14 * max(1.0, abs(roots[0])):
        # inside a band: boundary value from above
        return roots[0] if roots[0].imag < 0 else roots[1]
    return roots[0] if gain[0] >= gain[1] else roots[1]


def eval_cauchy(j: JacobiParams, z: complex) -> complex:
    """``G(z)`` for ``Im z >= 0``.

    Real ``z`` gives the boundary value from the upper half-plane.
    """
    z = complex(z)
    if z.imag < 0:
        return eval_cauchy(j, z.conjugate()).conjugate()
    if j.tail is not None:
        start = j.tail.preperiod
        t = _tail_value(j, z)
    else:
        start = j.size
        t = 0j
    for k in range(start - 1, -1, -1):
        al, w = j.coeff(k)
        den = z - float(al) - float(w) * t
        if den == 0:
            return complex(math.inf, 0)
        t = 1 / den
    return t


def density(j: JacobiParams, x: float | Iterable[float], eps: Sequence[float] | None = DEFAULT_EPS):
    """Density ``-Im G(x + i0) / pi`` of the absolutely continuous part.

    With ``eps`` the limit is taken by Richardson extrapolation over the
    given offsets; ``eps=None`` uses the exact boundary branch instead.
    Scalars in, scalar out; iterables give a numpy array.
    """
    if np.ndim(x):
        return np.array([density(j, float(v), eps) for v in np.asarray(x, dtype=float)])
    x = float(x)
    if eps is None:
        if j.tail is None:
            return 0.0
        return max(0.0, -eval_cauchy(j, complex(x, 0.0)).imag / math.pi)
    vals = [-eval_cauchy(j, complex(x, e)).imag / math.pi for e in eps]
    return max(0.0, _richardson(list(eps), vals))


# --------------------------------------------------------------------------
# polynomial forms for atoms and bands

_Z = Polynomial([0.0, 1.0])


def _mobius_poly(alpha: Sequence[Fraction], omega: Sequence[Fraction]):
    a, b, c, d = Polynomial([1.0]), Polynomial([0.0]), Polynomial([0.0]), Polynomial([1.0])
    for al, w in zip(alpha, omega):
        step = _Z - float(al)
        a, b, c, d = -b * float(w), a + b * step, -d * float(w), c + d * step
    return a, b, c, d


def _real_roots(p: Polynomial) -> list[float]:
    p = p.trim(tol=0)
    coef = p.coef
    scale = max(1.0, float(np.max(np.abs(coef))))
    deg = len(coef) - 1
    if deg < 1:
        return []
    if deg == 1:
        return [-coef[0] / coef[1]]
    if deg == 2:
        c0, c1, c2 = coef
        disc = c1 * c1 - 4 * c2 * c0
        if abs(disc) <= 1e-12 * scale * scale:
            disc = 0.0
        if disc < 0:
            return []
        s = math.sqrt(disc)
        q = -0.5 * (c1 + s) if c1 >= 0 else -0.5 * (c1 - s)
        if q == 0:
            return [0.0]
        return sorted([q / c2, c0 / q])
    found = []
    dp = p.deriv()
    for r in p.roots():
        if abs(r.imag) > 1e-7 * max(1.0, abs(r)):
            continue
        x = r.real
        for _ in range(5):
            slope = dp(x)
            if slope == 0:
                break
            step = p(x) / slope
            x -= step
            if abs(step) < 1e-15 * max(1.0, abs(x)):
                break
        found.append(x)
    return sorted(found)


def _dedupe(values: Iterable[float], tol: float) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def _bands(j: JacobiParams) -> list[tuple[float, float]]:
    alpha, omega = j.cycle()
    a, _, _, d = _mobius_poly(alpha, omega)
    trace = a + d
    det = float(np.prod([float(w) for w in omega]))
    bound = 2 * math.sqrt(det)
    ends = _dedupe(_real_roots(trace - bound) + _real_roots(trace + bound), 1e-12)
    bands: list[tuple[float, float]] = []
    for lo, hi in zip(ends, ends[1:]):
        mid = 0.5 * (lo + hi)
        if abs(trace(mid)) < bound:
            if bands and lo - bands[-1][1] <= BAND_MERGE_GAP:
                bands[-1] = (bands[-1][0], float(hi))
            else:
                bands.append((float(lo), float(hi)))
    return bands


def _in_bands(x: float, bands: Sequence[tuple[float, float]], tol: float = 1e-9) -> bool:
    return any(lo - tol <= x <= hi + tol for lo, hi in bands)


def support(j: JacobiParams) -> list[tuple[float, float]]:
    """Closed intervals covering the support.

    With a periodic tail these are the bands of the tail (the continuous
    part); for a finite law it is the hull of the atoms.
    """
    if j.tail is None:
        locs = [x for x, _ in find_atoms(j)]
        return [(min(locs), max(locs))]
    return _bands(j)


def _pole_mass(j: JacobiParams, x: float) -> float:
    vals = [-e * eval_cauchy(j, complex(x, e)).imag for e in ATOM_EPS]
    return _richardson(list(ATOM_EPS), vals)


def find_atoms(j: JacobiParams) -> list[tuple[float, float]]:
    """Atoms ``(location, mass)`` with mass at least 1e-10, sorted by location."""
    if j.tail is None:
        n = j.size
        alpha, omega = j.terms(n)
        diag = np.array([float(a) for a in alpha])
        off = np.sqrt(np.array([float(w) for w in omega[: n - 1]]))
        if n == 1:
            return [(float(diag[0]), 1.0)]
        vals, vecs = eigh_tridiagonal(diag, off)
        return [(float(v), float(vecs[0, i] ** 2)) for i, v in enumerate(vals) if vecs[0, i] ** 2 >= MIN_ATOM_MASS]
    pre = j.tail.preperiod
    head_a, head_w = j.terms(pre)
    ha, hb, hc, hd = _mobius_poly(head_a, head_w)
    cyc_a, cyc_w = j.cycle()
    a, b, c, d = _mobius_poly(cyc_a, cyc_w)
    # G = (ha t + hb) / (hc t + hd) has a pole where hc t + hd = 0 with t a fixed point
    pole = c * hd**2 - (d - a) * hc * hd - b * hc**2
    bands = _bands(j)
    atoms = []
    for x in _dedupe(_real_roots(pole), 1e-8):
        if _in_bands(x, bands):
            continue
        mass = _pole_mass(j, x)
        if mass >= MIN_ATOM_MASS:
            atoms.append((float(x), float(mass)))
    return atoms


@dataclass(frozen=True)
class SpectralMeasure:
    """Atoms plus an absolutely continuous part on ``intervals``."""

    jacobi: JacobiParams
    atoms: tuple[tuple[float, float], ...]
    intervals: tuple[tuple[float, float], ...]

    def density(self, x):
        if not self.intervals:
            return np.zeros(np.shape(x)) if np.ndim(x) else 0.0
        return density(self.jacobi, x, eps=None)

    def _integrate(self, f) -> float:
        total = 0.0
        for lo, hi in self.intervals:
            mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)

            def integrand(theta, mid=mid, half=half):
                x = mid + half * math.cos(theta)
                return f(x) * density(self.jacobi, x, eps=None) * half * math.sin(theta)

            val, _ = integrate.quad(integrand, 0.0, math.pi, epsabs=1e-13, epsrel=1e-12, limit=400)
            total += val
        return total

    def continuous_mass(self) -> float:
        return self._integrate(lambda x: 1.0)

    def total_mass(self) -> float:
        return sum(m for _, m in self.atoms) + self.continuous_mass()

    def moment(self, k: int) -> float:
        return sum(m * x**k for x, m in self.atoms) + self._integrate(lambda x: x**k)

    def to_dict(self, grid_file: str | None = None) -> dict:
        return {
            "atoms": [[x, m] for x, m in self.atoms],
            "intervals": [[lo, hi] for lo, hi in self.intervals],
            "grid": grid_file,
        }


def spectral_measure(j: JacobiParams) -> SpectralMeasure:
    intervals = tuple(_bands(j)) if j.tail is not None else ()
    return SpectralMeasure(j, tuple(find_atoms(j)), intervals)
