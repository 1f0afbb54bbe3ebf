from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from freeprod import series as ps
from freeprod.graphcore import branch_graph, comb_product, m_free_product, make_standard, moments, orth_product, star_product
from freeprod.transforms import (
    Distribution,
    JacobiParams,
    NegativeOmega,
    Tail,
    TransformSeries,
    boolean_conv,
    check_prop31,
    check_subordination,
    comb_branch_conv,
    continued_composition,
    detect_tail,
    free_conv,
    from_transform,
    jacobi_sequences,
    jacobi_to_moments,
    mfree_conv,
    moments_to_jacobi,
    monotone_conv,
    orth_conv,
    orth_power,
    sfree_conv,
    to_transform,
)

from .conftest import finite_graphs, jacobi_laws, small_graphs

S = make_standard
F = Fraction


def law(g, order=12):
    return Distribution(moments(g, order))


def fig1_factors():
    return law(S("P", 3), 14), law(orth_product(S("Z2"), S("F", 2)), 14)


# transforms


def test_bernoulli_k_transform(bernoulli):
    k = to_transform(bernoulli, "K").coeffs
    assert k[:4] == (0, 1, 0, 0) and not any(k[2:])


def test_semicircle_r_transform(semicircle):
    r = to_transform(semicircle, "R").coeffs
    assert r[:2] == (0, 1) and not any(r[2:])


def test_point_mass_transforms(delta0):
    assert not any(to_transform(delta0, "K").coeffs)
    f = to_transform(delta0, "F").coeffs
    assert f[0] == 1 and not any(f[1:])


@given(jacobi_laws())
def test_transform_round_trips(d):
    for kind in ("M", "G", "K", "F", "R"):
        t = to_transform(d, kind)
        back = from_transform(t)
        assert back.moments[: d.order + 1] == d.moments
    k = to_transform(d, "K").coeffs
    f = to_transform(d, "F").coeffs
    assert f[0] == 1 and all(fc == -kc for fc, kc in zip(f[1:], k))
    assert to_transform(d, "G").coeffs[:2] == (0, 1)


def test_unknown_kind():
    with pytest.raises(ValueError):
        TransformSeries("Q", ())
    with pytest.raises(ValueError):
        Distribution([2, 0, 1])


# convolutions: examples


def test_boolean_examples(bernoulli, delta0):
    d = boolean_conv(bernoulli, bernoulli)
    assert d.moments == tuple(F(2 ** (k // 2)) if k % 2 == 0 else 0 for k in range(13))
    assert list(d.moments[:9]) == moments(star_product(S("Z2"), S("Z2")), 8)
    assert boolean_conv(bernoulli, delta0) == bernoulli


def test_free_examples(bernoulli, semicircle, delta0):
    assert free_conv(bernoulli, bernoulli).moments[:7] == (1, 0, 2, 0, 6, 0, 20)
    sc2 = free_conv(semicircle, semicircle)
    assert (sc2.moments[2], sc2.moments[4]) == (2, 8)
    assert free_conv(semicircle, delta0) == semicircle


def test_monotone_examples(bernoulli, semicircle, delta0):
    assert monotone_conv(bernoulli, bernoulli).moments[:5] == (1, 0, 2, 0, 5)
    assert list(monotone_conv(bernoulli, bernoulli, 8).moments) == moments(comb_product(S("Z2"), S("Z2")), 8)
    assert monotone_conv(semicircle, delta0) == semicircle
    assert monotone_conv(delta0, semicircle) == semicircle


def test_orthogonal_examples(semicircle, delta0):
    a, b = fig1_factors()
    j = moments_to_jacobi(orth_conv(a, b))
    assert j.omega == (1, 2, F(3, 2), F(5, 6), F(4, 15), F(12, 5), 0)
    assert not any(j.alpha)
    assert orth_conv(semicircle, delta0) == semicircle


def test_sfree_example(delta0):
    k2 = law(S("K", 2), 16)
    alpha, omega = jacobi_sequences(sfree_conv(k2, k2))
    assert alpha == [0] + [1] * (len(alpha) - 1)
    assert omega == [2] * len(omega)
    assert sfree_conv(k2.truncate(12), delta0) == k2.truncate(12)


def test_orth_power_base():
    a, b = law(S("K", 2)), law(S("P", 3))
    assert orth_power(a, b, 0) == a
    assert orth_power(a, b, 1) == orth_conv(a, b)
    assert mfree_conv(a, b, 1) == boolean_conv(orth_conv(a, b), orth_conv(b, a))
    with pytest.raises(ValueError):
        mfree_conv(a, b, 0)


def test_order_guard(bernoulli):
    with pytest.raises(ValueError):
        boolean_conv(bernoulli, bernoulli, order=40)


# convolutions: graph consistency


@given(finite_graphs, finite_graphs)
def test_products_match_convolutions(g1, g2):
    a, b = law(g1, 10), law(g2, 10)
    assert law(star_product(g1, g2), 10) == boolean_conv(a, b)
    assert law(comb_product(g1, g2), 10) == monotone_conv(a, b)
    assert law(orth_product(g1, g2), 10) == orth_conv(a, b)


@given(small_graphs, small_graphs, st.integers(1, 4))
def test_branch_matches_sfree(g1, g2, m):
    order = 2 * m
    a, b = law(g1, order), law(g2, order)
    assert law(branch_graph([g1, g2], 1, m), order) == sfree_conv(a, b)


@given(small_graphs, small_graphs, st.integers(1, 4))
def test_mfree_matches_walks_and_free(g1, g2, m):
    order = 2 * m
    a, b = law(g1, order), law(g2, order)
    walk = law(m_free_product([g1, g2], m), order)
    assert walk == mfree_conv(a, b, m) == comb_branch_conv(a, b, m) == free_conv(a, b)


# algebraic properties


@given(jacobi_laws(), jacobi_laws())
def test_commutative_ones(a, b):
    assert boolean_conv(a, b) == boolean_conv(b, a)
    assert free_conv(a, b) == free_conv(b, a)


def test_noncommutative_witnesses(bernoulli, semicircle):
    k2 = law(S("K", 2))
    assert monotone_conv(bernoulli, k2) != monotone_conv(k2, bernoulli)
    assert orth_conv(bernoulli, semicircle) != orth_conv(semicircle, bernoulli)


@given(jacobi_laws(), jacobi_laws(), jacobi_laws())
def test_monotone_associative(a, b, c):
    assert monotone_conv(monotone_conv(a, b), c) == monotone_conv(a, monotone_conv(b, c))


@given(jacobi_laws(), jacobi_laws())
def test_normalization_and_means(a, b):
    for conv in (boolean_conv, free_conv, monotone_conv):
        d = conv(a, b)
        assert d.moments[0] == 1
        assert d.moments[1] == a.moments[1] + b.moments[1]
    assert orth_conv(a, b).moments[0] == 1


@given(jacobi_laws(), jacobi_laws())
def test_prop31_identities(a, b):
    assert all(r.passed for r in check_prop31(a, b, 12))


def test_prop31_fixed_cases(delta0):
    a, b = fig1_factors()
    assert all(r.passed for r in check_prop31(a, b, 12))
    assert all(r.passed for r in check_prop31(delta0, delta0, 12))


@given(jacobi_laws(), jacobi_laws())
def test_subordination_identities(a, b):
    assert all(r.passed for r in check_subordination(a, b, 12))


def _f(d):
    return [F(1)] + [-c for c in to_transform(d, "K").coeffs]


@given(jacobi_laws(), jacobi_laws())
def test_boolean_form_with_compositions_fails(a, b):
    """The variant with F_a, F_b composed into the boolean splitting is not an identity."""
    n = 12
    free = _f(free_conv(a, b))
    ab, ba = sfree_conv(a, b), sfree_conv(b, a)
    composed = ps.sub(ps.add(_f(monotone_conv(a, ba)), _f(monotone_conv(b, ab)), n + 1), [F(1)], n + 1)
    # both compositions equal F of the free law, so the sum is 2F - z
    assert composed == ps.sub(ps.scale(free, F(2), n + 1), [F(1)], n + 1)
    assert composed != free


@given(jacobi_laws(), jacobi_laws(), st.integers(1, 5))
def test_continued_composition(a, b, depth):
    order = min(12, 2 * depth)
    assert continued_composition(a, b, depth, order) == free_conv(a, b, order)


# Jacobi parameters


def test_jacobi_examples(bernoulli):
    arcsine = law(S("Z", 8), 16)
    j = moments_to_jacobi(arcsine)
    assert not any(j.alpha) and j.omega == (2, 1, 1, 1, 1, 1, 1, 1)
    assert jacobi_to_moments(j, 16) == arcsine
    b = moments_to_jacobi(bernoulli)
    assert b.alpha == (0, 0) and b.omega == (1, 0)


def test_negative_omega():
    with pytest.raises(NegativeOmega):
        jacobi_sequences(Distribution([1, 0, 1, 0, F(1, 2)]))
    with pytest.raises(NegativeOmega):
        JacobiParams((0,), (-1,))


@given(jacobi_laws())
def test_jacobi_round_trip(d):
    j = moments_to_jacobi(d)
    assert jacobi_to_moments(j, d.order) == d


def test_tail_validation_and_detection():
    with pytest.raises(ValueError):
        JacobiParams((0, 1), (1, 1), Tail(1, 2))
    with pytest.raises(ValueError):
        JacobiParams((0, 1, 2), (1, 1, 1), Tail(0, 1))
    j = detect_tail([0, 1, 1, 1, 1, 1], [2, 2, 2, 2, 2, 2])
    assert (j.tail, j.alpha, j.omega) == (Tail(1, 1), (0, 1), (2, 2))
    j = detect_tail([3, 0, 2, 0, 2, 0, 2, 0], [2, 3, 2, 3, 2, 3, 2, 3])
    assert j.tail == Tail(1, 2)
    assert detect_tail([0, 0, 0], [1, 0, 0]).tail is None
    with pytest.raises(ValueError):
        detect_tail([0, 1, 2, 3, 4, 5], [1, 1, 1, 1, 1, 1])
    assert JacobiParams((0, 1), (2, 2), Tail(1, 1)).coeff(7) == (1, 2)
