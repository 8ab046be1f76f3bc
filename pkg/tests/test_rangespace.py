import numpy as np
import pytest
from hypothesis import given, strategies as st

from coanalytic.rangespace import (
    decompose,
    equivalence_bounds,
    hermite_interpolant,
    membership,
    polynomial_taylor_data,
    remainder_interpolant,
    splitting_angle,
)
from coanalytic.symbols import (
    CircleZeroPolynomial,
    RationalSymbol,
    SingularFactorFunction,
    h2_membership,
    pad,
)
from conftest import czp

EPS = 0.1
PLUS, MINUS = (0.0, 1), (np.pi, 1)


def example_phi(eps=EPS):
    return SingularFactorFunction(RationalSymbol(np.array([1.0])), ((np.pi, 0.5 + eps), (0.0, -0.5 + eps)))


def separated_symbol(draw_angles, mults):
    return CircleZeroPolynomial(tuple(zip(draw_angles, mults)))


symbols = st.sampled_from([
    czp(PLUS), czp(PLUS, MINUS), czp((0.0, 2)), czp((0.4, 2), (2.9, 1)),
    czp((1.0, 3), (4.0, 1)), czp((0.2, 1), (1.4, 1), (2.6, 1), (3.8, 1), (5.0, 2)),
])
polys = st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
                 min_size=1, max_size=20).map(lambda v: np.array(v, dtype=complex))


def test_decompose_examples():
    d = decompose(czp(PLUS), [0, 1])
    np.testing.assert_allclose(d.p, [1])
    np.testing.assert_allclose(d.f_tilde, [1])
    d = decompose(czp(PLUS), [1])
    np.testing.assert_allclose(d.p, [1])
    np.testing.assert_allclose(d.f_tilde, [0])
    d = decompose(czp(PLUS, MINUS), [0, 0, 1])
    np.testing.assert_allclose(pad(d.p, 2), [1, 0], atol=1e-15)
    np.testing.assert_allclose(d.f_tilde, [1], atol=1e-15)


def test_decompose_degenerate():
    d = decompose(CircleZeroPolynomial(), [1, 2])
    np.testing.assert_allclose(d.f_tilde, [1, 2])
    np.testing.assert_allclose(d.p, [0])
    d = decompose(czp(PLUS), [0, 0])
    np.testing.assert_allclose(d.p, [0])
    np.testing.assert_allclose(d.f_tilde, [0])


@given(symbols, polys)
def test_decomposition_reconstructs(a, f):
    d = decompose(a, f)
    assert d.p.size <= max(a.degree, 1)
    back = np.convolve(a.coefficients, d.f_tilde)
    w = max(back.size, d.p.size, f.size)
    err = pad(back, w) + pad(d.p, w) - pad(f, w)
    assert np.max(np.abs(err)) <= 1e-10 * max(1.0, np.max(np.abs(f)))


@given(symbols, polys)
def test_hermite_agrees_with_division_remainder(a, f):
    p, _ = hermite_interpolant(a, polynomial_taylor_data(f))
    r = remainder_interpolant(a, f)
    w = max(p.size, r.size)
    assert np.max(np.abs(pad(p, w) - pad(r, w))) <= 1e-10 * max(1.0, np.max(np.abs(r)))


@given(symbols, polys)
def test_decompose_idempotent(a, f):
    p = decompose(a, f).p
    again = decompose(a, p)
    np.testing.assert_allclose(pad(again.p, p.size), p, atol=1e-11 * max(1, np.abs(p).max()))
    assert np.max(np.abs(again.f_tilde)) <= 1e-10 * max(1, np.abs(p).max())


def test_hermite_matches_derivatives_at_double_zero():
    a = czp((0.7, 2), (3.0, 1))
    f = np.array([1, -2, 0.5, 3, 1j, 2])
    p, cond = hermite_interpolant(a, polynomial_taylor_data(f))
    assert cond >= 1.0
    z = np.exp(0.7j)
    P = np.polynomial.polynomial
    assert abs(P.polyval(z, p) - P.polyval(z, f)) < 1e-12
    assert abs(P.polyval(z, P.polyder(p)) - P.polyval(z, P.polyder(f))) < 1e-11


def test_membership_examples():
    phi = example_phi()
    assert membership(czp(MINUS), phi).member
    v = membership(czp(MINUS, PLUS), phi)
    assert not v.member
    bad = [r for r in v.exponent_table if not r.ok]
    assert len(bad) == 1 and bad[0].theta == 0.0 and bad[0].required == 0.5
    assert membership(czp((1.0, 2)), SingularFactorFunction.from_polynomial([1, 2, 3])).member


def test_membership_interpolant_for_rational():
    a = czp((0.4, 2), (2.0, 1))
    phi = SingularFactorFunction.from_rational([1, 0.5], [2, -1])
    v = membership(a, phi)
    assert v.member and v.interpolant is not None
    # phi - p vanishes at the zeros of a to full order
    z = np.exp(0.4j)
    assert abs(phi(z) - np.polynomial.polynomial.polyval(z, v.interpolant)) < 1e-12


def test_membership_products_with_vanishing_polynomial():
    a = czp((0.0, 2))
    # a double zero needs exponent above 3/2; multiplying by a lifts 1.2 to 3.2
    phi = SingularFactorFunction(RationalSymbol(np.array([1.0])), ((0.0, 1.2),))
    assert not membership(a, phi).member
    assert membership(a, phi.times(a)).member
    assert membership(a, SingularFactorFunction(RationalSymbol(np.array([1.0])), ((0.0, 1.6),))).member
    # exponent 1.4 needs m - 1/2 = 1.5 at a triple zero
    assert not membership(czp((0.0, 3)), SingularFactorFunction(RationalSymbol(np.array([1.0])), ((0.0, 1.4),))).member


@given(symbols, st.lists(st.tuples(st.sampled_from([0.0, np.pi, 0.4, 1.0, 2.2]), st.floats(-1.5, 3.0)),
                         max_size=3))
def test_h2_is_necessary(a, factors):
    phi = SingularFactorFunction(RationalSymbol(np.array([1.0])), tuple(factors))
    if membership(a, phi).member:
        assert h2_membership(phi)


@pytest.mark.parametrize("a,n", [(CircleZeroPolynomial(), 8), (czp(PLUS), 5), (czp(PLUS, MINUS), 16),
                                 (czp((0.3, 2), (1.9, 1), (4.4, 3)), 64)])
def test_equivalence_bounds_isometric(a, n):
    lo, hi = equivalence_bounds(a, n)
    assert abs(lo - 1) <= 1e-10 and abs(hi - 1) <= 1e-10


@pytest.mark.parametrize("a", [czp(PLUS), czp(PLUS, MINUS), czp((0.0, 2)), czp((0.3, 2), (1.9, 1))])
@pytest.mark.parametrize("n", [0, 5, 40])
def test_splitting_is_orthogonal(a, n):
    # in preimage coordinates a P_n lands on z^N P_n, orthogonal to preimages of P_{N-1}
    assert splitting_angle(a, n) == pytest.approx(np.pi / 2, abs=1e-9)
