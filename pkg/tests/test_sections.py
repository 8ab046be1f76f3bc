import numpy as np
import pytest
from hypothesis import given, strategies as st

from coanalytic.sections import (
    RangeElement,
    abar_inner,
    apply_T_abar,
    backward_shift,
    build_section,
    kernel,
    kernel_degree,
    kernel_tail_bound,
    preimage,
    range_norm,
    reproducing_residual,
)
from coanalytic.symbols import CircleZeroPolynomial, h2_norm
from conftest import czp

Z1 = czp((0.0, 1))
Z2 = czp((0.0, 1), (np.pi, 1))
ONE = CircleZeroPolynomial()

symbols = st.sampled_from([ONE, Z1, Z2, czp((0.0, 2)), czp((0.3, 1), (2.0, 2), (4.0, 1))])
coeffs = st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                  min_size=1, max_size=24).map(lambda v: np.array(v, dtype=complex))


def fft_T_abar(a, f, M=256):
    """Independent oracle: P_+(conj(a) f) from boundary samples."""
    z = np.exp(2j * np.pi * np.arange(M) / M)
    vals = np.conj(a(z)) * np.polynomial.polynomial.polyval(z, f)
    return (np.fft.fft(vals) / M)[: len(f)]


def test_build_section_examples():
    np.testing.assert_allclose(build_section(Z1, 2).to_dense(), [[-1, 1, 0], [0, -1, 1], [0, 0, -1]])
    np.testing.assert_allclose(build_section(ONE, 4).to_dense(), np.eye(5))
    np.testing.assert_allclose(build_section(Z2, 2).to_dense(), [[-1, 0, 1], [0, -1, 0], [0, 0, -1]],
                               atol=1e-15)


def test_section_structure():
    a = czp((0.3, 1), (2.0, 2))
    S = build_section(a, 10).to_dense()
    assert np.allclose(np.tril(S, -1), 0)
    assert np.allclose(np.triu(S, a.degree + 1), 0)
    np.testing.assert_allclose(np.diag(S), np.conj(a.a0))
    with pytest.raises(ValueError):
        build_section(a, -1)


def test_apply_examples():
    np.testing.assert_allclose(apply_T_abar(Z1, [1]), [-1])
    np.testing.assert_allclose(apply_T_abar(Z1, [0, 1]), [1, -1])
    np.testing.assert_allclose(apply_T_abar(ONE, [1, 2, 3]), [1, 2, 3])


@given(symbols, coeffs)
def test_apply_matches_fft_oracle(a, f):
    np.testing.assert_allclose(apply_T_abar(a, f), fft_T_abar(a, f), atol=1e-11 * max(1, np.abs(f).max()))


@given(symbols, coeffs)
def test_section_matvec_matches_apply(a, f):
    sec = build_section(a, f.size - 1)
    np.testing.assert_allclose(sec.matvec(f), apply_T_abar(a, f), atol=1e-12)
    np.testing.assert_allclose(sec.to_dense() @ f, apply_T_abar(a, f), atol=1e-12)


def test_preimage_examples():
    np.testing.assert_allclose(preimage(Z1, [1]), [-1])
    np.testing.assert_allclose(preimage(Z1, [0, 1]), [-1, -1])
    np.testing.assert_allclose(preimage(ONE, [3, 4]), [3, 4])


@given(symbols, coeffs)
def test_preimage_exactness(a, f):
    g = preimage(a, f)
    assert g.size == f.size
    back = apply_T_abar(a, g)
    assert np.max(np.abs(back - f)) <= 1e-12 * max(1.0, np.max(np.abs(f)))


def test_banded_solve_matches_dense(rng):
    a = czp((0.3, 1), (2.0, 2), (4.0, 1))
    f = rng.standard_normal(100) + 1j * rng.standard_normal(100)
    dense = np.linalg.solve(build_section(a, 99).to_dense(), f)
    np.testing.assert_allclose(preimage(a, f), dense, rtol=1e-9, atol=1e-9)


def test_norm_examples():
    assert range_norm(Z1, [1]) == pytest.approx(1.0, abs=1e-15)
    assert range_norm(Z1, [0, 1]) == pytest.approx(np.sqrt(2), abs=1e-15)
    assert range_norm(ONE, [3, 4]) == pytest.approx(5.0)


@given(symbols, coeffs)
def test_representation_isometry(a, g):
    assert range_norm(a, apply_T_abar(a, g)) == pytest.approx(h2_norm(g), rel=1e-10, abs=1e-12)


def test_inner_product_linear_in_first(rng):
    a = czp((1.0, 2))
    f1, f2 = rng.standard_normal(5), rng.standard_normal(5) + 1j
    assert abar_inner(a, 2j * f1, f2) == pytest.approx(2j * abar_inner(a, f1, f2))
    assert abar_inner(a, f1, f1).real == pytest.approx(range_norm(a, f1) ** 2)


@pytest.mark.parametrize("a", [Z1, Z2, czp((0.0, 2)), czp((0.5, 1), (1.5, 1), (5.0, 3))])
@pytest.mark.parametrize("deg", range(9))
def test_twist_identity_brute_force(a, deg, rng):
    f = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
    af = np.convolve(a.coefficients, f)
    dense = np.linalg.solve(build_section(a, af.size - 1).to_dense(), af)
    twist = np.concatenate([np.zeros(a.degree), a.a0 * f])
    np.testing.assert_allclose(dense, twist, atol=1e-11)
    np.testing.assert_allclose(preimage(a, af), twist, atol=1e-12)
    assert range_norm(a, af) == pytest.approx(h2_norm(f), rel=1e-13)


@given(symbols, coeffs)
def test_backward_shift_contraction(a, f):
    g = preimage(a, f)
    np.testing.assert_allclose(preimage(a, backward_shift(f)), backward_shift(g), atol=1e-9 * max(1, np.abs(g).max()))
    assert range_norm(a, backward_shift(f)) <= range_norm(a, f) * (1 + 1e-12) + 1e-12


def test_kernel_examples():
    np.testing.assert_allclose(kernel(Z1, 0.0, n=1), [2, -1])
    lam = 0.4 - 0.2j
    np.testing.assert_allclose(kernel(ONE, lam, n=6), np.conj(lam) ** np.arange(7))
    assert reproducing_residual(Z1, [1], 0.0, n=1) <= 1e-12
    with pytest.raises(ValueError):
        kernel(Z1, 1.0)


def test_reproducing_examples():
    assert reproducing_residual(ONE, [0, 0, 1], 0.5, n=2) <= 1e-12
    assert reproducing_residual(Z2, [0, 1], 0.3j) <= 1e-8


def test_kernel_truncation_converges():
    a = czp((0.5, 1), (2.5, 2))
    lam = 0.7 * np.exp(1.0j)
    f = np.array([1.0, -2.0, 0.5j, 3.0])
    res = [reproducing_residual(a, f, lam, n) for n in range(4, 80, 4)]
    # geometric decay up to rounding
    assert all(r2 <= r1 * 1.0001 or r2 < 1e-13 for r1, r2 in zip(res, res[1:]))
    assert res[-1] < 1e-10


@pytest.mark.parametrize("lam", [0.2, 0.6j, -0.85 + 0.1j])
def test_tail_bound_dominates_error(lam):
    a = czp((0.5, 1), (2.5, 2))
    exact = preimage(a, kernel(a, lam, n=400))
    for n in (3, 10, 25, 50):
        approx = preimage(a, kernel(a, lam, n))
        err = h2_norm(exact - np.pad(approx, (0, exact.size - approx.size)))
        assert err <= kernel_tail_bound(a, lam, n) * (1 + 1e-9) + 1e-15


def test_kernel_degree_meets_target():
    a = czp((0.0, 2))
    for lam in (0.0, 0.5, 0.9j):
        n = kernel_degree(a, lam, 1e-10)
        assert kernel_tail_bound(a, lam, n) <= 1e-10


def test_range_element():
    el = RangeElement.from_function(Z2, [1, 2, 3])
    assert el.residual <= 1e-12
    assert el.norm == pytest.approx(range_norm(Z2, [1, 2, 3]))
    other = RangeElement.from_preimage(Z2, [0, 1])
    assert el.inner(other) == pytest.approx(abar_inner(Z2, el.f, other.f))


def test_rejects_symbol_vanishing_at_origin():
    with pytest.raises(ValueError):
        preimage([0, 1], [1])
