import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

import coanalytic.multipliers as mm
from coanalytic.multipliers import (
    crofoot_verify,
    growth_ratios,
    looks_bounded,
    mult_check,
    numeric_mult_norm,
    onto_check,
    weight_mult_norm,
)
from coanalytic.symbols import CircleZeroPolynomial, RationalSymbol, SingularFactorFunction
from conftest import czp

ONE = CircleZeroPolynomial()
A = czp((0.0, 1))
A2 = czp((0.0, 1), (np.pi, 1))


def frac(*factors, num=(1.0,)):
    return SingularFactorFunction(RationalSymbol(np.array(num, dtype=complex)), tuple(factors))


def dense_section(a, n):
    c = np.conj(a.coefficients)
    T = np.zeros((n + 1, n + 1), dtype=complex)
    for k, ck in enumerate(c):
        T += ck * np.eye(n + 1, k=k)
    return T


def dense_mult_norm(a1, a2, phi, n):
    """Independent oracle: explicit sections, LU solve and full SVD."""
    phi = np.asarray(phi, dtype=complex)
    m = n + phi.size - 1
    M = np.zeros((m + 1, n + 1), dtype=complex)
    for j in range(n + 1):
        M[j : j + phi.size, j] = phi
    X = M @ dense_section(a1, n)
    return np.linalg.svd(np.linalg.solve(dense_section(a2, m), X), compute_uv=False)[0]


# -- decisions -----------------------------------------------------------------

def test_same_space_rule():
    v = mult_check(A, A, [1, 2, 3])
    assert (v.decision, v.rule) == ("yes", "prop3.1")
    # a simple zero needs exponent above 1/2
    v = mult_check(A, A, frac((0.0, 0.3)))
    assert (v.decision, v.rule) == ("no", "prop3.1")
    assert "theta=0" in v.obstruction
    v = mult_check(A, A, frac((0.0, 0.6)))
    assert v.decision == "yes"
    v = mult_check(A, A, frac((0.0, -0.2)))
    assert v.decision == "no" and "unbounded" in v.obstruction


def test_divisible_into_constant():
    v = mult_check(A, ONE, frac((0.0, -0.4)))
    assert (v.decision, v.rule) == ("yes", "cor-M(a,1)")
    assert "h_phi" in v.witnesses
    # h phi = (z - 1) (1 - z)^(-1.2) is unbounded
    assert mult_check(A, ONE, frac((0.0, -1.2))).decision == "no"
    # phi outside H^2
    v = mult_check(A, ONE, frac((0.0, -0.5)))
    assert v.decision == "no" and "H^2" in v.obstruction


@given(st.floats(-0.49, 2.0))
def test_cor_m_a_1_threshold(alpha):
    # for a simple zero the boundary is h * phi bounded and phi in H^2: alpha > -1/2
    assert mult_check(A, ONE, frac((0.0, alpha))).decision == "yes"


def test_thm11_requires_membership():
    big = czp((0.0, 1), (1.0, 1))
    v = mult_check(big, A, frac((0.0, 0.3)))
    assert (v.decision, v.rule) == ("no", "thm1.1")
    assert mult_check(big, A, [1]).decision == "yes"
    v = mult_check(big, A, A.coefficients)
    assert (v.decision, v.rule) == ("yes", "thm1.1")
    assert "exponent_table" in v.witnesses


def test_into_bigger_space():
    v = mult_check(ONE, A, A.coefficients)
    assert (v.decision, v.rule) == ("yes", "cor-M(1,a)")
    np.testing.assert_allclose(v.witnesses["k"], A.coefficients)
    v = mult_check(ONE, A, [1])
    assert v.decision == "no"


def test_thm12_witness():
    small = czp((0.0, 1), (1.0, 1))
    phi = czp((1.0, 1)).coefficients
    v = mult_check(A, small, phi)
    assert (v.decision, v.rule) == ("yes", "thm1.2")
    psi = v.witnesses["psi"]["singular"]
    assert all(f["alpha"] >= 0 for f in psi["factors"])
    assert mult_check(A, small, [1]).decision == "no"


def test_incomparable_sufficient_condition():
    a1, a2 = czp((0.0, 1), (1.0, 1)), czp((0.0, 1), (2.0, 1))
    v = mult_check(a1, a2, [1])
    assert (v.decision, v.rule) == ("unknown", "sufficient-a2Hinf")
    assert v.obstruction
    v = mult_check(a1, a2, a2.coefficients)
    assert (v.decision, v.rule) == ("yes", "sufficient-a2Hinf")


def test_verdict_json():
    d = mult_check(A, A, [1]).to_json()
    assert set(d) == {"decision", "rule", "witnesses", "obstruction"}


def test_onto():
    v = onto_check(A, A)
    assert (v.decision, v.rule) == ("exist", "crofoot")
    assert v.certificate["radius"] == pytest.approx(0.5)
    assert onto_check(ONE, ONE).certificate["radius"] == 1.0
    v = onto_check(A2, A)
    assert (v.decision, v.rule) == ("none", "thm4.1")
    assert v.certificate["poles_of_reciprocal"] == [{"theta": np.pi, "order": 1}]
    assert v.certificate["reciprocal_in_H2"] is False
    assert onto_check(A, A2).rule == "cor4.2"
    v = onto_check(czp((0.0, 1), (1.0, 1)), czp((0.0, 1), (2.0, 1)))
    assert (v.decision, v.rule) == ("unknown", "incomparable")


@pytest.mark.parametrize("a,lam", [(A, 0.3), (A2, 0.2 + 0.1j), (czp((0.0, 2)), -0.2), (ONE, 0.9)])
def test_crofoot(a, lam):
    r = crofoot_verify(a, lam, 24, 3, seed=1)
    assert r.tail_bound <= 1e-11
    assert r.forward_residual <= 1e-12 and r.inverse_residual <= 1e-12
    assert r.divisibility_residual <= 1e-12
    assert np.isfinite(r.forward_ratio) and np.isfinite(r.inverse_ratio)
    assert set(r.to_json()) >= {"lam", "terms", "tail_bound"}


def test_crofoot_precondition():
    with pytest.raises(ValueError, match="violates"):
        crofoot_verify(A, 0.5, 8, 1)
    with pytest.raises(ValueError):
        crofoot_verify(A, 0.1, 0, 1)


# -- numeric oracle ------------------------------------------------------------

@pytest.mark.parametrize("n", [0, 3, 8, 64])
def test_numeric_norm_closed_forms(n):
    assert numeric_mult_norm(A2, A2, [1], n) == pytest.approx(1.0, abs=1e-12)
    assert numeric_mult_norm(ONE, A2, A2.coefficients, n) == pytest.approx(1.0, abs=1e-12)
    # (1 + z) on P_n: A^H A = tridiag(1, 2, 1)
    expected = 2 * np.cos(np.pi / (2 * (n + 2)))
    assert numeric_mult_norm(ONE, ONE, [1, 1], n) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("a1,a2,phi", [
    (A, A, [1, 0.5, -0.25j]),
    (A2, A, [2, 1]),
    (czp((0.4, 2)), czp((0.4, 1)), [1, -1, 0.5]),
    (ONE, czp((1.0, 1), (2.5, 2)), [0.3, 1, 0, 1j]),
])
@pytest.mark.parametrize("n", [5, 40])
def test_numeric_norm_matches_dense(a1, a2, phi, n):
    assert numeric_mult_norm(a1, a2, phi, n) == pytest.approx(dense_mult_norm(a1, a2, phi, n), rel=1e-10)


def test_numeric_norm_large_route(monkeypatch):
    monkeypatch.setattr(mm, "DENSE_LIMIT", 4)
    assert numeric_mult_norm(A, A, [1, 0.5], 30) == pytest.approx(dense_mult_norm(A, A, [1, 0.5], 30), rel=1e-9)


def test_numeric_norm_monotone():
    values = [numeric_mult_norm(A2, A, [1, 1, 1], n) for n in (4, 8, 16, 32)]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_numeric_norm_rejects():
    with pytest.raises(ValueError):
        numeric_mult_norm(A, A, [1], -1)
    with pytest.raises(NotImplementedError):
        numeric_mult_norm(A, A, frac((0.0, 0.7)), 8)


def weight_oracle(theta, alpha, r, k):
    def w(t):
        z = np.exp(1j * t)
        return abs(1 - z * np.exp(-1j * theta)) ** (2 * alpha) * abs(np.polyval(r[::-1], z)) ** 2

    re = integrate.quad(lambda t: w(t) * np.cos(k * t), 0, 2 * np.pi, points=[theta % (2 * np.pi)], limit=400)[0]
    im = integrate.quad(lambda t: -w(t) * np.sin(k * t), 0, 2 * np.pi, points=[theta % (2 * np.pi)], limit=400)[0]
    return (re + 1j * im) / (2 * np.pi)


@pytest.mark.parametrize("theta,alpha,r", [(0.0, 0.3, [1.0]), (1.1, 0.75, [1.0, 0.5]), (np.pi, -0.2, [2.0, 0, 1j])])
def test_weight_coefficients_match_quadrature(theta, alpha, r):
    phi = frac((theta, alpha), num=r)
    w = mm._weight_coefficients(phi, 6)
    for k in range(7):
        assert w[k] == pytest.approx(weight_oracle(theta, alpha, r, k), abs=1e-7)


@pytest.mark.parametrize("a", [A, A2])
def test_weight_route_matches_quadrature_gram(a):
    n, theta, alpha, r = 6, 0.0, 0.3, [1.0, 0.25]
    w = np.array([weight_oracle(theta, alpha, r, k) for k in range(n + 1)])
    W = np.array([[w[i - j] if i >= j else np.conj(w[j - i]) for j in range(n + 1)] for i in range(n + 1)])
    T = dense_section(a, n)
    expected = np.sqrt(np.linalg.eigvalsh(T.conj().T @ W @ T)[-1])
    assert weight_mult_norm(a, frac((theta, alpha), num=r), n) == pytest.approx(expected, rel=1e-7)
    assert numeric_mult_norm(a, ONE, frac((theta, alpha), num=r), n) == pytest.approx(expected, rel=1e-7)


def test_growth_helpers():
    assert growth_ratios([1, 2, 3]) == [2, 1.5]
    assert looks_bounded([1.0, 1.01, 1.02])
    assert not looks_bounded([1.0, 1.2])
