import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import eigh

import coanalytic.shiftop as so
from coanalytic.sections import range_norm
from coanalytic.shiftop import (
    adjoint_residual,
    commutant_residual,
    maximizer_residual,
    scalar_identity_residuals,
    shift_identity_residual,
    shift_norm_closed,
    shift_norm_sections,
    shift_section_matrix,
    shift_section_norm,
    sweep,
)
from coanalytic.symbols import CircleZeroPolynomial
from conftest import czp

SYMBOLS = [
    czp((0.0, 1)),
    czp((0.0, 1), (np.pi, 1)),
    czp((0.0, 2)),
    czp((0.5, 1), (2.0, 2), (4.0, 1)),
]


def brute_shift_norm(a, n):
    """Range-norm ratio maximised through the Gram matrix of P_n (independent of the section code)."""
    basis = np.eye(n + 1)

    # Gram matrices for P_n and z P_n in the range norm by polarisation
    def gram(vectors):
        m = len(vectors)
        out = np.zeros((m, m), dtype=complex)
        for i in range(m):
            for j in range(m):
                s = range_norm(a, vectors[i] + vectors[j]) ** 2 - range_norm(a, vectors[i] - vectors[j]) ** 2
                t = range_norm(a, vectors[i] + 1j * vectors[j]) ** 2 - range_norm(a, vectors[i] - 1j * vectors[j]) ** 2
                out[j, i] = (s + 1j * t) / 4
        return out
    G0 = gram([b for b in basis])
    G1 = gram([np.concatenate([[0.0], b]) for b in basis])
    return float(np.sqrt(eigh(G1, G0, eigvals_only=True)[-1]))


@pytest.mark.parametrize("a", SYMBOLS)
def test_closed_form(a):
    c = a.coefficients
    assert shift_norm_closed(a) == pytest.approx(np.linalg.norm(c) / abs(c[0]), rel=1e-14)
    assert shift_norm_closed(CircleZeroPolynomial()) == 1.0


@pytest.mark.parametrize("a", SYMBOLS)
@pytest.mark.parametrize("n", [0, 2, 6])
def test_section_norm_matches_brute_force(a, n):
    assert shift_section_norm(a, n) == pytest.approx(brute_shift_norm(a, n), rel=1e-9)


@pytest.mark.parametrize("a", SYMBOLS)
def test_sections_reach_closed_form(a):
    N = a.degree
    r = shift_norm_sections(a, [N - 1 if N else 0, N + 3, 64])
    for n, s in r.section_values:
        assert s == pytest.approx(r.closed_form, rel=1e-12)
    assert abs(r.final_gap) <= 1e-12
    assert r.maximizer_residual <= 1e-12
    assert set(r.to_json()) == {"closed_form", "section_values", "maximizer_residual", "final_gap"}
    assert len(r.rows()) == 3


def test_sections_monotone_below_closed_form():
    a = czp((0.5, 1), (2.0, 2), (4.0, 1))
    r = shift_norm_sections(a, [0, 1, 2, 3, 4, 8])
    vals = [s for _, s in r.section_values]
    assert all(y >= x - 1e-12 for x, y in zip(vals, vals[1:]))
    assert all(v <= r.closed_form + 1e-12 for v in vals)


def test_sections_validate():
    with pytest.raises(ValueError):
        shift_norm_sections(SYMBOLS[0], [])
    with pytest.raises(ValueError):
        shift_norm_sections(SYMBOLS[0], [4, 4])
    with pytest.raises(ValueError):
        shift_section_norm(SYMBOLS[0], -1)


@pytest.mark.parametrize("a", SYMBOLS)
def test_power_iteration_matches_svd(a, monkeypatch):
    exact = shift_section_norm(a, 40)
    monkeypatch.setattr(so, "SVD_LIMIT", 8)
    assert shift_section_norm(a, 40) == pytest.approx(exact, rel=1e-8)


def test_section_matrix_shape():
    S = shift_section_matrix(SYMBOLS[1], 5)
    assert S.shape == (7, 6)


@pytest.mark.parametrize("a", SYMBOLS)
def test_scalar_identities(a):
    r1, r2 = scalar_identity_residuals(a)
    assert r1 <= 1e-13 and r2 <= 1e-13


@pytest.mark.parametrize("a", SYMBOLS)
def test_shift_identity_examples(a):
    assert shift_identity_residual(a, [1.0]) <= 1e-13
    assert shift_identity_residual(a, [0, 0, 1j]) <= 1e-13
    assert shift_identity_residual(a, [0.0]) == 0.0


@given(st.sampled_from(SYMBOLS), st.integers(0, 60), st.integers(0, 2**32 - 1))
def test_shift_identity_random(a, deg, seed):
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
    assert shift_identity_residual(a, f) <= 1e-12


@pytest.mark.parametrize("a", SYMBOLS)
@pytest.mark.parametrize("extra", [2, 10, 60])
def test_adjoint(a, extra):
    assert adjoint_residual(a, a.degree + extra) <= 1e-12


def test_adjoint_needs_room():
    a = SYMBOLS[1]
    with pytest.raises(ValueError, match="N \\+ 2"):
        adjoint_residual(a, a.degree + 1)


def test_maximizer_constant_symbol():
    assert maximizer_residual(CircleZeroPolynomial()) == 0.0


@pytest.mark.parametrize("a", SYMBOLS)
def test_commutant(a, rng):
    phi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    f = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    assert commutant_residual(a, phi, f) <= 1e-12


@pytest.mark.parametrize("start,stop,expected", [
    (8, 64, [8, 16, 32, 64]),
    (5, 40, [5, 8, 16, 32, 40]),
    (3, 3, [3]),
    (0, 4, [0, 1, 2, 4]),
])
def test_sweep(start, stop, expected):
    assert sweep(start, stop) == expected
