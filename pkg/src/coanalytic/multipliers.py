"""Multiplier verdicts between range spaces and a numeric multiplier-norm oracle.

The verdict logic dispatches on how the zero sets of the two symbols
compare.  Comparable zero sets give a decision; incomparable ones give
``unknown`` unless the sufficient condition ``phi in a2 H^inf`` holds.
Rule tags are stable identifiers used in JSON reports:

``prop3.1``             ``a1 = a2``: ``M(a) cap H^inf``
``thm1.1``              ``a2 | a1`` with ``h = a1/a2``: ``phi in M(a2)`` and ``h phi`` bounded
``thm1.2``              ``a1 | a2`` with ``k = a2/a1``: ``phi = k psi``, ``psi in M(a1) cap H^inf``
``cor-M(a,1)``          ``a2 = 1``: ``phi in H^2`` and ``a phi`` bounded
``cor-M(1,a)``          ``a1 = 1``: ``phi in a H^inf``
``sufficient-a2Hinf``   incomparable zero sets: only ``a2 H^inf`` is checked
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.special
from scipy.sparse.linalg import svds

from coanalytic.rangespace import decompose, membership
from coanalytic.sections import build_section, range_norm
from coanalytic.symbols import (
    CircleZeroPolynomial,
    SingularFactorFunction,
    as_series,
    as_singular,
    circle_divides,
    h2_membership,
    h2_norm,
    hinf_membership,
    is_integer,
    unit,
)

GROWTH_THRESHOLD = 1.05
DENSE_LIMIT = 2048


@dataclass(frozen=True, eq=False)
class MultiplierVerdict:
    decision: str  # "yes" | "no" | "unknown"
    rule: str
    witnesses: dict = field(default_factory=dict)
    obstruction: str = ""

    def to_json(self) -> dict:
        from coanalytic.serialize import to_jsonable
        return {"decision": self.decision, "rule": self.rule,
                "witnesses": to_jsonable(self.witnesses), "obstruction": self.obstruction}


def _factor_json(phi: SingularFactorFunction) -> dict:
    from coanalytic.serialize import singular_to_json
    return singular_to_json(phi)


def _unbounded_at(phi: SingularFactorFunction) -> list[tuple[float, float]]:
    return [(t, a) for t, a in phi.factors if a < 0]


def _hinf_obstruction(label: str, phi: SingularFactorFunction) -> str:
    bad = ", ".join(f"exponent {a:.6g} at theta={t:.6g}" for t, a in _unbounded_at(phi))
    return f"{label} is unbounded near the circle ({bad})"


def _membership_obstruction(label: str, verdict) -> str:
    bad = [r for r in verdict.exponent_table if not r.ok]
    parts = ", ".join(f"exponent {r.alpha:.6g} at theta={r.theta:.6g} needs > {r.required:.6g}" for r in bad)
    return f"{label} is not in the range space ({parts})"


def _same_function(f: SingularFactorFunction, g: SingularFactorFunction, samples: int = 16) -> bool:
    if len(f.factors) != len(g.factors):
        return False
    for (t1, a1), (t2, a2) in zip(f.factors, g.factors):
        if abs(unit(t1) - unit(t2)) > 1e-9 or abs(a1 - a2) > 1e-12:
            return False
    z = 0.5 * np.exp(2j * np.pi * np.arange(samples) / samples)
    v1, v2 = f.rational(z), g.rational(z)
    return bool(np.allclose(v1, v2, rtol=1e-10, atol=1e-12))


def mult_check(a1: CircleZeroPolynomial, a2: CircleZeroPolynomial, phi) -> MultiplierVerdict:
    """Decide whether `phi` multiplies ``M(a1bar)`` into ``M(a2bar)``."""
    phi = as_singular(phi)

    if a1.same_as(a2):
        mem = membership(a1, phi)
        wit = {"exponent_table": [r.to_json() for r in mem.exponent_table]}
        if mem.interpolant is not None:
            wit["interpolant"] = mem.interpolant
        if not hinf_membership(phi):
            return MultiplierVerdict("no", "prop3.1", wit, _hinf_obstruction("phi", phi))
        if not mem.member:
            return MultiplierVerdict("no", "prop3.1", wit, _membership_obstruction("phi", mem))
        return MultiplierVerdict("yes", "prop3.1", wit)

    h = circle_divides(a1, a2)
    if h is not None:
        hphi = phi.times(h)
        if a2.degree == 0:
            rule = "cor-M(a,1)"
            wit = {"h": h.coefficients, "h_phi": _factor_json(hphi)}
            if not h2_membership(phi):
                return MultiplierVerdict("no", rule, wit, "phi is not in H^2 (circle exponent <= -1/2)")
        else:
            rule = "thm1.1"
            mem = membership(a2, phi)
            wit = {"h": h.coefficients, "h_phi": _factor_json(hphi),
                   "exponent_table": [r.to_json() for r in mem.exponent_table]}
            if not mem.member:
                return MultiplierVerdict("no", rule, wit, _membership_obstruction("phi", mem))
        if not hinf_membership(hphi):
            return MultiplierVerdict("no", rule, wit, _hinf_obstruction("h * phi", hphi))
        return MultiplierVerdict("yes", rule, wit)

    k = circle_divides(a2, a1)
    if k is not None:
        psi = phi.divide(k)
        if not _same_function(psi.times(k), phi):
            raise ArithmeticError("factorisation phi = k * psi failed to reproduce phi")
        wit = {"k": k.coefficients, "psi": _factor_json(psi)}
        if a1.degree == 0:
            rule = "cor-M(1,a)"
            if not hinf_membership(psi):
                return MultiplierVerdict("no", rule, wit, _hinf_obstruction("phi / a", psi))
            return MultiplierVerdict("yes", rule, wit)
        rule = "thm1.2"
        mem = membership(a1, psi)
        wit["exponent_table"] = [r.to_json() for r in mem.exponent_table]
        if not hinf_membership(psi):
            return MultiplierVerdict("no", rule, wit, _hinf_obstruction("psi = phi / k", psi))
        if not mem.member:
            return MultiplierVerdict("no", rule, wit, _membership_obstruction("psi = phi / k", mem))
        return MultiplierVerdict("yes", rule, wit)

    # incomparable zero sets: only the sufficient condition phi in a2 H^inf
    q = phi.divide(a2)
    wit = {"quotient": _factor_json(q)}
    if hinf_membership(q):
        return MultiplierVerdict("yes", "sufficient-a2Hinf", wit)
    return MultiplierVerdict("unknown", "sufficient-a2Hinf", wit,
                             "zero sets are incomparable and phi / a2 is unbounded")


# -- onto multipliers ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OntoVerdict:
    decision: str  # "exist" | "none" | "unknown"
    rule: str
    certificate: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        from coanalytic.serialize import to_jsonable
        return {"decision": self.decision, "rule": self.rule, "certificate": to_jsonable(self.certificate)}


def _pole_certificate(q: CircleZeroPolynomial, role: str) -> dict:
    recip = SingularFactorFunction.constant(1.0).divide(q)
    assert not h2_membership(recip)
    return {
        "quotient_role": role,
        "quotient": q.coefficients,
        "poles_of_reciprocal": [{"theta": t, "order": m} for t, m in q.zeros],
        "reciprocal_in_H2": False,
        "reason": f"1/{role} has a pole of order >= 1 on the circle, so 1/{role} is not in H^2",
    }


def onto_check(a1: CircleZeroPolynomial, a2: CircleZeroPolynomial) -> OntoVerdict:
    """Whether multipliers of ``M(a1bar)`` onto ``M(a2bar)`` exist."""
    if a1.same_as(a2):
        from coanalytic.mate import sup_norm_on_circle
        sup = sup_norm_on_circle(a1) if a1.degree else 1.0
        return OntoVerdict("exist", "crofoot", {
            "family": "1/(1 - conj(lam) a)",
            "radius": 1.0 / sup,
            "sup_norm": sup,
            "complete": False,
        })
    h = circle_divides(a1, a2)
    if h is not None and h.degree > 0:
        return OntoVerdict("none", "thm4.1", _pole_certificate(h, "h"))
    k = circle_divides(a2, a1)
    if k is not None and k.degree > 0:
        return OntoVerdict("none", "cor4.2", _pole_certificate(k, "k"))
    return OntoVerdict("unknown", "incomparable", {"reason": "zero sets are incomparable"})


@dataclass(frozen=True)
class CrofootReport:
    lam: complex
    radius: float
    terms: int
    tail_bound: float
    forward_ratio: float
    inverse_ratio: float
    forward_residual: float
    inverse_residual: float
    divisibility_residual: float

    def to_json(self) -> dict:
        from coanalytic.serialize import to_jsonable
        return to_jsonable(self.__dict__)


def crofoot_verify(a: CircleZeroPolynomial, lam: complex, n: int, trials: int,
                   seed: int = 0, tol: float = 1e-12) -> CrofootReport:
    """Check that ``1/(1 - conj(lam) a)`` maps ``M(abar)`` onto itself on random samples.

    For random ``f`` of degree `n` the forward image ``(1 - conj(lam) a) f`` is an
    exact polynomial.  The inverse image is the truncated geometric series
    ``F_K = sum_{k<K} (conj(lam) a)**k f`` with
    ``||f/(1 - conj(lam) a) - F_K||_abar <= |lam|**K ||a||_inf**(K-1) ||f|| / (1 - rho)``,
    ``rho = |lam| ||a||_inf``.  Ratios are range norms relative to ``||f||_abar``.
    """
    from coanalytic.mate import sup_norm_on_circle

    if n < 1 or trials < 1:
        raise ValueError("n and trials must be at least 1")
    sup = sup_norm_on_circle(a) if a.degree else 1.0
    rho = abs(lam) * sup
    if rho >= 1.0:
        raise ValueError(f"|lam| = {abs(lam):.6g} violates |lam| < 1/||a||_inf = {1.0 / sup:.6g}")
    c = a.coefficients
    step = np.conj(lam) * c
    rng = np.random.default_rng(seed)

    terms = 1
    if rho > 0:
        while abs(lam) ** terms * sup ** (terms - 1) / (1.0 - rho) > tol:
            terms += 1

    fwd, inv, fres, ires, dres, tail = 0.0, 0.0, 0.0, 0.0, 0.0, 0.0
    for _ in range(trials):
        f = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
        nf = range_norm(a, f)
        forward = np.convolve(f, np.concatenate([[1.0], np.zeros(c.size - 1)]) - step)
        fwd = max(fwd, range_norm(a, forward) / nf)

        partial = f.astype(complex)
        power = f.astype(complex)
        for _ in range(terms - 1):
            power = np.convolve(power, step)
            partial = np.concatenate([partial, np.zeros(power.size - partial.size)]) + power
        inv = max(inv, range_norm(a, partial) / nf)
        tail = max(tail, abs(lam) ** terms * sup ** max(terms - 1, 0) * h2_norm(f) / (1.0 - rho))

        # (1 - conj(lam) a) F_K - f = -(conj(lam) a)**K f exactly
        back = np.convolve(partial, np.concatenate([[1.0], np.zeros(c.size - 1)]) - step)
        expect = -np.convolve(power, step)
        width = max(back.size, expect.size, f.size)
        r = np.pad(back, (0, width - back.size)) - np.pad(f, (0, width - f.size))
        r -= np.pad(expect, (0, width - expect.size))
        ires = max(ires, h2_norm(r) / h2_norm(f))

        # the forward image differs from f by a multiple of a
        width = max(forward.size, f.size)
        diff = np.pad(forward, (0, width - forward.size)) - np.pad(f, (0, width - f.size))
        fres = max(fres, h2_norm(decompose(a, diff).p) / h2_norm(f)) if a.degree else 0.0
        if a.degree:
            width = max(partial.size, f.size)
            diff = np.pad(partial, (0, width - partial.size)) - np.pad(f, (0, width - f.size))
            dres = max(dres, h2_norm(decompose(a, diff).p) / h2_norm(f))

    return CrofootReport(complex(lam), 1.0 / sup, terms, tail, fwd, inv, fres, ires, dres)


# -- numeric oracle ------------------------------------------------------------

def _top_eigenvalue(G: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian matrix."""
    k = G.shape[0] - 1
    try:
        top = scipy.linalg.eigh(G, eigvals_only=True, subset_by_index=[k, k], check_finite=False)[0]
    except np.linalg.LinAlgError:
        # the subset driver can fail on tightly clustered spectra
        top = scipy.linalg.eigvalsh(G, driver="evd", check_finite=False)[-1]
    return float(max(top, 0.0))


def _sigma_max(A: np.ndarray) -> float:
    """Largest singular value: Gram eigenvalue for desk sizes, Lanczos beyond."""
    if min(A.shape) <= DENSE_LIMIT:
        G = A.conj().T @ A if A.shape[0] >= A.shape[1] else A @ A.conj().T
        return float(np.sqrt(_top_eigenvalue(G)))
    v0 = np.ones(min(A.shape), dtype=A.dtype)
    s = svds(A, k=1, which="LM", v0=v0, tol=1e-12, return_singular_vectors=False)
    return float(s[0])


def _conv_matrix(phi: np.ndarray, cols: int) -> np.ndarray:
    col = np.concatenate([phi, np.zeros(cols - 1, dtype=complex)])
    row = np.zeros(cols, dtype=complex)
    row[0] = phi[0]
    return scipy.linalg.toeplitz(col, row)


def mult_matrix(a1, a2, phi, n: int) -> np.ndarray:
    """Matrix of ``g -> preimage_{a2}(phi * T_{a1bar} g)`` on ``P_n`` (polynomial `phi`)."""
    phi = as_series(phi)
    d = phi.size - 1
    T1 = build_section(a1, n)
    c1 = np.conj(T1.symbol)
    Phi = _conv_matrix(phi, n + 1)
    X = np.zeros_like(Phi)
    for k, ck in enumerate(c1):
        if k <= n:
            X[:, k:] += ck * Phi[:, : n + 1 - k]
    return build_section(a2, n + d).solve(X)


def _weight_coefficients(phi: SingularFactorFunction, m: int) -> np.ndarray:
    """``w_hat[k]`` for ``0 <= k <= m`` where ``w = |phi|**2`` on the circle.

    Requires one fractional factor and an integer part analytic on the closed disk.
    """
    (theta, alpha), = phi.fractional_factors
    if any(a < 0 for _, a in phi.factors if is_integer(a)):
        raise NotImplementedError("weight route needs non-negative integer circle exponents")
    r = phi.integer_part()
    length = 64
    while True:
        rc = r.taylor(length)
        if np.max(np.abs(rc[-8:])) <= 1e-17 * max(1.0, np.max(np.abs(rc))):
            break
        if length > 1 << 16:
            raise ArithmeticError("integer part does not decay; not analytic on the closed disk")
        length *= 2
    rc = np.trim_zeros(rc, "b")
    L = rc.size - 1
    # autocorrelation: w_R[j] = sum_i r_{i+j} conj(r_i), j in [-L, L]
    auto = np.correlate(rc, rc, mode="full")  # index L + j
    # |1 - e^{i(t - theta)}|^{2 alpha}: s_k e^{-ik theta}, s_{-k} = s_k
    K = m + L
    s = np.empty(K + 1)
    s[0] = np.exp(scipy.special.gammaln(2 * alpha + 1) - 2 * scipy.special.gammaln(alpha + 1))
    for k in range(K):
        s[k + 1] = s[k] * (k - alpha) / (k + 1 + alpha)
    ks = np.arange(-K, K + 1)
    sing = s[np.abs(ks)] * np.exp(-1j * ks * theta)  # index K + k
    full = np.convolve(auto, sing)  # index (L + K) + k
    mid = L + K
    return full[mid : mid + m + 1]


def weight_mult_norm(a1, phi: SingularFactorFunction, n: int) -> float:
    """``sup ||phi T_{a1bar} g|| / ||g||`` over ``P_n`` via the Toeplitz weight of ``|phi|^2``."""
    w = _weight_coefficients(phi, n)
    W = scipy.linalg.toeplitz(w, np.conj(w))
    A = build_section(a1, n).to_dense()
    G = A.conj().T @ W @ A
    G = 0.5 * (G + G.conj().T)
    return float(np.sqrt(_top_eigenvalue(G)))


def _polynomial_part(phi: SingularFactorFunction, n: int) -> np.ndarray | None:
    """Taylor coefficients of `phi` when it is a polynomial, or analytic on the closed disk."""
    if phi.fractional_factors or any(a < 0 for _, a in phi.factors):
        return None
    if phi.is_polynomial:
        return as_series(phi.integer_part().num / phi.integer_part().den[0])
    length = 64
    while length <= 1 << 16:
        c = phi.taylor(length)
        if np.max(np.abs(c[-8:])) <= 1e-17 * max(1.0, np.max(np.abs(c))):
            return as_series(c)
        length *= 2
    return None


def numeric_mult_norm(a1, a2, phi, n: int) -> float:
    """``sigma_max`` of ``g -> preimage_{a2}(phi * T_{a1bar} g)`` on ``P_n``.

    A lower bound for the multiplier norm that is non-decreasing in `n`;
    unbounded growth in `n` is evidence that `phi` is not a multiplier.
    Polynomial `phi` (or `phi` analytic across the circle, truncated below
    rounding) is handled exactly.  A single fractional circle factor is
    supported when ``a2 = 1`` through the weight ``|phi|^2``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if isinstance(phi, (SingularFactorFunction, CircleZeroPolynomial)):
        phi = as_singular(phi)
        coeffs = _polynomial_part(phi, n)
        if coeffs is None:
            deg2 = a2.degree if isinstance(a2, CircleZeroPolynomial) else as_series(a2).size - 1
            if deg2 != 0 or len(phi.fractional_factors) != 1:
                raise NotImplementedError(
                    "singular phi is supported only for a2 = 1 with one fractional factor")
            return weight_mult_norm(a1, phi, n)
    else:
        coeffs = as_series(phi)
    return _sigma_max(mult_matrix(a1, a2, coeffs, n))


def growth_ratios(values: Sequence[float]) -> list[float]:
    return [values[i + 1] / values[i] for i in range(len(values) - 1)]


def looks_bounded(values: Sequence[float], threshold: float = GROWTH_THRESHOLD) -> bool:
    """Heuristic: every consecutive growth ratio stays below `threshold`."""
    return all(r < threshold for r in growth_ratios(values))
