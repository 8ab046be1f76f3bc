"""The shift on a range space: norm, finite sections and the adjoint identity.

Everything is computed in preimage coordinates, where the range inner
product is Euclidean.  There the shift acts as
``g -> z g - <g, Ba> / conj(a(0))`` and the backward shift ``X`` acts as the
coefficient backward shift, so ``X*`` is the forward shift.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from coanalytic.sections import (
    FiniteSection,
    _symbol,
    apply_T_abar,
    backward_shift,
    build_section,
    preimage,
)
from coanalytic.symbols import as_series, h2_inner, h2_norm

SVD_LIMIT = 2048
POWER_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ShiftReport:
    closed_form: float
    section_values: list[tuple[int, float]] = field(default_factory=list)
    maximizer_residual: float = 0.0

    @property
    def final_gap(self) -> float:
        return self.closed_form - self.section_values[-1][1] if self.section_values else float("nan")

    def rows(self) -> list[tuple[int, float, float, float]]:
        return [(n, s, self.closed_form, self.closed_form - s) for n, s in self.section_values]

    def to_json(self) -> dict:
        return {"closed_form": self.closed_form,
                "section_values": [[n, s] for n, s in self.section_values],
                "maximizer_residual": self.maximizer_residual,
                "final_gap": self.final_gap}


def shift_norm_closed(a) -> float:
    """``||a||_{H^2} / |a(0)|``, which is ``||a||_{H^2}`` for class-A symbols."""
    c = _symbol(a)
    return h2_norm(c) / abs(c[0])


def shift_section_matrix(a, n: int) -> np.ndarray:
    """Matrix of ``f -> z f`` from ``P_n`` to ``P_{n+1}`` in preimage coordinates."""
    T = build_section(a, n).to_dense()
    Z = np.vstack([np.zeros((1, n + 1), dtype=complex), T])
    return build_section(a, n + 1).solve(Z)


def _power_sigma(a, n: int, tol: float = POWER_TOL, maxiter: int = 10_000) -> float:
    """``sigma_max`` of the shift section by power iteration with banded operators."""
    small: FiniteSection = build_section(a, n)
    big: FiniteSection = build_section(a, n + 1)

    def fwd(g):
        return big.solve(np.concatenate([[0.0], small.matvec(g)]))

    def adj(y):
        w = big.solve_adjoint(y)[1:]
        # transpose-conjugate of the banded section applied to w
        out = np.zeros(n + 1, dtype=complex)
        for k, ck in enumerate(small.symbol):
            if k <= n:
                out[k:] += ck * w[: n + 1 - k]
        return out

    g = np.ones(n + 1, dtype=complex) / np.sqrt(n + 1)
    sigma = 0.0
    for _ in range(maxiter):
        h = adj(fwd(g))
        lam = float(np.linalg.norm(h))
        g = h / lam
        new = np.sqrt(lam)
        if abs(new - sigma) <= tol * new:
            return new
        sigma = new
    return sigma


def shift_section_norm(a, n: int) -> float:
    if n < 0:
        raise ValueError("n must be non-negative")
    if n <= SVD_LIMIT:
        return float(scipy.linalg.svdvals(shift_section_matrix(a, n), check_finite=False)[0])
    return _power_sigma(a, n)


def maximizer_residual(a) -> float:
    """``| ||z f*||_abar / ||f*||_abar - closed form |`` for ``f* = T_abar(Ba)``."""
    c = _symbol(a)
    Ba = backward_shift(c)
    if not np.any(Ba):
        return 0.0
    f_star = apply_T_abar(c, Ba)
    ratio = h2_norm(preimage(c, np.concatenate([[0.0], f_star]))) / h2_norm(preimage(c, f_star))
    return abs(ratio - shift_norm_closed(c))


def shift_norm_sections(a, n_list: Sequence[int]) -> ShiftReport:
    n_list = [int(n) for n in n_list]
    if not n_list or any(b <= x for x, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be non-empty and strictly increasing")
    values = [(n, shift_section_norm(a, n)) for n in n_list]
    return ShiftReport(shift_norm_closed(a), values, maximizer_residual(a))


# -- identities ----------------------------------------------------------------

def scalar_identity_residuals(a) -> tuple[float, float]:
    """Residuals of ``||1||_abar = 1/|a(0)|`` and ``||T_abar Ba||^2_abar = ||a||^2 - |a(0)|^2``."""
    c = _symbol(a)
    r1 = abs(h2_norm(preimage(c, [1.0])) - 1.0 / abs(c[0]))
    Ba = backward_shift(c)
    lhs = h2_norm(preimage(c, apply_T_abar(c, Ba))) ** 2
    r2 = abs(lhs - (h2_norm(c) ** 2 - abs(c[0]) ** 2))
    return float(r1), float(r2)


def shift_identity_residual(a, f) -> float:
    """Relative residual of ``||z f||^2 = ||f||^2 + ||1||^2 |<f, T_abar Ba>|^2`` (range norms).

    Divided by ``max(1, ||z f||^2)`` so random high-degree inputs are
    compared at their own scale.
    """
    c = _symbol(a)
    f = as_series(f)
    if not np.any(f):
        return 0.0
    g = preimage(c, f)
    lhs = h2_norm(preimage(c, np.concatenate([[0.0], f]))) ** 2
    one = h2_norm(preimage(c, [1.0])) ** 2
    # <f, T_abar Ba>_abar = <g, Ba> because the preimage of T_abar Ba is Ba
    Ba = backward_shift(c)
    width = max(g.size, Ba.size)
    inner = h2_inner(np.pad(g, (0, width - g.size)), np.pad(Ba, (0, width - Ba.size)))
    rhs = h2_norm(g) ** 2 + one * abs(inner) ** 2
    return float(abs(lhs - rhs) / max(1.0, lhs))


def adjoint_residual(a, n: int) -> float:
    """Largest entrywise gap between ``X*`` and ``S + 1 (x) T_abar Ba`` on the interior block.

    Left side: the range-space adjoint of the backward shift on ``P_n``,
    ``G^{-1} B^H G`` with Gram matrix ``G = T^{-H} T^{-1}``, moved to
    preimage coordinates, where it equals ``(T^{-1} B T)^H``.  Right side: exact shift images ``preimage(z T g)``
    plus the rank-one term ``<g, Ba> preimage(1)``.  Columns of degree at
    most ``n - N - 1`` are compared.
    """
    c = _symbol(a)
    N = c.size - 1
    if n < N + 2:
        raise ValueError(f"n must be at least N + 2 = {N + 2}")
    sec = build_section(c, n)
    T = sec.to_dense()
    B = np.eye(n + 1, k=1, dtype=complex)
    # in preimage coordinates G^{-1} B^H G becomes T^H B^H T^{-H} = (T^{-1} B T)^H
    lhs = sec.solve(B @ T).conj().T

    S = shift_section_matrix(c, n)[: n + 1]
    Ba = np.zeros(n + 1, dtype=complex)
    bs = backward_shift(c)
    Ba[: bs.size] = bs
    one = sec.solve(np.eye(n + 1, 1, dtype=complex)).ravel()
    rhs = S + np.outer(one, np.conj(Ba))

    m = n - N - 1
    return float(np.max(np.abs(lhs[:, : m + 1] - rhs[:, : m + 1])))


def commutant_residual(a, phi, f) -> float:
    """``|| S(phi f) - phi S(f) ||_abar`` for polynomials; exact up to rounding."""
    c = _symbol(a)
    phi, f = as_series(phi), as_series(f)
    left = np.concatenate([[0.0], np.convolve(phi, f)])
    right = np.convolve(phi, np.concatenate([[0.0], f]))
    return h2_norm(preimage(c, left) - preimage(c, right))


def sweep(start: int, stop: int) -> list[int]:
    """``start, then powers of two up to stop, then stop`` (strictly increasing)."""
    out = [start]
    p = 1
    while p <= start:
        p *= 2
    while p < stop:
        out.append(p)
        p *= 2
    if stop > start:
        out.append(stop)
    return out
