"""The splitting ``M(abar) = a H^2 + P_{N-1}`` and membership of singular functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as P

from coanalytic.sections import build_section
from coanalytic.symbols import (
    CircleZeroPolynomial,
    angle_distance,
    as_series,
    as_singular,
    h2_norm,
    is_integer,
    pad,
    taylor_shift,
    unit,
)

DIVISION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Decomposition:
    """``f = a * f_tilde + p`` with ``deg p <= N - 1``."""

    f_tilde: np.ndarray
    p: np.ndarray
    remainder: float = 0.0
    condition: float = 1.0

    def to_json(self) -> dict:
        from coanalytic.serialize import complex_list
        return {"decomposition": {"p": complex_list(self.p), "fTilde": complex_list(self.f_tilde),
                                  "remainder": self.remainder, "condition": self.condition}}


@dataclass(frozen=True)
class ExponentRow:
    theta: float
    alpha: float
    mult: int
    required: float
    analytic: bool
    ok: bool

    def to_json(self) -> dict:
        return dict(theta=self.theta, alpha=self.alpha, mult=self.mult,
                    required=self.required, analytic=self.analytic, ok=self.ok)


@dataclass(frozen=True, eq=False)
class MembershipVerdict:
    member: bool
    exponent_table: list[ExponentRow]
    interpolant: np.ndarray | None = field(default=None)

    def __bool__(self) -> bool:
        return self.member

    def to_json(self) -> dict:
        from coanalytic.serialize import complex_list
        out = {"member": self.member, "exponent_table": [r.to_json() for r in self.exponent_table]}
        if self.interpolant is not None:
            out["interpolant"] = complex_list(self.interpolant)
        return out


def polynomial_taylor_data(f) -> Callable[[complex, int], np.ndarray]:
    f = as_series(f)
    return lambda z0, m: taylor_shift(f, z0, m)


def hermite_interpolant(a: CircleZeroPolynomial,
                        taylor_data: Callable[[complex, int], np.ndarray]) -> tuple[np.ndarray, float]:
    """Confluent Hermite interpolant at the zeros of `a`.

    `taylor_data(zeta, m)` must return ``f^(k)(zeta)/k!`` for ``k < m``.
    Returns the coefficients of ``p`` (degree at most ``N - 1``) and the
    condition number of the confluent Vandermonde system, for reporting.
    """
    N = a.degree
    if N == 0:
        return np.zeros(1, dtype=complex), 1.0
    nodes = []
    data = {}
    for idx, (theta, m) in enumerate(a.zeros):
        z = unit(theta)
        data[idx] = np.asarray(taylor_data(z, m), dtype=complex)
        nodes += [(idx, z)] * m
    x = np.array([z for _, z in nodes])
    group = [g for g, _ in nodes]

    # column j of the table holds order-j divided differences
    col = np.array([data[g][0] for g in group], dtype=complex)
    newton = [col[0]]
    for j in range(1, N):
        nxt = np.empty(N - j, dtype=complex)
        for i in range(N - j):
            if group[i] == group[i + j]:
                nxt[i] = data[group[i]][j]
            else:
                nxt[i] = (col[i + 1] - col[i]) / (x[i + j] - x[i])
        col = nxt
        newton.append(col[0])

    p = np.array([newton[-1]], dtype=complex)
    for j in range(N - 2, -1, -1):
        p = np.convolve(p, [-x[j], 1.0])
        p[0] += newton[j]
    return p, confluent_vandermonde_condition(a)


def confluent_vandermonde_condition(a: CircleZeroPolynomial) -> float:
    N = a.degree
    rows = []
    for theta, m in a.zeros:
        z = unit(theta)
        for k in range(m):
            rows.append([comb(j, k) * z ** (j - k) if j >= k else 0.0 for j in range(N)])
    return float(np.linalg.cond(np.array(rows, dtype=complex))) if rows else 1.0


def remainder_interpolant(a: CircleZeroPolynomial, f) -> np.ndarray:
    """The unique ``p`` with ``deg p < N`` and ``f - p`` divisible by `a`."""
    if a.degree == 0:
        return np.zeros(1, dtype=complex)
    _, r = P.polydiv(as_series(f), a.coefficients)
    return as_series(r)


def decompose(a: CircleZeroPolynomial, f) -> Decomposition:
    """Split a polynomial `f` as ``a * f_tilde + p``.

    ``p`` is the Hermite interpolant of `f` at the zeros of `a` (orders
    given by multiplicity); ``f_tilde`` comes from exact division of
    ``f - p`` by `a`, whose remainder is checked rather than discarded.
    """
    f = as_series(f)
    if a.degree == 0:
        return Decomposition(f.copy(), np.zeros(1, dtype=complex))
    if not np.any(f):
        return Decomposition(np.zeros(1, dtype=complex), np.zeros(1, dtype=complex))
    p, cond = hermite_interpolant(a, polynomial_taylor_data(f))
    width = max(f.size, p.size)
    diff = pad(f, width) - pad(p, width)
    q, r = P.polydiv(diff, a.coefficients)
    remainder = h2_norm(r)
    if remainder > DIVISION_TOL * max(1.0, h2_norm(f)) * cond:
        raise ArithmeticError(f"division by the class-A symbol left remainder {remainder:.3e}")
    return Decomposition(as_series(q), as_series(p), remainder, cond)


def _is_analytic(alpha: float) -> bool:
    return is_integer(alpha) and round(alpha) >= 0


def membership(a: CircleZeroPolynomial, phi) -> MembershipVerdict:
    """Decide whether a singular-class function lies in ``M(abar)``.

    At a zero of multiplicity ``m`` the circle exponent must exceed
    ``m - 1/2`` unless the factor is analytic (a non-negative integer
    power); everywhere else it must exceed ``-1/2``.
    """
    phi = as_singular(phi)
    angles = [t for t, _ in a.zeros]
    for t, _ in phi.factors:
        if all(angle_distance(t, s) > a.angle_tol for s in angles):
            angles.append(t)
    table = []
    for t in sorted(angles):
        m = a.multiplicity_at(t)
        alpha = phi.exponent_at(t, a.angle_tol)
        analytic = _is_analytic(alpha)
        required = m - 0.5 if m else -0.5
        ok = analytic or alpha > required + 1e-12
        table.append(ExponentRow(t, alpha, m, required, analytic, ok))
    member = all(r.ok for r in table)
    interpolant = None
    if member and all(_is_analytic(alpha) for _, alpha in phi.factors):
        interpolant, _ = hermite_interpolant(a, phi.taylor_at)
    return MembershipVerdict(member, table, interpolant)


def _twist_columns(a: CircleZeroPolynomial, n: int):
    """Preimages of ``a z^k`` for ``k <= n`` as matrix columns, plus the section."""
    c = a.coefficients
    N = a.degree
    section = build_section(a, n + N)
    rhs = np.zeros((n + N + 1, n + 1), dtype=complex)
    for k in range(n + 1):
        rhs[k : k + N + 1, k] = c
    return section.solve(rhs), section


def equivalence_bounds(a: CircleZeroPolynomial, n: int) -> tuple[float, float]:
    """Extreme singular values of ``f -> a f`` from ``(P_n, H^2)`` into ``M(abar)``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    cols, _ = _twist_columns(a, n)
    s = scipy.linalg.svdvals(cols)
    return float(s[-1]), float(s[0])


def splitting_angle(a: CircleZeroPolynomial, n: int) -> float:
    """Smallest principal angle between ``a P_n`` and ``P_{N-1}`` in the range inner product.

    The splitting is not orthogonal; as ``n`` grows this decreases towards
    the angle between ``a H^2`` and ``P_{N-1}``.
    """
    N = a.degree
    if N == 0:
        return float(np.pi / 2)
    cols, section = _twist_columns(a, n)
    low = section.solve(np.eye(n + N + 1, N, dtype=complex))
    return float(np.min(scipy.linalg.subspace_angles(cols, low)))

