"""Finite sections of co-analytic Toeplitz operators and range-space geometry.

For a polynomial symbol ``a`` with ``a(0) != 0`` the operator ``T_abar``
maps polynomials of degree ``d`` onto themselves through an upper
triangular banded matrix.  Everything here works in *preimage
coordinates*: an element ``f = T_abar g`` is stored together with ``g``,
and the range norm is the H^2 norm of ``g``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack

from coanalytic.symbols import (
    as_series,
    evaluate,
    h2_inner,
    h2_norm,
    symbol_coefficients,
)


@dataclass(frozen=True, eq=False)
class FiniteSection:
    """The ``(n+1) x (n+1)`` section of ``T_abar`` in LAPACK upper band storage.

    ``band[N + j - k, k]`` holds entry ``(j, k)``, which equals
    ``conj(a_hat[k - j])`` for ``0 <= k - j <= N``.
    """

    symbol: np.ndarray
    size: int
    band: np.ndarray = field(repr=False)

    @property
    def bandwidth(self) -> int:
        return self.symbol.size - 1

    def to_dense(self) -> np.ndarray:
        n, N = self.size, self.bandwidth
        out = np.zeros((n, n), dtype=complex)
        for k in range(N + 1):
            idx = np.arange(n - k)
            out[idx, idx + k] = np.conj(self.symbol[k])
        return out

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Apply the section to a vector or to the columns of a matrix."""
        x = np.asarray(x, dtype=complex)
        out = np.zeros_like(x)
        n = self.size
        for k, ck in enumerate(np.conj(self.symbol)):
            if k < n:
                out[: n - k] += ck * x[k:]
        return out

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Back-substitution ``section @ x = b`` (vector or matrix right-hand side)."""
        b = np.asarray(b, dtype=complex)
        vector = b.ndim == 1
        rhs = b.reshape(self.size, -1)
        x, info = lapack.ztbtrs(self.band, rhs, uplo="U", trans="N", diag="N")
        if info != 0:  # pragma: no cover - diagonal is conj(a(0)) != 0
            raise np.linalg.LinAlgError(f"ztbtrs failed with info={info}")
        return x.ravel() if vector else x

    def solve_adjoint(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=complex)
        vector = b.ndim == 1
        x, info = lapack.ztbtrs(self.band, b.reshape(self.size, -1), uplo="U", trans="C", diag="N")
        if info != 0:  # pragma: no cover
            raise np.linalg.LinAlgError(f"ztbtrs failed with info={info}")
        return x.ravel() if vector else x


def _symbol(a) -> np.ndarray:
    c = symbol_coefficients(a)
    if c[0] == 0:
        raise ValueError("symbol vanishes at the origin; T_abar is not injective on polynomials")
    return c


def build_section(a, n: int) -> FiniteSection:
    """Banded ``(n+1)``-square section of ``T_abar``; ``O((n+1) N)`` storage."""
    if n < 0:
        raise ValueError("n must be non-negative")
    c = _symbol(a)
    N = c.size - 1
    size = n + 1
    band = np.zeros((N + 1, size), dtype=complex)
    for k in range(N + 1):
        # superdiagonal k lives in row N - k, columns k..size-1
        band[N - k, k:] = np.conj(c[k])
    return FiniteSection(c, size, band)


def apply_T_abar(a, f) -> np.ndarray:
    """``P_+(abar f)`` for a polynomial `f`; the degree never increases."""
    c = np.conj(_symbol(a))
    f = as_series(f)
    N = c.size - 1
    full = np.convolve(f, c[::-1])
    return full[N : N + f.size]


def preimage(a, f) -> np.ndarray:
    """The unique ``g`` in H^2 with ``T_abar g = f``, for polynomial `f`.

    Exact up to rounding: the section is triangular with diagonal
    ``conj(a(0))`` and the preimage has the same degree as `f`.
    """
    f = as_series(f)
    return build_section(a, f.size - 1).solve(f)


def range_norm(a, f) -> float:
    """``||f||_abar = ||preimage(f)||_{H^2}``."""
    return h2_norm(preimage(a, f))


def abar_inner(a, f1, f2) -> complex:
    """``<f1, f2>_abar``, linear in the first slot."""
    return h2_inner(preimage(a, f1), preimage(a, f2))


def backward_shift(f) -> np.ndarray:
    f = as_series(f)
    return f[1:].copy() if f.size > 1 else np.zeros(1, dtype=complex)


# -- reproducing kernels -----------------------------------------------------

def kernel_tail_bound(a, lam: complex, n: int) -> float:
    """Bound on ``||k_lam - kernel(a, lam, n)||_abar``.

    The truncation error has preimage equal to the tail of ``a k_lam`` above
    degree `n`, whose coefficients are bounded by ``W |lam|**(m - N)`` with
    ``W = sum |a_hat|``.  Summing the geometric tail gives
    ``W |lam|**(n + 1 - N) / sqrt(1 - |lam|**2)``.
    """
    c = _symbol(a)
    N = c.size - 1
    r = abs(lam)
    if r == 0.0:
        return 0.0 if n >= N else float(np.sum(np.abs(c)))
    w = float(np.sum(np.abs(c)))
    return w * r ** max(n + 1 - N, 0) / np.sqrt(1.0 - r * r)


def kernel_degree(a, lam: complex, eps: float = 1e-8) -> int:
    """Smallest truncation degree whose tail bound is at most `eps`."""
    c = _symbol(a)
    N = c.size - 1
    r = abs(lam)
    if r == 0.0:
        return N
    w = float(np.sum(np.abs(c)))
    need = np.log(eps * np.sqrt(1.0 - r * r) / w) / np.log(r)
    n = max(N, int(np.ceil(need)) + N - 1)
    while kernel_tail_bound(a, lam, n) > eps:
        n += 1
    return n


def kernel(a, lam: complex, n: int | None = None, eps: float = 1e-8) -> np.ndarray:
    """Truncated reproducing kernel ``T_abar`` of the degree-`n` part of ``a k_lam``.

    With ``n=None`` the degree is chosen from :func:`kernel_tail_bound` so
    that the kernel is within `eps` in range norm.
    """
    if abs(lam) >= 1.0:
        raise ValueError("kernel point must lie in the open unit disk")
    if n is None:
        n = kernel_degree(a, lam, eps)
    return apply_T_abar(a, _kernel_preimage(a, lam, n))


def _kernel_preimage(a, lam: complex, n: int) -> np.ndarray:
    c = _symbol(a)
    cauchy = np.conj(lam) ** np.arange(n + 1)
    return np.convolve(c, cauchy)[: n + 1]


def reproducing_residual(a, f, lam: complex, n: int | None = None, eps: float = 1e-8) -> float:
    """``|<f, k_lam>_abar - f(lam)|`` with the kernel truncated at degree `n`.

    With ``n=None`` the target accuracy `eps` is scaled by ``||f||_abar`` so
    that the Cauchy-Schwarz error bound meets `eps`.
    """
    f = as_series(f)
    if n is None:
        scale = max(1.0, range_norm(a, f))
        n = kernel_degree(a, lam, eps / scale)
    k = kernel(a, lam, n)
    return abs(abar_inner(a, f, k) - complex(evaluate(f, lam)))


# -- elements ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RangeElement:
    """A polynomial ``f`` in the range space together with its preimage ``g``."""

    f: np.ndarray
    g: np.ndarray
    symbol: object

    @classmethod
    def from_function(cls, a, f) -> "RangeElement":
        f = as_series(f)
        return cls(f, preimage(a, f), a)

    @classmethod
    def from_preimage(cls, a, g) -> "RangeElement":
        g = as_series(g)
        return cls(apply_T_abar(a, g), g, a)

    @property
    def norm(self) -> float:
        return h2_norm(self.g)

    @property
    def residual(self) -> float:
        """Relative coefficientwise residual of ``T_abar g = f``."""
        r = apply_T_abar(self.symbol, self.g) - self.f
        return float(np.max(np.abs(r)) / max(1.0, np.max(np.abs(self.f))))

    def inner(self, other: "RangeElement") -> complex:
        return h2_inner(self.g, other.g)
