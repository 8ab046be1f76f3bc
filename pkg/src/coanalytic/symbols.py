"""Symbols: class-A polynomials, rational H-infinity functions and the
branch-singularity class used for multiplier candidates.

Coefficient sequences are plain complex numpy arrays ordered from the
constant term upward (``c[k]`` multiplies ``z**k``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

TWO_PI = 2.0 * np.pi
ANGLE_TOL = 1e-9
MODULUS_TOL = 1e-8
CLUSTER_TOL = 1e-3
INTEGER_TOL = 1e-12


class RootFindingError(ArithmeticError):
    """Raised when companion-matrix root finding does not produce usable roots."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


# ---------------------------------------------------------------------------
# coefficient series helpers
# ---------------------------------------------------------------------------

def as_series(coeffs) -> np.ndarray:
    """Return `coeffs` as a trimmed 1-d complex array (the zero series is ``[0]``)."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).ravel()
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1].copy()


def degree(c) -> int:
    c = as_series(c)
    return 0 if (c.size == 1) else c.size - 1


def h2_norm(c) -> float:
    return float(np.linalg.norm(np.asarray(c, dtype=complex)))


def h2_inner(f, g) -> complex:
    """``<f, g>`` in H^2, linear in the first slot."""
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    n = min(f.size, g.size)
    return complex(np.vdot(g[:n], f[:n]))


def evaluate(c, z):
    return P.polyval(z, np.asarray(c, dtype=complex))


def pad(c, length: int) -> np.ndarray:
    out = np.zeros(length, dtype=complex)
    c = np.asarray(c, dtype=complex)
    m = min(length, c.size)
    out[:m] = c[:m]
    return out


def wrap_angle(theta: float) -> float:
    t = float(np.mod(theta, TWO_PI))
    # values within rounding of 2*pi fold back to 0
    if TWO_PI - t < 1e-15:
        t = 0.0
    return t


def angle_distance(t1: float, t2: float) -> float:
    d = abs(np.mod(t1 - t2, TWO_PI))
    return float(min(d, TWO_PI - d))


def unit(theta: float) -> complex:
    return complex(np.cos(theta), np.sin(theta))


def cluster_roots(roots: Iterable[complex], tol: float = CLUSTER_TOL) -> list[tuple[complex, int]]:
    """Group numerically repeated roots; returns ``(centre, multiplicity)`` pairs.

    Centres are cluster means, which are far more accurate than the
    individual perturbed roots of a multiple zero.
    """
    remaining = list(np.asarray(list(roots), dtype=complex))
    clusters = []
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        grew = True
        while grew:
            grew = False
            for r in list(remaining):
                if min(abs(r - m) for m in members) <= tol:
                    members.append(r)
                    remaining.remove(r)
                    grew = True
        clusters.append((complex(np.mean(members)), len(members)))
    return clusters


def polynomial_roots(c) -> np.ndarray:
    """Roots via companion-matrix eigenvalues, with a failure report."""
    c = as_series(c)
    if c.size <= 1:
        return np.zeros(0, dtype=complex)
    try:
        roots = P.polyroots(c)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise RootFindingError(f"eigenvalue solver failed: {exc}") from exc
    if not np.all(np.isfinite(roots)):
        raise RootFindingError("non-finite roots", float("inf"))
    scale = np.sum(np.abs(c)) * np.maximum(1.0, np.abs(roots)) ** (c.size - 1)
    residual = float(np.max(np.abs(P.polyval(roots, c)) / scale))
    if residual > 1e-6:
        raise RootFindingError("companion eigenvalues do not solve the polynomial", residual)
    return np.asarray(roots, dtype=complex)


# ---------------------------------------------------------------------------
# class A
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CircleZeroPolynomial:
    """Monic polynomial ``prod (z - exp(i theta_j))**m_j`` stored by angles.

    Roots are kept as angles so that unit modulus holds by construction.
    An empty zero list is the constant 1.

    >>> CircleZeroPolynomial(((0.0, 1),)).coefficients
    array([-1.+0.j,  1.+0.j])
    """

    zeros: tuple[tuple[float, int], ...] = ()
    angle_tol: float = ANGLE_TOL

    def __post_init__(self):
        merged: list[list] = []
        for theta, mult in self.zeros:
            if int(mult) != mult or mult < 1:
                raise ValueError(f"multiplicity must be a positive integer, got {mult!r}")
            t = wrap_angle(float(theta))
            for entry in merged:
                if angle_distance(entry[0], t) <= self.angle_tol:
                    entry[1] += int(mult)
                    break
            else:
                merged.append([t, int(mult)])
        merged.sort()
        object.__setattr__(self, "zeros", tuple((t, m) for t, m in merged))

    @classmethod
    def from_angles(cls, angles: Iterable[float], angle_tol: float = ANGLE_TOL) -> "CircleZeroPolynomial":
        """Build from a list of angles, repeated entries counting as multiplicity."""
        return cls(tuple((float(t), 1) for t in angles), angle_tol=angle_tol)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.zeros)

    @property
    def angles(self) -> np.ndarray:
        """Angles repeated according to multiplicity, sorted."""
        return np.array([t for t, m in self.zeros for _ in range(m)], dtype=float)

    @property
    def roots(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    @property
    def coefficients(self) -> np.ndarray:
        return expand(self)

    @property
    def a0(self) -> complex:
        # (-1)^N exp(i sum m theta): unit modulus up to one cos/sin rounding
        total = sum(m * t for t, m in self.zeros)
        return (-1) ** self.degree * unit(total)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for t, m in self.zeros:
            out = out * (z - unit(t)) ** m
        return out

    def multiplicity_at(self, theta: float, tol: float | None = None) -> int:
        tol = self.angle_tol if tol is None else tol
        for t, m in self.zeros:
            if angle_distance(t, theta) <= tol:
                return m
        return 0

    def same_as(self, other: "CircleZeroPolynomial", tol: float | None = None) -> bool:
        tol = self.angle_tol if tol is None else tol
        if len(self.zeros) != len(other.zeros):
            return False
        return all(
            other.multiplicity_at(t, tol) == m for t, m in self.zeros
        )

    def __mul__(self, other: "CircleZeroPolynomial") -> "CircleZeroPolynomial":
        if not isinstance(other, CircleZeroPolynomial):
            return NotImplemented
        return CircleZeroPolynomial(self.zeros + other.zeros, angle_tol=self.angle_tol)

    def __repr__(self) -> str:
        body = ", ".join(f"({t:.12g}, {m})" for t, m in self.zeros)
        return f"CircleZeroPolynomial([{body}])"


def expand(a: CircleZeroPolynomial) -> np.ndarray:
    """Coefficients of ``prod (z - zeta_j)**m_j``, constant term first."""
    c = np.ones(1, dtype=complex)
    for t, m in a.zeros:
        factor = np.array([-unit(t), 1.0], dtype=complex)
        for _ in range(m):
            c = np.convolve(c, factor)
    return c


def circle_divides(a1: CircleZeroPolynomial, a2: CircleZeroPolynomial,
                   tol: float = ANGLE_TOL) -> CircleZeroPolynomial | None:
    """Return ``a1 / a2`` when the zeros of `a2` are contained in those of `a1`.

    Containment is of multisets (multiplicity counts), with angles matched
    up to `tol`.  Returns None when `a2` does not divide `a1`.
    """
    remaining = [[t, m] for t, m in a1.zeros]
    for t2, m2 in a2.zeros:
        for entry in remaining:
            if angle_distance(entry[0], t2) <= tol:
                if entry[1] < m2:
                    return None
                entry[1] -= m2
                break
        else:
            return None
    return CircleZeroPolynomial(tuple((t, m) for t, m in remaining if m > 0), angle_tol=a1.angle_tol)


# ---------------------------------------------------------------------------
# rational symbols
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RationalSymbol:
    """``num / den`` with `den` zero-free on the closed unit disk."""

    num: np.ndarray
    den: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        num = as_series(self.num)
        den = as_series(np.ones(1) if self.den is None else self.den)
        if not np.any(num):
            raise ValueError("rational symbol is identically zero")
        if not np.any(den):
            raise ValueError("zero denominator")
        poles = polynomial_roots(den)
        if poles.size and np.min(np.abs(poles)) <= 1.0 + MODULUS_TOL:
            raise ValueError("denominator has a root in the closed unit disk")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def polynomial(cls, coeffs) -> "RationalSymbol":
        return cls(np.asarray(coeffs, dtype=complex))

    @property
    def is_polynomial(self) -> bool:
        return self.den.size == 1

    def __call__(self, z):
        return evaluate(self.num, z) / evaluate(self.den, z)

    def derivative(self, z):
        dn = P.polyder(self.num) if self.num.size > 1 else np.zeros(1)
        dd = P.polyder(self.den) if self.den.size > 1 else np.zeros(1)
        d = evaluate(self.den, z)
        return (evaluate(dn, z) * d - evaluate(self.num, z) * evaluate(dd, z)) / d**2

    def scaled(self, s: complex) -> "RationalSymbol":
        return RationalSymbol(self.num * s, self.den)

    def __mul__(self, other: "RationalSymbol") -> "RationalSymbol":
        if not isinstance(other, RationalSymbol):
            return NotImplemented
        return RationalSymbol(np.convolve(self.num, other.num), np.convolve(self.den, other.den))

    def taylor(self, n: int) -> np.ndarray:
        """First ``n + 1`` Taylor coefficients at the origin."""
        return series_divide(pad(self.num, n + 1), self.den, n + 1)

    def taylor_at(self, z0: complex, order: int) -> np.ndarray:
        """Taylor coefficients ``f^(k)(z0)/k!`` for ``k < order``."""
        return series_divide(taylor_shift(self.num, z0, order), taylor_shift(self.den, z0, order), order)


def taylor_shift(c, z0: complex, order: int) -> np.ndarray:
    """Coefficients of ``c(z0 + w)`` in powers of ``w``, first `order` of them."""
    work = np.array(as_series(c), dtype=complex)
    out = np.zeros(order, dtype=complex)
    for k in range(order):
        if work.size == 0:
            break
        # synthetic division by (z - z0): remainder is the k-th Taylor coefficient
        q = np.zeros(max(work.size - 1, 0), dtype=complex)
        acc = 0j
        for j in range(work.size - 1, -1, -1):
            acc = acc * z0 + work[j]
            if j > 0:
                q[j - 1] = acc
        out[k] = acc
        work = q
    return out


def series_divide(num, den, n: int) -> np.ndarray:
    """First `n` power-series coefficients of ``num / den`` (``den[0] != 0``)."""
    num = pad(num, n)
    den = np.asarray(den, dtype=complex)
    if den[0] == 0:
        raise ZeroDivisionError("series division by a series vanishing at the base point")
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        s = num[k]
        upper = min(k, den.size - 1)
        if upper:
            s -= np.dot(den[1 : upper + 1], out[k - 1 :: -1][:upper])
        out[k] = s / den[0]
    return out


def reduce(a: RationalSymbol, tol: float = MODULUS_TOL,
           cluster_tol: float = CLUSTER_TOL) -> CircleZeroPolynomial:
    """Replace a rational symbol by the class-A polynomial of its circle zeros.

    Numerator roots are found as companion-matrix eigenvalues, grouped into
    multiplicity clusters, and the clusters whose centre satisfies
    ``| |zeta| - 1 | <= tol`` are kept with their multiplicity.
    """
    if not isinstance(a, RationalSymbol):
        a = RationalSymbol(np.asarray(a, dtype=complex))
    roots = polynomial_roots(a.num)
    zeros = []
    for centre, mult in cluster_roots(roots, cluster_tol):
        if abs(abs(centre) - 1.0) <= tol:
            zeros.append((float(np.angle(centre)), mult))
    return CircleZeroPolynomial(tuple(zeros))


# ---------------------------------------------------------------------------
# branch-singularity class
# ---------------------------------------------------------------------------

def is_integer(alpha: float, tol: float = INTEGER_TOL) -> bool:
    return abs(alpha - round(alpha)) <= tol


@dataclass(frozen=True, eq=False)
class SingularFactorFunction:
    """``r(z) * prod (1 - conj(zeta_i) z)**alpha_i`` with ``zeta_i = exp(i theta_i)``.

    Each circle factor uses the principal branch of ``(1 - conj(zeta) z)``,
    which has positive real part on the disk.  It differs from
    ``(z - zeta)**alpha`` only by a unimodular constant, and every test in
    this package depends on moduli alone.  The rational part carries no
    zeros or poles on the circle; use :meth:`from_rational` to fold them in.
    """

    rational: RationalSymbol
    factors: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        merged: list[list] = []
        for theta, alpha in self.factors:
            t = wrap_angle(float(theta))
            for entry in merged:
                if angle_distance(entry[0], t) <= ANGLE_TOL:
                    entry[1] += float(alpha)
                    break
            else:
                merged.append([t, float(alpha)])
        merged = [e for e in merged if abs(e[1]) > INTEGER_TOL]
        merged.sort()
        object.__setattr__(self, "factors", tuple((t, a) for t, a in merged))
        zeros = polynomial_roots(self.rational.num)
        if zeros.size and np.min(np.abs(np.abs(zeros) - 1.0)) <= MODULUS_TOL:
            raise ValueError("rational part vanishes on the circle; use from_rational")

    @classmethod
    def from_rational(cls, num, den=None, factors: Sequence[tuple[float, float]] = (),
                      tol: float = MODULUS_TOL) -> "SingularFactorFunction":
        """Build from raw numerator/denominator, folding circle zeros and poles
        into integer-exponent circle factors."""
        num = as_series(num)
        den = as_series(np.ones(1) if den is None else den)
        extra = list(factors)
        num, found = _strip_circle_roots(num, tol)
        extra += [(t, +m) for t, m in found]
        den, found = _strip_circle_roots(den, tol)
        extra += [(t, -m) for t, m in found]
        return cls(RationalSymbol(num, den), tuple(extra))

    @classmethod
    def constant(cls, c: complex = 1.0) -> "SingularFactorFunction":
        return cls(RationalSymbol(np.array([c], dtype=complex)))

    @classmethod
    def from_polynomial(cls, coeffs) -> "SingularFactorFunction":
        return cls.from_rational(coeffs)

    @classmethod
    def from_class_a(cls, a: CircleZeroPolynomial) -> "SingularFactorFunction":
        return cls.constant(1.0).times(a)

    # -- exponent bookkeeping -------------------------------------------------

    def exponent_at(self, theta: float, tol: float = ANGLE_TOL) -> float:
        for t, alpha in self.factors:
            if angle_distance(t, theta) <= tol:
                return alpha
        return 0.0

    @property
    def fractional_factors(self) -> tuple[tuple[float, float], ...]:
        return tuple((t, a) for t, a in self.factors if not is_integer(a))

    @property
    def is_rational(self) -> bool:
        return not self.fractional_factors

    @property
    def is_polynomial(self) -> bool:
        return self.rational.is_polynomial and all(
            is_integer(a) and a > 0 for _, a in self.factors
        )

    def times(self, a: CircleZeroPolynomial, power: int = 1) -> "SingularFactorFunction":
        """Multiply by ``a**power`` (``power = -1`` divides)."""
        # z - zeta = -zeta (1 - conj(zeta) z)
        const = complex(np.prod([(-unit(t)) ** (m * power) for t, m in a.zeros])) if a.zeros else 1.0
        factors = self.factors + tuple((t, float(m * power)) for t, m in a.zeros)
        return SingularFactorFunction(self.rational.scaled(const), factors)

    def divide(self, a: CircleZeroPolynomial) -> "SingularFactorFunction":
        return self.times(a, -1)

    def __mul__(self, other: "SingularFactorFunction") -> "SingularFactorFunction":
        if isinstance(other, CircleZeroPolynomial):
            return self.times(other)
        if not isinstance(other, SingularFactorFunction):
            return NotImplemented
        return SingularFactorFunction(self.rational * other.rational, self.factors + other.factors)

    # -- evaluation -----------------------------------------------------------

    def integer_part(self) -> RationalSymbol:
        """Rational part times the integer-exponent circle factors.

        Negative integer exponents land in the denominator, so the result may
        have poles on the circle.
        """
        num, den = self.rational.num, self.rational.den
        for t, alpha in self.factors:
            if not is_integer(alpha):
                continue
            k = int(round(alpha))
            f = np.array([1.0, -np.conj(unit(t))], dtype=complex)
            for _ in range(abs(k)):
                if k > 0:
                    num = np.convolve(num, f)
                else:
                    den = np.convolve(den, f)
        return _raw_rational(num, den)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.rational(z)
        for t, alpha in self.factors:
            out = out * (1.0 - np.conj(unit(t)) * z) ** alpha
        return out

    def modulus_on_circle(self, theta):
        theta = np.asarray(theta, dtype=float)
        z = np.exp(1j * theta)
        out = np.abs(self.rational(z))
        for t, alpha in self.factors:
            out = out * np.abs(2.0 * np.sin((theta - t) / 2.0)) ** alpha
        return out

    def taylor(self, n: int) -> np.ndarray:
        """First ``n + 1`` Taylor coefficients at the origin."""
        c = self.rational.taylor(n)
        for t, alpha in self.factors:
            c = np.convolve(c, binomial_series(alpha, t, n))[: n + 1]
        return c

    def taylor_at(self, z0: complex, order: int) -> np.ndarray:
        """Taylor data at `z0`; requires every factor to be analytic there."""
        for t, alpha in self.factors:
            if abs(z0 - unit(t)) < 1e-12 and not (is_integer(alpha) and alpha > 0):
                raise ValueError("function is not analytic at the requested point")
        c = self.rational.taylor_at(z0, order)
        for t, alpha in self.factors:
            k = int(round(alpha))
            f = taylor_shift(np.array([1.0, -np.conj(unit(t))]), z0, 2)
            if is_integer(alpha) and k >= 0:
                piece = pad(_poly_power(f, k), order)
            else:
                # away from the branch point: f0**alpha * (1 + (f1/f0) w)**alpha
                ratio = -f[1] / f[0]
                piece = f[0] ** alpha * binomial_series(alpha, -float(np.angle(ratio)), order - 1,
                                                        radius=abs(ratio))
            c = np.convolve(c, piece)[:order]
        return c

    def __repr__(self) -> str:
        body = ", ".join(f"({t:.6g}, {a:.6g})" for t, a in self.factors)
        return f"SingularFactorFunction(rational={self.rational.num}/{self.rational.den}, factors=[{body}])"


def binomial_series(alpha: float, theta: float, n: int, radius: float = 1.0) -> np.ndarray:
    """Taylor coefficients of ``(1 - radius * exp(-i theta) z)**alpha`` up to degree `n`."""
    w = radius * np.exp(-1j * theta)
    out = np.zeros(n + 1, dtype=complex)
    out[0] = 1.0
    for k in range(n):
        out[k + 1] = out[k] * (k - alpha) / (k + 1) * w
    return out


def hinf_membership(phi: SingularFactorFunction) -> bool:
    """True iff every circle exponent is non-negative."""
    return all(alpha >= -INTEGER_TOL for _, alpha in phi.factors)


def h2_membership(phi: SingularFactorFunction) -> bool:
    """True iff every circle exponent exceeds -1/2."""
    return all(alpha > -0.5 + INTEGER_TOL for _, alpha in phi.factors)


def as_singular(phi) -> SingularFactorFunction:
    if isinstance(phi, SingularFactorFunction):
        return phi
    if isinstance(phi, CircleZeroPolynomial):
        return SingularFactorFunction.from_class_a(phi)
    if isinstance(phi, RationalSymbol):
        return SingularFactorFunction.from_rational(phi.num, phi.den)
    return SingularFactorFunction.from_polynomial(phi)


def symbol_coefficients(a) -> np.ndarray:
    """Coefficients of a polynomial symbol given in any supported form."""
    if isinstance(a, CircleZeroPolynomial):
        return a.coefficients
    if isinstance(a, RationalSymbol):
        if not a.is_polynomial:
            raise TypeError("symbol must be a polynomial")
        return a.num / a.den[0]
    return as_series(a)


def sup_norm_evaluator(a) -> Callable:
    if isinstance(a, (CircleZeroPolynomial, RationalSymbol, SingularFactorFunction)):
        return a
    c = as_series(a)
    return lambda z: evaluate(c, z)


# ---------------------------------------------------------------------------
# internals
# ---------------------------------------------------------------------------

def _poly_power(c, k: int) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for _ in range(k):
        out = np.convolve(out, c)
    return out


def _raw_rational(num, den) -> RationalSymbol:
    # bypasses the closed-disk check for internal bookkeeping objects
    r = object.__new__(RationalSymbol)
    object.__setattr__(r, "num", as_series(num))
    object.__setattr__(r, "den", as_series(den))
    return r


def _strip_circle_roots(c, tol: float) -> tuple[np.ndarray, list[tuple[float, int]]]:
    """Divide out circle roots of `c` as factors ``(1 - conj(zeta) z)``."""
    c = as_series(c)
    roots = polynomial_roots(c)
    found = []
    for centre, mult in cluster_roots(roots):
        if abs(abs(centre) - 1.0) <= tol:
            theta = float(np.angle(centre))
            found.append((theta, mult))
            f = np.array([1.0, -np.conj(unit(theta))], dtype=complex)
            for _ in range(mult):
                q, r = P.polydiv(c, f)
                c = as_series(q)
    return c, found
