"""Boundary sup norms, non-extreme rescaling and Pythagorean mates.

The mate of ``a`` (with ``|a| <= 1`` on the circle) is the outer function
``b`` with ``b(0) > 0`` and ``|a|^2 + |b|^2 = 1``.  It is computed from the
boundary samples of ``log(1 - |a|^2)`` with a discrete conjugate function.
Points where ``|a|`` touches 1 give logarithmic singularities; those are
located, divided out analytically as ``|1 - conj(xi) z|^(2m)`` and restored
as polynomial factors, so the FFT only ever sees a smooth positive weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import optimize

from coanalytic.symbols import (
    CircleZeroPolynomial,
    RationalSymbol,
    SingularFactorFunction,
    TWO_PI,
    as_series,
    evaluate,
    unit,
)

DEFAULT_GRID = 4096


class ExtremeSymbolError(ValueError):
    """``|a| = 1`` on a set of positive measure: no Pythagorean mate exists."""


@dataclass(frozen=True, eq=False)
class BoundaryGrid:
    """Samples ``values[k] = a(exp(i theta_k))`` with ``theta_k = 2 pi (k + offset) / M``."""

    M: int
    values: np.ndarray = field(repr=False)
    offset: float = 0.0

    @property
    def thetas(self) -> np.ndarray:
        return TWO_PI * (np.arange(self.M) + self.offset) / self.M


def _symbol_degree(a) -> int:
    if isinstance(a, CircleZeroPolynomial):
        return a.degree
    if isinstance(a, RationalSymbol):
        return max(a.num.size, a.den.size) - 1
    if isinstance(a, SingularFactorFunction):
        return max(a.rational.num.size, a.rational.den.size) - 1 + len(a.factors)
    return as_series(a).size - 1


def _evaluator(a):
    if isinstance(a, (CircleZeroPolynomial, RationalSymbol, SingularFactorFunction)):
        return a
    c = as_series(a)
    return lambda z: evaluate(c, z)


def _derivative(a):
    """``d/dz`` of a polynomial or rational symbol."""
    if isinstance(a, RationalSymbol):
        return a.derivative
    c = a.coefficients if isinstance(a, CircleZeroPolynomial) else as_series(a)
    dc = P.polyder(c) if c.size > 1 else np.zeros(1)
    return lambda z: evaluate(dc, z)


def _check_grid(a, M: int) -> None:
    if M < 4 or M & (M - 1):
        raise ValueError(f"grid size must be a power of two >= 4, got {M}")
    if M < 4 * _symbol_degree(a):
        raise ValueError(f"grid size {M} is below 4 x degree ({_symbol_degree(a)})")


def boundary_grid(a, M: int = DEFAULT_GRID, offset: float = 0.0) -> BoundaryGrid:
    _check_grid(a, M)
    thetas = TWO_PI * (np.arange(M) + offset) / M
    values = np.asarray(_evaluator(a)(np.exp(1j * thetas)), dtype=complex)
    if not np.all(np.isfinite(values)):
        raise ValueError("symbol is not finite on the circle")
    return BoundaryGrid(M, values, offset)


def sup_norm_on_circle(a, M: int = DEFAULT_GRID, candidates: int = 8) -> float:
    """``max |a|`` on the circle: grid maximum refined by golden-section search."""
    grid = boundary_grid(a, M)
    f = _evaluator(a)
    mod = np.abs(grid.values)
    best = float(mod.max())
    h = TWO_PI / M
    is_peak = (mod >= np.roll(mod, 1)) & (mod >= np.roll(mod, -1))
    peaks = np.flatnonzero(is_peak)
    peaks = peaks[np.argsort(mod[peaks])[::-1][:candidates]]
    for k in peaks:
        t = grid.thetas[k]
        try:
            t_star = optimize.golden(lambda s: -abs(f(unit(s))), brack=(t - h, t, t + h), tol=1e-12)
        except (ValueError, RuntimeError):
            continue
        best = max(best, float(abs(f(unit(t_star)))))
    return best


def normalize_nonextreme(a) -> tuple[RationalSymbol, float]:
    """Return ``a / lam`` with ``lam = 2 ||a||_inf`` (non-extreme, same range space)."""
    if isinstance(a, RationalSymbol):
        num, den = a.num, a.den
    else:
        num = a.coefficients if isinstance(a, CircleZeroPolynomial) else as_series(a)
        den = np.ones(1)
    if not np.any(num):
        raise ValueError("cannot normalise the zero symbol")
    lam = 2.0 * sup_norm_on_circle(a)
    return RationalSymbol(num / lam, den), lam


# -- mates -------------------------------------------------------------------

@dataclass(frozen=True)
class TouchPoint:
    """A point where ``1 - |a|^2`` vanishes to order ``2 * mult``."""

    theta: float
    mult: int


@dataclass(frozen=True, eq=False)
class MateCheck:
    residual: float
    b0: complex

    @property
    def b0_positive(self) -> bool:
        return self.b0.real > 0 and abs(self.b0.imag) <= 1e-12 * max(1.0, abs(self.b0))


@dataclass(frozen=True, eq=False)
class MateResult:
    b: np.ndarray
    residual: float
    b0: complex
    tail_energy: float
    touch_points: tuple[TouchPoint, ...]
    grid: int
    offset: float

    def to_json(self) -> dict:
        from coanalytic.serialize import complex_list
        return {"mate": {"b": complex_list(self.b), "residual": self.residual,
                         "b0": [self.b0.real, self.b0.imag], "tail_energy": self.tail_energy,
                         "touch_points": [{"theta": t.theta, "mult": t.mult} for t in self.touch_points],
                         "grid": self.grid}}


def _defect(a):
    f = _evaluator(a)
    return lambda t: 1.0 - abs(f(unit(t))) ** 2


def _touch_points(a, grid: BoundaryGrid, detect: float) -> list[TouchPoint]:
    f, df = _evaluator(a), _derivative(a)
    q = 1.0 - np.abs(grid.values) ** 2
    h = TWO_PI / grid.M
    defect = _defect(a)

    def slope(t):
        z = unit(t)
        return 2.0 * float(np.real(np.conj(f(z)) * df(z) * 1j * z))

    found: list[TouchPoint] = []
    local_min = (q <= np.roll(q, 1)) & (q <= np.roll(q, -1)) & (q < detect)
    for k in np.flatnonzero(local_min):
        t = grid.thetas[k]
        lo, hi = t - h, t + h
        try:
            t_star = optimize.brentq(slope, lo, hi, xtol=1e-15)
        except ValueError:
            t_star = t if slope(t) == 0 else None
        if t_star is None or defect(t_star) > 1e-12:
            continue
        delta = 1e-3
        q1, q2 = defect(t_star + delta), defect(t_star + 2 * delta)
        order = np.log2(q2 / q1) if q1 > 0 and q2 > 0 else 2.0
        mult = max(1, int(round(order / 2.0)))
        if all(abs(np.angle(unit(t_star - p.theta))) > h for p in found):
            found.append(TouchPoint(float(np.mod(t_star, TWO_PI)), mult))
    return found


def pythagorean_mate(a, M: int = DEFAULT_GRID, detect: float = 1e-3) -> MateResult:
    """Taylor coefficients (length ``M/2``) of the Pythagorean mate of `a`.

    Raises
    ------
    ValueError
        If ``||a||_inf > 1``.
    ExtremeSymbolError
        If ``|a| = 1`` on a set of positive measure.
    """
    _check_grid(a, M)
    plain = boundary_grid(a, M)
    mod2 = np.abs(plain.values) ** 2
    if np.mean(np.abs(1.0 - mod2) < 1e-10) > 0.25:
        raise ExtremeSymbolError("|a| = 1 on a set of positive measure (extreme symbol)")
    sup = sup_norm_on_circle(a, M)
    if sup > 1.0 + 1e-12:
        raise ValueError(f"mate requires ||a||_inf <= 1, got {sup:.12g}")

    touches = _touch_points(a, plain, detect)
    offset = 0.0
    h = TWO_PI / M
    for p in touches:
        nearest = np.mod(p.theta / h, 1.0)
        if min(nearest, 1.0 - nearest) < 1e-3:
            offset = 0.5
    grid = boundary_grid(a, M, offset) if offset else plain
    thetas = grid.thetas
    z = np.exp(1j * thetas)

    weight = 1.0 - np.abs(grid.values) ** 2
    singular = np.ones(1, dtype=complex)
    for p in touches:
        xi = unit(p.theta)
        weight = weight / np.abs(1.0 - np.conj(xi) * z) ** (2 * p.mult)
        for _ in range(p.mult):
            singular = np.convolve(singular, [1.0, -np.conj(xi)])
    if np.any(weight <= 0):
        raise ExtremeSymbolError("1 - |a|^2 vanishes at points that could not be resolved")

    # outer function of the smooth weight: exp(u/2 + i conj(u)/2)
    phase = np.exp(-2j * np.pi * offset * np.arange(M) / M)
    u_hat = np.fft.fft(np.log(weight)) / M
    freqs = np.fft.fftfreq(M, d=1.0 / M)
    u_hat = u_hat * np.exp(-1j * freqs * TWO_PI * offset / M)
    log_b = np.zeros(M, dtype=complex)
    log_b[0] = u_hat[0].real / 2.0
    half = M // 2
    log_b[1:half] = u_hat[1:half]
    on_grid = np.exp(M * np.fft.ifft(log_b * np.exp(1j * np.arange(M) * TWO_PI * offset / M)))
    coeffs = np.fft.fft(on_grid) / M * phase
    smooth = coeffs[:half]
    leak = float(np.linalg.norm(coeffs[half:]))

    b = np.convolve(smooth, singular)[:half]
    tail = float(np.linalg.norm(b[half // 2 :]) + leak) / max(float(np.linalg.norm(b)), 1e-300)
    check = mate_residual(a, b, M)
    return MateResult(b, check.residual, check.b0, tail, tuple(touches), M, offset)


def mate_residual(a, b, M: int = DEFAULT_GRID) -> MateCheck:
    """``max | |a|^2 + |b|^2 - 1 |`` over the grid, with ``b(0)`` reported."""
    b = as_series(b)
    grid = boundary_grid(a, M)
    if b.size > M:
        b_vals = evaluate(b, np.exp(1j * grid.thetas))
    else:
        b_vals = M * np.fft.ifft(np.concatenate([b, np.zeros(M - b.size)]))
    r = np.abs(grid.values) ** 2 + np.abs(b_vals) ** 2 - 1.0
    return MateCheck(float(np.max(np.abs(r))), complex(b[0]))


def zero_count(b, radius: float = 1.0 - 1e-3, points: int = 8192) -> int:
    """Number of zeros of the polynomial `b` inside ``|z| < radius`` (argument principle)."""
    b = as_series(b)
    thetas = TWO_PI * np.arange(points) / points
    vals = evaluate(b, radius * np.exp(1j * thetas))
    if np.any(vals == 0):
        raise ZeroDivisionError("zero on the contour")
    steps = np.angle(np.roll(vals, -1) / vals)
    return int(round(float(np.sum(steps)) / TWO_PI))
