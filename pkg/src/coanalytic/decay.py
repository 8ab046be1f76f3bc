"""Sub-exponential coefficient decay ``|psi_hat(n)| <= C exp(-c sqrt(n))`` and probes.

The class of such functions is checked empirically against the numeric
multiplier oracle: a sample from the class should act boundedly on every
range space in a corpus.  The probe gives forward evidence only and never
certifies non-membership.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from coanalytic.multipliers import GROWTH_THRESHOLD, growth_ratios, numeric_mult_norm
from coanalytic.symbols import CircleZeroPolynomial, as_series

MIN_POINTS = 8
F_MIN_RATE = 0.05
F_MAX_RESIDUAL = 0.5
GEOMETRIC_RESIDUAL = 1e-6


@dataclass(frozen=True)
class DecayFit:
    """Fit of ``log|psi_hat(n)| = logC - c sqrt(n) - beta log(1 + n)`` over `window`.

    ``geometric`` flags decay that is log-linear in ``n`` (faster than any
    ``exp(-c sqrt(n))``); ``rate`` is then the fitted ``-d log|psi_hat| / dn``.
    """

    c: float
    logC: float
    residual: float
    window: tuple[int, int]
    beta: float = 0.0
    geometric: bool = False
    rate: float = 0.0
    points: int = 0

    @property
    def superexponential(self) -> bool:
        return self.geometric

    @property
    def in_class_F(self) -> bool:
        """Decision rule: ``c >= 0.05`` with residual ``<= 0.5``, or geometric decay."""
        return self.geometric or (self.c >= F_MIN_RATE and self.residual <= F_MAX_RESIDUAL)

    def to_json(self) -> dict:
        return {"c": self.c, "logC": self.logC, "residual": self.residual,
                "window": list(self.window), "beta": self.beta, "geometric": self.geometric,
                "rate": self.rate, "points": self.points, "in_class_F": self.in_class_F}


def _lstsq(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    r = y - X @ coef
    return coef, float(np.sqrt(np.mean(r * r)))


def default_window(size: int) -> tuple[int, int]:
    n = size - 1
    return (min(64, n // 2), n)


def decay_fit(coeffs, window: tuple[int, int] | None = None) -> DecayFit:
    """Fit the decay profile of `coeffs` over ``window = (n0, n1)`` inclusive.

    The logarithmic term absorbs power-law factors, so ``1/(n^2 + 1)``
    fits with ``c = 0`` rather than a spurious positive rate.  Zero
    coefficients (or ones that underflowed) are excluded.
    """
    c = as_series(coeffs) if np.iscomplexobj(coeffs) else np.asarray(coeffs, dtype=float)
    if window is None:
        window = default_window(c.size)
    n0, n1 = int(window[0]), int(window[1])
    if not 0 <= n0 <= n1 < c.size:
        raise ValueError(f"window {window} outside coefficient range 0..{c.size - 1}")
    n = np.arange(n0, n1 + 1)
    mag = np.abs(c[n0 : n1 + 1])
    keep = mag > 0
    if int(keep.sum()) < MIN_POINTS:
        raise ValueError(f"need at least {MIN_POINTS} nonzero coefficients in the window")
    n, y = n[keep].astype(float), np.log(mag[keep])

    one = np.ones_like(n)
    coef, res = _lstsq(np.column_stack([one, -np.sqrt(n), -np.log1p(n)]), y)
    logC, rate_c, beta = coef
    if rate_c < 0:
        (logC, beta), res = _lstsq(np.column_stack([one, -np.log1p(n)]), y)
        rate_c = 0.0

    (g0, g1), gres = _lstsq(np.column_stack([one, -n]), y)
    scale = max(1.0, float(np.ptp(y)))
    geometric = bool(g1 > 0 and gres <= GEOMETRIC_RESIDUAL * scale)

    return DecayFit(float(rate_c), float(logC), res, (n0, n1), float(beta),
                    geometric, float(g1) if geometric else 0.0, int(n.size))


def sample_class_F(c: float, n: int) -> np.ndarray:
    """Coefficients ``exp(-c sqrt(k))`` for ``k = 0..n``."""
    if c <= 0:
        raise ValueError("c must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    return np.exp(-c * np.sqrt(np.arange(n + 1, dtype=float)))


def geometric_sample(ratio: float, n: int) -> np.ndarray:
    """Coefficients ``ratio**k``; analytic across the circle when ``|ratio| < 1``."""
    return float(ratio) ** np.arange(n + 1, dtype=float)


@dataclass(frozen=True)
class ProbeRow:
    symbol: str
    n: int
    sigma_max: float
    growth_ratio: float


@dataclass(frozen=True, eq=False)
class ProbeTable:
    rows: list[ProbeRow] = field(default_factory=list)
    threshold: float = GROWTH_THRESHOLD

    @property
    def bounded(self) -> bool:
        return all(not (r.growth_ratio >= self.threshold) for r in self.rows)

    def csv_rows(self):
        return [(r.symbol, r.n, r.sigma_max, r.growth_ratio) for r in self.rows]

    def to_json(self) -> dict:
        return {"rows": [r.__dict__ for r in self.rows], "bounded": self.bounded,
                "threshold": self.threshold}


def symbol_label(a: CircleZeroPolynomial) -> str:
    return "[" + ",".join(f"({t:.12g},{m})" for t, m in a.zeros) + "]"


def universal_mult_probe(psi, symbols: Sequence[CircleZeroPolynomial],
                         ns: Sequence[int] = (64, 256, 1024),
                         threshold: float = GROWTH_THRESHOLD) -> ProbeTable:
    """Numeric multiplier norms of `psi` on each ``M(abar)`` over a sweep of `ns`.

    ``growth_ratio`` is the ratio to the previous `n` for the same symbol
    (``nan`` at the first level).
    """
    if not symbols:
        raise ValueError("symbol list is empty")
    psi = as_series(psi)
    rows = []
    for a in symbols:
        values = [numeric_mult_norm(a, a, psi, n) for n in ns]
        ratios = [float("nan")] + growth_ratios(values)
        label = symbol_label(a)
        rows += [ProbeRow(label, int(n), float(v), float(r)) for n, v, r in zip(ns, values, ratios)]
    return ProbeTable(rows, threshold)
