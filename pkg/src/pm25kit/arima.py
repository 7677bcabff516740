"""Small-order ARIMA for very short annual series.

Orders are capped at p, q, d <= 1. Estimation is conditional sum of squares
(pre-sample values and residuals fixed at zero): ordinary least squares for
pure AR(1), and a dense grid plus golden-section refinement whenever an MA
term is present. Orders are chosen by AICc over a small candidate set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateFitError, InsufficientDataError, PM25Error

GRID_SIZE = 2001
COEF_BOUND = 0.99
GOLDEN_TOL = 1e-6
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ArimaOrder:
    p: int = 0
    d: int = 1
    q: int = 0
    drift: bool = False

    def __post_init__(self):
        for name in ("p", "d", "q"):
            if getattr(self, name) not in (0, 1):
                raise PM25Error(f"{name} must be 0 or 1, got {getattr(self, name)}")

    @property
    def n_free(self) -> int:
        """Mean-equation parameters (AR, MA, drift); the variance is extra."""
        return self.p + self.q + int(self.drift)

    def check(self, n: int) -> None:
        if self.n_free + 1 > n - self.d:
            raise InsufficientDataError(
                f"ARIMA{self.label()} needs more than {n} observations")

    def label(self) -> str:
        return f"({self.p},{self.d},{self.q})" + ("+drift" if self.drift else "")

    @classmethod
    def parse(cls, text: str) -> ArimaOrder:
        """Parse ``"p,d,q"`` or ``"p,d,q,drift"`` (drift as 1/0/true/false)."""
        parts = [s.strip().lower() for s in text.split(",")]
        if len(parts) not in (3, 4):
            raise PM25Error(f"order must look like p,d,q[,drift], got {text!r}")
        try:
            p, d, q = (int(s) for s in parts[:3])
        except ValueError:
            raise PM25Error(f"order must look like p,d,q[,drift], got {text!r}") from None
        drift = len(parts) == 4 and parts[3] in ("1", "true", "drift", "yes")
        return cls(p, d, q, drift)


@dataclass(frozen=True)
class ArimaModel:
    order: ArimaOrder
    phi: float | None
    theta: float | None
    drift_value: float | None
    residuals: tuple[float, ...]
    css: float
    train: tuple[float, ...]


def difference(x: Sequence[float], d: int) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if d not in (0, 1):
        raise PM25Error(f"d must be 0 or 1, got {d}")
    if arr.size < d + 1:
        raise PM25Error(f"need at least {d + 1} values to difference {d} time(s)")
    return arr.copy() if d == 0 else np.diff(arr)


def integrate(diffs: Sequence[float], start: float) -> np.ndarray:
    """Inverse of first differencing: ``[start, start + cumsum(diffs)...]``."""
    return np.concatenate(([float(start)], float(start) + np.cumsum(np.asarray(diffs, dtype=float))))


def _residuals(z: np.ndarray, phi, theta) -> np.ndarray:
    """CSS residuals; ``phi``/``theta`` may be arrays (broadcast over a grid)."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    shape = np.broadcast(phi, theta).shape
    out = np.empty((z.size,) + shape)
    prev_z, prev_e = 0.0, np.zeros(shape)
    for t in range(z.size):
        e = z[t] - phi * prev_z - theta * prev_e
        out[t] = e
        prev_z, prev_e = z[t], e
    return out


def _css(z: np.ndarray, phi, theta) -> np.ndarray:
    return np.sum(_residuals(z, phi, theta) ** 2, axis=0)


def _golden(f, lo: float, hi: float, tol: float = GOLDEN_TOL) -> float:
    c, d = hi - _INVPHI * (hi - lo), lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    return (lo + hi) / 2.0


def _grid() -> np.ndarray:
    return np.linspace(-COEF_BOUND, COEF_BOUND, GRID_SIZE)


def _refine(f, grid: np.ndarray, i: int) -> float:
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    return _golden(f, float(lo), float(hi))


def fit(series: Sequence[float], order: ArimaOrder) -> ArimaModel:
    """Fit ``order`` to ``series`` by conditional sum of squares."""
    x = np.asarray(series, dtype=float)
    if not np.all(np.isfinite(x)):
        raise PM25Error("series must be finite")
    order.check(x.size)
    w = difference(x, order.d)
    drift = float(np.mean(w)) if order.drift else None
    z = w - drift if order.drift else w

    if order.p + order.q >= 1 and np.ptp(w) <= 1e-12 * max(1.0, float(np.max(np.abs(w)))):
        raise DegenerateFitError(f"ARIMA{order.label()}: differenced series is constant")

    phi = theta = None
    if order.p == 1 and order.q == 0:
        den = float(np.dot(z[:-1], z[:-1]))
        phi = float(np.dot(z[1:], z[:-1])) / den if den > 0 else 0.0
        phi = min(COEF_BOUND, max(-COEF_BOUND, phi))
    elif order.q == 1 and order.p == 0:
        grid = _grid()
        i = int(np.argmin(_css(z, 0.0, grid)))
        theta = _best(lambda t: float(_css(z, 0.0, t)), grid, i)
    elif order.q == 1 and order.p == 1:
        grid = _grid()
        surface = _css(z, grid[:, None], grid[None, :])
        i, j = np.unravel_index(int(np.argmin(surface)), surface.shape)
        phi = _best(lambda v: float(_css(z, v, grid[j])), grid, int(i))
        theta = _best(lambda v: float(_css(z, phi, v)), grid, int(j))
        if float(_css(z, phi, theta)) > float(surface[i, j]):
            phi, theta = float(grid[i]), float(grid[j])

    resid = _residuals(z, phi or 0.0, theta or 0.0)
    return ArimaModel(order, phi, theta, drift, tuple(resid.tolist()),
                      float(np.sum(resid**2)), tuple(x.tolist()))


def _best(f, grid: np.ndarray, i: int) -> float:
    """Golden-section refinement that never ends worse than the grid point."""
    g = float(grid[i])
    r = _refine(f, grid, i)
    return r if f(r) <= f(g) else g


def forecast(model: ArimaModel, h: int) -> np.ndarray:
    """Point forecasts for the next ``h`` steps on the original scale."""
    if h < 1:
        raise PM25Error(f"forecast horizon must be >= 1, got {h}")
    order = model.order
    x = np.asarray(model.train)
    w = difference(x, order.d)
    mu = model.drift_value or 0.0
    z_last = float(w[-1] - mu)
    e_last = model.residuals[-1]
    phi, theta = model.phi or 0.0, model.theta or 0.0

    steps = np.empty(h)
    for k in range(h):
        z_next = phi * z_last + theta * e_last
        steps[k] = z_next + mu
        z_last, e_last = z_next, 0.0
    if order.d == 0:
        return steps
    return integrate(steps, x[-1])[1:]


CANDIDATES = (
    ArimaOrder(0, 1, 0, drift=True),
    ArimaOrder(0, 1, 0),
    ArimaOrder(1, 0, 0),
    ArimaOrder(1, 1, 0),
    ArimaOrder(0, 1, 1),
)


def aicc(css: float, n_eff: int, k: int, scale: float = 1.0) -> float:
    """Small-sample AIC; ``css`` is floored relative to ``scale`` so exact
    fits stay finite and compare by their parameter penalty."""
    floor = n_eff * (1e-10 * max(1.0, scale)) ** 2
    return n_eff * math.log(max(css, floor) / n_eff) + 2.0 * k * n_eff / (n_eff - k - 1)


def select_order(series: Sequence[float]) -> ArimaOrder:
    """Pick the AICc-minimizing candidate; exact ties go to the earlier one
    in CANDIDATES (drift random walk first, then the plain random walk)."""
    x = np.asarray(series, dtype=float)
    if x.size < 4:
        raise InsufficientDataError(f"order selection needs >= 4 observations, got {x.size}")
    scale = float(np.max(np.abs(x))) if x.size else 1.0
    scored = []
    for rank, order in enumerate(CANDIDATES):
        n_eff, k = x.size - order.d, order.n_free + 1
        if k > n_eff or n_eff - k - 1 <= 0:
            continue
        try:
            model = fit(x, order)
        except DegenerateFitError:
            continue
        scored.append((aicc(model.css, n_eff, k, scale), rank, order))
    if not scored:
        return ArimaOrder(0, 1, 0)
    return min(scored, key=lambda s: (s[0], s[1]))[2]
