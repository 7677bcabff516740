"""Elementary statistics: z-scores, Pearson correlation, forecast accuracy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateInputError, PM25Error


def _vector(x: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise PM25Error(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise PM25Error(f"{name} contains non-finite values")
    return arr


def standardize(x: Sequence[float]) -> np.ndarray:
    """Z-scores using the population (divide-by-n) standard deviation."""
    arr = _vector(x, "x")
    if arr.size < 2:
        raise DegenerateInputError("standardize needs at least 2 values")
    centered = arr - arr.mean()
    sd = math.sqrt(float(np.mean(centered**2)))
    if sd == 0.0:
        raise DegenerateInputError("standardize: zero variance")
    return centered / sd


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson product-moment correlation; symmetric, clipped to [-1, 1]."""
    a, b = _vector(x, "x"), _vector(y, "y")
    if a.size != b.size:
        raise PM25Error(f"length mismatch: {a.size} vs {b.size}")
    if a.size < 2:
        raise DegenerateInputError("pearson needs at least 2 pairs")
    da, db = a - a.mean(), b - b.mean()
    saa, sbb = float(np.dot(da, da)), float(np.dot(db, db))
    if saa == 0.0 or sbb == 0.0:
        raise DegenerateInputError("pearson: zero variance")
    r = float(np.dot(da, db)) / math.sqrt(saa * sbb)
    return max(-1.0, min(1.0, r))


@dataclass(frozen=True)
class MetricsBundle:
    mae: float
    mse: float
    rmse: float
    r_squared: float | None
    n: int
    actual: tuple[float, ...]
    predicted: tuple[float, ...]

    def as_dict(self) -> dict:
        return {"mae": self.mae, "mse": self.mse, "rmse": self.rmse,
                "r_squared": self.r_squared, "n": self.n}


def evaluate_forecasts(actual: Sequence[float], predicted: Sequence[float],
                       strict: bool = True) -> MetricsBundle:
    """MAE, MSE, RMSE and R^2 (1 - SS_res/SS_tot, not clamped).

    R^2 is undefined for fewer than two pairs or a constant ``actual``:
    with ``strict`` a DegenerateInputError is raised whose ``partial``
    attribute holds the bundle with ``r_squared=None``; otherwise that
    bundle is returned directly.
    """
    a, p = _vector(actual, "actual"), _vector(predicted, "predicted")
    if a.size != p.size:
        raise PM25Error(f"length mismatch: {a.size} vs {p.size}")
    if a.size == 0:
        raise PM25Error("need at least one (actual, predicted) pair")
    err = a - p
    mse = float(np.mean(err**2))
    kwargs = dict(mae=float(np.mean(np.abs(err))), mse=mse, rmse=math.sqrt(mse), n=int(a.size),
                  actual=tuple(a.tolist()), predicted=tuple(p.tolist()))
    ss_tot = float(np.sum((a - a.mean()) ** 2))
    if a.size < 2 or ss_tot == 0.0:
        partial = MetricsBundle(r_squared=None, **kwargs)
        if strict:
            exc = DegenerateInputError("R^2 undefined: need >= 2 pairs with non-constant actuals")
            exc.partial = partial
            raise exc
        return partial
    r2 = 1.0 - float(np.sum(err**2)) / ss_tot
    return MetricsBundle(r_squared=r2, **kwargs)
