"""Tail-exponent estimation for convex monotone curves.

Two estimators are used throughout: a straight-line least-squares
slope for log-norm curves (the exponent is the slope), and a
least-squares fit of y ~ a + c/t for eigenvalue-exponent curves,
whose leading correction is O(1/t) for every catalog profile.  Both
are cross-checked on a sub-window; disagreement beyond tolerance
raises NonConvergent.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonConvergent


@dataclass(frozen=True)
class FitConfig:
    """Tail-fit window and convergence tolerances."""

    window_frac: float = 0.5  # fit on t >= window_frac * t_max
    tol: float = 1e-3         # estimator drift threshold for NonConvergent
    min_t: float = 1.0        # exponents are never fit below this t
    min_t_max: float = 50.0   # flat-limit demand on the family horizon


def line_fit(ts: np.ndarray, ys: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line; returns (slope, intercept, max abs residual)."""
    slope, intercept = np.polyfit(ts, ys, 1)
    residual = float(np.max(np.abs(ys - (slope * ts + intercept))))
    return float(slope), float(intercept), residual


def reciprocal_fit(ts: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    """Fit y ~ a + c/t; returns (a, max abs residual)."""
    design = np.column_stack([np.ones_like(ts), 1.0 / ts])
    coef, *_ = np.linalg.lstsq(design, ys, rcond=None)
    residual = float(np.max(np.abs(ys - design @ coef)))
    return float(coef[0]), residual


def _window(ts: np.ndarray, frac: float) -> np.ndarray:
    cutoff = ts[-1] * frac
    mask = ts >= cutoff
    if np.count_nonzero(mask) < 4:
        mask = np.zeros_like(mask)
        mask[-4:] = True
    return mask


def tail_slope(ts, ys, cfg: FitConfig = FitConfig()) -> tuple[float, float]:
    """Asymptotic slope of ys(t) with a half-window cross-check.

    Returns (slope, residual); raises NonConvergent when the slope on
    the full window and on its upper half disagree beyond cfg.tol.
    """
    ts = np.asarray(ts, dtype=float)
    ys = np.asarray(ys, dtype=float)
    keep = ts >= cfg.min_t
    ts, ys = ts[keep], ys[keep]
    mask = _window(ts, cfg.window_frac)
    slope, _, residual = line_fit(ts[mask], ys[mask])
    upper = _window(ts, 0.5 * (1.0 + cfg.window_frac))
    slope_upper, _, _ = line_fit(ts[upper], ys[upper])
    drift = abs(slope_upper - slope)
    if drift > cfg.tol:
        raise NonConvergent(f"tail slope drifting: {slope:.6g} vs {slope_upper:.6g}")
    return slope, residual


def tail_limit(ts, ys, cfg: FitConfig = FitConfig()) -> tuple[float, float]:
    """Limit of ys(t) as t -> infinity via the a + c/t model.

    Returns (limit, drift between windows); raises NonConvergent when
    the two window estimates disagree beyond cfg.tol.
    """
    ts = np.asarray(ts, dtype=float)
    ys = np.asarray(ys, dtype=float)
    keep = ts >= cfg.min_t
    ts, ys = ts[keep], ys[keep]
    mask = _window(ts, cfg.window_frac)
    limit, _ = reciprocal_fit(ts[mask], ys[mask])
    upper = _window(ts, 0.5 * (1.0 + cfg.window_frac))
    limit_upper, _ = reciprocal_fit(ts[upper], ys[upper])
    drift = abs(limit_upper - limit)
    if drift > cfg.tol:
        raise NonConvergent(f"tail limit drifting: {limit:.6g} vs {limit_upper:.6g}")
    return limit, drift
