"""Catalog of convex scalar profiles phi(t).

Generated metric families are built from exponentials of these
profiles.  The catalog is fixed: linear, linear plus decaying
exponential, hyperbola plus linear, log-sum-exp of two linears, and
tabulated convex samples.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .errors import SchemaError

CONVEXITY_PROBE_POINTS = 512
CONVEXITY_TOL = 1e-9

PROFILE_KINDS = ("linear", "exp_decay", "hyperbola", "softmax", "tabulated")


@dataclass(frozen=True)
class ScalarProfile:
    """A convex scalar profile t -> phi(t) from the fixed catalog."""

    kind: str
    params: Mapping[str, Any]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        p = self.params
        if self.kind == "linear":
            return p["slope"] * t + p["intercept"]
        if self.kind == "exp_decay":
            return p["slope"] * t + p["intercept"] + p["amp"] * np.exp(-p["rate"] * t)
        if self.kind == "hyperbola":
            return p["coeff"] * np.sqrt(1.0 + t * t) + p["slope"] * t + p["intercept"]
        if self.kind == "softmax":
            return np.logaddexp(p["slope1"] * t + p["offset1"], p["slope2"] * t + p["offset2"])
        if self.kind == "tabulated":
            ts = np.asarray(p["ts"], dtype=float)
            vals = np.asarray(p["values"], dtype=float)
            return np.interp(t, ts, vals)
        raise SchemaError(f"unknown profile kind {self.kind!r}")

    def tail_slope(self) -> float:
        """Asymptotic slope of the profile; the exponent it realizes."""
        p = self.params
        if self.kind == "linear" or self.kind == "exp_decay":
            return float(p["slope"])
        if self.kind == "hyperbola":
            return float(p["coeff"] + p["slope"])
        if self.kind == "softmax":
            return float(max(p["slope1"], p["slope2"]))
        ts = np.asarray(p["ts"], dtype=float)
        vals = np.asarray(p["values"], dtype=float)
        return float((vals[-1] - vals[-2]) / (ts[-1] - ts[-2]))

    def shifted(self, a: float) -> "ScalarProfile":
        """The profile phi(t) - a*t; realizes the e^{-at} family rescaling."""
        p = dict(self.params)
        if self.kind in ("linear", "exp_decay", "hyperbola"):
            p["slope"] = p["slope"] - a
        elif self.kind == "softmax":
            p["slope1"] = p["slope1"] - a
            p["slope2"] = p["slope2"] - a
        else:
            ts = np.asarray(p["ts"], dtype=float)
            p["values"] = (np.asarray(p["values"], dtype=float) - a * ts).tolist()
        return ScalarProfile(self.kind, p)


def linear(slope: float, intercept: float = 0.0) -> ScalarProfile:
    return ScalarProfile("linear", {"slope": float(slope), "intercept": float(intercept)})


def exp_decay(slope: float, intercept: float = 0.0, amp: float = 1.0, rate: float = 1.0) -> ScalarProfile:
    if amp < 0 or rate <= 0:
        raise SchemaError("exp_decay requires amp >= 0 and rate > 0 for convexity")
    return ScalarProfile(
        "exp_decay",
        {"slope": float(slope), "intercept": float(intercept), "amp": float(amp), "rate": float(rate)},
    )


def hyperbola(coeff: float = 1.0, slope: float = 0.0, intercept: float = 0.0) -> ScalarProfile:
    if coeff < 0:
        raise SchemaError("hyperbola coefficient must be nonnegative for convexity")
    return ScalarProfile(
        "hyperbola", {"coeff": float(coeff), "slope": float(slope), "intercept": float(intercept)}
    )


def softmax(slope1: float, offset1: float, slope2: float, offset2: float) -> ScalarProfile:
    return ScalarProfile(
        "softmax",
        {
            "slope1": float(slope1),
            "offset1": float(offset1),
            "slope2": float(slope2),
            "offset2": float(offset2),
        },
    )


def tabulated(ts, values) -> ScalarProfile:
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    if ts.ndim != 1 or ts.shape != values.shape or ts.size < 2:
        raise SchemaError("tabulated profile needs matching 1-d sample arrays of length >= 2")
    if np.any(np.diff(ts) <= 0):
        raise SchemaError("tabulated profile grid must be strictly increasing")
    return ScalarProfile("tabulated", {"ts": ts.tolist(), "values": values.tolist()})


def check_profile_convexity(profile: ScalarProfile, t_max: float, tol: float = CONVEXITY_TOL) -> float:
    """Worst midpoint-convexity violation on the probe grid (<= tol passes)."""
    if profile.kind == "tabulated":
        ts = np.asarray(profile.params["ts"], dtype=float)
    else:
        ts = np.linspace(0.0, t_max, CONVEXITY_PROBE_POINTS)
    vals = profile(ts)
    left, mid, right = vals[:-2], vals[1:-1], vals[2:]
    t0, t1, t2 = ts[:-2], ts[1:-1], ts[2:]
    chord = (left * (t2 - t1) + right * (t1 - t0)) / (t2 - t0)
    return float(np.max(mid - chord)) if mid.size else 0.0
