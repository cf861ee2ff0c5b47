"""Jumping numbers, the filtrations of the fiber and its dual, and the
three-way equivalence between annihilator membership, weighted
integrability of dual norms, and the decay exponent.

The pairing between the dual fiber and the fiber is the hermitian
pairing <v, u> = v* u of the fixed trivialization, matching the
composition dual_form . evaluate used for the dual norms.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.special import logsumexp

from .errors import MismatchedFiltration, OutOfRange, ZeroVector
from .families import MetricFamily, dual_log_norm, log_norm
from .flow import FlatMetric
from .forms import as_vector
from .tailfit import FitConfig, tail_slope

ANNIHILATOR_TOL = 1e-8
BORDERLINE_MARGIN = 1e-2
CONSISTENCY_TOL = 5e-2
DEFAULT_CLUSTER_TOL = 1e-2


@dataclass(frozen=True)
class Filtration:
    """Distinct jumps with nested subspaces V_alpha and dual annihilators F_alpha."""

    n: int
    jumps: np.ndarray                       # (k,) distinct, ascending
    multiplicities: np.ndarray              # (k,), sums to n
    v_bases: tuple[np.ndarray, ...]         # v_bases[j]: (n, dims[j]) columns spanning V_{alpha_{j+1}}
    f_bases: tuple[np.ndarray, ...]         # f_bases[j]: (n, n - dims[j]) annihilator basis

    @property
    def dims(self) -> np.ndarray:
        return np.cumsum(self.multiplicities)


@dataclass(frozen=True)
class DirectionReport:
    vector: np.ndarray
    exponent: float
    window: tuple[float, float]
    residual: float
    monotone_violation: float | None = None


@dataclass(frozen=True)
class IntegrabilityResult:
    verdict: str                 # "finite" | "infinite" | "borderline"
    alpha: float
    beta: float
    margin: float
    log_partial_integral: float  # log of the [0, t_max] quadrature diagnostic


@dataclass(frozen=True)
class TheoremReport:
    direction: np.ndarray
    j_index: int                 # largest j with v annihilating V_{alpha_j}
    alphas: np.ndarray           # distinct jumps
    beta: float
    interval_endpoint: float
    verdicts: dict = field(default_factory=dict)


def build_filtration(flat: FlatMetric, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> Filtration:
    """Cluster the flat-limit exponents into jumps and form both filtrations."""
    exps = flat.exponents
    n = flat.n
    jumps = [exps[0]]
    mults = [1]
    for a in exps[1:]:
        if a - jumps[-1] < cluster_tol:
            mults[-1] += 1
        else:
            jumps.append(a)
            mults.append(1)
    dims = np.cumsum(mults)
    v_bases = []
    f_bases = []
    for d in dims:
        vb = flat.basis[:, :d]
        v_bases.append(vb)
        if d < n:
            f_bases.append(scipy.linalg.null_space(vb.conj().T))
        else:
            f_bases.append(np.zeros((n, 0), dtype=complex))
    return Filtration(
        n=n,
        jumps=np.array(jumps),
        multiplicities=np.array(mults),
        v_bases=tuple(v_bases),
        f_bases=tuple(f_bases),
    )


def _fit_grid(fam: MetricFamily, fit: FitConfig) -> np.ndarray:
    if fam.t_max < fit.min_t_max:
        raise OutOfRange(f"tail fits need t_max >= {fit.min_t_max}")
    return np.linspace(fit.min_t, fam.t_max, 400)


def alpha_of(fam: MetricFamily, u, fit: FitConfig = FitConfig()) -> DirectionReport:
    """Growth exponent alpha(u): tail slope of log ||u||^2_t."""
    u = as_vector(u, fam.n, allow_zero=False)
    ts = _fit_grid(fam, fit)
    vals = log_norm(fam, u, ts)
    slope, residual = tail_slope(ts, vals, fit)
    base = log_norm(fam, u, 0.0)
    quot = (vals - base) / ts
    monotone_violation = float(np.max(quot[:-1] - quot[1:]))
    window = (float(ts[-1] * fit.window_frac), float(ts[-1]))
    return DirectionReport(
        vector=u, exponent=slope, window=window, residual=residual,
        monotone_violation=monotone_violation,
    )


def decay_exponent(fam: MetricFamily, v, fit: FitConfig = FitConfig()) -> DirectionReport:
    """Decay exponent beta(v) = -(tail slope of log ||v||^2_{-t})."""
    v = as_vector(v, fam.n, allow_zero=False)
    ts = _fit_grid(fam, fit)
    vals = dual_log_norm(fam, v, ts)
    slope, residual = tail_slope(ts, vals, fit)
    window = (float(ts[-1] * fit.window_frac), float(ts[-1]))
    return DirectionReport(vector=v, exponent=-slope, window=window, residual=residual)


def integrability_test(
    fam: MetricFamily,
    v,
    alpha: float,
    fit: FitConfig = FitConfig(),
    margin: float = BORDERLINE_MARGIN,
) -> IntegrabilityResult:
    """Exponent-based verdict on the integral of ||v||^2_{-t} e^{t alpha}.

    Finite-horizon quadrature cannot decide convergence; the verdict
    compares alpha with the decay exponent beta(v), which Theorem-style
    duality makes the faithful surrogate.  The partial integral over
    [0, t_max] is reported in the log domain as a diagnostic.
    """
    beta = decay_exponent(fam, v, fit).exponent
    if alpha < beta - margin:
        verdict = "finite"
    elif alpha > beta + margin:
        verdict = "infinite"
    else:
        verdict = "borderline"
    ts = np.linspace(0.0, fam.t_max, 801)
    g = dual_log_norm(fam, v, ts) + alpha * ts
    dt = ts[1] - ts[0]
    weights = np.full(ts.size, dt)
    weights[[0, -1]] = 0.5 * dt
    log_partial = float(logsumexp(g + np.log(weights)))
    return IntegrabilityResult(
        verdict=verdict, alpha=float(alpha), beta=beta, margin=margin,
        log_partial_integral=log_partial,
    )


def annihilator_index(filtration: Filtration, v) -> int:
    """Largest j with v annihilating V_{alpha_j}; 0 when v pairs with V_{alpha_1}."""
    v = as_vector(v, filtration.n, allow_zero=False)
    v_hat = v / np.linalg.norm(v)
    j_index = 0
    for j, vb in enumerate(filtration.v_bases, start=1):
        cols = vb / np.linalg.norm(vb, axis=0, keepdims=True)
        if np.max(np.abs(cols.conj().T @ v_hat)) < ANNIHILATOR_TOL:
            j_index = j
        else:
            break
    return j_index


def verify_theorem_1_1(
    fam: MetricFamily,
    v,
    filtration: Filtration,
    fit: FitConfig = FitConfig(),
) -> TheoremReport:
    """Check the equivalence of annihilator membership, integrability and decay.

    (a) locates the largest j with v in F_{alpha_j}; (b) brackets the
    open integrability interval endpoint; (c) compares the decay
    exponent beta(v) with alpha_{j+1}.
    """
    v = as_vector(v, None, allow_zero=False)
    if v.size != fam.n or filtration.n != fam.n:
        raise MismatchedFiltration("family, vector and filtration dimensions must agree")
    jumps = filtration.jumps
    k = jumps.size
    j_index = annihilator_index(filtration, v)
    beta = decay_exponent(fam, v, fit).exponent
    below = integrability_test(fam, v, beta - 2 * BORDERLINE_MARGIN, fit)
    above = integrability_test(fam, v, beta + 2 * BORDERLINE_MARGIN, fit)
    verdict_b = below.verdict == "finite" and above.verdict == "infinite"
    alpha_next = jumps[j_index] if j_index < k else jumps[-1]
    verdict_c = beta >= alpha_next - CONSISTENCY_TOL
    if j_index >= k - 1:
        consistent = beta >= jumps[k - 1] - CONSISTENCY_TOL
    else:
        consistent = abs(beta - alpha_next) <= CONSISTENCY_TOL
    return TheoremReport(
        direction=v,
        j_index=j_index,
        alphas=jumps,
        beta=beta,
        interval_endpoint=beta,
        verdicts={"a": j_index, "b": bool(verdict_b), "c": bool(verdict_c), "consistent": bool(consistent and verdict_b and verdict_c)},
    )


def openness_of_interval(
    fam: MetricFamily,
    v,
    fit: FitConfig = FitConfig(),
    margin: float = BORDERLINE_MARGIN,
) -> bool:
    """The set of alpha with finite weighted integral excludes its endpoint."""
    beta = decay_exponent(fam, v, fit).exponent
    at_end = integrability_test(fam, v, beta, fit, margin=0.5 * margin)
    inside = integrability_test(fam, v, beta - margin, fit, margin=0.5 * margin)
    return at_end.verdict in ("borderline", "infinite") and inside.verdict == "finite"
