"""One-parameter hermitian metric families t -> h(t) on [0, T].

Two representations: ``sampled`` (forms on a strictly increasing
t-grid, entrywise linear interpolation off-grid) and ``generated``
(sums of blocks A_b diag(e^{phi_j(t)}) A_b* with convex profiles).
Generated families admit exact log-domain norm evaluation via
log-sum-exp, which is what keeps horizons like T = 200 inside double
precision; entrywise evaluation of the forms themselves is only
possible while the exponents fit the double range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import DimensionMismatch, NotPositiveDefinite, OutOfRange, SchemaError
from .forms import HermitianForm, as_vector, dual_form, evaluate, form_unchecked, make_form
from .profiles import ScalarProfile, check_profile_convexity
from .tailfit import line_fit

UNITARY_TOL = 1e-10
CONVEXITY_PASS_TOL = 1e-7
EXP_OVERFLOW = 700.0
SUPPORT_RTOL = 1e-13


def _log_abs_sq(coeff: np.ndarray) -> np.ndarray:
    """log |c_j|^2 with sub-roundoff coefficients treated as exact zeros.

    Over long horizons any exponent gap amplifies a 1e-16 cancellation
    residual past the true leading term, so components below the
    relative support threshold count as absent.
    """
    mags = np.abs(coeff)
    mags[mags < SUPPORT_RTOL * mags.max()] = 0.0
    with np.errstate(divide="ignore"):
        return 2.0 * np.log(mags)


@dataclass(frozen=True)
class Block:
    """One generated-family block: frame columns with one profile each."""

    matrix: np.ndarray              # (n, k) frame columns
    profiles: tuple[ScalarProfile, ...]


@dataclass(frozen=True)
class MetricFamily:
    n: int
    t_max: float
    kind: str                       # "generated" | "sampled"
    blocks: tuple[Block, ...] = ()
    grid: np.ndarray | None = None
    forms: tuple[HermitianForm, ...] = ()
    exponent_shift: float = 0.0     # accumulated e^{-at} rescaling


@dataclass(frozen=True)
class GrowthFit:
    """Moderate-growth fit ||u||^2_t <= C e^{at} over the probe set."""

    a: float
    C: float
    residual: float
    verdict: str                    # "moderate" | "not moderate"


@dataclass(frozen=True)
class ConvexityReport:
    violations: tuple[float, ...]
    worst: float
    passed: bool


@dataclass(frozen=True)
class CurvatureReport:
    worst: float
    worst_point: tuple[float, float]
    tol: float
    passed: bool


def generated_family(
    blocks: Sequence[tuple | Block],
    t_max: float,
    require_unitary: bool = False,
    validate: bool = True,
) -> MetricFamily:
    """Build a generated family h(t) = sum_b A_b diag(e^{phi(t)}) A_b*.

    ``require_unitary`` enforces the strict input contract (orthonormal
    frame columns); internally constructed families (interpolated and
    flat metrics over a non-euclidean base form) use general frames.
    """
    if not blocks:
        raise SchemaError("generated family needs at least one block")
    norm_blocks = []
    n = None
    for i, blk in enumerate(blocks):
        if not isinstance(blk, Block):
            matrix, profiles = blk
            blk = Block(matrix=np.asarray(matrix, dtype=complex), profiles=tuple(profiles))
        else:
            blk = Block(matrix=np.asarray(blk.matrix, dtype=complex), profiles=tuple(blk.profiles))
        if blk.matrix.ndim != 2:
            raise SchemaError(f"block {i}: frame must be a matrix")
        if n is None:
            n = blk.matrix.shape[0]
        if blk.matrix.shape[0] != n:
            raise DimensionMismatch(f"block {i}: fiber dimension mismatch")
        if len(blk.profiles) != blk.matrix.shape[1]:
            raise SchemaError(f"block {i}: {blk.matrix.shape[1]} columns but {len(blk.profiles)} profiles")
        if require_unitary:
            gram = blk.matrix.conj().T @ blk.matrix
            if np.max(np.abs(gram - np.eye(blk.matrix.shape[1]))) > UNITARY_TOL:
                raise SchemaError(f"block {i}: frame columns not orthonormal to {UNITARY_TOL:.0e}")
        if validate:
            for j, prof in enumerate(blk.profiles):
                viol = check_profile_convexity(prof, t_max)
                if viol > 1e-9:
                    raise SchemaError(f"block {i} profile {j}: convexity violation {viol:.3e}")
        norm_blocks.append(blk)
    return MetricFamily(n=n, t_max=float(t_max), kind="generated", blocks=tuple(norm_blocks))


def sampled_family(grid, forms: Sequence[HermitianForm]) -> MetricFamily:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size != len(forms) or grid.size < 1:
        raise SchemaError("grid and forms must be matching nonempty sequences")
    if grid[0] != 0.0:
        raise SchemaError("sampled grid must start at t = 0")
    if np.any(np.diff(grid) <= 0):
        raise SchemaError("sampled grid must be strictly increasing")
    n = forms[0].n
    for i, f in enumerate(forms):
        if f.n != n:
            raise DimensionMismatch(f"form {i} has dimension {f.n}, expected {n}")
    return MetricFamily(n=n, t_max=float(grid[-1]), kind="sampled", grid=grid, forms=tuple(forms))


def merged_frame(fam: MetricFamily) -> tuple[np.ndarray, tuple[ScalarProfile, ...]] | None:
    """Single invertible frame A with h(t) = A diag(e^{phi(t)}) A*, if one exists.

    Blocks merge whenever their column counts add up to n and the
    concatenation is well conditioned; this is the exact closed-form
    path used by the spectral-flow engine.
    """
    if fam.kind != "generated":
        return None
    mats = [b.matrix for b in fam.blocks]
    total = sum(m.shape[1] for m in mats)
    if total != fam.n:
        return None
    frame = np.hstack(mats)
    if np.linalg.cond(frame) > 1e12:
        return None
    profiles = tuple(p for b in fam.blocks for p in b.profiles)
    return frame, profiles


def _check_t(fam: MetricFamily, t: float) -> None:
    if not (0.0 <= t <= fam.t_max + 1e-12):
        raise OutOfRange(f"t = {t} outside [0, {fam.t_max}]")


def eval_family(fam: MetricFamily, t: float) -> HermitianForm:
    """The form h(t); exact for generated families, interpolated for sampled."""
    _check_t(fam, t)
    if fam.kind == "generated":
        h = np.zeros((fam.n, fam.n), dtype=complex)
        for blk in fam.blocks:
            exponents = np.array([float(p(t)) for p in blk.profiles])
            if np.max(exponents) > EXP_OVERFLOW:
                raise OutOfRange(
                    f"profile exponent {np.max(exponents):.1f} overflows at t = {t}; rescale the family"
                )
            h += (blk.matrix * np.exp(exponents)) @ blk.matrix.conj().T
        return make_form(h)
    grid, forms = fam.grid, fam.forms
    idx = np.searchsorted(grid, t)
    if idx < grid.size and grid[idx] == t:
        return forms[idx]
    if idx == 0:
        return forms[0]
    lo, hi = idx - 1, min(idx, grid.size - 1)
    w = (t - grid[lo]) / (grid[hi] - grid[lo])
    return make_form((1.0 - w) * forms[lo].matrix + w * forms[hi].matrix)


def eval_unchecked(fam: MetricFamily, t: float) -> HermitianForm:
    """h(t) without the PD floor; rescaled families legitimately underflow."""
    _check_t(fam, t)
    if fam.kind != "generated":
        return form_unchecked(eval_family(fam, t).matrix)
    h = np.zeros((fam.n, fam.n), dtype=complex)
    for blk in fam.blocks:
        exponents = np.array([float(p(t)) for p in blk.profiles])
        if np.max(exponents) > EXP_OVERFLOW:
            raise OutOfRange(f"profile exponent {np.max(exponents):.1f} overflows at t = {t}")
        h += (blk.matrix * np.exp(exponents)) @ blk.matrix.conj().T
    return form_unchecked(h)


def dual_eval(fam: MetricFamily, t: float) -> HermitianForm:
    """The dual form h(t)^{-1}."""
    return dual_form(eval_family(fam, t))


def log_norm(fam: MetricFamily, u, ts):
    """log ||u||^2_t, stable at any horizon for generated families."""
    u = as_vector(u, fam.n, allow_zero=False)
    ts_arr = np.atleast_1d(np.asarray(ts, dtype=float))
    if ts_arr.min() < -1e-12 or ts_arr.max() > fam.t_max + 1e-12:
        raise OutOfRange(f"t range [{ts_arr.min()}, {ts_arr.max()}] outside [0, {fam.t_max}]")
    if fam.kind == "generated":
        pieces = []
        coeffs = [blk.matrix.conj().T @ u for blk in fam.blocks]
        peak = max(float(np.max(np.abs(c))) for c in coeffs)
        for blk, coeff in zip(fam.blocks, coeffs):
            mags = np.abs(coeff)
            mags[mags < SUPPORT_RTOL * peak] = 0.0
            with np.errstate(divide="ignore"):
                logc = 2.0 * np.log(mags)
            phi = np.stack([p(ts_arr) for p in blk.profiles])  # (k, m)
            pieces.append(logc[:, None] + phi)
        out = logsumexp(np.vstack(pieces), axis=0)
    else:
        out = np.array([math.log(evaluate(eval_family(fam, t), u)) for t in ts_arr])
    return out if np.ndim(ts) else float(out[0])


def dual_log_norm(fam: MetricFamily, v, ts):
    """log ||v||^2_{-t} on the dual fiber; exact path needs a merged frame."""
    v = as_vector(v, fam.n, allow_zero=False)
    ts_arr = np.atleast_1d(np.asarray(ts, dtype=float))
    if ts_arr.min() < -1e-12 or ts_arr.max() > fam.t_max + 1e-12:
        raise OutOfRange(f"t range [{ts_arr.min()}, {ts_arr.max()}] outside [0, {fam.t_max}]")
    mf = merged_frame(fam)
    if mf is not None:
        frame, profiles = mf
        coeff = np.linalg.solve(frame, v)
        logc = _log_abs_sq(coeff)
        phi = np.stack([p(ts_arr) for p in profiles])
        out = logsumexp(logc[:, None] - phi, axis=0)
    else:
        out = np.array([math.log(evaluate(dual_eval(fam, t), v)) for t in ts_arr])
    return out if np.ndim(ts) else float(out[0])


def rescale(fam: MetricFamily, a: float) -> MetricFamily:
    """The family e^{-at} h(t); records the shift so exponents can be restored."""
    if fam.kind == "generated":
        blocks = tuple(
            Block(matrix=b.matrix, profiles=tuple(p.shifted(a) for p in b.profiles)) for b in fam.blocks
        )
        return MetricFamily(
            n=fam.n, t_max=fam.t_max, kind="generated", blocks=blocks,
            exponent_shift=fam.exponent_shift + a,
        )
    forms = tuple(form_unchecked(np.exp(-a * t) * f.matrix) for t, f in zip(fam.grid, fam.forms))
    return MetricFamily(
        n=fam.n, t_max=fam.t_max, kind="sampled", grid=fam.grid, forms=forms,
        exponent_shift=fam.exponent_shift + a,
    )


def check_convexity(fam: MetricFamily, directions, grid) -> ConvexityReport:
    """Midpoint convexity of t -> log ||u||^2_t on consecutive grid triples."""
    grid = np.asarray(grid, dtype=float)
    if grid.size < 3:
        raise OutOfRange("convexity check needs at least 3 grid points")
    if grid.min() < 0 or grid.max() > fam.t_max:
        raise OutOfRange("convexity grid outside [0, t_max]")
    if len(directions) == 0:
        raise OutOfRange("at least one probe direction required")
    violations = []
    t0, t1, t2 = grid[:-2], grid[1:-1], grid[2:]
    for u in directions:
        vals = log_norm(fam, u, grid)
        chord = (vals[:-2] * (t2 - t1) + vals[2:] * (t1 - t0)) / (t2 - t0)
        violations.append(float(np.max(vals[1:-1] - chord)))
    worst = max(violations)
    return ConvexityReport(violations=tuple(violations), worst=worst, passed=worst <= CONVEXITY_PASS_TOL)


def check_negative_curvature(fam: MetricFamily, sections, box, step: float) -> CurvatureReport:
    """Discrete-Laplacian subharmonicity of log ||u0 + zeta*u1||^2_{Re zeta}.

    ``box`` is (t_lo, t_hi, y_lo, y_hi) inside the strip 0 < Re zeta < t_max.
    """
    t_lo, t_hi, y_lo, y_hi = box
    if not (0.0 < t_lo < t_hi < fam.t_max):
        raise OutOfRange("box must sit strictly inside 0 < Re zeta < t_max")
    xs = np.arange(t_lo, t_hi + 0.5 * step, step)
    ys = np.arange(y_lo, y_hi + 0.5 * step, step)
    if xs.size < 5 or ys.size < 5:
        raise OutOfRange("box too small for a 5x5 stencil at this step")
    tol = 1e-6 / step**2
    worst = np.inf
    worst_point = (xs[0], ys[0])
    for u0_raw, u1_raw in sections:
        u0 = as_vector(u0_raw, fam.n)
        u1 = as_vector(u1_raw, fam.n)
        grid_vals = np.empty((xs.size, ys.size))
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                grid_vals[i, j] = log_norm(fam, u0 + (x + 1j * y) * u1, x)
        lap = (
            grid_vals[2:, 1:-1] + grid_vals[:-2, 1:-1]
            + grid_vals[1:-1, 2:] + grid_vals[1:-1, :-2]
            - 4.0 * grid_vals[1:-1, 1:-1]
        ) / step**2
        k = np.unravel_index(np.argmin(lap), lap.shape)
        if lap[k] < worst:
            worst = float(lap[k])
            worst_point = (float(xs[k[0] + 1]), float(ys[k[1] + 1]))
    return CurvatureReport(worst=worst, worst_point=worst_point, tol=tol, passed=worst >= -tol)


def check_moderate_growth(fam: MetricFamily, probes) -> GrowthFit:
    """Fit the moderate-growth envelope ||u||^2_t <= C e^{at}."""
    if fam.t_max < 10.0:
        raise OutOfRange("moderate-growth check needs t_max >= 10")
    ts = np.linspace(0.0, fam.t_max, 257)
    q3 = (ts >= 0.5 * fam.t_max) & (ts <= 0.75 * fam.t_max)
    q4 = ts >= 0.75 * fam.t_max
    slopes = []
    stabilized = True
    logs = []
    for u in probes:
        vals = log_norm(fam, u, ts)
        logs.append(vals)
        s3, _, _ = line_fit(ts[q3], vals[q3])
        s4, _, _ = line_fit(ts[q4], vals[q4])
        slopes.append(s4)
        if abs(s4 - s3) >= 0.05:
            stabilized = False
    a = max(slopes)
    log_c = max(float(np.max(vals - a * ts)) for vals in logs)
    residual = max(float(np.max(vals - a * ts - log_c)) for vals in logs)
    return GrowthFit(
        a=a,
        C=float(np.exp(log_c)),
        residual=residual,
        verdict="moderate" if stabilized else "not moderate",
    )
