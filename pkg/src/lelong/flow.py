"""Eigenvalue curves relative to h(0), interpolated flat metrics and the flat limit.

The exponents lambda_j(t) = log(mu_j(t))/t of h(t) relative to h(0) are
nondecreasing for negatively curved families and converge to the
jumping numbers alpha_j.  Generated families with a merged frame take
an exact closed-form path (the frame diagonalizes every h(t)
simultaneously), which is the only numerically viable route once
t * exponent-spread leaves the double-precision range.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NonConvergent, OutOfRange
from .families import MetricFamily, eval_family, generated_family, merged_frame
from .forms import HermitianForm, form_unchecked, psd_order, relative_eigen
from .profiles import linear
from .tailfit import FitConfig, tail_limit

LAMBDA_MONOTONE_TOL = 1e-7
CLUSTER_GAP_REL = 1e-6
FLAT_LAMBDA_TOL = 1e-7
FLAT_ANGLE_TOL = 1e-6


@dataclass(frozen=True)
class SpectralFlow:
    """Sorted exponent curves lambda_j(t) and h(0)-orthonormal bases."""

    grid: np.ndarray            # (m,) t-values, ascending, excluding 0
    lambdas: np.ndarray         # (m, n) sorted ascending per row
    bases: np.ndarray           # (m, n, n) diagonalizing basis columns
    cluster_flags: np.ndarray   # (m, n-1) True where a relative gap < 1e-6


@dataclass(frozen=True)
class FlatMetric:
    """The flat limit: base form h(0), an h(0)-orthonormal basis, exponents."""

    base_form: HermitianForm
    basis: np.ndarray           # (n, n) columns f_j
    exponents: np.ndarray       # (n,) ascending

    @property
    def n(self) -> int:
        return self.base_form.n


@dataclass(frozen=True)
class MonotoneReport:
    worst: float
    passed: bool


@dataclass(frozen=True)
class DominationReport:
    verdicts: tuple[str, ...]
    passed: bool


@dataclass(frozen=True)
class FlatReport:
    lambda_spread: float
    worst_angle: float
    passed: bool


def _cluster_flags(lambdas: np.ndarray) -> np.ndarray:
    gaps = np.diff(lambdas, axis=-1)
    scale = np.maximum(np.abs(lambdas[..., :-1]), np.abs(lambdas[..., 1:])) + 1.0
    return gaps < CLUSTER_GAP_REL * scale


def compute_flow(fam: MetricFamily, grid) -> SpectralFlow:
    """lambda_j(t) and diagonalizing bases over an ascending grid in (0, t_max]."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or grid.min() <= 0 or grid.max() > fam.t_max + 1e-12:
        raise OutOfRange("flow grid must lie in (0, t_max]")
    if np.any(np.diff(grid) <= 0):
        raise OutOfRange("flow grid must be strictly ascending")
    n = fam.n
    lambdas = np.empty((grid.size, n))
    bases = np.empty((grid.size, n, n), dtype=complex)
    mf = merged_frame(fam)
    if mf is not None:
        frame, profiles = mf
        phi0 = np.array([float(p(0.0)) for p in profiles])
        basis = np.linalg.inv(frame).conj().T * np.exp(-0.5 * phi0)[None, :]
        for i, t in enumerate(grid):
            lam = np.array([(float(p(t)) - p0) / t for p, p0 in zip(profiles, phi0)])
            order = np.argsort(lam, kind="stable")
            lambdas[i] = lam[order]
            bases[i] = basis[:, order]
    else:
        h0 = eval_family(fam, 0.0)
        for i, t in enumerate(grid):
            eig = relative_eigen(h0, eval_family(fam, t))
            lambdas[i] = np.log(eig.lambdas) / t
            bases[i] = eig.basis
    return SpectralFlow(grid=grid, lambdas=lambdas, bases=bases, cluster_flags=_cluster_flags(lambdas))


def check_lambda_monotone(flow: SpectralFlow) -> MonotoneReport:
    """Each sorted curve lambda_j must be nondecreasing along the grid."""
    if flow.grid.size < 2:
        raise OutOfRange("monotonicity check needs at least 2 grid points")
    drops = flow.lambdas[:-1] - flow.lambdas[1:]
    worst = float(np.max(drops))
    return MonotoneReport(worst=worst, passed=worst <= LAMBDA_MONOTONE_TOL)


def interpolated_metric(fam: MetricFamily, t: float) -> MetricFamily:
    """The flat bridge between h(0) and h(t): sum |c_j|^2 e^{s lambda_j(t)}."""
    if not (0.0 < t <= fam.t_max):
        raise OutOfRange(f"t = {t} outside (0, t_max]")
    flow = compute_flow(fam, np.array([t]))
    h0 = eval_family(fam, 0.0)
    frame = h0.matrix @ flow.bases[0]
    profiles = [linear(lam) for lam in flow.lambdas[0]]
    return generated_family([(frame, profiles)], t_max=t)


def check_domination(fam: MetricFamily, t: float, probe_grid) -> DominationReport:
    """h(s) <= h_{s,t} at each probe s in (0, t)."""
    interp = interpolated_metric(fam, t)
    verdicts = []
    for s in np.asarray(probe_grid, dtype=float):
        if not (0.0 < s < t):
            raise OutOfRange(f"probe s = {s} outside (0, t)")
        verdicts.append(psd_order(eval_family(fam, s), eval_family(interp, s), tol=1e-7))
    passed = all(v in ("a<=b", "equal") for v in verdicts)
    return DominationReport(verdicts=tuple(verdicts), passed=passed)


def _h0_gram_schmidt(columns: np.ndarray, h0: np.ndarray) -> np.ndarray:
    """Orthonormalize columns for the h0 inner product, preserving nested spans."""
    out = columns.astype(complex).copy()
    n = out.shape[1]
    for j in range(n):
        for i in range(j):
            out[:, j] -= (out[:, i].conj() @ (h0 @ out[:, j])) * out[:, i]
        norm = np.sqrt(np.real(out[:, j].conj() @ (h0 @ out[:, j])))
        out[:, j] /= norm
    return out


def flat_limit(fam: MetricFamily, fit: FitConfig = FitConfig()) -> FlatMetric:
    """The flat limit h_infty: tail limits of lambda_j(t) and the limit basis."""
    if fam.t_max < fit.min_t_max:
        raise OutOfRange(f"flat limit needs t_max >= {fit.min_t_max}")
    t_lo = max(fit.min_t, 0.25 * fam.t_max)
    grid = np.linspace(t_lo, fam.t_max, 257)
    flow = compute_flow(fam, grid)
    exponents = np.empty(fam.n)
    for j in range(fam.n):
        exponents[j], _ = tail_limit(flow.grid, flow.lambdas[:, j], fit)
    order = np.argsort(exponents, kind="stable")
    exponents = exponents[order]
    h0 = eval_family(fam, 0.0)
    basis = _h0_gram_schmidt(flow.bases[-1][:, order], h0.matrix)
    return FlatMetric(base_form=h0, basis=basis, exponents=exponents)


def flat_family(flat: FlatMetric, t_max: float) -> MetricFamily:
    """The metric family induced by a flat metric: sum |a_j|^2 e^{t alpha_j}."""
    frame = flat.base_form.matrix @ flat.basis
    profiles = [linear(a) for a in flat.exponents]
    return generated_family([(frame, profiles)], t_max=t_max)


def flat_eval_unchecked(flat: FlatMetric, t: float, shift: float = 0.0) -> HermitianForm:
    """h_infty(t) scaled by e^{-shift*t}, without the PD floor check.

    Uniform exponent shifts legitimately underflow the smallest
    eigenvalues at large t; comparisons only need hermitian matrices.
    """
    frame = flat.base_form.matrix @ flat.basis
    vals = np.exp((flat.exponents - shift) * t)
    return form_unchecked((frame * vals) @ frame.conj().T)


def check_flat(fam: MetricFamily, grid, directions=None) -> FlatReport:
    """Flatness test: constant lambda curves and t-independent eigenspaces."""
    grid = np.asarray(grid, dtype=float)
    if grid.size < 3:
        raise OutOfRange("flatness check needs at least 3 grid points")
    flow = compute_flow(fam, grid)
    spread = float(np.max(flow.lambdas.max(axis=0) - flow.lambdas.min(axis=0)))
    # cluster boundaries from the last grid point; compare cumulative spans
    flags = flow.cluster_flags[-1]
    boundaries = [j + 1 for j in range(fam.n - 1) if not flags[j]]
    worst_angle = 0.0
    for d in boundaries:
        ref = flow.bases[-1][:, :d]
        for i in range(flow.grid.size - 1):
            angles = scipy.linalg.subspace_angles(ref, flow.bases[i][:, :d])
            if angles.size:
                worst_angle = max(worst_angle, float(angles.max()))
    passed = spread <= FLAT_LAMBDA_TOL and worst_angle < FLAT_ANGLE_TOL
    return FlatReport(lambda_spread=spread, worst_angle=worst_angle, passed=passed)
