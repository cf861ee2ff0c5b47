"""Weighted Bergman moments on sublevel disks and the jet-extension model.

Convention: G = log|z|^2 with C = 0, so the sublevel domain is
D_t = {|z| < e^{-t/2}}.  All weights are radial, which makes monomials
orthogonal: quotient norms of jets, dual jet functionals and Bergman
kernels all reduce to the moment sequence

    m_k(t) = int_{D_t} |z|^{2k} e^{-phi} dA.

Reports carry the convention string so the uniform exponent shift a
different choice of C would induce stays visible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
import scipy.integrate

from .errors import DomainError, NonConvergent, OutOfRange, QuadratureFailure, SchemaError, TruncationInsufficient
from .families import generated_family
from .flow import flat_limit
from .profiles import tabulated
from .tailfit import FitConfig

EXPONENT_CONVENTION = "G=log|z|^2, C=0"
MOMENT_REL_TOL = 1e-10
WEIGHT_KINDS = ("zero", "quadratic", "log_pole", "tabulated")


@dataclass(frozen=True)
class RadialWeight:
    """Radial weight profile phi(r) on [0, 1] from the fixed catalog."""

    kind: str
    params: Mapping[str, float] | None = None

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise SchemaError(f"unknown weight kind {self.kind!r}")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(r)
        if self.kind == "quadratic":
            return self.params["a"] * r * r
        if self.kind == "log_pole":
            with np.errstate(divide="ignore"):
                return -2.0 * self.params["a"] * np.log(r)
        return np.interp(r, np.asarray(self.params["rs"]), np.asarray(self.params["values"]))


@dataclass(frozen=True)
class MomentTable:
    orders: np.ndarray      # k = 0..N
    grid: np.ndarray        # t-values
    values: np.ndarray      # (N+1, len(grid))


@dataclass(frozen=True)
class JetIdealProblem:
    """Jet order n, weight, and prescribed coefficients c_k = f^{(k)}(0)/k!."""

    n: int
    weight: RadialWeight
    jets: np.ndarray        # (n+1,) complex

    def __post_init__(self):
        if self.n < 0:
            raise DomainError("jet order must be nonnegative")
        object.__setattr__(self, "jets", np.asarray(self.jets, dtype=complex).reshape(-1))
        if self.jets.size != self.n + 1:
            raise SchemaError(f"expected {self.n + 1} jet coefficients, got {self.jets.size}")


@dataclass(frozen=True)
class KernelValue:
    value: complex
    tail_bound: float
    n_trunc: int


@dataclass(frozen=True)
class MonotonicityReport:
    beta: float
    worst: float
    passed: bool


@dataclass(frozen=True)
class N1Result:
    bound: float
    exact: float
    derivative_term: complex
    f0_jet: np.ndarray
    f1_jet: np.ndarray


def moments(w: RadialWeight, k: int, t: float) -> float:
    """m_k(t) = 2 pi int_0^{e^{-t/2}} r^{2k+1} e^{-phi(r)} dr."""
    if k < 0:
        raise DomainError("moment order must be nonnegative")
    if t < 0:
        raise OutOfRange("sublevel parameter t must be nonnegative")
    radius = math.exp(-0.5 * t)

    def integrand(r):
        if r <= 0.0:
            return 0.0
        return math.exp((2 * k + 1) * math.log(r) - float(w(r)))

    val, err = scipy.integrate.quad(integrand, 0.0, radius, epsabs=0.0, epsrel=1e-13, limit=200)
    val *= 2.0 * math.pi
    if val <= 0.0 or err * 2.0 * math.pi > MOMENT_REL_TOL * val:
        raise QuadratureFailure(f"moment quadrature error {err:.3e} for k={k}, t={t}")
    return val


def moment_table(w: RadialWeight, orders, grid) -> MomentTable:
    orders = np.asarray(orders, dtype=int)
    grid = np.asarray(grid, dtype=float)
    values = np.array([[moments(w, int(k), float(t)) for t in grid] for k in orders])
    return MomentTable(orders=orders, grid=grid, values=values)


def quotient_norm(p: JetIdealProblem, t: float) -> float:
    """Minimal weighted L2 norm over D_t among extensions of the jet.

    Radial weights make monomials orthogonal, so the minimizing
    extension is the jet polynomial itself.
    """
    return float(sum(abs(c) ** 2 * moments(p.weight, k, t) for k, c in enumerate(p.jets)))


def _polar_gram(w: RadialWeight, t: float, max_deg: int) -> np.ndarray:
    """Gram matrix of monomials over D_t by 2-d polar quadrature.

    Deliberately ignores radial orthogonality: the angular trapezoid
    rule (exact for the trig polynomials involved) rediscovers it, so
    this is an independent oracle for the quotient norm.
    """
    radius = math.exp(-0.5 * t)
    nodes, weights = np.polynomial.legendre.leggauss(48)
    edges = np.linspace(0.0, radius, 5)
    rs, wr = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        rs.append(0.5 * (b - a) * nodes + 0.5 * (a + b))
        wr.append(0.5 * (b - a) * weights)
    rs = np.concatenate(rs)
    wr = np.concatenate(wr)
    m_ang = 2 * max_deg + 8
    thetas = 2.0 * np.pi * np.arange(m_ang) / m_ang
    z = rs[:, None] * np.exp(1j * thetas)[None, :]
    wz = (wr * rs * np.exp(-w(rs)))[:, None] * np.full(m_ang, 2.0 * np.pi / m_ang)[None, :]
    z = z.ravel()
    wz = wz.ravel()
    vander = z[:, None] ** np.arange(max_deg + 1)[None, :]
    return (vander.conj() * wz[:, None]).T @ vander


def brute_force_quotient_norm(p: JetIdealProblem, t: float, n_trunc: int = 16) -> float:
    """Least-squares oracle: minimize over corrections z^{n+1} q(z), deg q <= n_trunc."""
    max_deg = p.n + 1 + n_trunc
    gram = _polar_gram(p.weight, t, max_deg)
    nc = p.n + 1
    g_cc = gram[:nc, :nc]
    g_cq = gram[:nc, nc:]
    g_qq = gram[nc:, nc:]
    schur = g_cc - g_cq @ np.linalg.solve(g_qq, g_cq.conj().T)
    c = p.jets
    return float(np.real(c.conj() @ (schur @ c)))


def dual_jet_norms(p: JetIdealProblem, j: int, t: float) -> float:
    """Squared dual norm of the j-th derivative functional: (j!)^2 / m_j(t)."""
    if not (0 <= j <= p.n):
        raise DomainError(f"derivative order {j} outside 0..{p.n}")
    return math.factorial(j) ** 2 / moments(p.weight, j, t)


def extension_jumping_numbers(
    w: RadialWeight,
    n: int,
    grid=None,
    fit: FitConfig = FitConfig(),
) -> np.ndarray:
    """Jumping numbers of the diagonal dual-jet metric family.

    Builds the (n+1)-dimensional family diag(||u_j||^2_t) from the dual
    jet norms and extracts the flat-limit exponents; (1, ..., n+1) for
    the flat weight under this module's sublevel convention.
    """
    if n < 0:
        raise DomainError("jet order must be nonnegative")
    if grid is None:
        grid = np.linspace(0.0, fit.min_t_max, 101)
    grid = np.asarray(grid, dtype=float)
    dummy = JetIdealProblem(n=n, weight=w, jets=np.zeros(n + 1))
    profiles = []
    for j in range(n + 1):
        vals = np.array([dual_jet_norms(dummy, j, t) for t in grid])
        profiles.append(tabulated(grid, np.log(vals)))
    frame = np.eye(n + 1, dtype=complex)
    fam = generated_family([(frame, profiles)], t_max=float(grid[-1]), validate=False)
    flat = flat_limit(fam, FitConfig(window_frac=fit.window_frac, tol=fit.tol, min_t=fit.min_t, min_t_max=float(grid[-1])))
    return flat.exponents


def ot_monotonicity(p: JetIdealProblem, beta: float, grid) -> MonotonicityReport:
    """Is t -> ||f||^2_{-t} e^{beta t} nondecreasing on the grid?"""
    grid = np.asarray(grid, dtype=float)
    if grid.size < 2:
        raise OutOfRange("monotonicity grid needs at least 2 points")
    vals = np.array([quotient_norm(p, t) for t in grid]) * np.exp(beta * grid)
    rel_drops = (vals[:-1] - vals[1:]) / np.maximum(vals[:-1], 1e-300)
    worst = float(np.max(rel_drops))
    return MonotonicityReport(beta=float(beta), worst=worst, passed=worst <= 1e-8)


def bergman_kernel(w: RadialWeight, z: complex, wpt: complex, t: float, n_trunc: int) -> KernelValue:
    """Truncated kernel K(z, w) = sum_k z^k conj(w)^k / m_k(t) with a rigorous tail bound.

    Moment log-convexity in k (Cauchy-Schwarz) makes the term ratios
    decreasing, so the geometric bound from the first dropped term is
    valid for any catalog weight.
    """
    radius = math.exp(-0.5 * t)
    if abs(z) >= radius or abs(wpt) >= radius:
        raise OutOfRange("kernel arguments must lie inside the sublevel disk")
    x = z * np.conj(wpt)
    ms = [moments(w, k, t) for k in range(n_trunc + 3)]
    value = sum(x**k / ms[k] for k in range(n_trunc + 1))
    ax = abs(x)
    ratio = ax * ms[n_trunc + 1] / ms[n_trunc + 2]
    if ratio >= 1.0 - 1e-6:
        raise TruncationInsufficient(f"tail ratio {ratio:.6f} too close to 1")
    tail_bound = (ax ** (n_trunc + 1) / ms[n_trunc + 1]) / (1.0 - ratio)
    if tail_bound > max(1e-10, 1e-10 * abs(value)):
        raise TruncationInsufficient(f"tail bound {tail_bound:.3e} exceeds 1e-10 target")
    return KernelValue(value=complex(value), tail_bound=float(tail_bound), n_trunc=n_trunc)


def kernel_log_derivative(w: RadialWeight, t: float = 0.0, n_trunc: int = 24, step: float = 1e-4) -> complex:
    """d/dz log K(z, z) at z = 0 by central differences on the truncated kernel."""

    def log_k(x: float, y: float) -> float:
        pt = complex(x, y)
        return math.log(abs(bergman_kernel(w, pt, pt, t, n_trunc).value))

    gx = (log_k(step, 0.0) - log_k(-step, 0.0)) / (2.0 * step)
    gy = (log_k(0.0, step) - log_k(0.0, -step)) / (2.0 * step)
    return 0.5 * (gx - 1j * gy)


def n1_estimate(w: RadialWeight, f0: complex, f1: complex) -> N1Result:
    """The explicit first-order jet estimate and its exact counterpart at t = 0.

    The decomposition splits f into its kernel projection
    f(0) K(z,0)/K(0,0) and the remainder; for radial weights the log
    derivative of the kernel vanishes at the origin and the bound is

        pi (|f0|^2 + (1/2) |f1 - f0 d|^2) e^{-phi(0)}.
    """
    phi0 = float(w(0.0))
    if not math.isfinite(phi0):
        raise DomainError("estimate needs a weight finite at the origin")
    d = kernel_log_derivative(w)
    if abs(d) > 1e-6:
        raise DomainError(f"kernel log derivative {abs(d):.2e} not zero; weight not radial?")
    f0 = complex(f0)
    f1 = complex(f1)
    f1_eff = f1 - f0 * d
    bound = math.pi * (abs(f0) ** 2 + 0.5 * abs(f1_eff) ** 2) * math.exp(-phi0)
    exact = quotient_norm(JetIdealProblem(n=1, weight=w, jets=[f0, f1]), 0.0)
    return N1Result(
        bound=bound,
        exact=exact,
        derivative_term=d,
        f0_jet=np.array([f0, 0.0]),
        f1_jet=np.array([0.0, f1_eff]),
    )
