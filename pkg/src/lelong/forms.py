"""Dense hermitian forms on a finite-dimensional fiber.

Positive-definite hermitian forms, their duals, eigendecompositions
relative to a base form, and the PSD ordering used by the comparison
arguments downstream.  All operations are pure; forms are immutable
after construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NotHermitian, NotPositiveDefinite, ZeroVector

PD_FLOOR = 1e-12
HERMITIAN_TOL = 1e-8
PSD_ORDER_TOL = 1e-9
CONDITION_LIMIT = 1e14


@dataclass(frozen=True)
class HermitianForm:
    """A positive-definite hermitian form; the value of a metric at one t."""

    matrix: np.ndarray
    sym_residual: float = 0.0

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class RelativeEigen:
    """Generalized eigendata of a target form relative to a base form.

    ``basis`` columns are base-orthonormal and diagonalize the target;
    ``lambdas`` holds the multiplicative eigenvalues mu_j, ascending.
    Conversion to exponents log(mu_j)/t happens in the flow module,
    where the degenerate t = 0 case has a dedicated rule.
    """

    lambdas: np.ndarray
    basis: np.ndarray


def as_vector(u, n: int | None = None, allow_zero: bool = True) -> np.ndarray:
    """Validate a fiber (or dual) vector and return it as a complex array."""
    v = np.asarray(u, dtype=complex).reshape(-1)
    if n is not None and v.size != n:
        raise DimensionMismatch(f"expected vector of length {n}, got {v.size}")
    if not allow_zero and not np.any(v):
        raise ZeroVector("nonzero vector required")
    return v


def make_form(entries, pd_floor: float = PD_FLOOR) -> HermitianForm:
    """Validate a square matrix as a positive-definite hermitian form.

    The input is symmetrized via (H + H*)/2 before validation and the
    symmetrization residual is recorded on the returned form.
    """
    h = np.asarray(entries, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {h.shape}")
    if h.shape[0] < 1:
        raise DimensionMismatch("dimension must be at least 1")
    sym = 0.5 * (h + h.conj().T)
    residual = float(np.max(np.abs(h - sym))) if h.size else 0.0
    scale = max(1.0, float(np.max(np.abs(h))))
    if residual > HERMITIAN_TOL * scale:
        raise NotHermitian(
            f"hermitian residual {residual:.3e} exceeds {HERMITIAN_TOL:.1e} (relative to scale {scale:.1e})"
        )
    w = np.linalg.eigvalsh(sym)
    if w[0] <= pd_floor:
        raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3e} <= pd_floor {pd_floor:.1e}")
    return HermitianForm(matrix=sym, sym_residual=residual)


def form_unchecked(matrix: np.ndarray) -> HermitianForm:
    """Wrap an already-hermitian matrix without the PD check.

    Internal escape hatch for rescaled comparisons, where uniform
    exponent shifts legitimately underflow eigenvalues to zero.
    """
    sym = 0.5 * (matrix + matrix.conj().T)
    return HermitianForm(matrix=sym)


def evaluate(form: HermitianForm, u) -> float:
    """The squared norm u*Hu of a fiber vector under the form."""
    v = as_vector(u, form.n)
    val = np.real(np.vdot(v, form.matrix @ v))
    # roundoff can leave a tiny negative value for near-null vectors
    return float(max(val, 0.0))


def dual_form(form: HermitianForm) -> HermitianForm:
    """The induced form on the dual fiber: the matrix inverse."""
    w = np.linalg.eigvalsh(form.matrix)
    if w[0] <= 0 or w[-1] / w[0] > CONDITION_LIMIT:
        raise NotPositiveDefinite(
            f"condition number {w[-1] / max(w[0], 0.0):.3e} exceeds {CONDITION_LIMIT:.1e}"
        )
    inv = np.linalg.inv(form.matrix)
    return HermitianForm(matrix=0.5 * (inv + inv.conj().T))


def relative_eigen(base: HermitianForm, target: HermitianForm) -> RelativeEigen:
    """Diagonalize the target form in a base-orthonormal basis.

    Returns ascending multiplicative eigenvalues mu_j and a basis with
    basis* base basis = I and basis* target basis = diag(mu).
    """
    if base.n != target.n:
        raise DimensionMismatch(f"base dimension {base.n} != target dimension {target.n}")
    try:
        lambdas, basis = scipy.linalg.eigh(target.matrix, base.matrix)
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as exc:
        raise NotPositiveDefinite(f"generalized eigendecomposition failed: {exc}") from exc
    if not np.all(np.isfinite(lambdas)):
        raise NotPositiveDefinite("non-finite generalized eigenvalues")
    return RelativeEigen(lambdas=lambdas, basis=basis)


def psd_order(a: HermitianForm, b: HermitianForm, tol: float = PSD_ORDER_TOL) -> str:
    """Ordering verdict between two forms: 'a<=b', 'b<=a', 'equal' or 'incomparable'."""
    if a.n != b.n:
        raise DimensionMismatch(f"dimensions {a.n} and {b.n} differ")
    diff = b.matrix - a.matrix
    w = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    scale = max(1.0, float(np.max(np.abs(a.matrix))), float(np.max(np.abs(b.matrix))))
    a_le_b = w[0] >= -tol * scale
    b_le_a = w[-1] <= tol * scale
    if a_le_b and b_le_a:
        return "equal"
    if a_le_b:
        return "a<=b"
    if b_le_a:
        return "b<=a"
    return "incomparable"
