"""Numerical toolkit for S^1-invariant hermitian metric families.

Negatively curved families h(t) on a trivial bundle over the right
half-plane, their spectral flow relative to h(0), flat limits, jumping
numbers and the induced filtrations, plus two worked models: strong
openness for radial weights on the disk and weighted Bergman jet
extension.
"""

__version__ = "0.1.0"

from .errors import (
    DimensionMismatch,
    DomainError,
    LelongError,
    MismatchedFiltration,
    NonConvergent,
    NotHermitian,
    NotPositiveDefinite,
    OutOfRange,
    QuadratureFailure,
    SchemaError,
    TruncationInsufficient,
    ZeroVector,
)
from .forms import HermitianForm, dual_form, evaluate, make_form, psd_order, relative_eigen
from .profiles import ScalarProfile, exp_decay, hyperbola, linear, softmax, tabulated
from .tailfit import FitConfig
from .families import (
    MetricFamily,
    check_convexity,
    check_moderate_growth,
    check_negative_curvature,
    dual_log_norm,
    eval_family,
    generated_family,
    log_norm,
    rescale,
    sampled_family,
)
from .flow import (
    FlatMetric,
    SpectralFlow,
    check_domination,
    check_flat,
    check_lambda_monotone,
    compute_flow,
    flat_family,
    flat_limit,
    interpolated_metric,
)
from .filtration import (
    Filtration,
    alpha_of,
    annihilator_index,
    build_filtration,
    decay_exponent,
    integrability_test,
    openness_of_interval,
    verify_theorem_1_1,
)
from .openness import ModelWeight, lemma_c_p, lemma_identity, openness_interval, reduction_identity
from .bergman import (
    EXPONENT_CONVENTION,
    JetIdealProblem,
    RadialWeight,
    bergman_kernel,
    brute_force_quotient_norm,
    dual_jet_norms,
    extension_jumping_numbers,
    moments,
    n1_estimate,
    ot_monotonicity,
    quotient_norm,
)
from .estimators import JumpingNumberEstimator
from .serialize import family_from_json, family_to_json, load_family, save_family

__all__ = [name for name in dir() if not name.startswith("_")]
