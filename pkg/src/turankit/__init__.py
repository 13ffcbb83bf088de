"""Turan-type determinants for three-term recurrences: evaluation, certificates, zero bounds."""

__version__ = "0.1.0"

from .airy import AiryPrediction, airy_ai, airy_validate, airy_zero
from .certify import (
    CertReport,
    CertRow,
    ChainVerdict,
    certify_gamma_lemma7,
    certify_S4_sym_thm9,
    certify_T2_thm5,
    certify_T4_sym_thm7,
    certify_T4_thm10,
    chain_sequence_test,
    constant_chain_threshold,
)
from .errors import (
    AnomalyError,
    DivergenceError,
    DomainError,
    InstabilityError,
    OutOfRangeError,
    SingularityError,
    TuranKitError,
    WrongHypothesisError,
)
from .evalkernel import (
    KPolys,
    PolyWindow,
    TuranGrid,
    TuranOp,
    TuranValue,
    XiChoice,
    eval_window,
    kform_coefficients,
    quadratic_forms,
    turan,
    turan_grid,
    turan_xi,
    xi_optimal,
)
from .gpoly import GPolyBound, g_poly_bound
from .identities import IdentityId, verify_identity
from .recurrence import (
    BALANCED,
    MONIC,
    ORTHONORMAL,
    Normalization,
    NormKind,
    RecurrenceSpec,
    TestSequenceParams,
    build_family,
    custom_family,
    load_family,
    reflect,
    renormalize,
    test_sequence_params,
    test_sequences,
)
from .scaled import ScaledArray, ScaledReal
from .spectra import (
    BoundReport,
    ZeroEstimate,
    all_zeros_small,
    bound_report,
    extreme_zeros,
    perturbation_gap,
    sturm_count,
    thm2_bound,
    zero_by_index,
)
from .wendroff import WendroffTable, wendroff_extend
