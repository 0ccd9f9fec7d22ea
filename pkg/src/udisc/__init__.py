"""Unambiguous discrimination of finite families of quantum states."""

from .errors import (
    DegenerateLattice,
    HypothesisViolated,
    NotAPOVM,
    NotDistinguishable,
    NotDistinguishing,
    NotMinimal,
    TailTooLarge,
    UdiscError,
)
from .lattice import (
    LatticeSpec,
    closed_form_bound,
    coherent_overlap,
    fock_truncated_state,
    fundamental_area,
    gaussian_sum_bound,
    ring_family,
    threshold_scan,
    two_state_upper_bound,
)
from .linalg import eig_hermitian, is_psd, rank_and_nullspace
from .mixed import MixedFamily, build_mixed_povm, mixed_verdict
from .povm import ConfusionReport, UnambiguousPOVM, build_optimal_povm, dual_projection_check, validate
from .pure import (
    DistinguishabilityVerdict,
    GramFamily,
    Level,
    StateFamily,
    dual_family,
    gram,
    max_uniform_success,
    riesz_fischer_check,
    verdict,
)

__version__ = "0.1.0"
