"""G-Strand simulation and integrability verification on SO(3), SO(4) and SE(3)."""

from .algebra import (
    AlgPair,
    TagMismatchError,
    ad_se3,
    ad_so3,
    ad_so4,
    adstar_se3,
    cross_pair_se3,
    hat3,
    hat4_se3,
    hat4_so4,
    pair_so4,
    se3,
    so4,
    unhat3,
)
from .closures import (
    ClosureParamsSE3,
    ClosureParamsSO3,
    ClosureParamsSO4Ex1,
    ClosureParamsSO4Ex2,
    PolySpec,
    SMKParams,
    closure_se3,
    closure_smk,
    closure_so3,
    closure_so4_ex1,
    closure_so4_ex2,
    diagnose,
)
from .conservation import (
    ConservedReport,
    casimir_densities_so4,
    eval_H_so3,
    eval_h,
    legendre_identity_check,
    monitor,
    var_deriv_fd_check,
)
from .dynamics import (
    BlowUpError,
    check_se2_split,
    integrate,
    ode_mode_rhs,
    rhs,
    rhs_se3,
    rhs_so3,
    rhs_so4,
    step_rk4,
)
from .filament import reconstruct_filament
from .grid import FourierModeSpec, GridSpec, deriv_s, integrate_s, synth_field
from .integrability import (
    ConstraintResiduals,
    LaxPairField,
    build_lax,
    constraint_residuals,
    riccati_densities,
    zcr_residual_discrete,
    zcr_residual_semidiscrete,
)
from .laurent import LaurentField
from .state import DiagnosticState, StrandState

__version__ = "0.1.0"
