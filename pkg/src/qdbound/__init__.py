"""qdbound: trace-distance bounds on open-system quantum dynamics, verified numerically.

Exact desk-scale simulation of system+bath evolution, the matrix and
superoperator norms the bounds are stated in, closed-form bound evaluators,
and a seeded fuzz harness that checks measured distances against every bound.
"""

__version__ = "0.1.0"

from .linalg import (  # noqa: F401
    BranchCutError,
    RandomInstanceSpec,
    SubsystemDims,
    adjoint,
    eigh,
    expm_general,
    expm_skew_hermitian,
    logm_unitary_principal,
    multiply,
    partial_trace_b,
    random_instance,
    svd_values,
    tensor,
)
from .norms import (  # noqa: F401
    FROBENIUS,
    OPERATOR,
    TRACE,
    NormKind,
    check_duality,
    check_partial_trace_bound,
    kyfan,
    norm,
)
from .superop import (  # noqa: F401
    OTNormEstimate,
    SuperOperator,
    backend_name,
    commutator_generator,
    commutator_ot_norm_upper,
    conjugation_channel,
    ot_norm_lower,
    superop_exp,
)
from .dynamics import (  # noqa: F401
    EffectiveHamiltonianResult,
    Free,
    HamiltonianSchedule,
    Pulse,
    effective_hamiltonian,
    effective_norm_check,
    fold_pulses,
    interaction_picture,
    magnus_convergence_ok,
    magnus_term1,
    magnus_term12,
    propagator,
)
from .bounds import (  # noqa: F401
    BoundReport,
    Scenario,
    dyson_chain_check,
    fidelity,
    fuchs_sandwich_check,
    generator_distance_bound,
    generator_distance_bound_linear,
    hamiltonian_distance_bound,
    trace_distance,
    verify_scenario,
)
from .cdd import (  # noqa: F401
    CddConfig,
    CddRow,
    cdd_sequence,
    coupling_strengths,
    phi_cdd_bound,
    run_cdd_experiment,
)
from .reporting import BoundViolation, CheckRecord, SlackReport  # noqa: F401
