"""Mixed-radix qudit simulator for abelian hidden-subgroup algorithms."""

__version__ = "0.1.0"

from .groups import (
    FiniteAbelianGroup,
    GroupElement,
    ProductSubgroup,
    brute_force_orthogonal,
    inner_product,
    is_orthogonal,
    normalize_generator,
    subgroup_generated_by,
)
from .operators import (
    HidingFunction,
    apply_oracle,
    apply_qft_group,
    coset_state,
    make_canonical_hiding_function,
    qft_matrix,
    qft_of_coset_state_reference,
    s_z_apply,
)
from .pipelines import (
    AuxSpec,
    ShotRecord,
    ifqa_exact_distribution_for_z,
    ifqa_expected_distribution,
    ifqa_run_state,
    ifqa_sample,
    lambda_channel,
    standard_exact_distribution,
    standard_post_measurement_aux,
    standard_run_state,
    standard_sample,
)
from .recovery import RecoveryState, ingest, recover_hidden_subgroup, query_statistics
from .states import (
    DensityMatrix,
    MixedRadixRegister,
    PureState,
    ResourceCapError,
    apply_local_unitary,
    basis_state,
    exact_distribution,
    fidelity,
    marginal,
    measure_subregister,
    trace_distance,
)
