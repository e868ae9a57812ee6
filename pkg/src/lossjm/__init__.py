"""Measurement incompatibility of continuous-variable detectors under loss.

Builds displaced on-off photodetection POVMs in truncated Fock spaces, maps
them through pure-loss channels, and decides joint measurability with a
deterministic alternating-projection solver, an explicit linear-optical
parent construction, a closed-form qubit pair criterion, and unambiguous
state-discrimination witnesses.
"""

__version__ = "0.1.0"

from .compat import (
    DECISION_MARGIN,
    JmResult,
    ParentPovm,
    certify,
    decide_table_row,
    depolarize,
    jm_feasibility,
    marginal,
    robustness,
)
from .fock import (
    bs_transfer,
    bs_unitary,
    coherent_ket,
    complete_unitary,
    lon_unitary,
    overlap,
    psd_residual,
)
from .loss import (
    GaussianQ,
    apply_channel,
    apply_dual,
    dual_coherent_projector,
    dual_coherent_q,
    fock_from_q,
    kraus_ops,
    q_function,
)
from .measurements import (
    BlochParams,
    FamilyParams,
    MeasurementSet,
    Povm,
    bloch_params,
    displaced_onoff,
    lossy_povm,
    project_povm,
    project_set,
    random_measurement_set,
    random_two_outcome_povm,
    symmetric_family,
)
from .parent import lon_parent, verify_marginal_identity
from .qubit import (
    DegenerateMeasurementError,
    PairTestReport,
    leading_order_check,
    lossy_displaced_pair,
    pair_test,
)
from .usd import (
    UsdReport,
    beats_no_loss_optimum,
    lossy_usd_success,
    p_d,
    p_d_approx,
    p_lon,
    p_lon_approx,
    result4_threshold,
    root_distance_product,
    usd_report,
)

__all__ = [
    "DECISION_MARGIN",
    "BlochParams",
    "DegenerateMeasurementError",
    "FamilyParams",
    "GaussianQ",
    "JmResult",
    "MeasurementSet",
    "PairTestReport",
    "ParentPovm",
    "Povm",
    "UsdReport",
    "apply_channel",
    "apply_dual",
    "beats_no_loss_optimum",
    "bloch_params",
    "bs_transfer",
    "bs_unitary",
    "certify",
    "coherent_ket",
    "complete_unitary",
    "decide_table_row",
    "depolarize",
    "displaced_onoff",
    "dual_coherent_projector",
    "dual_coherent_q",
    "fock_from_q",
    "jm_feasibility",
    "kraus_ops",
    "leading_order_check",
    "lon_parent",
    "lon_unitary",
    "lossy_displaced_pair",
    "lossy_povm",
    "lossy_usd_success",
    "marginal",
    "overlap",
    "p_d",
    "p_d_approx",
    "p_lon",
    "p_lon_approx",
    "pair_test",
    "project_povm",
    "project_set",
    "psd_residual",
    "q_function",
    "random_measurement_set",
    "random_two_outcome_povm",
    "result4_threshold",
    "robustness",
    "root_distance_product",
    "symmetric_family",
    "usd_report",
    "verify_marginal_identity",
]
