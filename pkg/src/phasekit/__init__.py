"""phasekit: quantum phase distributions on truncated Fock spaces.

Paul and Pegg-Barnett phase probability distributions, the quantum
limited amplifier/attenuator channel pair, and the amplified-ratio
convergence studies connecting the two phase descriptions.
"""

from .fock import (
    DensityMatrix,
    FockVector,
    NumericsWarning,
    coherent_state,
    continuous_phase_state,
    fock_basis_state,
    number_phase_state,
    parse_state_spec,
    pure_density,
    random_hs_density,
    thermal_state,
    trace_distance,
)
from .channels import (
    AmplifierParams,
    AttenuatorParams,
    attenuator_apply,
    default_out_cutoff,
    duality_pair,
    gkls_generator,
    qla_apply,
    qla_thermal_closed_form,
)
from .phase import (
    PhaseDistribution,
    PhaseFunction,
    PhaseGrid,
    QuadratureConfig,
    amplified_density_bound,
    husimi_q,
    paul_coherent_closed_form,
    paul_distribution,
    paul_expectation,
    pb_amplified_density,
    pb_amplified_profile,
    pb_coherent_series,
    pb_continuous_density,
    pb_discrete_distribution,
    pb_expectation,
)
from .experiments import (
    RatioEntry,
    RatioReport,
    figure1a_run,
    figure1b_run,
    nonlinear_amplification_scan,
    operator_attenuation_check,
    expectation_convergence_check,
    ratio_R,
    table1_run,
    thermal_pb_amplified_closed_form,
)

__version__ = "0.1.0"
