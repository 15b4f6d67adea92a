"""Simulation of continuous-variable authentication of optical scattering keys.

Models multiple-scattering keys as rows of complex Gaussian reflection
matrices, simulates wavefront-shaped coherent interrogation with
homodyne readout, runs the enrollment/verification protocol, and
quantifies collision resistance and clone detectability through seeded
Monte Carlo campaigns.
"""

from .adversary import (
    CloneCloud,
    CloneSpec,
    cheating_probability,
    clone_key,
    clone_response_cloud,
    false_key,
)
from .experiments import (
    EXPERIMENT_IDS,
    CampaignConfig,
    CloneExperimentsResult,
    CollisionResult,
    EnhancementConditionResult,
    Histogram,
    ResponseCloudResult,
    run_campaign,
    run_clone_experiments,
    run_collision_histogram,
    run_enhancement_condition,
    run_response_cloud,
)
from .homodyne import (
    HALF_PI,
    HomodyneChannel,
    ProbeSet,
    ProbeState,
    Response,
    bin_interval,
    in_bin,
    p_in_theoretical,
    quadrature_mean,
    sample_quadrature,
)
from .protocol import (
    CrpDatabase,
    CrpRecord,
    VerificationConfig,
    VerificationReport,
    e_threshold,
    enroll_exact,
    enroll_sampled,
    enrollment_error,
    m_threshold,
    radii,
    total_enrollment_samples,
    verify,
)
from .scattering import (
    CouplingProfile,
    DegenerateKeyError,
    PhaseMask,
    ScatteringKey,
    enhancement,
    generate_key,
    iterative_mask,
    optimal_mask,
    scattered_amplitude,
    uniform_coupling,
    wrap_phase,
)
from .streams import substream

__version__ = "0.1.0"

__all__ = [
    "CloneCloud",
    "CloneSpec",
    "cheating_probability",
    "clone_key",
    "clone_response_cloud",
    "false_key",
    "EXPERIMENT_IDS",
    "CampaignConfig",
    "CloneExperimentsResult",
    "CollisionResult",
    "EnhancementConditionResult",
    "Histogram",
    "ResponseCloudResult",
    "run_campaign",
    "run_clone_experiments",
    "run_collision_histogram",
    "run_enhancement_condition",
    "run_response_cloud",
    "HALF_PI",
    "HomodyneChannel",
    "ProbeSet",
    "ProbeState",
    "Response",
    "bin_interval",
    "in_bin",
    "p_in_theoretical",
    "quadrature_mean",
    "sample_quadrature",
    "CrpDatabase",
    "CrpRecord",
    "VerificationConfig",
    "VerificationReport",
    "e_threshold",
    "enroll_exact",
    "enroll_sampled",
    "enrollment_error",
    "m_threshold",
    "radii",
    "total_enrollment_samples",
    "verify",
    "CouplingProfile",
    "DegenerateKeyError",
    "PhaseMask",
    "ScatteringKey",
    "enhancement",
    "generate_key",
    "iterative_mask",
    "optimal_mask",
    "scattered_amplitude",
    "uniform_coupling",
    "wrap_phase",
    "substream",
    "__version__",
]
