"""pondera: squeezed-light-driven ponderomotive optomechanics simulator.

Propagates input quadrature noise through linearized cavity dynamics to
output covariance matrices and evaluates Gaussian entanglement and
non-Gaussianity metrics over squeezing-angle/strength/frequency sweeps.
"""

__version__ = "0.1.0"

from .params import (  # noqa: F401
    ConfigError,
    DerivedRates,
    MechanicalModeSpec,
    OpticalFieldSpec,
    PhysicalConfig,
    SqueezerSetting,
    config_from_dict,
    config_to_dict,
    derive_rates,
    load_config,
    squeeze_strength,
)
from .dynamics import (  # noqa: F401
    CouplingMatrix,
    NoiseSpectrum,
    UnstableDriftWarning,
    apply_loss,
    beamsplitter_mix,
    build_coupling_matrix,
    decompose_noise_contributions,
    input_noise_spectrum,
    output_covariance,
    response_matrix,
    sideband_squeeze_matrix,
)
from .entanglement import (  # noqa: F401
    EntanglementResult,
    duan_measure,
    entanglement_summary,
    log_negativity,
    symplectic_eigenvalues,
)
from .gaussianity import (  # noqa: F401
    CumulantTensor,
    bch_angle_coefficient,
    delta_difference,
    fourth_cumulant,
    genoni_delta,
    kappa_magnitude,
    sample_homodyne,
)
from .sweeps import (  # noqa: F401
    CompareResult,
    MetricGrid,
    MetricRecord,
    SweepAxis,
    compare_conventional,
    noise_ratio_map,
    sweep_angles,
    sweep_frequency,
    sweep_strength,
)
