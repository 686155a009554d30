"""Simulation of the spin-orbit Bell-inequality experiment on a classical laser beam."""

from .analysis import (
    BellResult,
    BellSettings,
    analyze_raw_table,
    bell_s,
    bell_s_state,
    chi_ramp_trace,
    closed_form_s,
    correlation_m,
    sample_separable_bound,
)
from .core import (
    MeasurementSetting,
    RotatedExpansion,
    SeparableSpec,
    SpinOrbitState,
    concurrence,
    expand_rotated,
    inner,
    make_mns,
    make_separable,
    normalize,
)
from .optics import (
    DetectorRecord,
    OpticalOperator,
    PhaseConfig,
    analysis_amplitudes,
    dove_prism,
    half_wave_plate,
    measure_intensities,
    mzim_split,
    prepare_mns,
    simulate,
)
from .quantum import (
    FockExpansion,
    PostSelectedState,
    coherent_mns,
    post_select_single_photon,
    quantum_chsh,
    verify_factorization,
)

__version__ = "0.1.0"
