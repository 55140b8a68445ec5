"""Frequency-entangled qudit generation via spectrally resolved HOM interference.

A numpy toolkit that assembles engineered down-conversion joint spectral
amplitudes, computes Hong-Ou-Mandel coincidence observables and correlated
spectral intensities, simulates a dispersive-fiber single-photon
spectrometer, and extracts comb/qudit metrics.
"""

__version__ = "0.1.0"

from .core import (
    C_NM_THZ,
    C_UM_PS,
    C_MM_PS,
    DomainError,
    FreqGrid1D,
    Grid2D,
    QcombError,
    ResolutionError,
    SolverError,
    ValidationError,
    delay_position_to_time,
    delay_time_to_position,
    frequency_to_wavelength,
    integrate_1d,
    integrate_2d,
    wavelength_to_frequency,
)
from .dispersion import (
    CrystalSpec,
    SellmeierModel,
    TaylorDispersion,
    group_velocity_mismatch,
    inv_group_velocity,
    load_sellmeier_file,
    phase_mismatch,
    poling_period_closed_form,
    refractive_index,
    shipped_ppslt_model,
    solve_poling_period,
)
from .biphoton import (
    FilterSpec,
    JsaGrid,
    MarginalSpectrum,
    PumpSpec,
    assemble_jsa,
    calibrate_apodization,
    calibrate_lpf_cuton,
    load_filter_table,
    marginal_spectrum,
    phase_matching_amplitude,
    pump_envelope,
)
from .interference import (
    CsiGrid,
    DipMetrics,
    DipScan,
    PeakSet,
    QuditDecomposition,
    ToaSpectrum,
    coincidence_probability,
    comb_contrast,
    csi,
    dip_scan,
    double_slit_identity,
    extract_qudit,
    find_peaks,
    interference_amplitude,
    marginal_toa,
)
from .spectrometer import (
    DetectorSpec,
    DispersionMap,
    EventBatch,
    Histogram1D,
    Histogram2D,
    fiber_map,
    freq_to_arrival_time,
    invert_time_to_freq,
    reconstruct_csi_histogram,
    relative_l2,
    sample_pairs,
    simulate_events,
    toa_histogram,
)
from .config import RunConfig, default_config, load_config, no_lpf_variant
