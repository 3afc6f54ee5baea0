"""Desk-scale simulation and analysis toolkit for nonlinear depolarization
(NLDP): Kerr-mediated, ASE-driven SOP fluctuations of a cw probe in long
randomly-birefringent fiber links.

Submodules:

- polarization: Jones/Stokes algebra, Haar rotations
- link:         fiber parameters, waveplate chains, repeaters, PMD law
- fields:       probe/loading comb synthesis and sampled envelopes
- ssfm:         coupled-NLS split-step propagation engine
- analytic:     first-order perturbation theory and SOP-speed prediction
- polarimeter:  virtual detection chain, SOP-speed series and histograms
- harness:      comparative scenarios, sweeps, reports, config files
"""

from .polarization import (
    JonesVector,
    StokesVector,
    waveplate_matrix,
    jones_to_stokes,
    dop,
    haar_random_rotation,
)
from .link import (
    FiberParams,
    WaveplateRealization,
    LinkConfig,
    realize_span,
    repeater_gain,
    pmd_decorrelation,
)
from .fields import CombGrid, CombSpectrum, ComplexEnvelope, make_loading, make_probe, comb_to_time, time_to_comb
from .ssfm import PropagationSettings, AliasingError, propagate_span, propagate_link
from .analytic import (
    PerturbationPhasor,
    PolarimeterBand,
    NldpPrediction,
    perturbation_phasor_span,
    coherent_span_sum,
    perturbation_link_sum,
    symmetric_phase_variance,
    nldp_autocorrelation,
    second_moment,
    sop_speed_prediction,
    perturbation_halfwidth,
    rolloff_table,
    analytic_prediction,
)
from .polarimeter import (
    PolarimeterSettings,
    StokesTrace,
    SopSpeedHistogram,
    detect,
    sop_speed_series,
    histogram,
    variance_subtract,
)
from .harness import (
    ScenarioConfig,
    ConfigError,
    fit_linear,
    run_comparative,
    run_distance_sweep,
    run_power_sweep,
    run_analytic,
)

__version__ = "0.1.0"
