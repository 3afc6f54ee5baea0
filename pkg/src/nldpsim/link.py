"""Physical link description: fiber parameters, random waveplate chains,
repeater behavior and loop topology.

A span is modeled as a concatenation of birefringent waveplates with lengths
drawn uniformly from 10..100 m, uniformly random axis angles, and Gaussian
retardations.  Each plate's retardation carries a linear frequency
dependence, zeta(Omega) = zeta0 * (1 + Omega/omega_c), so the plate's
differential group delay is 2*zeta0/omega_c and chromatic walk-off between
widely spaced tones decorrelates their output SOPs.

The per-plate retardation variance is calibrated so a chain of length L has
mean-square DGD <tau^2> = 1.5 * tau_p^2 * L.  With that calibration the
ensemble SOP correlation between two tones spaced dOmega apart reproduces
0.5*exp(-0.5 * dOmega^2 * tau_p^2 * L), the decorrelation law the analytic
module relies on.  (The resulting mean DGD is sqrt(8/(3*pi)*1.5) ~ 1.13
times tau_p*sqrt(L).)
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "FiberParams",
    "WaveplateRealization",
    "LinkConfig",
    "realize_span",
    "repeater_gain",
    "pmd_decorrelation",
    "chain_jones_matrix",
    "chain_dgd",
]

PLATE_MIN_M = 10.0
PLATE_MAX_M = 100.0

# <tau^2> of a chain = DGD_CALIBRATION * tau_p^2 * L; see module docstring.
DGD_CALIBRATION = 1.5


def db_per_km_to_inv_m(a_db_km: float) -> float:
    return a_db_km * np.log(10.0) / 10.0 / 1e3


@dataclass(frozen=True)
class FiberParams:
    """Scalar fiber parameters in SI units.

    alpha: attenuation (1/m); beta2: GVD (s^2/m, may be negative);
    gamma: Kerr coefficient (1/(W*m)); tau_p: mean DGD per sqrt(length)
    (s/sqrt(m)); beta1: common group delay (s/m, zero in the retarded frame).
    """

    alpha: float
    beta2: float
    gamma: float
    tau_p: float
    beta1: float = 0.0

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        if self.gamma < 0.0:
            raise ValueError("gamma must be non-negative")
        if self.tau_p < 0.0:
            raise ValueError("tau_p must be non-negative")

    @property
    def abs_beta2(self) -> float:
        return abs(self.beta2)


@dataclass(frozen=True)
class WaveplateRealization:
    """One span's waveplate chain.

    Arrays are per plate: length (m), center position (m), axis angle xi
    (rad), retardation zeta0 (rad) and its frequency slope d(zeta)/dOmega
    (s).  Lengths sum to the span length exactly; the last plate may be
    shorter than the 10 m draw minimum because it is truncated.
    """

    lengths: np.ndarray
    centers: np.ndarray
    xi: np.ndarray
    zeta0: np.ndarray
    zeta_slope: np.ndarray

    @property
    def n_plates(self) -> int:
        return len(self.lengths)

    @property
    def span_length(self) -> float:
        return float(self.lengths.sum())


def realize_span(
    params: FiberParams,
    span_length: float,
    seed: int | np.random.SeedSequence,
    center_frequency: float = 193.4e12,
) -> WaveplateRealization:
    """Draw one span's random waveplate chain.

    Plate lengths are uniform in [10, 100] m (the last plate is truncated so
    the lengths sum to ``span_length`` exactly), axis angles are uniform in
    [0, 2*pi), and retardations are zero-mean Gaussian with per-plate
    variance DGD_CALIBRATION/4 * (tau_p * omega_c)^2 * dz.
    """
    if span_length < 100.0:
        raise ValueError("span_length must be at least 100 m")
    rng = np.random.default_rng(seed)
    omega_c = 2.0 * np.pi * center_frequency

    # Draw a few more plates than the expected count, then truncate.
    n_guess = int(span_length / PLATE_MIN_M) + 2
    draws = rng.uniform(PLATE_MIN_M, PLATE_MAX_M, size=n_guess)
    cum = np.cumsum(draws)
    n_full = int(np.searchsorted(cum, span_length))
    lengths = draws[: n_full + 1].copy()
    lengths[n_full] = span_length - (cum[n_full - 1] if n_full > 0 else 0.0)
    if lengths[-1] <= 0.0:
        lengths = lengths[:-1]
    centers = np.cumsum(lengths) - lengths / 2.0

    n = len(lengths)
    xi = rng.uniform(0.0, 2.0 * np.pi, size=n)
    zeta_std = np.sqrt(DGD_CALIBRATION / 4.0) * params.tau_p * omega_c * np.sqrt(lengths)
    zeta0 = rng.standard_normal(n) * zeta_std
    zeta_slope = zeta0 / omega_c
    return WaveplateRealization(lengths, centers, xi, zeta0, zeta_slope)


def chain_jones_matrix(span: WaveplateRealization, omega: float = 0.0) -> np.ndarray:
    """Jones matrix of the full chain at angular frequency offset ``omega``."""
    from ._kernels import chain_jones_eval

    return chain_jones_eval(span.xi, span.zeta0, span.zeta_slope, np.array([omega]))[0]


def chain_dgd(span: WaveplateRealization, omega: float = 0.0, d_omega: float = 2 * np.pi * 1e9) -> float:
    """DGD of a chain from the frequency-differentiated Jones product.

    Eigen-splitting of M(omega + d)) M(omega)^H gives the group-delay
    difference of the principal states.
    """
    m1 = chain_jones_matrix(span, omega)
    m2 = chain_jones_matrix(span, omega + d_omega)
    t = m2 @ m1.conj().T
    ev = np.linalg.eigvals(t)
    dphi = np.angle(ev[0] / ev[1])
    return abs(dphi) / d_omega


def repeater_gain(field_power_in: float, target_power: float) -> float:
    """Flat power gain restoring the target launch power."""
    if field_power_in <= 0.0:
        raise ValueError("input power must be positive")
    if target_power <= 0.0:
        raise ValueError("target power must be positive")
    return target_power / field_power_in


def pmd_decorrelation(delta_omega: float, tau_p: float, delta_l: float) -> float:
    """SOP correlation between two tones spaced ``delta_omega`` apart after
    co-propagating over ``delta_l`` of fiber with PMD parameter ``tau_p``.

    Returns 0.5 * exp(-0.5 * delta_omega^2 * tau_p^2 * delta_l); the 1/2 is
    the isotropic-ensemble projection value at zero spacing.
    """
    if delta_l < 0.0:
        raise ValueError("delta_l must be non-negative")
    return 0.5 * float(np.exp(-0.5 * delta_omega**2 * tau_p**2 * delta_l))


@dataclass(frozen=True)
class LinkConfig:
    """Link and launch description.

    n_spans counts spans per loop circulation; band edges are the angular
    offsets of the nearest (omega_min) and farthest (omega_max) loading tone
    from the probe.  gap_width is the full width of the ASE-free gap around
    the probe.  Powers in W, frequencies in Hz, angular frequencies rad/s.
    """

    n_spans: int
    span_length: float
    p_rep: float
    omega_min: float
    omega_max: float
    probe_power: float
    probe_frequency: float
    gap_width: float
    seed: int = 0
    kicker_enabled: bool = True
    repeater_ase_enabled: bool = False
    ase_noise_figure_db: float = 5.0
    center_frequency: float = 193.4e12
    # one-sided repeater passband (rad/s); spectral content beyond it is
    # removed at every repeater, the way real amplifier chains confine the
    # loading.  None leaves the spectrum untouched.
    repeater_bandwidth: float | None = None

    def __post_init__(self):
        if self.n_spans < 1:
            raise ValueError("n_spans must be at least 1")
        if not (0.0 < self.omega_min < self.omega_max):
            raise ValueError("need 0 < omega_min < omega_max")
        if self.p_rep <= 0.0 or self.probe_power <= 0.0:
            raise ValueError("powers must be positive")

    @property
    def link_length(self) -> float:
        return self.n_spans * self.span_length

    def with_total_spans(self, n_spans_total: int) -> "LinkConfig":
        """Copy of this config with n_spans set to a total span count
        (used when handing a multi-circulation link to the analytic layer)."""
        return replace(self, n_spans=n_spans_total)

    def ase_density_per_gain(self) -> float:
        """Repeater ASE spectral density (W/Hz per polarization) per unit
        gain; the density added by a repeater is this times its gain, which
        is independent of the target output power (constant-gain behavior).
        """
        h = 6.62607015e-34
        nf_lin = 10.0 ** (self.ase_noise_figure_db / 10.0)
        return 0.5 * nf_lin * h * self.center_frequency
