"""Probe and loading synthesis as frequency combs, and conversion to/from
sampled complex envelopes.

Tone indexing: a comb tone with index n sits at angular offset n*pitch from
the comb center frequency and contributes A_n * exp(-j*n*pitch*t) to the
envelope (a positive index is a higher optical frequency).  With time
samples t_k = k*T/N over one comb period T = 2*pi/pitch this makes envelope
synthesis exactly ``numpy.fft.fft`` over the tone coefficients and analysis
exactly ``numpy.fft.ifft``, with the usual FFT bin ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polarization import JonesVector

__all__ = [
    "CombGrid",
    "CombSpectrum",
    "ComplexEnvelope",
    "make_loading",
    "make_probe",
    "comb_to_time",
    "time_to_comb",
]


@dataclass(frozen=True)
class CombGrid:
    """Evenly spaced frequency grid: pitch (rad/s), tone index range, and
    the absolute center frequency (Hz) the offsets refer to."""

    pitch: float
    n_min: int
    n_max: int
    center_frequency: float = 193.4e12

    def __post_init__(self):
        if self.pitch <= 0.0:
            raise ValueError("pitch must be positive")
        if self.n_min > self.n_max:
            raise ValueError("tone indices must be ordered")

    @property
    def n_tones(self) -> int:
        return self.n_max - self.n_min + 1

    def indices(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def offsets(self) -> np.ndarray:
        """Angular frequency offset of each tone (rad/s)."""
        return self.indices() * self.pitch


@dataclass
class CombSpectrum:
    """Frequency-domain Jones phasors on a CombGrid; ax/ay in sqrt(W),
    indexed like grid.indices().  gap is the (lo, hi) tone-index range
    (inclusive) whose phasors are exactly zero."""

    grid: CombGrid
    ax: np.ndarray
    ay: np.ndarray
    gap: tuple[int, int] | None = None

    def __post_init__(self):
        n = self.grid.n_tones
        if len(self.ax) != n or len(self.ay) != n:
            raise ValueError("phasor arrays must match the grid")

    @property
    def total_power(self) -> float:
        return float((np.abs(self.ax) ** 2 + np.abs(self.ay) ** 2).sum())

    def tone(self, n: int) -> tuple[complex, complex]:
        if not (self.grid.n_min <= n <= self.grid.n_max):
            raise ValueError(f"tone {n} outside grid")
        i = n - self.grid.n_min
        return complex(self.ax[i]), complex(self.ay[i])

    def copy(self) -> "CombSpectrum":
        return CombSpectrum(self.grid, self.ax.copy(), self.ay.copy(), self.gap)

    def __add__(self, other: "CombSpectrum") -> "CombSpectrum":
        if other.grid != self.grid:
            raise ValueError("combs must share a grid")
        return CombSpectrum(self.grid, self.ax + other.ax, self.ay + other.ay, self.gap or other.gap)


@dataclass
class ComplexEnvelope:
    """Sampled Jones envelope: ex/ey complex arrays (sqrt(W)) at uniform
    sample_period (s), referenced to center_frequency (Hz)."""

    sample_period: float
    ex: np.ndarray
    ey: np.ndarray
    center_frequency: float = 193.4e12

    def __post_init__(self):
        if len(self.ex) != len(self.ey) or len(self.ex) < 2:
            raise ValueError("need ex/ey of equal length >= 2")

    @property
    def n_samples(self) -> int:
        return len(self.ex)

    @property
    def duration(self) -> float:
        return self.n_samples * self.sample_period

    @property
    def mean_power(self) -> float:
        return float((np.abs(self.ex) ** 2 + np.abs(self.ey) ** 2).mean())

    def field(self) -> np.ndarray:
        """(2, N) view-ish array of the two polarizations."""
        return np.stack([self.ex, self.ey])


def make_loading(
    p_rep: float,
    grid: CombGrid,
    gap_center: float,
    gap_width: float,
    seed: int | np.random.SeedSequence,
) -> CombSpectrum:
    """Unpolarized flat-density ASE loading with a spectral gap.

    Tone phasors are i.i.d. circular complex Gaussian per polarization with
    variance P_rep*pitch / (4*(Omega_max - Omega_min)), where Omega_max is
    the band edge and Omega_min the gap edge (both measured from the gap
    center); tones inside the gap are exactly zero.  Deterministic per seed.
    """
    if p_rep <= 0.0:
        raise ValueError("p_rep must be positive")
    w = grid.pitch
    center_off = 2.0 * np.pi * (gap_center - grid.center_frequency)
    offs = grid.offsets() - center_off
    omega_max = float(np.abs(offs).max()) + w / 2.0
    omega_min = gap_width / 2.0
    if omega_min >= omega_max:
        raise ValueError("gap is wider than the loading band")

    var_pol = p_rep * w / (4.0 * (omega_max - omega_min))
    rng = np.random.default_rng(seed)
    n = grid.n_tones
    scale = np.sqrt(var_pol / 2.0)
    ax = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    ay = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))

    in_gap = np.abs(offs) < omega_min
    ax[in_gap] = 0.0
    ay[in_gap] = 0.0
    idx = grid.indices()[in_gap]
    gap = (int(idx.min()), int(idx.max())) if len(idx) else None
    return CombSpectrum(grid, ax, ay, gap)


def make_probe(power: float, frequency: float, sop: JonesVector, grid: CombGrid,
               gap: tuple[int, int] | None = None) -> CombSpectrum:
    """Single polarized cw tone of the given power and SOP.

    ``frequency`` is absolute (Hz) and must land on a grid tone; when a gap
    range is given the tone must be spectrally isolated inside it.
    """
    if power <= 0.0:
        raise ValueError("probe power must be positive")
    off = 2.0 * np.pi * (frequency - grid.center_frequency)
    n_float = off / grid.pitch
    n = int(round(n_float))
    if abs(n_float - n) > 1e-6:
        raise ValueError("probe frequency does not sit on the comb grid")
    if not (grid.n_min <= n <= grid.n_max):
        raise ValueError("probe frequency outside the grid")
    if gap is not None and not (gap[0] <= n <= gap[1]):
        raise ValueError("probe frequency must lie inside the loading gap")
    u = sop.normalized()
    amp = np.sqrt(power)
    ax = np.zeros(grid.n_tones, dtype=complex)
    ay = np.zeros(grid.n_tones, dtype=complex)
    ax[n - grid.n_min] = amp * u.ex
    ay[n - grid.n_min] = amp * u.ey
    return CombSpectrum(grid, ax, ay, gap)


def _n_samples_for(grid: CombGrid, periods: int, occupancy_limit: float = 0.8) -> int:
    n_abs = max(abs(grid.n_min), abs(grid.n_max))
    need = int(np.ceil((2 * n_abs + 2) / occupancy_limit)) * periods
    return 1 << int(np.ceil(np.log2(need)))


def comb_to_time(comb: CombSpectrum, duration: float, n_samples: int | None = None) -> ComplexEnvelope:
    """Synthesize the comb into a sampled envelope over ``duration``.

    duration must be an integer number of comb periods 2*pi/pitch.  The
    sample count defaults to the next power of two keeping all tones below
    80% of Nyquist.  Time-average power equals the comb's total tone power
    (Parseval).
    """
    w = comb.grid.pitch
    periods_f = duration * w / (2.0 * np.pi)
    periods = int(round(periods_f))
    if periods < 1 or abs(periods_f - periods) > 1e-9 * max(periods, 1):
        raise ValueError("duration must be a positive integer number of comb periods")
    if n_samples is None:
        n_samples = _n_samples_for(comb.grid, periods)
    coeff = np.zeros((2, n_samples), dtype=complex)
    bins = (comb.grid.indices() * periods) % n_samples
    coeff[0, bins] = comb.ax
    coeff[1, bins] = comb.ay
    e = np.fft.fft(coeff, axis=1)
    dt = duration / n_samples
    return ComplexEnvelope(dt, e[0], e[1], comb.grid.center_frequency)


def time_to_comb(env: ComplexEnvelope, grid: CombGrid) -> CombSpectrum:
    """Project a periodic envelope back onto comb tone phasors."""
    n_samples = env.n_samples
    periods_f = env.duration * grid.pitch / (2.0 * np.pi)
    periods = int(round(periods_f))
    if abs(periods_f - periods) > 1e-9 * max(periods, 1):
        raise ValueError("envelope duration is not commensurate with the grid")
    spec = np.fft.ifft(np.stack([env.ex, env.ey]), axis=1)
    bins = (grid.indices() * periods) % n_samples
    return CombSpectrum(grid, spec[0, bins].copy(), spec[1, bins].copy())
