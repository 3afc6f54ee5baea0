"""Virtual polarimeter and SOP-speed post-processing.

Detection chain: optical filter selecting the probe, ideal Stokes detector
currents at the sampling period, additive signal-ASE beat noise set by the
OSNR, first-order electrical low-pass, midtread quantization, then
normalization of the reduced Stokes vector.  Post-processing turns traces
into SOP-speed series, fixed-width histograms, and comparative variance
differences.

Beat-noise model (the dominant detection artifact; ASE-ASE and thermal
noise neglected): with per-polarization ASE density rho derived from the
OSNR in the 12.5 GHz reference bandwidth, each raw Stokes channel receives
independent zero-mean Gaussian noise of variance 4 * P_sig * rho * B_n per
sample, where B_n = min(1/(2*tau_s), optical filter FWHM) is the noise
bandwidth entering the sampler.  The electrical low-pass then shapes it.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .fields import ComplexEnvelope

__all__ = [
    "PolarimeterSettings",
    "StokesTrace",
    "SopSpeedHistogram",
    "detect",
    "sop_speed_series",
    "histogram",
    "variance_subtract",
    "NldpVariance",
    "write_trace",
    "read_trace",
    "write_histogram_csv",
    "read_histogram_csv",
]

OSNR_REF_BANDWIDTH = 12.5e9  # Hz, 0.1 nm at 1550 nm
HISTOGRAM_BINS = 1024
TRACE_MAGIC = b"SOPT"
TRACE_VERSION = 1


@dataclass(frozen=True)
class PolarimeterSettings:
    """Detection parameters; defaults mirror a commercial high-speed
    polarimeter: 10 ns sampling, 14 bit, 30 MHz electrical cutoff, 27 GHz
    optical pre-filter."""

    sample_period: float = 10e-9
    adc_bits: int = 14
    electrical_cutoff: float = 2.0 * np.pi * 30e6
    optical_filter_fwhm: float = 27e9
    osnr_db: float = 30.0

    def __post_init__(self):
        if self.sample_period <= 0.0:
            raise ValueError("sample_period must be positive")
        if not (8 <= self.adc_bits <= 24):
            raise ValueError("adc_bits must be within 8..24")
        if self.electrical_cutoff <= 0.0 or self.optical_filter_fwhm <= 0.0:
            raise ValueError("bandwidths must be positive")


@dataclass
class StokesTrace:
    """Normalized Stokes samples at uniform spacing plus run metadata."""

    sample_period: float
    samples: np.ndarray  # (n, 4): s0 (=1 after normalization), s1, s2, s3
    seed: int = 0
    scenario: str = ""
    clipped: bool = False

    @property
    def n_samples(self) -> int:
        return len(self.samples)


@dataclass
class SopSpeedHistogram:
    """Fixed-width SOP-speed histogram with raw-value moments.

    Bins are left-closed right-open [k*w, (k+1)*w); values at or beyond the
    top edge are clamped into the last bin and counted in ``overflow``.
    mean/variance come from the raw series, not bin centers.
    """

    bin_width: float = 48.82e3
    bins: np.ndarray = field(default_factory=lambda: np.zeros(HISTOGRAM_BINS, dtype=np.int64))
    n_samples: int = 0
    mean: float = 0.0
    variance: float = 0.0
    overflow: int = 0


def _optical_filter(env: ComplexEnvelope, fwhm: float) -> np.ndarray:
    """Gaussian power-FWHM filter centered on the envelope's reference
    frequency; returns the (2, n) filtered field."""
    e = env.field()
    n = env.n_samples
    f = np.fft.fftfreq(n, d=env.sample_period)
    h = np.exp(-2.0 * np.log(2.0) * (f / fwhm) ** 2)  # amplitude response
    return np.fft.fft(np.fft.ifft(e, axis=1) * h, axis=1)


def _raw_stokes(e: np.ndarray) -> np.ndarray:
    """(n, 4) Stokes parameters of a (2, n) Jones field."""
    px = np.abs(e[0]) ** 2
    py = np.abs(e[1]) ** 2
    cross = np.conj(e[0]) * e[1]
    return np.stack([px + py, px - py, 2.0 * cross.real, 2.0 * cross.imag], axis=1)


def detect(
    env: ComplexEnvelope,
    settings: PolarimeterSettings,
    seed: int | np.random.SeedSequence,
    repeats: int = 1,
    quantize: bool = True,
    scenario: str = "",
) -> StokesTrace:
    """Run the detection chain on an envelope and return a Stokes trace.

    ``repeats`` tiles the (periodic) envelope that many times with fresh
    noise, extending the trace without recomputing the propagation.
    """
    if env.duration < 2.0 * settings.sample_period and repeats == 1:
        raise ValueError("envelope must cover at least two sampling periods")

    filtered = _optical_filter(env, settings.optical_filter_fwhm)
    stride = max(1, int(round(settings.sample_period / env.sample_period)))
    tau_s = stride * env.sample_period
    raw = _raw_stokes(filtered[:, ::stride])
    if repeats > 1:
        raw = np.tile(raw, (repeats, 1))
    n = len(raw)

    rng = np.random.default_rng(seed)
    p_sig = float(raw[:, 0].mean())
    osnr_lin = 10.0 ** (settings.osnr_db / 10.0)
    rho = p_sig / osnr_lin / (2.0 * OSNR_REF_BANDWIDTH)
    b_noise = min(0.5 / tau_s, settings.optical_filter_fwhm)
    sigma = np.sqrt(4.0 * p_sig * rho * b_noise)
    noisy = raw + sigma * rng.standard_normal((n, 4))

    clipped = bool((noisy[:, 0] <= 0.0).any())

    # first-order RC low-pass, exact discretization, seeded at the first sample
    a = 1.0 - np.exp(-settings.electrical_cutoff * tau_s)
    zi = (1.0 - a) * noisy[0]
    lp, _ = lfilter([a], [1.0, -(1.0 - a)], noisy, axis=0, zi=zi[None, :])

    if quantize:
        full_scale = 2.0 * p_sig
        lsb = 2.0 * full_scale / (1 << settings.adc_bits)
        lp = np.clip(np.round(lp / lsb), -(1 << (settings.adc_bits - 1)), (1 << (settings.adc_bits - 1)) - 1) * lsb

    # drop the low-pass warm-up, then normalize the reduced vectors
    skip = min(n // 4, int(np.ceil(3.0 / (settings.electrical_cutoff * tau_s))))
    lp = lp[skip:]
    red = lp[:, 1:]
    norms = np.linalg.norm(red, axis=1)
    norms[norms == 0.0] = 1.0
    out = np.empty((len(lp), 4))
    out[:, 0] = 1.0
    out[:, 1:] = red / norms[:, None]
    seed_id = seed if isinstance(seed, int) else 0
    return StokesTrace(tau_s, out, seed=seed_id, scenario=scenario, clipped=clipped)


def sop_speed_series(trace: StokesTrace) -> np.ndarray:
    """|dS|/tau_s between consecutive normalized Stokes samples (rad/s)."""
    if trace.n_samples < 2:
        raise ValueError("need at least two samples")
    d = np.diff(trace.samples[:, 1:], axis=0)
    return np.linalg.norm(d, axis=1) / trace.sample_period


def histogram(series: np.ndarray, bin_width: float = 48.82e3) -> SopSpeedHistogram:
    """Accumulate a speed series into the fixed 1024-bin layout."""
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        raise ValueError("empty speed series")
    if bin_width <= 0.0:
        raise ValueError("bin_width must be positive")
    idx = np.floor(series / bin_width).astype(np.int64)
    overflow = int((idx >= HISTOGRAM_BINS).sum())
    idx = np.clip(idx, 0, HISTOGRAM_BINS - 1)
    bins = np.bincount(idx, minlength=HISTOGRAM_BINS).astype(np.int64)
    return SopSpeedHistogram(
        bin_width=bin_width,
        bins=bins,
        n_samples=int(series.size),
        mean=float(series.mean()),
        variance=float(series.var()),
        overflow=overflow,
    )


@dataclass(frozen=True)
class NldpVariance:
    """Comparative variance difference; below_floor flags a negative
    difference (reference exceeded probe within statistical error)."""

    value: float
    below_floor: bool


def variance_subtract(probe, reference) -> NldpVariance:
    """sigma^2_probe - sigma^2_reference from histograms or plain values.

    Histogram inputs must share the bin width; the caller is responsible
    for matched sampling periods when passing bare variances.
    """

    def pick(x) -> float:
        if isinstance(x, SopSpeedHistogram):
            return x.variance
        return float(x)

    if isinstance(probe, SopSpeedHistogram) and isinstance(reference, SopSpeedHistogram):
        if probe.bin_width != reference.bin_width:
            raise ValueError("histogram bin widths differ")
    diff = pick(probe) - pick(reference)
    return NldpVariance(diff, diff < 0.0)


# ---------------------------------------------------------------------------
# file formats

def write_trace(trace: StokesTrace, path) -> None:
    """Binary trace: magic 'SOPT', version u32, tau_s f64, count u64,
    then count x 4 f64 little-endian Stokes rows."""
    with open(path, "wb") as fh:
        fh.write(TRACE_MAGIC)
        fh.write(struct.pack("<I", TRACE_VERSION))
        fh.write(struct.pack("<d", trace.sample_period))
        fh.write(struct.pack("<Q", trace.n_samples))
        fh.write(trace.samples.astype("<f8").tobytes())


def read_trace(path) -> StokesTrace:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != TRACE_MAGIC:
            raise ValueError(f"not a Stokes trace file (magic {magic!r})")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != TRACE_VERSION:
            raise ValueError(f"unsupported trace version {version}")
        (tau_s,) = struct.unpack("<d", fh.read(8))
        (count,) = struct.unpack("<Q", fh.read(8))
        data = np.frombuffer(fh.read(count * 4 * 8), dtype="<f8").reshape(count, 4)
    return StokesTrace(tau_s, data.copy())


def write_histogram_csv(hist: SopSpeedHistogram, path) -> None:
    """CSV rows bin_index,lower_edge_rad_s,count plus trailing comment
    lines carrying the raw-value moments."""
    buf = io.StringIO()
    buf.write("bin_index,lower_edge_rad_s,count\n")
    for i in range(HISTOGRAM_BINS):
        buf.write(f"{i},{i * hist.bin_width!r},{hist.bins[i]}\n")
    buf.write(f"# mean={hist.mean!r}\n")
    buf.write(f"# variance={hist.variance!r}\n")
    buf.write(f"# overflow={hist.overflow}\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def read_histogram_csv(path) -> SopSpeedHistogram:
    bins = np.zeros(HISTOGRAM_BINS, dtype=np.int64)
    mean = variance = 0.0
    overflow = 0
    bin_width = None
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("bin_index"):
            raise ValueError("not a histogram CSV")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                if key == "mean":
                    mean = float(val)
                elif key == "variance":
                    variance = float(val)
                elif key == "overflow":
                    overflow = int(val)
                continue
            i_s, edge_s, count_s = line.split(",")
            i = int(i_s)
            bins[i] = int(count_s)
            if i == 1:
                bin_width = float(edge_s)
    if bin_width is None:
        raise ValueError("histogram CSV missing bins")
    return SopSpeedHistogram(
        bin_width=bin_width,
        bins=bins,
        n_samples=int(bins.sum()),
        mean=mean,
        variance=variance,
        overflow=overflow,
    )
