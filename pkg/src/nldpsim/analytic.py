"""Closed-form theory of nonlinear depolarization.

First-order perturbation of a weak cw probe by the Kerr beat of loading-tone
pairs: a pair spaced l*pitch around mean index m drives a perturbation tone
at offset l*pitch whose asymptotic amplitude carries the phase-mismatch
denominator (j*beta2*m*l*pitch^2 - alpha).  The symmetric branch (common to
both polarizations, weight 4/3) is pure phase noise; the antisymmetric
branch (weight 2/3, opposite sign on the two principal axes) moves the SOP
and is what the polarimeter resolves.

Multi-span links add perturbations coherently with the chromatic-dispersion
phase per span, while PMD progressively misaligns the beating pair relative
to the probe; the resulting autocorrelation combines a per-span generation
Lorentzian, a span-sum Lorentzian whose width is set by the PMD
decorrelation rate, and the polarimeter's first-order electrical low-pass.
The mean-square SOP speed follows from the tau^2 coefficient of the
autocorrelation decay, summed over the flat loading band.

All variances returned here are normalized to unit probe launch power.
beta2 enters phase factors with its physical sign and all variance/speed
formulas through its magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .fields import CombSpectrum
from .link import FiberParams, LinkConfig

__all__ = [
    "PerturbationPhasor",
    "PolarimeterBand",
    "NldpPrediction",
    "RolloffTable",
    "perturbation_phasor_span",
    "coherent_span_sum",
    "perturbation_link_sum",
    "symmetric_phase_variance",
    "nldp_autocorrelation",
    "second_moment",
    "sop_speed_prediction",
    "perturbation_halfwidth",
    "rolloff_table",
    "analytic_prediction",
]

# Ratio of mean-square SOP speed to the field-normalized second moment of
# the perturbation autocorrelation, after Poincare-sphere averaging.  Fixed
# so the closed-form speed formula carries its conventional 20/27 constant.
_STOKES_FACTOR = 10.0 / 3.0


@dataclass(frozen=True)
class PerturbationPhasor:
    """One (l, m) perturbation tone, launch-referenced.

    value_x/value_y exclude the common carrier exp(-alpha*z/2 + j*(k_l*z -
    l*pitch*t)); multiply by it to place the phasor at a span output.
    l and m are in units of the comb pitch; m may be half-integral.
    """

    l: int
    m: float
    value_x: complex
    value_y: complex

    @property
    def power(self) -> float:
        return abs(self.value_x) ** 2 + abs(self.value_y) ** 2


@dataclass(frozen=True)
class PolarimeterBand:
    """Electrical detection band: first-order low-pass 3-dB cutoff (rad/s)."""

    omega_e: float

    def __post_init__(self):
        if self.omega_e <= 0.0:
            raise ValueError("omega_e must be positive")


def _probe_index(comb: CombSpectrum, probe_index: int | None) -> int:
    if probe_index is not None:
        return probe_index
    if comb.gap is None:
        raise ValueError("cannot locate the probe without a gap or explicit index")
    lo, hi = comb.gap
    idx = comb.grid.indices()
    sel = (idx >= lo) & (idx <= hi)
    power = np.abs(comb.ax) ** 2 + np.abs(comb.ay) ** 2
    sub = np.where(sel)[0]
    if not len(sub) or power[sub].max() == 0.0:
        raise ValueError("no probe tone found inside the gap")
    return int(idx[sub[np.argmax(power[sub])]])


def perturbation_phasor_span(
    comb: CombSpectrum,
    l: int,
    m: float,
    params: FiberParams,
    probe_index: int | None = None,
) -> tuple[PerturbationPhasor, PerturbationPhasor]:
    """Asymptotic single-span phasors of both perturbation branches.

    The loading-pair beats are A_sum = Ax+*conj(Ax-) + Ay+*conj(Ay-) for the
    symmetric branch and A_diff = Ax+*conj(Ax-) - Ay+*conj(Ay-) for the
    antisymmetric one (the polarization-difference beat is what drives the
    sign-split term; both have identical second moments for unpolarized
    loading).  Returns (symmetric, antisymmetric); the antisymmetric branch
    acts as diag(1, -1) on the probe Jones vector.
    """
    if l == 0:
        raise ValueError("perturbation offset l must be nonzero")
    two_m = 2.0 * m
    if abs(two_m - round(two_m)) > 1e-9:
        raise ValueError("m must be integral or half-integral")
    if (round(two_m) + l) % 2 != 0:
        raise ValueError("tones m +/- l/2 do not land on the comb grid")
    n_hi = int(round(m + l / 2.0))
    n_lo = int(round(m - l / 2.0))
    ax_hi, ay_hi = comb.tone(n_hi)
    ax_lo, ay_lo = comb.tone(n_lo)

    p = _probe_index(comb, probe_index)
    a0x, a0y = comb.tone(p)
    # m, l are offsets relative to the probe tone
    m_rel = m - p

    beat_x = ax_hi * np.conj(ax_lo)
    beat_y = ay_hi * np.conj(ay_lo)
    w = comb.grid.pitch
    denom = 1j * params.beta2 * m_rel * l * w * w - params.alpha
    base = -1j * params.gamma / denom
    sym = PerturbationPhasor(
        l, m, (4.0 / 3.0) * base * (beat_x + beat_y) * a0x, (4.0 / 3.0) * base * (beat_x + beat_y) * a0y
    )
    anti = PerturbationPhasor(
        l, m, (2.0 / 3.0) * base * (beat_x - beat_y) * a0x, -(2.0 / 3.0) * base * (beat_x - beat_y) * a0y
    )
    return sym, anti


def coherent_span_sum(l: float, m: float, pitch: float, params: FiberParams,
                      span_length: float, n_spans: int) -> complex:
    """Sum over spans of the chromatic-dispersion phase advance of the
    beating pair, exp(j*beta2*l*m*pitch^2*L0*n) for n = 1..N_s."""
    theta = params.beta2 * l * m * pitch * pitch * span_length
    n = np.arange(1, n_spans + 1)
    return complex(np.exp(1j * theta * n).sum())


def perturbation_link_sum(
    phasor: PerturbationPhasor, link: LinkConfig, params: FiberParams, pitch: float
) -> PerturbationPhasor:
    """Scale a single-span phasor by the coherent multi-span sum."""
    f = coherent_span_sum(phasor.l, phasor.m, pitch, params, link.span_length, link.n_spans)
    return PerturbationPhasor(phasor.l, phasor.m, phasor.value_x * f, phasor.value_y * f)


def symmetric_phase_variance(link: LinkConfig, params: FiberParams) -> float:
    """Variance of the symmetric-branch perturbation for a flat loading
    spectrum, normalized to unit probe launch power.

    (8/9)*pi*(gamma/alpha)^2*exp(-alpha*L0)/(|beta2|*L0) * N_s
    * (P_rep/(Omega_max-Omega_min))^2 * ln(Omega_max/Omega_min);
    exactly linear in N_s and quadratic in P_rep.
    """
    if link.omega_min <= 0.0:
        raise ValueError("omega_min must be positive (log divergence)")
    g_over_a = params.gamma / params.alpha
    dens = link.p_rep / (link.omega_max - link.omega_min)
    return (
        (8.0 / 9.0)
        * np.pi
        * g_over_a**2
        * np.exp(-params.alpha * link.span_length)
        / (params.abs_beta2 * link.span_length)
        * link.n_spans
        * dens**2
        * np.log(link.omega_max / link.omega_min)
    )


def _span_sum_width(omega_m: float, params: FiberParams, link: LinkConfig) -> float:
    """Inverse coherence number s = 0.5*(m*w)^2*tau_p^2*L0 + 2/N_s."""
    return 0.5 * omega_m**2 * params.tau_p**2 * link.span_length + 2.0 / link.n_spans


def _lorentz_scales(omega_m: float, params: FiberParams, link: LinkConfig) -> tuple[float, float]:
    """Half-widths (rad/s) in the perturbation-offset variable: generation
    Lorentzian A = alpha/(|beta2|*Omega_m) and span-sum Lorentzian
    B = s/(|beta2|*Omega_m*L0)."""
    s = _span_sum_width(omega_m, params, link)
    b2om = params.abs_beta2 * omega_m
    return params.alpha / b2om, s / (b2om * link.span_length)


def _offset_integral(a: float, b: float, c: float, tau: float, kind: str) -> float:
    """Integral over the perturbation offset of the triple-Lorentzian
    profile with half-widths a (generation), b (span sum), c (electrical),
    weighted by cos(x*tau) ('cos') or 1-cos(x*tau) ('one_minus_cos')."""

    def lor(x):
        return 1.0 / ((1.0 + (x / a) ** 2) * (1.0 + (x / b) ** 2) * (1.0 + (x / c) ** 2))

    if kind == "cos":
        f = (lambda x: lor(x)) if tau == 0.0 else (lambda x: lor(x) * np.cos(x * tau))
    elif kind == "one_minus_cos":
        f = lambda x: lor(x) * 2.0 * np.sin(0.5 * x * tau) ** 2
    else:
        raise ValueError(kind)

    upper = 200.0 * min(a, b, c) + 20.0 * max(min(a, b), min(b, c), min(a, c))
    pts = sorted({a, b, c, min(a, b, c)})
    val, _ = quad(f, 0.0, upper, points=pts, limit=400, epsabs=0.0, epsrel=1e-9)
    return 2.0 * val  # both signs of the offset


def _band_integral(link: LinkConfig, params: FiberParams, inner) -> float:
    """Integral of ``inner(omega_m)`` over the loading band (both sides),
    log-spaced for the decade-wide band."""

    def g(u):
        om = np.exp(u)
        return inner(om) * om

    val, _ = quad(g, np.log(link.omega_min), np.log(link.omega_max), limit=400, epsabs=0.0, epsrel=1e-9)
    return 2.0 * val


def _grid_band_sum(link: LinkConfig, params: FiberParams, grid, inner) -> float:
    """Discrete counterpart of :func:`_band_integral` on actual comb tones."""
    offs = grid.offsets()
    sel = (np.abs(offs) >= link.omega_min) & (np.abs(offs) <= link.omega_max)
    return float(sum(inner(abs(om)) for om in offs[sel]) * grid.pitch)


def _autocorr_prefactor(link: LinkConfig, params: FiberParams) -> float:
    dens = link.p_rep / (link.omega_max - link.omega_min)
    return (
        params.gamma**2
        * np.exp(-params.alpha * link.span_length)
        / (9.0 * params.alpha**2)
        * dens**2
    )


def nldp_autocorrelation(
    link: LinkConfig,
    params: FiberParams,
    band: PolarimeterBand,
    tau: float,
    grid=None,
) -> float:
    """Autocorrelation sigma^2_NLDP(L_e, tau) of the antisymmetric
    perturbation in the electrical domain, normalized to unit probe power.

    Per loading offset Omega_m the perturbation-offset profile is the
    product of the generation and span-sum Lorentzians and the electrical
    low-pass; the span sum contributes N_s/s with the PMD decorrelation
    rate s.  The offset integral is truncated when the tail is below 1e-6
    of the running total (handled by the quadrature's relative tolerance).
    """
    if tau < 0.0:
        raise ValueError("tau must be non-negative")

    def inner(om_m: float) -> float:
        a, b = _lorentz_scales(om_m, params, link)
        s = _span_sum_width(om_m, params, link)
        return link.n_spans / s * _offset_integral(a, b, band.omega_e, tau, "cos")

    if grid is not None:
        total = _grid_band_sum(link, params, grid, inner)
    else:
        total = _band_integral(link, params, inner)
    return _autocorr_prefactor(link, params) * total


def second_moment(
    link: LinkConfig,
    params: FiberParams,
    band: PolarimeterBand,
    tau: float | None = None,
    grid=None,
) -> float:
    """tau^2 coefficient of sigma^2(0) - sigma^2(tau), normalized to unit
    probe power: the field-domain measure of how fast the perturbation
    decorrelates within the electrical band."""
    if tau is None:
        tau = 0.05 / band.omega_e

    def inner(om_m: float) -> float:
        a, b = _lorentz_scales(om_m, params, link)
        s = _span_sum_width(om_m, params, link)
        return link.n_spans / s * _offset_integral(a, b, band.omega_e, tau, "one_minus_cos")

    if grid is not None:
        total = _grid_band_sum(link, params, grid, inner)
    else:
        total = _band_integral(link, params, inner)
    return _autocorr_prefactor(link, params) * total / tau**2


def sop_speed_prediction(
    link: LinkConfig,
    params: FiberParams,
    band: PolarimeterBand,
    method: str = "closed_form",
) -> float:
    """RMS SOP speed (rad/s) of the nonlinear depolarization.

    closed_form evaluates, with D = P_rep/(Omega_max - Omega_min),

        <SOP^2> = (20/27) * gamma^2/(beta2^2*alpha^2) * (alpha/L0)
                  * [ Omega_e/(alpha*L0) * pi/Omega_min
                      + tau_p^2/(4*beta2) * N_s * pi
                        * ln(1 + beta2*Omega_e/alpha * Omega_max) ] * D^2

    (beta2 by magnitude).  The first bracket term is independent of the
    span count, the second exactly linear in it; the whole expression is
    exactly quadratic in P_rep.  method='integral' instead converts the
    numerically integrated second moment, exposing the pre-simplification
    path for cross-checks.
    """
    if method == "integral":
        d2 = second_moment(link, params, band)
        return float(np.sqrt(2.0 * _STOKES_FACTOR * d2 / np.exp(-params.alpha * link.span_length)))
    if method != "closed_form":
        raise ValueError(f"unknown method {method!r}")

    alpha, b2 = params.alpha, params.abs_beta2
    l0, ns = link.span_length, link.n_spans
    arg = 1.0 + (b2 * band.omega_e / alpha) * link.omega_max
    if arg <= 0.0:
        raise ValueError("log argument non-positive; check beta2/omega_e/omega_max")
    t1 = band.omega_e / (alpha * l0) * np.pi / link.omega_min
    t2 = params.tau_p**2 / (4.0 * b2) * ns * np.pi * np.log(arg)
    dens = link.p_rep / (link.omega_max - link.omega_min)
    mean_square = (20.0 / 27.0) * params.gamma**2 / (b2**2 * alpha**2) * (alpha / l0) * (t1 + t2) * dens**2
    return float(np.sqrt(mean_square))


def perturbation_halfwidth(link: LinkConfig, params: FiberParams) -> float:
    """Half-width at half maximum (Hz) of the perturbation's intrinsic
    offset profile (no electrical filtering), after summing the loading
    band."""

    def profile(omega_l: float) -> float:
        def inner(om_m: float) -> float:
            a, b = _lorentz_scales(om_m, params, link)
            s = _span_sum_width(om_m, params, link)
            return (
                link.n_spans
                / s
                / ((1.0 + (omega_l / a) ** 2) * (1.0 + (omega_l / b) ** 2))
            )

        return _band_integral(link, params, inner)

    f0 = profile(0.0)
    b_min = _lorentz_scales(link.omega_max, params, link)[1]
    b_max = _lorentz_scales(link.omega_min, params, link)[0]
    lo, hi = 1e-3 * b_min, 1e3 * b_max
    omega_half = brentq(lambda x: profile(x) - 0.5 * f0, lo, hi, xtol=1e-8 * hi)
    return float(omega_half / (2.0 * np.pi))


@dataclass(frozen=True)
class RolloffTable:
    """3-dB roll-off frequencies (Hz) of the four second-moment factors.

    row2 carries a sqrt(L0) correction making it dimensionally consistent
    with row 1; the uncorrected textbook form is kept alongside for
    reference rather than silently replaced.
    """

    row1_pmd_span_sum: float
    row2_pmd_single_span: float
    row3_spansum_electrical: float
    row4_generation_electrical: float
    row2_uncorrected: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (
            self.row1_pmd_span_sum,
            self.row2_pmd_single_span,
            self.row3_spansum_electrical,
            self.row4_generation_electrical,
        )


def rolloff_table(params: FiberParams, link: LinkConfig, band: PolarimeterBand) -> RolloffTable:
    """Where each second-moment factor rolls off versus loading offset."""
    tp, l0, ns = params.tau_p, link.span_length, link.n_spans
    b2, alpha = params.abs_beta2, params.alpha
    inf = float("inf")
    r1 = 1.0 / (np.pi * tp * np.sqrt(l0 * ns)) if tp > 0 else inf
    r2 = 1.0 / (np.pi * np.sqrt(2.0) * tp * np.sqrt(l0)) if tp > 0 else inf
    r2_raw = 1.0 / (np.pi * np.sqrt(2.0) * tp) if tp > 0 else inf
    r3 = 1.0 / (np.pi * ns * b2 * band.omega_e * l0)
    r4 = alpha / (2.0 * np.pi * b2 * band.omega_e)
    return RolloffTable(r1, r2, r3, r4, r2_raw)


@dataclass(frozen=True)
class NldpPrediction:
    """Bundle of the analytic outputs for one link configuration."""

    sigma2_sym: float
    lags: tuple[float, ...]
    sigma2_nldp_tau: tuple[float, ...]
    second_moment: float
    sop_speed_rms: float
    rolloffs: RolloffTable


def analytic_prediction(
    link: LinkConfig,
    params: FiberParams,
    band: PolarimeterBand,
    lags: tuple[float, ...] = (),
) -> NldpPrediction:
    """Evaluate the full analytic pipeline for one configuration."""
    if not lags:
        lags = (0.0, 0.25 / band.omega_e, 1.0 / band.omega_e, 4.0 / band.omega_e)
    ac = tuple(nldp_autocorrelation(link, params, band, t) for t in lags)
    return NldpPrediction(
        sigma2_sym=symmetric_phase_variance(link, params),
        lags=tuple(lags),
        sigma2_nldp_tau=ac,
        second_moment=second_moment(link, params, band),
        sop_speed_rms=sop_speed_prediction(link, params, band),
        rolloffs=rolloff_table(params, link, band),
    )
