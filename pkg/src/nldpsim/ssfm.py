"""Split-step integration of the coupled nonlinear Schrodinger equations
through randomly birefringent waveplate chains.

Per waveplate the scheme is symmetric (Strang): a linear half-step
(dispersion + attenuation) in the frequency domain, the Kerr step with the
5/6 symmetric and 1/6 antisymmetric coefficients in the time domain, the
second linear half-step, then the plate's Jones rotation (axis angle +
frequency-dependent retardation) applied at the plate boundary.  Envelope
batches share the span realizations, so an ensemble of loading seeds rides
through identical fiber - the situation in a recirculating-loop experiment.

All propagation is in the retarded frame (beta1 = 0) with the tone
convention of :mod:`nldpsim.fields`: spectrum bin n evolves with
exp(+j*(beta2/2)*Omega_n^2*z).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .fields import ComplexEnvelope
from .link import FiberParams, LinkConfig, WaveplateRealization
from .polarization import _haar_su2

__all__ = [
    "PropagationSettings",
    "AliasingError",
    "propagate_span",
    "propagate_link",
    "propagate_link_snapshots",
]


class AliasingError(RuntimeError):
    """Spectral occupancy crossed the Nyquist guard band."""


@dataclass(frozen=True)
class PropagationSettings:
    """Engine controls.

    max_nl_phase_per_step bounds the Kerr phase of a single step (rad);
    min_steps_per_plate forces extra substeps for convergence studies.
    include_antisymmetric_term toggles the 1/6 Kerr term,
    include_coherent_coupling_term the conj(E)*E_other^2 term (off by
    default; the modal-birefringence phase that suppresses it is dropped
    from the model).  occupancy_guard is the usable fraction of Nyquist;
    bins holding more than occupancy_floor of the total power (default
    -50 dB, above the saturated four-wave-mixing pedestal) count as
    occupied.
    """

    max_nl_phase_per_step: float = 0.05
    min_steps_per_plate: int = 1
    include_antisymmetric_term: bool = True
    include_coherent_coupling_term: bool = False
    occupancy_guard: float = 0.8
    occupancy_floor: float = 1e-5

    def __post_init__(self):
        if not (0.0 < self.max_nl_phase_per_step <= 0.1):
            raise ValueError("max_nl_phase_per_step must be in (0, 0.1]")
        if self.min_steps_per_plate < 1:
            raise ValueError("min_steps_per_plate must be >= 1")


def _omega_grid(n: int, dt: float) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(n, d=dt)


def _check_occupancy(spec: np.ndarray, settings: PropagationSettings) -> None:
    """Abort when power above the floor sits beyond the Nyquist guard band."""
    n = spec.shape[-1]
    p = (np.abs(spec) ** 2).sum(axis=(0, 1)) if spec.ndim == 3 else (np.abs(spec) ** 2).sum(axis=0)
    total = p.sum()
    if total <= 0.0:
        return
    guard = int(settings.occupancy_guard * (n // 2))
    # FFT ordering: bins guard..n-guard are the out-of-band region.
    outside = p[guard : n - guard].sum()
    if outside > settings.occupancy_floor * total:
        raise AliasingError(
            f"spectral occupancy beyond {settings.occupancy_guard:.0%} of Nyquist "
            f"({outside / total:.2e} of total power)"
        )


def _batch_fields(env: ComplexEnvelope | list[ComplexEnvelope]) -> tuple[np.ndarray, float, float]:
    envs = [env] if isinstance(env, ComplexEnvelope) else list(env)
    n = envs[0].n_samples
    dt = envs[0].sample_period
    for e in envs:
        if e.n_samples != n or e.sample_period != dt:
            raise ValueError("batched envelopes must share the sampling grid")
    batch = np.empty((len(envs), 2, n), dtype=np.complex128)
    for k, e in enumerate(envs):
        batch[k, 0] = e.ex
        batch[k, 1] = e.ey
    return batch, dt, envs[0].center_frequency


def _unbatch(batch: np.ndarray, dt: float, f0: float, single: bool):
    envs = [ComplexEnvelope(dt, batch[k, 0].copy(), batch[k, 1].copy(), f0) for k in range(batch.shape[0])]
    return envs[0] if single else envs


def _propagate_span_batch(
    e: np.ndarray,
    dt: float,
    span: WaveplateRealization,
    params: FiberParams,
    settings: PropagationSettings,
) -> None:
    """In-place span propagation of a (B, 2, N) time-domain batch."""
    n = e.shape[2]
    omega = _omega_grid(n, dt)
    dx = np.empty(n, dtype=np.complex128)
    dy = np.empty(n, dtype=np.complex128)

    g56 = params.gamma * (5.0 / 6.0)
    g16 = params.gamma * (1.0 / 6.0) if settings.include_antisymmetric_term else 0.0
    gcoh = params.gamma / 3.0 if settings.include_coherent_coupling_term else 0.0
    peak = float((np.abs(e[:, 0]) ** 2 + np.abs(e[:, 1]) ** 2).max())

    spec = np.fft.ifft(e, axis=2)
    _check_occupancy(spec, settings)

    dfull = np.empty(n, dtype=np.complex128)
    for i in range(span.n_plates):
        dz = span.lengths[i]
        nl_phase = params.gamma * peak * dz
        steps = max(settings.min_steps_per_plate, int(np.ceil(nl_phase / settings.max_nl_phase_per_step)))
        h = dz / steps
        # Strang: leading half linear step, then Kerr steps separated by
        # full linear steps, then the trailing half step merged with the
        # plate's retardation and axis rotation at the boundary.
        _kernels.dispersion_factors(omega, 0.5 * h, params.beta2, params.alpha, dx)
        _kernels.scale_diag(spec, dx, dx)
        if steps > 1:
            _kernels.dispersion_factors(omega, h, params.beta2, params.alpha, dfull)
        # 3x headroom over the span-entry peak covers dispersive power
        # fluctuation within the plate; the series error stays < 3e-11.
        use_taylor = gcoh == 0.0 and 3.0 * nl_phase / steps < 0.02
        for s in range(steps):
            work = np.fft.fft(spec, axis=2)
            if use_taylor:
                _kernels.kerr_taylor(work, g56 * h, g16 * h)
            else:
                _kernels.kerr_exact(work, g56 * h, g16 * h, gcoh * h)
            spec = np.fft.ifft(work, axis=2)
            if s < steps - 1:
                _kernels.scale_diag(spec, dfull, dfull)
        _kernels.plate_spectral_factors(
            omega, 0.5 * h, params.beta2, params.alpha, span.zeta0[i], span.zeta_slope[i], dx, dy
        )
        _kernels.rotate_and_scale(spec, np.cos(span.xi[i]), np.sin(span.xi[i]), dx, dy)

    _check_occupancy(spec, settings)
    e[...] = np.fft.fft(spec, axis=2)


def propagate_span(
    env: ComplexEnvelope | list[ComplexEnvelope],
    span: WaveplateRealization,
    params: FiberParams,
    settings: PropagationSettings | None = None,
) -> ComplexEnvelope | list[ComplexEnvelope]:
    """Propagate an envelope (or a batch sharing one fiber) through a span."""
    settings = settings or PropagationSettings()
    single = isinstance(env, ComplexEnvelope)
    e, dt, f0 = _batch_fields(env)
    _propagate_span_batch(e, dt, span, params, settings)
    return _unbatch(e, dt, f0, single)


def _batch_power(e: np.ndarray) -> np.ndarray:
    return (np.abs(e) ** 2).mean(axis=2).sum(axis=1)


def _repeater_clip_mask(link: LinkConfig, n: int, dt: float) -> np.ndarray | None:
    if link.repeater_bandwidth is None:
        return None
    omega = _omega_grid(n, dt)
    return np.abs(omega) > link.repeater_bandwidth


def _link_pass(
    e: np.ndarray,
    dt: float,
    link: LinkConfig,
    spans: list[WaveplateRealization],
    params: FiberParams,
    settings: PropagationSettings,
    launch_power: np.ndarray,
    rng: np.random.Generator,
    kicker_groups: np.ndarray,
    apply_kicker: bool,
) -> None:
    """One circulation: spans + repeaters in place, then the kicker."""
    clip = _repeater_clip_mask(link, e.shape[2], dt)
    ase_density = link.ase_density_per_gain()
    for span in spans:
        _propagate_span_batch(e, dt, span, params, settings)
        if clip is not None:
            spec = np.fft.ifft(e, axis=2)
            spec[:, :, clip] = 0.0
            e[...] = np.fft.fft(spec, axis=2)
        power = _batch_power(e)
        gains = launch_power / power
        e *= np.sqrt(gains)[:, None, None]
        if link.repeater_ase_enabled:
            # Unpolarized circular-Gaussian ASE, white over the sampled
            # band: per-sample variance = density * gain * sample rate.
            var = ase_density * gains / dt
            sigma = np.sqrt(var / 2.0)[:, None, None]
            e += sigma * (rng.standard_normal(e.shape) + 1j * rng.standard_normal(e.shape))
    if apply_kicker and link.kicker_enabled:
        # one Haar rotation per kicker group; members sharing a group (e.g.
        # a probe run and its loading-only twin) see the same loop state
        groups = {}
        mats = np.empty((e.shape[0], 2, 2), dtype=np.complex128)
        for k, g in enumerate(kicker_groups):
            if g not in groups:
                groups[g] = _haar_su2(rng)
            mats[k] = groups[g]
        _kernels.apply_jones_batch(e, mats)


def propagate_link(
    env: ComplexEnvelope | list[ComplexEnvelope],
    link: LinkConfig,
    spans: list[WaveplateRealization],
    params: FiberParams,
    settings: PropagationSettings | None = None,
    circulations: int = 1,
    rng: np.random.Generator | None = None,
    kicker_groups=None,
) -> ComplexEnvelope | list[ComplexEnvelope]:
    """Chain of circulations x len(spans) spans with repeaters.

    Each span traversal is followed by a flat-gain repeater restoring the
    member's launch power (optionally adding ASE whose density is
    proportional to the applied gain, and confining the spectrum to the
    repeater passband).  When the kicker is enabled a fresh Haar rotation
    is applied to each member's full field after every circulation,
    emulating the loop-synchronous polarization scrambler.
    """
    settings = settings or PropagationSettings()
    single = isinstance(env, ComplexEnvelope)
    e, dt, f0 = _batch_fields(env)
    rng = rng or np.random.default_rng(link.seed)
    groups = np.arange(e.shape[0]) if kicker_groups is None else np.asarray(kicker_groups)

    launch_power = _batch_power(e)
    for c in range(circulations):
        _link_pass(e, dt, link, spans, params, settings, launch_power, rng, groups,
                   apply_kicker=circulations > 1)
    return _unbatch(e, dt, f0, single)


def propagate_link_snapshots(
    env: list[ComplexEnvelope],
    link: LinkConfig,
    spans: list[WaveplateRealization],
    params: FiberParams,
    settings: PropagationSettings,
    snapshot_circulations: list[int],
    rng: np.random.Generator | None = None,
    kicker_groups=None,
) -> list[list[ComplexEnvelope]]:
    """Progressive propagation with snapshots after selected circulation
    counts (the recirculating loop's timing gate): one propagation serves a
    whole distance sweep."""
    marks = sorted(set(snapshot_circulations))
    if not marks or marks[0] < 1:
        raise ValueError("snapshot circulations must be positive")
    e, dt, f0 = _batch_fields(env)
    rng = rng or np.random.default_rng(link.seed)
    groups = np.arange(e.shape[0]) if kicker_groups is None else np.asarray(kicker_groups)
    launch_power = _batch_power(e)
    out = []
    for c in range(1, marks[-1] + 1):
        _link_pass(e, dt, link, spans, params, settings, launch_power, rng, groups,
                   apply_kicker=c < marks[-1])
        if c in marks:
            out.append(_unbatch(e.copy(), dt, f0, single=False))
    return out
