"""End-to-end scenario orchestration: comparative probe-vs-reference runs,
distance and repeater-power sweeps, regression fits, and report emission.

Scenarios mirror the comparative-polarimetry methodology.  The probe path
is the full nonlinear propagation plus detection.  The back-to-back
reference superimposes the received probe carrier on a loading-only twin of
the same link realization (same waveplates, repeaters and kicker states),
so it carries the identical link-noise spectrum minus the probe's nonlinear
perturbation; probe and reference also share detection-noise seeds, making
the variance subtraction a paired statistic.  The noise-boost path is the
reference detected with extra ASE.  Receive OSNR follows the constant-gain
repeater argument: it drops by 10*log10(circulations) with distance and
dB-for-dB with repeater output power.

Config files are flat ``key = value`` text with units embedded in the key
names; unknown keys are rejected.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .analytic import PolarimeterBand, analytic_prediction, sop_speed_prediction
from .fields import CombGrid, make_loading, make_probe, comb_to_time, ComplexEnvelope
from .link import FiberParams, LinkConfig, db_per_km_to_inv_m, realize_span
from .polarization import JonesVector, _haar_su2
from .polarimeter import (
    PolarimeterSettings,
    SopSpeedHistogram,
    detect,
    histogram,
    sop_speed_series,
    variance_subtract,
)
from .ssfm import PropagationSettings, propagate_link_snapshots

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "SweepPoint",
    "SweepReport",
    "ComparativeResult",
    "fit_linear",
    "run_comparative",
    "run_distance_sweep",
    "run_power_sweep",
    "run_analytic",
]

# variance of the magnitude of an isotropic tangent-plane Gaussian step is
# (1 - pi/4) of its mean square; maps mean-square SOP speed onto the
# histogram-variance convention of the comparative method
SPEED_VARIANCE_FRACTION = 1.0 - np.pi / 4.0


class ConfigError(ValueError):
    """Bad scenario configuration."""


_DEFAULTS: dict[str, Any] = {
    "mode": "comparative",
    "seed": 12345,
    # fiber
    "alpha_db_per_km": 0.2,
    "beta2_ps2_per_km": -21.7,
    "gamma_per_w_km": 1.3,
    "tau_p_ps_per_sqrt_km": 0.04,
    # link / launch
    "span_length_km": 93.0,
    "spans_per_circulation": 11,
    "circulations": 10,
    "circulations_list": [1, 3, 5, 10, 20],
    "power_offsets_db": [0.0, -1.0, -2.0],
    "p_rep_dbm": 0.0,
    "probe_power_dbm": -15.0,
    "center_frequency_thz": 193.4,
    "probe_offset_ghz": 0.0,
    "band_width_ghz": 40.0,
    "gap_width_ghz": 24.0,
    "pitch_mhz": 100.0,
    "kicker_enabled": True,
    "repeater_ase_enabled": False,
    "ase_noise_figure_db": 5.0,
    # polarimeter
    "sample_period_ps": 80.0,
    "adc_bits": 14,
    "electrical_cutoff_ghz": 1.2,
    "optical_filter_fwhm_ghz": 3.0,
    "osnr_db": 50.0,
    "noise_boost_db": 5.0,
    "bin_width_krad_s": 3000.0,
    # harness
    "ensemble_size": 32,
    "detection_repeats": 3,
    "max_nl_phase_per_step": 0.05,
    "min_steps_per_plate": 1,
    "output_dir": "out",
}

_LIST_KEYS = {"circulations_list", "power_offsets_db"}
_INT_KEYS = {"seed", "spans_per_circulation", "circulations", "adc_bits", "ensemble_size",
             "detection_repeats", "min_steps_per_plate"}
_BOOL_KEYS = {"kicker_enabled", "repeater_ase_enabled"}
_STR_KEYS = {"mode", "output_dir"}

_MODES = {"comparative", "distance_sweep", "power_sweep", "analytic_only"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _STR_KEYS:
        return raw
    if key in _BOOL_KEYS:
        if raw.lower() in ("true", "yes", "1", "on"):
            return True
        if raw.lower() in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    if key in _LIST_KEYS:
        parts = [p for p in raw.replace(",", " ").split() if p]
        vals = [float(p) for p in parts]
        if key == "circulations_list":
            return [int(v) for v in vals]
        return vals
    try:
        return int(raw) if key in _INT_KEYS else float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from exc


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse flat key = value lines; '#' starts a comment."""
    out: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, raw = line.partition("=")
        key = key.strip()
        if key not in _DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = _parse_value(key, raw)
    return out


@dataclass
class ScenarioConfig:
    """Resolved scenario: raw values plus SI-converted physics objects."""

    values: dict[str, Any]

    @classmethod
    def from_text(cls, text: str, overrides: dict[str, Any] | None = None) -> "ScenarioConfig":
        vals = dict(_DEFAULTS)
        vals.update(parse_config_text(text))
        if overrides:
            for k in overrides:
                if k not in _DEFAULTS:
                    raise ConfigError(f"unknown override {k!r}")
            vals.update(overrides)
        return cls(vals).validate()

    @classmethod
    def from_file(cls, path, overrides: dict[str, Any] | None = None) -> "ScenarioConfig":
        with open(path) as fh:
            return cls.from_text(fh.read(), overrides)

    @classmethod
    def defaults(cls, **overrides) -> "ScenarioConfig":
        vals = dict(_DEFAULTS)
        for k in overrides:
            if k not in _DEFAULTS:
                raise ConfigError(f"unknown override {k!r}")
        vals.update(overrides)
        return cls(vals).validate()

    def to_text(self) -> str:
        """Serialize back to the flat config format (round-trips through
        :func:`parse_config_text`)."""
        lines = []
        for key in _DEFAULTS:
            val = self.values[key]
            if key in _LIST_KEYS:
                rendered = ", ".join(repr(x) for x in val)
            elif key in _BOOL_KEYS:
                rendered = "true" if val else "false"
            else:
                rendered = repr(val) if not isinstance(val, str) else val
            lines.append(f"{key} = {rendered}")
        return "\n".join(lines) + "\n"

    def validate(self) -> "ScenarioConfig":
        v = self.values
        if v["mode"] not in _MODES:
            raise ConfigError(f"unknown mode {v['mode']!r}")
        if v["ensemble_size"] < 1:
            raise ConfigError("ensemble_size must be >= 1")
        if v["mode"] == "distance_sweep" and not v["circulations_list"]:
            raise ConfigError("distance_sweep needs circulations_list")
        if v["mode"] == "power_sweep" and not v["power_offsets_db"]:
            raise ConfigError("power_sweep needs power_offsets_db")
        if v["gap_width_ghz"] >= v["band_width_ghz"]:
            raise ConfigError("gap must be narrower than the band")
        if abs(v["probe_offset_ghz"]) * 2.0 >= v["gap_width_ghz"]:
            raise ConfigError("probe must sit inside the gap")
        return self

    # -- SI conversions -----------------------------------------------------
    def fiber(self) -> FiberParams:
        v = self.values
        return FiberParams(
            alpha=db_per_km_to_inv_m(v["alpha_db_per_km"]),
            beta2=v["beta2_ps2_per_km"] * 1e-27,
            gamma=v["gamma_per_w_km"] * 1e-3,
            tau_p=v["tau_p_ps_per_sqrt_km"] * 1e-12 / np.sqrt(1e3),
        )

    def link(self, p_rep_offset_db: float = 0.0) -> LinkConfig:
        v = self.values
        return LinkConfig(
            n_spans=v["spans_per_circulation"],
            span_length=v["span_length_km"] * 1e3,
            p_rep=10.0 ** ((v["p_rep_dbm"] + p_rep_offset_db) / 10.0) * 1e-3,
            omega_min=2.0 * np.pi * v["gap_width_ghz"] * 1e9 / 2.0,
            omega_max=2.0 * np.pi * v["band_width_ghz"] * 1e9 / 2.0,
            probe_power=10.0 ** (v["probe_power_dbm"] / 10.0) * 1e-3,
            probe_frequency=self.probe_frequency(),
            gap_width=2.0 * np.pi * v["gap_width_ghz"] * 1e9,
            seed=v["seed"],
            kicker_enabled=v["kicker_enabled"],
            repeater_ase_enabled=v["repeater_ase_enabled"],
            ase_noise_figure_db=v["ase_noise_figure_db"],
            center_frequency=v["center_frequency_thz"] * 1e12,
        )

    def probe_frequency(self) -> float:
        v = self.values
        return v["center_frequency_thz"] * 1e12 + v["probe_offset_ghz"] * 1e9

    def polarimeter(self, osnr_db: float | None = None) -> PolarimeterSettings:
        v = self.values
        return PolarimeterSettings(
            sample_period=v["sample_period_ps"] * 1e-12,
            adc_bits=v["adc_bits"],
            electrical_cutoff=2.0 * np.pi * v["electrical_cutoff_ghz"] * 1e9,
            optical_filter_fwhm=v["optical_filter_fwhm_ghz"] * 1e9,
            osnr_db=v["osnr_db"] if osnr_db is None else osnr_db,
        )

    def band(self) -> PolarimeterBand:
        return PolarimeterBand(2.0 * np.pi * self.values["electrical_cutoff_ghz"] * 1e9)

    def grid(self) -> CombGrid:
        v = self.values
        half = int(round(v["band_width_ghz"] * 1e9 / 2.0 / (v["pitch_mhz"] * 1e6)))
        return CombGrid(2.0 * np.pi * v["pitch_mhz"] * 1e6, -half, half,
                        v["center_frequency_thz"] * 1e12)

    def n_time_samples(self) -> int:
        """Time grid sized with headroom for four-wave-mixing products well
        beyond the launch band (factor 2.5 over the occupied width; the
        repeater passband scrubs the residual pedestal every span)."""
        g = self.grid()
        need = int(np.ceil((2 * g.n_max + 2) * 2.5))
        return 1 << int(np.ceil(np.log2(need)))

    def propagation(self) -> PropagationSettings:
        v = self.values
        return PropagationSettings(
            max_nl_phase_per_step=v["max_nl_phase_per_step"],
            min_steps_per_plate=v["min_steps_per_plate"],
        )

    def bin_width(self) -> float:
        return self.values["bin_width_krad_s"] * 1e3

    def receive_osnr_db(self, circulations: int, power_offset_db: float = 0.0) -> float:
        """Constant-gain ASE accumulation: OSNR falls with span count and
        dB-for-dB with repeater output power."""
        return self.values["osnr_db"] - 10.0 * np.log10(max(circulations, 1)) + power_offset_db


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class SweepPoint:
    x: float
    sigma2_probe: float
    sigma2_reference: float
    sigma2_nldp: float


@dataclass
class SweepReport:
    x_label: str
    points: list[SweepPoint]
    fit: tuple[float, float, float]  # slope, intercept, r^2
    analytic_overlay: list[float]
    config: dict[str, Any]


@dataclass
class ComparativeResult:
    probe: SopSpeedHistogram
    reference: SopSpeedHistogram
    boost: SopSpeedHistogram
    sigma2_nldp: float
    config: dict[str, Any]


def fit_linear(points) -> tuple[float, float, float]:
    """Ordinary least-squares line through (x, y) pairs: slope, intercept,
    r^2 (1 - SS_res/SS_tot, with r^2 = 1 for an exactly flat perfect fit)."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise ValueError("need at least two points")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.ptp(x) == 0.0:
        raise ValueError("degenerate fit: all x identical")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    ss_res = float((resid**2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


# ---------------------------------------------------------------------------
# simulation paths


def _member_seeds(seed: int, n: int, label: str) -> list[np.random.SeedSequence]:
    import zlib

    root = np.random.SeedSequence(seed, spawn_key=(zlib.crc32(label.encode()),))
    return root.spawn(n)


def _launch_sops(cfg: ScenarioConfig) -> list[JonesVector]:
    """Haar-random probe launch SOP per ensemble member (the slow SOP
    scrambling of the transmitter laser)."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.values["seed"], spawn_key=(0xA11,)))
    out = []
    for _ in range(cfg.values["ensemble_size"]):
        m = _haar_su2(rng)
        out.append(JonesVector(m[0, 0], m[1, 0]))
    return out


def _paired_snapshots(
    cfg: ScenarioConfig,
    snapshot_circulations: list[int],
    power_offset_db: float = 0.0,
    gamma_on: bool = True,
):
    """Propagate the ensemble's probe members and their loading-only twins
    through one shared link realization, with snapshots at the requested
    circulation counts.

    Returns (marks, per-mark list of (probe_env, loading_env, sop) per
    member).  The twins share the kicker states of their probe runs, so a
    reference built from a twin carries the identical link-noise
    realization (spectral infill, band-edge leakage) minus the probe's
    nonlinear perturbation -- the back-to-back matching of the comparative
    method.
    """
    v = cfg.values
    fiber = cfg.fiber()
    if not gamma_on:
        fiber = FiberParams(alpha=fiber.alpha, beta2=fiber.beta2, gamma=0.0, tau_p=fiber.tau_p)
    link = cfg.link(power_offset_db)
    grid = cfg.grid()
    # repeaters confine the spectrum just outside the loading band
    link = replace(link, repeater_bandwidth=link.omega_max * 1.05 + 2.0 * grid.pitch)
    settings = cfg.propagation()
    n_members = v["ensemble_size"]

    span_seeds = _member_seeds(v["seed"], link.n_spans, "spans")
    spans = [realize_span(fiber, link.span_length, s, link.center_frequency) for s in span_seeds]

    load_seeds = _member_seeds(v["seed"], n_members, "loading")
    sops = _launch_sops(cfg)
    duration = 2.0 * np.pi / grid.pitch
    n_t = cfg.n_time_samples()
    envs_full, envs_load = [], []
    for k in range(n_members):
        loading = make_loading(link.p_rep, grid, cfg.probe_frequency(), link.gap_width, load_seeds[k])
        probe = make_probe(link.probe_power, cfg.probe_frequency(), sops[k], grid, loading.gap)
        envs_full.append(comb_to_time(loading + probe, duration, n_t))
        envs_load.append(comb_to_time(loading, duration, n_t))

    kick_rng = np.random.default_rng(np.random.SeedSequence(v["seed"], spawn_key=(0xB22,)))
    groups = np.concatenate([np.arange(n_members), np.arange(n_members)])
    marks = sorted(set(snapshot_circulations))
    batches = propagate_link_snapshots(
        envs_full + envs_load, link, spans, fiber, settings, marks, kick_rng, groups
    )
    per_mark = []
    for batch in batches:
        per_mark.append(
            [(batch[k], batch[k + n_members], sops[k]) for k in range(n_members)]
        )
    return marks, per_mark


def _reference_envelope(probe_env: ComplexEnvelope, load_env: ComplexEnvelope) -> ComplexEnvelope:
    """Static probe superimposed on the link's noise output (the btb path).

    The static carrier reuses the received probe tone of the paired
    nonlinear run (its mean field), so the reference carries the same
    carrier power, SOP and phase relative to the shared link-noise
    realization and the comparison cancels everything but the probe's
    nonlinear perturbation."""
    cx = probe_env.ex.mean()
    cy = probe_env.ey.mean()
    return ComplexEnvelope(
        load_env.sample_period,
        load_env.ex + cx,
        load_env.ey + cy,
        load_env.center_frequency,
    )


def _detect_speeds(cfg: ScenarioConfig, envs: list[ComplexEnvelope], osnr_db: float,
                   seeds, scenario: str) -> np.ndarray:
    det = cfg.polarimeter(osnr_db)
    reps = cfg.values["detection_repeats"]
    return np.concatenate(
        [sop_speed_series(detect(e, det, s, repeats=reps, scenario=scenario))
         for e, s in zip(envs, seeds)]
    )


def _comparative_point(
    cfg: ScenarioConfig,
    members,
    circulations: int,
    power_offset_db: float = 0.0,
    with_boost: bool = False,
):
    """Histogram the probe, matched-reference, and optionally noise-boost
    paths of one sweep point.  Detection seeds are shared between the paths
    (paired comparison), mirroring the fixed-seed-family reproducibility of
    the method."""
    v = cfg.values
    osnr = cfg.receive_osnr_db(circulations, power_offset_db)
    bw = cfg.bin_width()
    det_seeds = _member_seeds(v["seed"], len(members), f"detect-c{circulations}-o{power_offset_db}")

    probe_envs = [m[0] for m in members]
    ref_envs = [_reference_envelope(m[0], m[1]) for m in members]

    probe_hist = histogram(_detect_speeds(cfg, probe_envs, osnr, det_seeds, "probe"), bw)
    ref_hist = histogram(_detect_speeds(cfg, ref_envs, osnr, det_seeds, "reference"), bw)
    boost_hist = None
    if with_boost:
        boost_hist = histogram(
            _detect_speeds(cfg, ref_envs, osnr - v["noise_boost_db"], det_seeds, "boost"), bw
        )
    return probe_hist, ref_hist, boost_hist


# ---------------------------------------------------------------------------
# scenarios


def run_comparative(cfg: ScenarioConfig, write: bool = True) -> ComparativeResult:
    """Probe vs matched reference vs noise-boosted reference histograms."""
    v = cfg.values
    c = v["circulations"]
    _, per_mark = _paired_snapshots(cfg, [c])
    probe_hist, ref_hist, boost_hist = _comparative_point(cfg, per_mark[0], c, with_boost=True)
    nldp = variance_subtract(probe_hist, ref_hist)
    result = ComparativeResult(probe_hist, ref_hist, boost_hist, nldp.value, dict(v))
    if write:
        _write_comparative(cfg, result)
    return result


def _analytic_speed_variance(cfg: ScenarioConfig, circulations: int, offset_db: float) -> float:
    """Mean-square NLDP speed mapped to the histogram-variance convention.

    With the loop kicker on, contributions of successive circulations add
    incoherently, so the per-circulation prediction scales linearly with the
    circulation count; without it the whole chain enters the span sum."""
    fiber = cfg.fiber()
    band = cfg.band()
    link = cfg.link(offset_db)
    if cfg.values["kicker_enabled"]:
        ms = circulations * sop_speed_prediction(link, fiber, band) ** 2
    else:
        ms = sop_speed_prediction(link.with_total_spans(link.n_spans * circulations), fiber, band) ** 2
    return SPEED_VARIANCE_FRACTION * ms


def run_distance_sweep(cfg: ScenarioConfig, write: bool = True) -> SweepReport:
    """sigma^2_NLDP versus transmission distance with a linear fit.

    One progressive propagation serves all distances: the snapshots play
    the role of the loop's timing gate."""
    v = cfg.values
    marks, per_mark = _paired_snapshots(cfg, v["circulations_list"])
    span_km = v["spans_per_circulation"] * v["span_length_km"]
    points = []
    for c, members in zip(marks, per_mark):
        probe_hist, ref_hist, _ = _comparative_point(cfg, members, c)
        nldp = variance_subtract(probe_hist, ref_hist)
        points.append(SweepPoint(c * span_km, probe_hist.variance, ref_hist.variance, nldp.value))
    fit = fit_linear([(p.x, p.sigma2_nldp) for p in points])
    overlay = [_analytic_speed_variance(cfg, c, 0.0) for c in marks]
    report = SweepReport("distance_km", points, fit, overlay, dict(v))
    if write:
        _write_sweep(cfg, report, "distance_sweep")
    return report


def run_power_sweep(cfg: ScenarioConfig, write: bool = True) -> SweepReport:
    """sigma^2_NLDP versus repeater output power at fixed distance."""
    v = cfg.values
    c = v["circulations"]
    points = []
    for off in v["power_offsets_db"]:
        _, per_mark = _paired_snapshots(cfg, [c], power_offset_db=off)
        probe_hist, ref_hist, _ = _comparative_point(cfg, per_mark[0], c, power_offset_db=off)
        points.append(
            SweepPoint(v["p_rep_dbm"] + off, probe_hist.variance, ref_hist.variance,
                       variance_subtract(probe_hist, ref_hist).value)
        )
    fit = fit_linear([(p.x, p.sigma2_nldp) for p in points])
    overlay = [_analytic_speed_variance(cfg, c, off) for off in v["power_offsets_db"]]
    report = SweepReport("p_rep_dbm", points, fit, overlay, dict(v))
    if write:
        _write_sweep(cfg, report, "power_sweep")
    return report


def run_analytic(cfg: ScenarioConfig, write: bool = True) -> dict[str, Any]:
    """Analytic-only evaluation of the configured link."""
    v = cfg.values
    fiber = cfg.fiber()
    link = cfg.link().with_total_spans(v["spans_per_circulation"] * v["circulations"])
    pred = analytic_prediction(link, fiber, cfg.band())
    out = {
        "config": dict(v),
        "sigma2_sym": pred.sigma2_sym,
        "lags_s": list(pred.lags),
        "sigma2_nldp_tau": list(pred.sigma2_nldp_tau),
        "second_moment": pred.second_moment,
        "sop_speed_rms_rad_s": pred.sop_speed_rms,
        "rolloffs_hz": {
            "row1_pmd_span_sum": pred.rolloffs.row1_pmd_span_sum,
            "row2_pmd_single_span": pred.rolloffs.row2_pmd_single_span,
            "row3_spansum_electrical": pred.rolloffs.row3_spansum_electrical,
            "row4_generation_electrical": pred.rolloffs.row4_generation_electrical,
            "row2_uncorrected": pred.rolloffs.row2_uncorrected,
        },
    }
    if write:
        _ensure_outdir(cfg)
        path = os.path.join(cfg.values["output_dir"], "analytic.json")
        with open(path, "w") as fh:
            json.dump(out, fh, indent=2, sort_keys=True)
    return out


# ---------------------------------------------------------------------------
# report files


def _ensure_outdir(cfg: ScenarioConfig) -> None:
    os.makedirs(cfg.values["output_dir"], exist_ok=True)


def _write_comparative(cfg: ScenarioConfig, result: ComparativeResult) -> None:
    from .polarimeter import write_histogram_csv

    _ensure_outdir(cfg)
    out = cfg.values["output_dir"]
    write_histogram_csv(result.probe, os.path.join(out, "probe_histogram.csv"))
    write_histogram_csv(result.reference, os.path.join(out, "reference_histogram.csv"))
    write_histogram_csv(result.boost, os.path.join(out, "boost_histogram.csv"))
    summary = {
        "config": result.config,
        "sigma2_probe": result.probe.variance,
        "sigma2_reference": result.reference.variance,
        "sigma2_boost": result.boost.variance,
        "sigma2_nldp": result.sigma2_nldp,
    }
    with open(os.path.join(out, "comparative.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)


def _write_sweep(cfg: ScenarioConfig, report: SweepReport, name: str) -> None:
    _ensure_outdir(cfg)
    out = cfg.values["output_dir"]
    data = {
        "config": report.config,
        "x_label": report.x_label,
        "points": [
            {
                "x": p.x,
                "sigma2_probe": p.sigma2_probe,
                "sigma2_reference": p.sigma2_reference,
                "sigma2_nldp": p.sigma2_nldp,
            }
            for p in report.points
        ],
        "fit": {"slope": report.fit[0], "intercept": report.fit[1], "r2": report.fit[2]},
        "analytic_overlay": report.analytic_overlay,
    }
    with open(os.path.join(out, f"{name}.json"), "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
    with open(os.path.join(out, f"{name}.csv"), "w") as fh:
        fh.write(f"{report.x_label},sigma2_probe,sigma2_reference,sigma2_nldp,analytic_overlay\n")
        for p, ov in zip(report.points, report.analytic_overlay):
            fh.write(f"{p.x!r},{p.sigma2_probe!r},{p.sigma2_reference!r},{p.sigma2_nldp!r},{ov!r}\n")
