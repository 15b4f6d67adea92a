"""Seeded Monte Carlo campaigns and their file artifacts.

Every campaign is described by one flat :class:`CampaignConfig` and a
64-bit seed.  Random decisions are addressed by purpose- and trial-
indexed sub-stream paths under that seed (see :mod:`cvpuk.streams`), so
per-trial results depend only on the seed and the trial index, never on
execution order, and repeated runs are reproducible down to the output
bytes.  Execution is single threaded; the stream layout would let
trials run in parallel without changing any result.

Sub-stream paths:

====================  ==========================================
``(0,)``              true-key generation
``(1,)``              true-key verification
``(2, t)``            false key for trial ``t``
``(3, t)``            verification of false key ``t``
``(4, i)``            true key for the ``i``-th mode count
``(5, i, d, t)``      clone ``t`` at mode-count index ``i``, fraction index ``d``
``(6, i, d, t)``      verification of that clone
====================  ==========================================
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import jsonio
from .adversary import clone_key, false_key
from .homodyne import HomodyneChannel, ProbeSet, Response, p_in_theoretical
from .protocol import (
    VerificationConfig,
    e_threshold,
    enroll_exact,
    radii,
    verify,
)
from .scattering import enhancement, generate_key, optimal_mask, uniform_coupling
from .streams import substream

__all__ = [
    "EXPERIMENT_IDS",
    "REPORTED_ENHANCEMENT_BAND",
    "CampaignConfig",
    "Histogram",
    "CollisionResult",
    "ResponseCloudResult",
    "EnhancementConditionResult",
    "CloneExperimentsResult",
    "run_collision_histogram",
    "run_response_cloud",
    "run_enhancement_condition",
    "run_clone_experiments",
    "run_campaign",
]

EXPERIMENT_IDS = (
    "response_cloud",
    "enhancement_condition",
    "collision_histogram",
    "clone_cloud",
    "clone_histograms",
    "cheating_curve",
)

# span of intensity enhancements reported for existing wavefront-shaping
# set-ups, used as an overlay band in the enhancement-condition table
REPORTED_ENHANCEMENT_BAND = (50.0, 1000.0)

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class CampaignConfig:
    """Flat description of one campaign: physics, protocol and run sizes.

    Defaults reproduce the reference parameter set used throughout the
    bundled experiments (121 modes, uniform illumination, tau 0.8,
    eta 0.55, bin width two shot-noise units, 11 probe states of 2500
    photons, 1000 sessions, error level 0.05).
    """

    experiment_id: str
    n_modes: int = 121
    l_over_L: float = 0.2
    mu_p: float = 2500.0
    tau: float = 0.8
    eta: float = 0.55
    delta_over_sigma: float = 2.0
    n_probe_states: int = 11
    m_sessions: int = 1000
    epsilon: float = 0.05
    zeta: float = 0.05
    trials: int = 500
    histogram_bin: float = 0.01
    seed: int = 0
    d_values: tuple[float, ...] = (0.0, 0.01, 0.02, 0.03, 0.05)
    mode_counts: tuple[int, ...] = (121, 256, 625)
    photons_per_mode_values: tuple[float, ...] = (1.0, 5.0, 20.0, 100.0)

    def __post_init__(self):
        if self.experiment_id not in EXPERIMENT_IDS:
            raise ValueError(f"unknown experiment_id {self.experiment_id!r}")
        if self.trials < 0:
            raise ValueError("trials must be non-negative")
        if self.histogram_bin <= 0.0:
            raise ValueError("histogram_bin must be positive")
        object.__setattr__(self, "d_values", tuple(float(d) for d in self.d_values))
        object.__setattr__(self, "mode_counts", tuple(int(n) for n in self.mode_counts))
        object.__setattr__(
            self,
            "photons_per_mode_values",
            tuple(float(v) for v in self.photons_per_mode_values),
        )

    @property
    def mu_c(self) -> float:
        """Mean challenge photons after the modulator: tau * mu_p."""
        return self.tau * self.mu_p

    def channel(self) -> HomodyneChannel:
        return HomodyneChannel.from_delta_ratio(self.eta, self.delta_over_sigma)

    def probe_set(self) -> ProbeSet:
        return ProbeSet(self.n_probe_states, self.mu_p)

    def verification(self) -> VerificationConfig:
        return VerificationConfig(self.m_sessions, self.epsilon, self.zeta)

    def to_dict(self) -> dict:
        resolved = {}
        for spec in fields(self):
            value = getattr(self, spec.name)
            resolved[spec.name] = list(value) if isinstance(value, tuple) else value
        return resolved

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        known = {spec.name for spec in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class Histogram:
    """Fixed-width counting histogram over [0, 1]."""

    edges: np.ndarray
    counts: np.ndarray
    normalization: int

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        counts = np.asarray(self.counts, dtype=int)
        if counts.size != edges.size - 1:
            raise ValueError("counts length must be edges length - 1")
        if np.any(counts < 0) or counts.sum() > self.normalization:
            raise ValueError("counts must be non-negative and sum to at most the trials")
        edges.flags.writeable = False
        counts.flags.writeable = False
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_samples(cls, samples, bin_width: float) -> "Histogram":
        if bin_width <= 0.0 or bin_width > 1.0:
            raise ValueError("bin_width must lie in (0, 1]")
        n_bins = max(1, math.ceil(round(1.0 / bin_width, 9)))
        edges = np.linspace(0.0, 1.0, n_bins + 1)
        samples = np.asarray(list(samples), dtype=float)
        counts, _ = np.histogram(samples, edges)
        return cls(edges, counts, samples.size)

    def mode_bin(self) -> tuple[float, float]:
        """Edges of the fullest bin (first one on ties)."""
        index = int(np.argmax(self.counts))
        return float(self.edges[index]), float(self.edges[index + 1])

    def rows(self):
        """(bin_left, bin_right, count) rows for CSV emission."""
        return [
            (float(self.edges[i]), float(self.edges[i + 1]), int(self.counts[i]))
            for i in range(self.counts.size)
        ]


@dataclass(frozen=True)
class CollisionResult:
    histogram: Histogram
    true_key_p_in: float
    p_in_expected: float
    true_key_accepted: bool
    false_p_ins: tuple[float, ...]
    false_acceptance_rate: float


@dataclass(frozen=True)
class ResponseCloudResult:
    true_response: Response
    points: tuple[tuple[int, float, float], ...]
    rho_false: float
    rho_true: float
    enhancement: float


@dataclass(frozen=True)
class EnhancementConditionResult:
    rows: tuple[tuple[float, int, float], ...]
    band: tuple[float, float]


@dataclass(frozen=True)
class CloneExperimentsResult:
    """Aggregates of the clone campaigns.

    ``clouds`` maps a mode count to ``(true_response, point rows,
    summary rows)`` with rows as in :class:`cvpuk.adversary.CloneCloud`;
    ``histograms`` maps ``(mode_count, fraction)`` to the in-bin
    frequency histogram of the clone ensemble; ``cheating_rows`` are
    ``(fraction, mode_count, accept_rate, trials)``.
    """

    clouds: dict
    histograms: dict
    cheating_rows: tuple[tuple[float, int, float, int], ...]
    p_in_expected: float


def _require(config: CampaignConfig, *experiment_ids: str) -> None:
    if config.experiment_id not in experiment_ids:
        raise ValueError(
            f"config is for {config.experiment_id!r}, expected one of {experiment_ids}"
        )


def run_collision_histogram(config: CampaignConfig) -> CollisionResult:
    """Verify one true key and a population of false keys.

    Enrolls a single random key exactly, verifies it, then verifies
    ``trials`` fresh random keys against the same database and bins
    their in-bin frequencies.
    """
    _require(config, "collision_histogram")
    coupling = uniform_coupling(config.n_modes, config.tau)
    probes = config.probe_set()
    channel = config.channel()
    verification = config.verification()

    true_key = generate_key(config.n_modes, config.l_over_L, substream(config.seed, 0))
    database = enroll_exact(true_key, coupling, probes, channel)
    true_report = verify(true_key, database, coupling, verification, substream(config.seed, 1))

    false_p_ins = []
    accepted = 0
    for trial in range(config.trials):
        impostor = false_key(config.n_modes, config.l_over_L, substream(config.seed, 2, trial))
        report = verify(impostor, database, coupling, verification, substream(config.seed, 3, trial))
        false_p_ins.append(report.p_in)
        accepted += report.accepted

    histogram = Histogram.from_samples(false_p_ins, config.histogram_bin)
    return CollisionResult(
        histogram=histogram,
        true_key_p_in=true_report.p_in,
        p_in_expected=true_report.p_in_expected,
        true_key_accepted=true_report.accepted,
        false_p_ins=tuple(false_p_ins),
        false_acceptance_rate=accepted / config.trials if config.trials else 0.0,
    )


def run_response_cloud(config: CampaignConfig) -> ResponseCloudResult:
    """Phase-space responses of false keys against one enrolled key's mask."""
    _require(config, "response_cloud")
    coupling = uniform_coupling(config.n_modes, config.tau)
    probe_amplitude = math.sqrt(config.mu_p)

    true_key = generate_key(config.n_modes, config.l_over_L, substream(config.seed, 0))
    mask = optimal_mask(true_key, coupling)
    gain = enhancement(true_key, coupling, mask, config.mu_c)
    rho_false, rho_true = radii(config.mu_c, true_key.variance, gain)

    def response_of(key):
        total = np.sum(key.coefficients * coupling.coefficients * np.exp(1j * mask.phases))
        return Response.from_amplitude(probe_amplitude * total)

    points = []
    for trial in range(config.trials):
        impostor = false_key(config.n_modes, config.l_over_L, substream(config.seed, 2, trial))
        response = response_of(impostor)
        points.append((trial, response.x, response.y))

    return ResponseCloudResult(
        true_response=response_of(true_key),
        points=tuple(points),
        rho_false=rho_false,
        rho_true=rho_true,
        enhancement=gain,
    )


def run_enhancement_condition(config: CampaignConfig,
                              photon_per_mode_values=None) -> EnhancementConditionResult:
    """Detection-threshold enhancement across mode counts and photon budgets.

    For each mean photon number per incoming mode, tabulates the
    enhancement needed for guaranteed false-key detection at every mode
    count, together with the band of enhancements reported for existing
    set-ups for overlay.
    """
    _require(config, "enhancement_condition")
    if photon_per_mode_values is None:
        photon_per_mode_values = config.photons_per_mode_values
    rows = []
    for photons_per_mode in photon_per_mode_values:
        if photons_per_mode <= 0.0:
            raise ValueError("photon numbers per mode must be positive")
        for n_modes in config.mode_counts:
            threshold = e_threshold(photons_per_mode * n_modes, n_modes, config.l_over_L)
            rows.append((float(photons_per_mode), int(n_modes), threshold))
    return EnhancementConditionResult(tuple(rows), REPORTED_ENHANCEMENT_BAND)


def run_clone_experiments(config: CampaignConfig, d_values=None) -> CloneExperimentsResult:
    """Clone clouds, in-bin histograms and cheating rates across mode counts.

    For every mode count, enrolls one true key and, for every clone
    fraction, builds ``trials`` independent clones; each clone
    contributes one phase-space response (under the first probe) and one
    full verification run.
    """
    _require(config, "clone_cloud", "clone_histograms", "cheating_curve")
    if d_values is None:
        d_values = config.d_values
    channel = config.channel()
    verification = config.verification()
    probe_phase_zero = math.sqrt(config.mu_p)

    clouds = {}
    histograms = {}
    cheating_rows = []
    for n_index, n_modes in enumerate(config.mode_counts):
        coupling = uniform_coupling(n_modes, config.tau)
        probes = ProbeSet(config.n_probe_states, config.mu_p)
        true_key = generate_key(n_modes, config.l_over_L, substream(config.seed, 4, n_index))
        database = enroll_exact(true_key, coupling, probes, channel)
        mask = database.mask

        def response_of(key):
            total = np.sum(key.coefficients * coupling.coefficients * np.exp(1j * mask.phases))
            return Response.from_amplitude(probe_phase_zero * total)

        point_rows = []
        summary_rows = []
        for d_index, fraction in enumerate(d_values):
            p_ins = []
            accepted = 0
            xs = np.empty(config.trials)
            ys = np.empty(config.trials)
            for trial in range(config.trials):
                clone, _ = clone_key(
                    true_key, fraction, substream(config.seed, 5, n_index, d_index, trial)
                )
                response = response_of(clone)
                xs[trial] = response.x
                ys[trial] = response.y
                point_rows.append((float(fraction), trial, response.x, response.y))
                report = verify(
                    clone, database, coupling, verification,
                    substream(config.seed, 6, n_index, d_index, trial),
                )
                p_ins.append(report.p_in)
                accepted += report.accepted
            mean_x = float(xs.mean()) if config.trials else 0.0
            mean_y = float(ys.mean()) if config.trials else 0.0
            spread = (
                float(np.sqrt(np.mean((xs - mean_x) ** 2 + (ys - mean_y) ** 2)))
                if config.trials
                else 0.0
            )
            summary_rows.append((float(fraction), mean_x, mean_y, spread))
            histograms[(n_modes, float(fraction))] = Histogram.from_samples(
                p_ins, config.histogram_bin
            )
            rate = accepted / config.trials if config.trials else 0.0
            cheating_rows.append((float(fraction), int(n_modes), rate, config.trials))
        clouds[n_modes] = (response_of(true_key), tuple(point_rows), tuple(summary_rows))

    return CloneExperimentsResult(
        clouds=clouds,
        histograms=histograms,
        cheating_rows=tuple(cheating_rows),
        p_in_expected=p_in_theoretical(channel),
    )


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def run_campaign(config: CampaignConfig, out_dir) -> dict[str, Path]:
    """Run one campaign and write its artifact directory.

    Always writes ``config.json`` (the fully resolved configuration,
    sufficient to reproduce the run) and ``summary.json`` with headline
    statistics, plus one or more CSV data files depending on the
    experiment.  Identical configurations produce byte-identical files.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {"config": out_dir / "config.json"}
    jsonio.dump(config.to_dict(), paths["config"])

    if config.experiment_id == "collision_histogram":
        result = run_collision_histogram(config)
        paths["histogram"] = out_dir / "histogram.csv"
        _write_csv(paths["histogram"], ("bin_left", "bin_right", "count"),
                   result.histogram.rows())
        summary = {
            "p_in_expected": result.p_in_expected,
            "true_key_p_in": result.true_key_p_in,
            "true_key_accepted": result.true_key_accepted,
            "false_acceptance_rate": result.false_acceptance_rate,
            "trials": config.trials,
        }
    elif config.experiment_id == "response_cloud":
        result = run_response_cloud(config)
        paths["cloud"] = out_dir / "cloud.csv"
        _write_csv(paths["cloud"], ("trial", "x", "y"), result.points)
        summary = {
            "true_x": result.true_response.x,
            "true_y": result.true_response.y,
            "rho_f": result.rho_false,
            "rho_t": result.rho_true,
            "enhancement": result.enhancement,
            "trials": config.trials,
        }
    elif config.experiment_id == "enhancement_condition":
        result = run_enhancement_condition(config)
        paths["thresholds"] = out_dir / "thresholds.csv"
        _write_csv(paths["thresholds"], ("photons_per_mode", "n_modes", "e_th"),
                   result.rows)
        summary = {"band_low": result.band[0], "band_high": result.band[1]}
    elif config.experiment_id in ("clone_cloud", "clone_histograms", "cheating_curve"):
        result = run_clone_experiments(config)
        summary = {"p_in_expected": result.p_in_expected, "trials": config.trials}
        if config.experiment_id == "clone_cloud":
            for n_modes, (true_response, point_rows, summary_rows) in result.clouds.items():
                key = f"cloud_n{n_modes}"
                paths[key] = out_dir / f"clone_cloud_n{n_modes}.csv"
                _write_csv(paths[key], ("D", "trial", "x", "y"), point_rows)
                summary[f"n{n_modes}"] = {
                    "true_x": true_response.x,
                    "true_y": true_response.y,
                    "clusters": [
                        {"D": d, "mean_x": mx, "mean_y": my, "std_radius": sr}
                        for d, mx, my, sr in summary_rows
                    ],
                }
        elif config.experiment_id == "clone_histograms":
            for n_modes in config.mode_counts:
                rows = []
                for fraction in config.d_values:
                    histogram = result.histograms[(n_modes, float(fraction))]
                    rows.extend(
                        (float(fraction), left, right, count)
                        for left, right, count in histogram.rows()
                    )
                key = f"histograms_n{n_modes}"
                paths[key] = out_dir / f"clone_histograms_n{n_modes}.csv"
                _write_csv(paths[key], ("D", "bin_left", "bin_right", "count"), rows)
        else:
            paths["cheating"] = out_dir / "cheating.csv"
            _write_csv(paths["cheating"], ("D", "n_modes", "accept_rate", "trials"),
                       result.cheating_rows)
            summary["acceptance"] = [
                {"D": d, "n_modes": n, "accept_rate": rate, "trials": trials}
                for d, n, rate, trials in result.cheating_rows
            ]
    else:  # pragma: no cover - guarded by CampaignConfig validation
        raise ValueError(f"unknown experiment_id {config.experiment_id!r}")

    paths["summary"] = out_dir / "summary.json"
    jsonio.dump(summary, paths["summary"])
    return paths
