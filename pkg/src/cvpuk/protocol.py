"""Enrollment and verification of scattering keys.

Enrollment characterizes a key once: it finds the optimal phase mask for
the key's target mode and records the key's response to every probe
state, either exactly (the idealized limit of unbounded sampling) or
from finite homodyne samples.  Verification replays randomly chosen
challenges against the stored records and accepts the key when the
fraction of outcomes that fall in the stored bins matches the public
in-bin probability within the error level.

A verification run is sequential and deterministic given its generator;
independent runs should use independently seeded generators.  The
database is immutable after enrollment, and the acceptance bins are
computed from the database alone, never from the key under test.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .homodyne import (
    HALF_PI,
    HomodyneChannel,
    ProbeSet,
    Response,
    p_in_theoretical,
)
from .scattering import CouplingProfile, PhaseMask, ScatteringKey, optimal_mask

__all__ = [
    "CrpRecord",
    "CrpDatabase",
    "VerificationConfig",
    "VerificationReport",
    "enroll_exact",
    "enroll_sampled",
    "enrollment_error",
    "total_enrollment_samples",
    "m_threshold",
    "verify",
    "e_threshold",
    "radii",
]

_SQRT2 = math.sqrt(2.0)
_THETAS = (0.0, HALF_PI)


@dataclass(frozen=True)
class CrpRecord:
    """One stored challenge-response pair.

    Couples a probe index with the enrolled response of the key under
    the enrolled mask, plus the estimation error bound ``xi`` of the
    enrollment procedure (0 for exact enrollment).
    """

    target_mode: int
    probe_index: int
    mask: PhaseMask
    response: Response
    estimation_error: float

    def __post_init__(self):
        if self.probe_index < 0:
            raise ValueError("probe_index must be non-negative")
        if self.estimation_error < 0.0:
            raise ValueError("estimation_error must be non-negative")


@dataclass(frozen=True)
class CrpDatabase:
    """The enrolled record set for one key: one record per probe state."""

    records: tuple[CrpRecord, ...]
    probe_set: ProbeSet
    channel: HomodyneChannel
    setup_loss: float

    def __post_init__(self):
        records = tuple(self.records)
        object.__setattr__(self, "records", records)
        if len(records) != self.probe_set.size:
            raise ValueError("need exactly one record per probe state")
        if [r.probe_index for r in records] != list(range(self.probe_set.size)):
            raise ValueError("records must be ordered by probe index 0..N-1")
        first = records[0]
        for record in records[1:]:
            if record.target_mode != first.target_mode:
                raise ValueError("all records must share the target mode")
            if not np.array_equal(record.mask.phases, first.mask.phases):
                raise ValueError("all records must share the phase mask")
        if not 0.0 < self.setup_loss <= 1.0:
            raise ValueError("setup_loss must lie in (0, 1]")

    @property
    def mask(self) -> PhaseMask:
        return self.records[0].mask

    @property
    def target_mode(self) -> int:
        return self.records[0].target_mode

    @property
    def mode_count(self) -> int:
        return len(self.mask)

    @property
    def enrollment_error(self) -> float:
        return max(record.estimation_error for record in self.records)

    def centers(self) -> np.ndarray:
        """Bin centres, shape (N, 2): column 0 for lo phase 0, column 1 for pi/2."""
        return np.array([[r.response.x, r.response.y] for r in self.records])

    def to_dict(self) -> dict:
        return {
            "target_mode": int(self.target_mode),
            "probe_set": {
                "size": int(self.probe_set.size),
                "mean_photons": float(self.probe_set.mean_photons),
            },
            "channel": self.channel.to_dict(),
            "setup_loss": float(self.setup_loss),
            "mask": [float(p) for p in self.mask.phases],
            "records": [
                {
                    "k": int(r.probe_index),
                    "x": float(r.response.x),
                    "y": float(r.response.y),
                    "xi": float(r.estimation_error),
                }
                for r in self.records
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CrpDatabase":
        probe_set = ProbeSet(
            int(data["probe_set"]["size"]), float(data["probe_set"]["mean_photons"])
        )
        channel = HomodyneChannel.from_dict(data["channel"])
        mask = PhaseMask(np.array(data["mask"], dtype=float))
        target_mode = int(data["target_mode"])
        records = tuple(
            CrpRecord(
                target_mode=target_mode,
                probe_index=int(r["k"]),
                mask=mask,
                response=Response(float(r["x"]), float(r["y"])),
                estimation_error=float(r["xi"]),
            )
            for r in sorted(data["records"], key=lambda r: int(r["k"]))
        )
        return cls(records, probe_set, channel, float(data["setup_loss"]))


def _enrolled_amplitudes(key: ScatteringKey, coupling: CouplingProfile,
                         mask: PhaseMask, probes: ProbeSet) -> np.ndarray:
    """Mean scattered amplitudes for all probe states under one mask."""
    total = np.sum(key.coefficients * coupling.coefficients * np.exp(1j * mask.phases))
    return total * probes.amplitudes()


def enroll_exact(key: ScatteringKey, coupling: CouplingProfile,
                 probes: ProbeSet, channel: HomodyneChannel) -> CrpDatabase:
    """Enroll a key with exact (noise-free) responses.

    The stored responses are the true quadrature means, the idealized
    limit of an enroller free to take unbounded samples; the estimation
    error of every record is zero.
    """
    mask = optimal_mask(key, coupling)
    amplitudes = _enrolled_amplitudes(key, coupling, mask, probes)
    records = tuple(
        CrpRecord(
            target_mode=key.target_mode,
            probe_index=k,
            mask=mask,
            response=Response.from_amplitude(amplitudes[k]),
            estimation_error=0.0,
        )
        for k in range(probes.size)
    )
    return CrpDatabase(records, probes, channel, coupling.loss)


def enroll_sampled(key: ScatteringKey, coupling: CouplingProfile,
                   probes: ProbeSet, channel: HomodyneChannel,
                   per_quadrature_samples: int, rng: np.random.Generator) -> CrpDatabase:
    """Enroll a key from finite homodyne samples.

    For each probe state and each of the two quadratures, draws
    ``per_quadrature_samples`` outcomes around the true quadrature mean
    and stores the sample means, for a total of
    ``2 * probes.size * per_quadrature_samples`` draws.  The recorded
    estimation error is ``5 / sqrt(per_quadrature_samples)``, which the
    sample mean respects with overwhelming probability.
    """
    if per_quadrature_samples < 1:
        raise ValueError("per_quadrature_samples must be at least 1")
    mask = optimal_mask(key, coupling)
    amplitudes = _enrolled_amplitudes(key, coupling, mask, probes)
    sigma = channel.shot_noise
    xi = enrollment_error(per_quadrature_samples)
    records = []
    for k in range(probes.size):
        x_true = _SQRT2 * amplitudes[k].real
        y_true = _SQRT2 * amplitudes[k].imag
        x_est = float(np.mean(rng.normal(x_true, sigma, size=per_quadrature_samples)))
        y_est = float(np.mean(rng.normal(y_true, sigma, size=per_quadrature_samples)))
        records.append(
            CrpRecord(
                target_mode=key.target_mode,
                probe_index=k,
                mask=mask,
                response=Response(x_est, y_est),
                estimation_error=xi,
            )
        )
    return CrpDatabase(tuple(records), probes, channel, coupling.loss)


def enrollment_error(per_quadrature_samples: int) -> float:
    """Estimation error bound 5 / sqrt(M_e) for a given per-quadrature sample size."""
    if per_quadrature_samples < 1:
        raise ValueError("per_quadrature_samples must be at least 1")
    return 5.0 / math.sqrt(per_quadrature_samples)


def total_enrollment_samples(n_probe_states: int, per_quadrature_samples: int) -> int:
    """Total draws of an enrollment: two quadratures for every probe state."""
    if n_probe_states <= 2:
        raise ValueError("a probe set must contain more than 2 states")
    if per_quadrature_samples < 1:
        raise ValueError("per_quadrature_samples must be at least 1")
    return 2 * n_probe_states * per_quadrature_samples


def m_threshold(epsilon: float, zeta: float) -> int:
    """Smallest session count that bounds the statistical deviation.

    With more than ``3 * ln(2 / zeta) / epsilon**2`` sessions, the
    in-bin frequency of the true key deviates from its expectation by at
    least ``epsilon`` with probability below ``zeta`` (Chernoff bound on
    the relative error of a Bernoulli mean).  The bound requires a
    strictly larger session count, so when the ceiling equals the exact
    value, one more session is returned.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if not 0.0 < zeta < 1.0:
        raise ValueError("zeta must lie in (0, 1)")
    exact = 3.0 * math.log(2.0 / zeta) / (epsilon * epsilon)
    threshold = math.ceil(exact)
    if threshold == exact:
        threshold += 1
    return int(threshold)


def e_threshold(mean_challenge_photons: float, mode_count: int, l_over_L: float) -> float:
    """Enhancement needed to guarantee false-key detection.

    Derived from requiring the true-key response radius to exceed the
    false-key radius by several shot-noise units in the worst case;
    approaches 16 as the photon number per mode grows.
    """
    if mean_challenge_photons <= 0.0:
        raise ValueError("mean_challenge_photons must be positive")
    if mode_count < 1:
        raise ValueError("mode_count must be at least 1")
    if not 0.0 <= l_over_L < 1.0:
        raise ValueError("l_over_L must lie in [0, 1)")
    photons_per_mode = (mean_challenge_photons / mode_count) * (1.0 - l_over_L)
    return 16.0 * (1.0 + 0.75 / math.sqrt(photons_per_mode)) ** 2


def radii(mean_challenge_photons: float, variance: float,
          enhancement: float) -> tuple[float, float]:
    """Characteristic response radii (false-key, true-key) in phase space.

    False-key responses concentrate within ``4 * sqrt(mu_c * variance)``
    of the origin; the optimized true-key response sits at radius
    ``sqrt(enhancement)`` quarters of that.
    """
    if mean_challenge_photons <= 0.0 or variance <= 0.0 or enhancement <= 0.0:
        raise ValueError("all arguments must be positive")
    rho_false = 4.0 * math.sqrt(mean_challenge_photons * variance)
    rho_true = math.sqrt(enhancement) * rho_false / 4.0
    return rho_false, rho_true


@dataclass(frozen=True)
class VerificationConfig:
    """Session count and convergence parameters of a verification run."""

    sessions: int
    error_level: float
    confidence_param: float

    def __post_init__(self):
        if self.sessions < 1:
            raise ValueError("sessions must be at least 1")
        if not 0.0 < self.error_level < 1.0:
            raise ValueError("error_level must lie in (0, 1)")
        if not 0.0 < self.confidence_param < 1.0:
            raise ValueError("confidence_param must lie in (0, 1)")


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one verification run.

    ``session_trace`` rows are ``(k, theta, outcome, hit)`` tuples when
    tracing was requested.  ``enrollment_error`` echoes the database's
    worst record error so downstream analysis can quantify how noisy
    enrollment propagates.
    """

    sessions: int
    hits: int
    p_in: float
    p_in_expected: float
    accepted: bool
    enrollment_error: float = 0.0
    session_trace: tuple[tuple[int, float, float, bool], ...] | None = None

    def to_dict(self) -> dict:
        return {
            "sessions": int(self.sessions),
            "hits": int(self.hits),
            "p_in": float(self.p_in),
            "p_in_expected": float(self.p_in_expected),
            "accepted": bool(self.accepted),
            "enrollment_error": float(self.enrollment_error),
        }


def verify(key_under_test: ScatteringKey, database: CrpDatabase,
           coupling: CouplingProfile, config: VerificationConfig,
           rng: np.random.Generator, trace: bool = False) -> VerificationReport:
    """Run the verification protocol against an enrolled database.

    Each session draws a probe index uniformly, computes the physical
    response of the key under test with the database's mask, measures
    one uniformly chosen quadrature with shot noise, and scores a hit
    when the outcome falls inside the closed bin centred on the stored
    (enrolled) response for that probe and quadrature.  The key is
    accepted when the hit frequency lies within ``error_level`` of the
    public in-bin probability.

    The generator is consumed in a fixed bulk order (all probe indices,
    then all quadrature choices, then all outcomes), so a run is fully
    reproducible from its seed.
    """
    if key_under_test.mode_count != database.mode_count:
        raise ValueError("key and database mode counts do not match")
    if coupling.mode_count != database.mode_count:
        raise ValueError("coupling and database mode counts do not match")

    channel = database.channel
    expected = p_in_theoretical(channel)
    if config.error_level >= expected / 2.0:
        warnings.warn(
            f"error_level {config.error_level} is not small against the "
            f"in-bin probability {expected}",
            stacklevel=2,
        )

    mask = database.mask
    amplitudes = _enrolled_amplitudes(key_under_test, coupling, mask, database.probe_set)
    means = np.column_stack((_SQRT2 * amplitudes.real, _SQRT2 * amplitudes.imag))
    centers = database.centers()
    half = 0.5 * channel.bin_width
    lows = centers - half
    highs = centers + half

    sessions = config.sessions
    ks = rng.integers(0, database.probe_set.size, size=sessions)
    quads = rng.integers(0, 2, size=sessions)
    outcomes = rng.normal(means[ks, quads], channel.shot_noise)
    hits = (outcomes >= lows[ks, quads]) & (outcomes <= highs[ks, quads])

    total_hits = int(hits.sum())
    p_in = total_hits / sessions
    session_trace = None
    if trace:
        session_trace = tuple(
            (int(k), _THETAS[q], float(outcome), bool(hit))
            for k, q, outcome, hit in zip(ks, quads, outcomes, hits)
        )
    return VerificationReport(
        sessions=sessions,
        hits=total_hits,
        p_in=p_in,
        p_in_expected=expected,
        accepted=bool(abs(p_in - expected) < config.error_level),
        enrollment_error=database.enrollment_error,
        session_trace=session_trace,
    )
