"""False keys and imperfect clones for stress-testing verification.

A false key is simply a fresh random key; a clone copies the true key
but replaces a chosen fraction of its reflection coefficients with
fresh draws from the same ensemble, modelling a counterfeiter who knows
the material statistics but cannot reproduce every scatterer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .homodyne import HomodyneChannel, ProbeSet, Response
from .protocol import CrpDatabase, VerificationConfig, enroll_exact, verify
from .scattering import CouplingProfile, ScatteringKey, generate_key, optimal_mask

__all__ = [
    "CloneSpec",
    "CloneCloud",
    "false_key",
    "clone_key",
    "clone_response_cloud",
    "cheating_probability",
]


@dataclass(frozen=True)
class CloneSpec:
    """Which coefficients a clone replaced, and the requested fraction."""

    fraction: float
    replaced_indices: frozenset[int]


@dataclass(frozen=True)
class CloneCloud:
    """Phase-space responses of clone ensembles at several fractions.

    ``points`` rows are ``(fraction, trial, x, y)``.  Each summary row is
    ``(fraction, mean_x, mean_y, std_radius)`` where ``std_radius`` is the
    root-mean-square distance of the cloud from its own mean.
    """

    true_response: Response
    points: tuple[tuple[float, int, float, float], ...]
    summaries: tuple[tuple[float, float, float, float], ...]


def false_key(mode_count: int, l_over_L: float, rng: np.random.Generator,
              target_mode: int = 0) -> ScatteringKey:
    """A counterfeit key with no knowledge of the original: a fresh random key."""
    return generate_key(mode_count, l_over_L, rng, target_mode=target_mode)


def replaced_count(fraction: float, mode_count: int) -> int:
    """Number of coefficients a clone replaces: fraction * mode_count,
    rounded to the nearest integer with ties away from zero."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    return int(math.floor(fraction * mode_count + 0.5))


def clone_key(true_key: ScatteringKey, fraction: float,
              rng: np.random.Generator) -> tuple[ScatteringKey, CloneSpec]:
    """Imperfect copy of a key differing in a fraction of its coefficients.

    Picks the replaced positions uniformly without replacement and draws
    the replacements from the same complex Gaussian ensemble as the
    original; all other coefficients are copied exactly.
    """
    count = replaced_count(fraction, true_key.mode_count)
    coefficients = true_key.coefficients.copy()
    if count:
        indices = rng.choice(true_key.mode_count, size=count, replace=False)
        scale = math.sqrt(true_key.variance / 2.0)
        parts = rng.standard_normal((2, count))
        coefficients[indices] = scale * (parts[0] + 1j * parts[1])
    else:
        indices = np.empty(0, dtype=int)
    clone = ScatteringKey(
        coefficients=coefficients,
        variance=true_key.variance,
        mode_count=true_key.mode_count,
        target_mode=true_key.target_mode,
        l_over_L=true_key.l_over_L,
    )
    return clone, CloneSpec(float(fraction), frozenset(int(i) for i in indices))


def _response_under_mask(key: ScatteringKey, coupling: CouplingProfile,
                         mask, probe_amplitude: complex) -> Response:
    total = np.sum(key.coefficients * coupling.coefficients * np.exp(1j * mask.phases))
    return Response.from_amplitude(probe_amplitude * total)


def clone_response_cloud(true_key: ScatteringKey, coupling: CouplingProfile,
                         probes: ProbeSet, channel: HomodyneChannel,
                         d_values, trials: int,
                         rng: np.random.Generator) -> CloneCloud:
    """Responses of random clones under the true key's mask and first probe.

    For every fraction in ``d_values``, builds ``trials`` independent
    clones and records their responses, along with each cloud's mean
    point and scatter radius.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    mask = optimal_mask(true_key, coupling)
    probe_amplitude = probes.state(0).amplitude
    true_response = _response_under_mask(true_key, coupling, mask, probe_amplitude)

    points = []
    summaries = []
    for fraction in d_values:
        xs = np.empty(trials)
        ys = np.empty(trials)
        for trial in range(trials):
            clone, _ = clone_key(true_key, fraction, rng)
            response = _response_under_mask(clone, coupling, mask, probe_amplitude)
            xs[trial] = response.x
            ys[trial] = response.y
            points.append((float(fraction), trial, response.x, response.y))
        mean_x = float(xs.mean())
        mean_y = float(ys.mean())
        std_radius = float(np.sqrt(np.mean((xs - mean_x) ** 2 + (ys - mean_y) ** 2)))
        summaries.append((float(fraction), mean_x, mean_y, std_radius))
    return CloneCloud(true_response, tuple(points), tuple(summaries))


def cheating_probability(true_key: ScatteringKey, coupling: CouplingProfile,
                         probes: ProbeSet, channel: HomodyneChannel,
                         config: VerificationConfig, fraction: float,
                         trials: int, rng: np.random.Generator) -> float:
    """Fraction of random clones at the given fraction that pass verification."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    database: CrpDatabase = enroll_exact(true_key, coupling, probes, channel)
    accepted = 0
    for _ in range(trials):
        clone, _ = clone_key(true_key, fraction, rng)
        report = verify(clone, database, coupling, config, rng)
        accepted += report.accepted
    return accepted / trials
