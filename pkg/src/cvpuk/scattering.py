"""Random scattering keys and phase-only wavefront control.

A key is modelled as a single row of a random reflection matrix: one
complex field-reflection coefficient per controllable input mode, drawn
independently from a circular complex Gaussian whose variance is fixed
by the mode count and the thickness ratio of the diffusive medium.  A
phase-only modulator in front of the key steers the scattered field
into the target output mode; conjugating the phase of every
reflection-coupling product makes all terms of the scattered sum
interfere constructively, which is the global optimum of phase-only
control.

All operations are pure functions of their arguments plus an explicit
random generator, and all value types are immutable after construction,
so they are safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateKeyError",
    "ScatteringKey",
    "CouplingProfile",
    "PhaseMask",
    "wrap_phase",
    "generate_key",
    "uniform_coupling",
    "scattered_amplitude",
    "optimal_mask",
    "iterative_mask",
    "enhancement",
]

_TWO_PI = 2.0 * math.pi


class DegenerateKeyError(ValueError):
    """The key couples no light at all, so an optimal mask is undefined."""


def wrap_phase(phases):
    """Map angles (scalar or array) to canonical representatives in [-pi, pi)."""
    return np.mod(np.asarray(phases, dtype=float) + math.pi, _TWO_PI) - math.pi


@dataclass(frozen=True)
class ScatteringKey:
    """One row of a key's reflection matrix plus its generating parameters.

    Attributes
    ----------
    coefficients : ndarray of complex
        Field reflection coefficients from each input mode to the target
        mode.
    variance : float
        Per-coefficient ensemble variance, equal to
        ``(1 - l_over_L) / mode_count`` for the generating parameters.
        Stored explicitly so that ensemble formulas use the generating
        parameter rather than a noisy sample estimate.
    mode_count : int
        Number of controllable input modes.
    target_mode : int
        Opaque label of the collected output mode.
    l_over_L : float
        Mean-free-path to thickness ratio of the medium.
    """

    coefficients: np.ndarray
    variance: float
    mode_count: int
    target_mode: int
    l_over_L: float

    def __post_init__(self):
        coefficients = np.asarray(self.coefficients, dtype=complex)
        object.__setattr__(self, "coefficients", coefficients)
        if self.mode_count < 1:
            raise ValueError("mode_count must be at least 1")
        if coefficients.shape != (self.mode_count,):
            raise ValueError(
                f"expected {self.mode_count} coefficients, got shape {coefficients.shape}"
            )
        if not 0.0 <= self.l_over_L <= 1.0:
            raise ValueError("l_over_L must lie in [0, 1]")
        if not np.all(np.isfinite(coefficients)):
            raise ValueError("coefficients must be finite")
        expected = (1.0 - self.l_over_L) / self.mode_count
        if not math.isfinite(self.variance) or self.variance < 0.0:
            raise ValueError("variance must be finite and non-negative")
        if abs(self.variance - expected) > 1e-12 * max(expected, 1.0):
            raise ValueError("variance does not equal (1 - l_over_L) / mode_count")
        coefficients.flags.writeable = False

    def to_dict(self) -> dict:
        """JSON-ready document with coefficients as [re, im] pairs."""
        return {
            "mode_count": int(self.mode_count),
            "l_over_L": float(self.l_over_L),
            "target_mode": int(self.target_mode),
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coefficients],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScatteringKey":
        mode_count = int(data["mode_count"])
        l_over_L = float(data["l_over_L"])
        coefficients = np.array(
            [complex(re, im) for re, im in data["coefficients"]], dtype=complex
        )
        return cls(
            coefficients=coefficients,
            variance=(1.0 - l_over_L) / mode_count,
            mode_count=mode_count,
            target_mode=int(data["target_mode"]),
            l_over_L=l_over_L,
        )


@dataclass(frozen=True)
class CouplingProfile:
    """Fixed coupling from the probe fiber to the modulator's input modes.

    The coefficients are set-up constants, independent of any key, and
    their squared magnitudes sum to the power throughput ``loss``.
    """

    coefficients: np.ndarray
    loss: float

    def __post_init__(self):
        coefficients = np.asarray(self.coefficients, dtype=complex)
        object.__setattr__(self, "coefficients", coefficients)
        if coefficients.ndim != 1 or coefficients.size < 1:
            raise ValueError("coefficients must be a non-empty vector")
        if not 0.0 < self.loss <= 1.0:
            raise ValueError("loss must lie in (0, 1]")
        if not np.all(np.isfinite(coefficients)):
            raise ValueError("coefficients must be finite")
        power = float(np.sum(np.abs(coefficients) ** 2))
        if abs(power - self.loss) > 1e-12:
            raise ValueError("coupling power does not sum to the stated loss")
        coefficients.flags.writeable = False

    @property
    def mode_count(self) -> int:
        return self.coefficients.size


@dataclass(frozen=True)
class PhaseMask:
    """Per-mode phase settings of the modulator, wrapped into [-pi, pi)."""

    phases: np.ndarray

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=float)
        if phases.ndim != 1 or phases.size < 1:
            raise ValueError("phases must be a non-empty vector")
        if not np.all(np.isfinite(phases)):
            raise ValueError("phases must be finite")
        phases = wrap_phase(phases)
        phases.flags.writeable = False
        object.__setattr__(self, "phases", phases)

    def __len__(self) -> int:
        return self.phases.size

    def to_dict(self) -> dict:
        return {"phases": [float(p) for p in self.phases]}

    @classmethod
    def from_dict(cls, data: dict) -> "PhaseMask":
        return cls(np.array(data["phases"], dtype=float))


def generate_key(mode_count: int, l_over_L: float, rng: np.random.Generator,
                 target_mode: int = 0) -> ScatteringKey:
    """Draw a fresh random key.

    Each coefficient is an independent circular complex Gaussian with
    zero mean and total variance ``(1 - l_over_L) / mode_count``, split
    evenly between the real and imaginary parts so the phase is uniform.
    """
    if mode_count < 1:
        raise ValueError("mode_count must be at least 1")
    if not 0.0 <= l_over_L < 1.0:
        raise ValueError("l_over_L must lie in [0, 1)")
    variance = (1.0 - l_over_L) / mode_count
    scale = math.sqrt(variance / 2.0)
    parts = rng.standard_normal((2, mode_count))
    coefficients = scale * (parts[0] + 1j * parts[1])
    return ScatteringKey(
        coefficients=coefficients,
        variance=variance,
        mode_count=int(mode_count),
        target_mode=int(target_mode),
        l_over_L=float(l_over_L),
    )


def uniform_coupling(mode_count: int, loss: float) -> CouplingProfile:
    """Coupling profile for uniform illumination: all coefficients equal.

    Every coefficient is the real positive value ``sqrt(loss / mode_count)``
    so that the squared magnitudes sum to ``loss``.
    """
    if mode_count < 1:
        raise ValueError("mode_count must be at least 1")
    if not 0.0 < loss <= 1.0:
        raise ValueError("loss must lie in (0, 1]")
    value = math.sqrt(loss / mode_count)
    return CouplingProfile(np.full(mode_count, value, dtype=complex), float(loss))


def _phased_products(key: ScatteringKey, coupling: CouplingProfile) -> np.ndarray:
    if key.mode_count != coupling.mode_count:
        raise ValueError("key and coupling must have matching lengths")
    return key.coefficients * coupling.coefficients


def scattered_amplitude(key: ScatteringKey, coupling: CouplingProfile,
                        mask: PhaseMask, probe_amplitude: complex) -> complex:
    """Mean scattered field in the target mode for one probe.

    Returns the probe amplitude times the phase-controlled sum of the
    per-mode reflection and coupling products.  The result is linear in
    the probe amplitude by construction.
    """
    products = _phased_products(key, coupling)
    if len(mask) != key.mode_count:
        raise ValueError("mask length does not match the key's mode count")
    total = np.sum(products * np.exp(1j * mask.phases))
    return complex(probe_amplitude * total)


def optimal_mask(key: ScatteringKey, coupling: CouplingProfile) -> PhaseMask:
    """Globally optimal phase mask for the given key.

    Conjugates the phase of each reflection-coupling product, so every
    term of the scattered sum becomes real and non-negative.  No phase
    mask can produce a larger amplitude magnitude.
    """
    products = _phased_products(key, coupling)
    if not np.any(products != 0):
        raise DegenerateKeyError("all reflection-coupling products vanish")
    return PhaseMask(-np.angle(products))


def iterative_mask(key: ScatteringKey, coupling: CouplingProfile,
                   phase_levels: int, sweeps: int) -> PhaseMask:
    """Stepwise feedback optimization of the mask, one mode at a time.

    Visits every mode in index order, keeping for each the candidate
    phase (out of ``phase_levels`` equally spaced values) that maximizes
    the scattered intensity with all other phases held fixed, and
    repeats for ``sweeps`` passes.  Mirrors the feedback procedure used
    on real modulators.  The result never beats :func:`optimal_mask` and
    approaches it as the number of levels and sweeps grows; a single
    sweep is exact only when at most two modes interfere.
    """
    if phase_levels < 2:
        raise ValueError("phase_levels must be at least 2")
    if sweeps < 1:
        raise ValueError("sweeps must be at least 1")
    products = _phased_products(key, coupling)
    if not np.any(products != 0):
        raise DegenerateKeyError("all reflection-coupling products vanish")

    candidates = wrap_phase(_TWO_PI * np.arange(phase_levels) / phase_levels)
    rotations = np.exp(1j * candidates)
    phases = np.zeros(key.mode_count)
    rotated = products.astype(complex)
    total = rotated.sum()
    for _ in range(sweeps):
        for j in range(key.mode_count):
            rest = total - rotated[j]
            trials = rest + products[j] * rotations
            best = int(np.argmax(trials.real**2 + trials.imag**2))
            phases[j] = candidates[best]
            rotated[j] = products[j] * rotations[best]
            total = rest + rotated[j]
        # resynchronize the running sum; the incremental updates accumulate
        # rounding over many modes
        total = (products * np.exp(1j * phases)).sum()
    return PhaseMask(phases)


def enhancement(key: ScatteringKey, coupling: CouplingProfile, mask: PhaseMask,
                mean_challenge_photons: float) -> float:
    """Intensity gain of the masked key over the unoptimized ensemble mean.

    The photon number in the target mode is the squared magnitude of the
    scattered amplitude (coherence is preserved end to end), and the
    reference level is the ensemble-average photon number without
    optimization, ``variance * mean_challenge_photons``.  The probe
    strength cancels, so the ratio does not depend on it.
    """
    if mean_challenge_photons <= 0.0:
        raise ValueError("mean_challenge_photons must be positive")
    if key.variance <= 0.0:
        raise ValueError("a zero-variance key has no enhancement reference")
    probe_amplitude = math.sqrt(mean_challenge_photons / coupling.loss)
    amplitude = scattered_amplitude(key, coupling, mask, probe_amplitude)
    photons = abs(amplitude) ** 2
    return photons / (key.variance * mean_challenge_photons)
