"""Ring oscillators as square-wave sources.

Times are plain floats in seconds.  Two instants closer than
:data:`TIME_TOL` are considered simultaneous; every phase comparison goes
through that tolerance so that ties such as "sample lands exactly on an
edge" resolve the same way regardless of rounding.  All functions here also
accept :class:`fractions.Fraction` arguments, in which case the arithmetic
is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EnvironmentRangeError, InvariantError

TIME_TOL = 1e-15

# Draws with 1 + g at or below this are rejected and redrawn.
_MIN_PERIOD_FACTOR = 0.1


@dataclass(frozen=True)
class ROModelSpec:
    nominal_period: float = 1e-9
    stage_count: int = 5
    reference_stage_count: int = 5
    inter_chip_sigma: float = 0.0
    meas_noise_sigma: float = 0.0
    temp_coeff_mean: float = 0.0
    temp_coeff_sigma: float = 0.0
    volt_coeff: float = 0.0
    duty: float = 0.5
    # Std-dev of a per-position period offset shared by every chip of a design.
    layout_sigma: float = 0.0

    def __post_init__(self):
        if not self.nominal_period > 0:
            raise InvariantError(f"nominal_period must be > 0, got {self.nominal_period}")
        for name in ("stage_count", "reference_stage_count"):
            m = getattr(self, name)
            if m < 3 or m % 2 == 0:
                raise InvariantError(f"{name} must be odd and >= 3, got {m}")
        for name in ("inter_chip_sigma", "meas_noise_sigma", "temp_coeff_sigma", "layout_sigma"):
            if getattr(self, name) < 0:
                raise InvariantError(f"{name} must be >= 0")
        if not 0 < self.duty < 1:
            raise InvariantError(f"duty must lie in (0, 1), got {self.duty}")

    @property
    def scaled_period(self) -> float:
        """Nominal period after linear stage-count scaling."""
        return self.nominal_period * (self.stage_count / self.reference_stage_count)


@dataclass(frozen=True)
class ROInstance:
    ref_period: float
    temp_coeff: float = 0.0
    volt_coeff: float = 0.0

    def __post_init__(self):
        if not self.ref_period > 0:
            raise InvariantError(f"ref_period must be > 0, got {self.ref_period}")


@dataclass(frozen=True)
class Environment:
    temperature: float = 20.0
    voltage: float = 1.0
    ref_temperature: float = 20.0
    ref_voltage: float = 1.0

    def at(self, temperature: float) -> "Environment":
        return Environment(temperature, self.voltage, self.ref_temperature, self.ref_voltage)


def draw_instance(spec: ROModelSpec, rng: np.random.Generator) -> ROInstance:
    """Draw one oscillator from the process-variation model."""
    while True:
        factor = 1.0 + rng.normal(0.0, spec.inter_chip_sigma) if spec.inter_chip_sigma > 0 else 1.0
        if factor > _MIN_PERIOD_FACTOR:
            break
    if spec.temp_coeff_sigma > 0:
        alpha = rng.normal(spec.temp_coeff_mean, spec.temp_coeff_sigma)
    else:
        alpha = spec.temp_coeff_mean
    return ROInstance(spec.scaled_period * factor, float(alpha), spec.volt_coeff)


def period_multiplier(inst: ROInstance, env: Environment) -> float:
    return (
        1.0
        + inst.temp_coeff * (env.temperature - env.ref_temperature)
        - inst.volt_coeff * (env.voltage - env.ref_voltage)
    )


def effective_period(inst: ROInstance, env: Environment, noise: float = 0.0) -> float:
    """Period of ``inst`` under ``env`` with a per-measurement perturbation."""
    mult = period_multiplier(inst, env)
    if mult <= 0:
        raise EnvironmentRangeError(
            f"period multiplier {mult} <= 0 at T={env.temperature}, V={env.voltage}"
        )
    if 1 + noise <= 0:
        raise EnvironmentRangeError(f"noise {noise} makes the period non-positive")
    return inst.ref_period * mult * (1 + noise)


def wave_value(period, duty, t, tol: float = TIME_TOL) -> int:
    """Output of a square wave that starts low at t = 0.

    The wave is 0 on phase [0, duty) and 1 on [duty, 1).  An instant within
    ``tol`` of an edge is treated as lying on it, and an edge belongs to the
    interval it opens.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    r = t % period
    return int(duty * period - tol <= r < period - tol)


def wave_values(period, duty: float, t, tol: float = TIME_TOL) -> np.ndarray:
    """Vectorised :func:`wave_value`; negative instants read as 0."""
    t = np.asarray(t, dtype=float)
    period = np.asarray(period, dtype=float)
    r = np.mod(t, period)
    out = (r >= duty * period - tol) & (r < period - tol) & (t >= 0)
    return out.astype(np.uint8)


def edge_distance(period: float, duty: float, t: float) -> float:
    """Distance from ``t`` to the nearest transition of the wave.

    Transitions are the rising edges at (m + duty)·period, m >= 0, and the
    falling edges at m·period, m >= 1.  t = 0 is not a transition.
    """
    r = t % period
    d_rise = abs(r - duty * period)
    d_fall = period - r if t < period else min(r, period - r)
    return min(d_rise, d_fall)


def edge_distances(period, duty: float, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    period = np.asarray(period, dtype=float)
    r = np.mod(t, period)
    d_rise = np.abs(r - duty * period)
    d_fall = np.where(t < period, period - r, np.minimum(r, period - r))
    return np.minimum(d_rise, d_fall)


def count_edges(window: float, period: float, tol: float = TIME_TOL) -> int:
    """floor(window / period), with an edge within ``tol`` of the window end counted."""
    n = math.floor(window / period)
    if (n + 1) * period - window <= tol:
        n += 1
    return n
