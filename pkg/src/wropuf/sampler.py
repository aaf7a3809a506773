"""The RO-pair sampling unit.

RO1's waveform is latched at RO2's rising edges by a chain of flip-flops.
Flip-flop ``k`` fires at the k-th rising edge of RO2 plus a wiring skew that
is fixed per chip.  A capture that lands within the metastability window of
an RO1 transition resolves to a random bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvariantError
from .ro import (
    Environment,
    ROInstance,
    ROModelSpec,
    draw_instance,
    edge_distance,
    edge_distances,
    effective_period,
    wave_value,
    wave_values,
)


@dataclass(frozen=True)
class PufUnitSpec:
    bits_per_pair: int = 32
    ff_skew_sigma: float = 0.0
    metastability_window: float = 0.0
    # P(bit = 1) for a metastable capture.
    metastable_p_one: float = 0.5

    def __post_init__(self):
        if self.bits_per_pair < 1:
            raise InvariantError("bits_per_pair must be >= 1")
        if self.ff_skew_sigma < 0 or self.metastability_window < 0:
            raise InvariantError("ff_skew_sigma and metastability_window must be >= 0")
        if not 0 <= self.metastable_p_one <= 1:
            raise InvariantError("metastable_p_one must lie in [0, 1]")


@dataclass(frozen=True)
class Response:
    bits: tuple[int, ...]

    def __str__(self):
        return "".join(map(str, self.bits))

    def __len__(self):
        return len(self.bits)

    @classmethod
    def from_string(cls, s: str) -> "Response":
        return cls(tuple(int(c) for c in s))


@dataclass(frozen=True)
class PufUnit:
    ro1: ROInstance
    ro2: ROInstance
    ff_skews: tuple[float, ...]
    spec: PufUnitSpec
    duty: float = 0.5
    meas_noise_sigma: float = 0.0

    def __post_init__(self):
        if len(self.ff_skews) != self.spec.bits_per_pair:
            raise InvariantError(
                f"{len(self.ff_skews)} skews for a {self.spec.bits_per_pair}-bit unit"
            )


@dataclass(frozen=True)
class SamplingRun:
    environment: Environment = field(default_factory=Environment)
    noise1: float = 0.0
    noise2: float = 0.0


def draw_unit(
    unit_spec: PufUnitSpec, ro_model: ROModelSpec, rng: np.random.Generator, ro2_model: ROModelSpec | None = None
) -> PufUnit:
    ro1 = draw_instance(ro_model, rng)
    ro2 = draw_instance(ro2_model or ro_model, rng)
    if unit_spec.ff_skew_sigma > 0:
        skews = rng.normal(0.0, unit_spec.ff_skew_sigma, unit_spec.bits_per_pair)
    else:
        skews = np.zeros(unit_spec.bits_per_pair)
    return PufUnit(
        ro1, ro2, tuple(float(s) for s in skews), unit_spec,
        duty=ro_model.duty, meas_noise_sigma=ro_model.meas_noise_sigma,
    )


def sampling_instant(unit: PufUnit, run: SamplingRun, k: int) -> float:
    if not 0 <= k < unit.spec.bits_per_pair:
        raise IndexError(k)
    t2 = effective_period(unit.ro2, run.environment, run.noise2)
    return (k + unit.duty) * t2 + unit.ff_skews[k]


def capture_bit(unit: PufUnit, run: SamplingRun, k: int, rng: np.random.Generator) -> int:
    s = max(sampling_instant(unit, run, k), 0.0)
    t1 = effective_period(unit.ro1, run.environment, run.noise1)
    eps = unit.spec.metastability_window
    if eps > 0 and edge_distance(t1, unit.duty, s) < eps:
        return int(rng.random() < unit.spec.metastable_p_one)
    return wave_value(t1, unit.duty, s)


def capture_bits(t1, t2, duty: float, skews, eps: float, coins=None, p_one: float = 0.5) -> np.ndarray:
    """Captured bits for broadcastable arrays of RO1/RO2 periods.

    ``t1`` and ``t2`` carry a trailing axis of length 1 (or are scalars);
    ``skews`` has the bit axis last.  ``coins`` are uniform draws, same shape
    as the output, consumed only where a capture is metastable.
    """
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    skews = np.asarray(skews, dtype=float)
    k = np.arange(skews.shape[-1], dtype=float)
    s = np.maximum((k + duty) * t2 + skews, 0.0)
    bits = wave_values(t1, duty, s)
    if eps > 0:
        meta = edge_distances(t1, duty, s) < eps
        if coins is None:
            raise ValueError("coins are required when the metastability window is enabled")
        bits = np.where(meta, (np.asarray(coins) < p_one).astype(np.uint8), bits)
    return bits


def draw_run_noise(unit: PufUnit, rng: np.random.Generator) -> tuple[float, float]:
    n1, n2 = unit.meas_noise_sigma * rng.standard_normal(2)
    return float(n1), float(n2)


def sample_response(unit: PufUnit, env: Environment, rng: np.random.Generator) -> Response:
    """One EN cycle: draw the run's period noise, then capture every bit."""
    noise1, noise2 = draw_run_noise(unit, rng)
    coins = rng.random(unit.spec.bits_per_pair)
    t1 = effective_period(unit.ro1, env, noise1)
    t2 = effective_period(unit.ro2, env, noise2)
    bits = capture_bits(
        t1, t2, unit.duty, unit.ff_skews, unit.spec.metastability_window,
        coins, unit.spec.metastable_p_one,
    )
    return Response(tuple(int(b) for b in bits))


def ideal_beat(t1, t2, duty=0.5, n: int = 32) -> Response:
    """Noiseless, skew-free reference: bit k is RO1's value at RO2's k-th rising edge."""
    if not (t1 > 0 and t2 > 0):
        raise ValueError("periods must be positive")
    return Response(tuple(wave_value(t1, duty, (k + duty) * t2) for k in range(n)))


def beat_period(bits: Sequence[int]) -> int:
    """Smallest p such that bits[i] == bits[i + p] throughout ``bits``."""
    n = len(bits)
    for p in range(1, n):
        if all(bits[i] == bits[i + p] for i in range(n - p)):
            return p
    return n
