"""Virtual chip populations, measurement campaigns and golden IDs."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import rng as streams
from .errors import InvariantError
from .ro import Environment, ROInstance, ROModelSpec, draw_instance, effective_period
from .sampler import PufUnit, PufUnitSpec, Response, capture_bits, draw_unit
from .thermo import ThermometerSpec


@dataclass(frozen=True)
class ChipSpec:
    num_pairs: int = 12
    unit_spec: PufUnitSpec = field(default_factory=PufUnitSpec)
    ro_model: ROModelSpec = field(default_factory=ROModelSpec)
    thermo_spec: ThermometerSpec = field(default_factory=ThermometerSpec)

    def __post_init__(self):
        if self.num_pairs < 1:
            raise InvariantError("num_pairs must be >= 1")

    @property
    def id_length(self) -> int:
        return self.num_pairs * self.unit_spec.bits_per_pair


@dataclass(frozen=True)
class Chip:
    chip_index: int
    units: tuple[PufUnit, ...]
    thermometer: ROInstance

    @property
    def num_pairs(self) -> int:
        return len(self.units)

    @property
    def bits_per_pair(self) -> int:
        return self.units[0].spec.bits_per_pair


class DeviceId:
    """An L = K·l_RO bit device ID, pair 1's response first."""

    __slots__ = ("_bits", "l_ro")

    def __init__(self, bits, l_ro: int):
        arr = np.array(bits, dtype=np.uint8).reshape(-1)
        if l_ro < 1 or arr.size % l_ro:
            raise InvariantError(f"ID length {arr.size} is not a multiple of l_RO={l_ro}")
        if arr.size and arr.max() > 1:
            raise InvariantError("bits must be 0 or 1")
        arr.flags.writeable = False
        self._bits = arr
        self.l_ro = l_ro

    @classmethod
    def from_responses(cls, responses: Sequence[Response]) -> "DeviceId":
        l_ro = len(responses[0])
        return cls(np.concatenate([np.array(r.bits, dtype=np.uint8) for r in responses]), l_ro)

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def num_pairs(self) -> int:
        return self._bits.size // self.l_ro

    @property
    def per_pair(self) -> tuple[Response, ...]:
        rows = self._bits.reshape(self.num_pairs, self.l_ro)
        return tuple(Response(tuple(int(b) for b in row)) for row in rows)

    def __len__(self):
        return self._bits.size

    def __str__(self):
        return "".join("1" if b else "0" for b in self._bits)

    def __repr__(self):
        return f"DeviceId({str(self)!r}, l_ro={self.l_ro})"

    def __eq__(self, other):
        if not isinstance(other, DeviceId):
            return NotImplemented
        return self.l_ro == other.l_ro and np.array_equal(self._bits, other._bits)

    def __hash__(self):
        return hash((self.l_ro, self._bits.tobytes()))

    def __lt__(self, other):
        return str(self) < str(other)


@dataclass(frozen=True)
class MeasurementPlan:
    num_samples: int = 1000
    environment: Environment = field(default_factory=Environment)
    seed: int = 0
    # Distinguishes campaigns on the same chips (e.g. sweep temperatures).
    campaign: int = 0

    def __post_init__(self):
        if self.num_samples < 1:
            raise InvariantError("num_samples must be >= 1")

    def at(self, temperature: float, campaign: int) -> "MeasurementPlan":
        return MeasurementPlan(self.num_samples, self.environment.at(temperature), self.seed, campaign)


def layout_models(spec: ChipSpec, seed: int) -> list[tuple[ROModelSpec, ROModelSpec]]:
    """RO1/RO2 model per pair position, with the design-wide layout offset
    folded into the nominal period.  Identical for every chip of a seed."""
    ro = spec.ro_model
    if ro.layout_sigma == 0:
        return [(ro, ro)] * spec.num_pairs
    rng = streams.substream(seed, streams.LAYOUT)
    factors = 1 + rng.normal(0.0, ro.layout_sigma, (spec.num_pairs, 2))
    if np.any(factors <= 0.1):
        raise InvariantError("layout_sigma too large: non-positive nominal period")
    return [
        (replace(ro, nominal_period=ro.nominal_period * f1), replace(ro, nominal_period=ro.nominal_period * f2))
        for f1, f2 in factors
    ]


def generate_chip(chip_index: int, spec: ChipSpec, seed: int, layout=None) -> Chip:
    if layout is None:
        layout = layout_models(spec, seed)
    rng = streams.substream(seed, streams.CHIP, chip_index)
    units = tuple(draw_unit(spec.unit_spec, m1, rng, m2) for m1, m2 in layout)
    thermometer = draw_instance(spec.ro_model, rng)
    return Chip(chip_index, units, thermometer)


def generate_population(num_chips: int, spec: ChipSpec, seed: int) -> list[Chip]:
    if num_chips < 1:
        raise InvariantError("num_chips must be >= 1")
    layout = layout_models(spec, seed)
    return [generate_chip(n, spec, seed, layout) for n in range(num_chips)]


def measure_bits(chip: Chip, plan: MeasurementPlan) -> np.ndarray:
    """Raw (T, L) uint8 array of T device IDs measured on ``chip``.

    Measurement t of chip n draws, from stream (MEASURE, campaign, n, t),
    first a (K, 2) block of standard normals (RO1/RO2 period noise per pair)
    and then a (K, l_RO) block of uniforms for metastable captures.
    """
    units = chip.units
    K, l_ro, T = len(units), chip.bits_per_pair, plan.num_samples
    spec = units[0].spec
    sigma = np.array([[u.meas_noise_sigma] * 2 for u in units])
    normals = np.empty((T, K, 2))
    coins = np.empty((T, K, l_ro)) if spec.metastability_window > 0 else None
    for t in range(T):
        rng = streams.substream(plan.seed, streams.MEASURE, plan.campaign, chip.chip_index, t)
        normals[t] = rng.standard_normal((K, 2))
        if coins is not None:
            coins[t] = rng.random((K, l_ro))
    noise = normals * sigma
    env = plan.environment
    base = np.array([[effective_period(u.ro1, env), effective_period(u.ro2, env)] for u in units])
    if np.any(1 + noise <= 0):
        effective_period(units[0].ro1, env, float(noise.min()))  # raises
    periods = base * (1 + noise)
    skews = np.array([u.ff_skews for u in units])
    bits = capture_bits(
        periods[..., 0:1], periods[..., 1:2], units[0].duty, skews,
        spec.metastability_window, coins, spec.metastable_p_one,
    )
    return bits.reshape(T, K * l_ro)


def measure_device(chip: Chip, plan: MeasurementPlan) -> list[DeviceId]:
    l_ro = chip.bits_per_pair
    return [DeviceId(row, l_ro) for row in measure_bits(chip, plan)]


def measure_population(chips: Sequence[Chip], plan: MeasurementPlan, workers: int = 1) -> list[np.ndarray]:
    """:func:`measure_bits` for every chip; the result does not depend on ``workers``."""
    if workers <= 1:
        return [measure_bits(c, plan) for c in chips]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: measure_bits(c, plan), chips))


def golden_bits(samples: np.ndarray, method: str = "mode") -> np.ndarray:
    """Golden pattern of a (T, L) sample array.

    ``mode``: the most frequent full pattern, ties to the lexicographically
    smallest.  ``majority``: bitwise majority, ties to 0.
    """
    samples = np.asarray(samples, dtype=np.uint8)
    if samples.ndim != 2 or samples.shape[0] == 0:
        raise ValueError("golden ID needs a non-empty (T, L) sample array")
    if method == "mode":
        patterns, counts = np.unique(samples, axis=0, return_counts=True)
        return patterns[int(np.argmax(counts))]
    if method == "majority":
        ones = samples.sum(axis=0, dtype=np.int64)
        return (2 * ones > samples.shape[0]).astype(np.uint8)
    raise ValueError(f"unknown golden-ID method {method!r}")


def golden_id(samples: Sequence[DeviceId], method: str = "mode") -> DeviceId:
    if not samples:
        raise ValueError("golden_id of an empty sample set")
    l_ro = samples[0].l_ro
    return DeviceId(golden_bits(np.stack([s.bits for s in samples]), method), l_ro)
