"""RO thermometer and temperature-aware enrollment.

A third oscillator next to the PUF is counted over a fixed number of
system-clock cycles.  Since its period grows linearly with temperature the
count identifies the operating condition, and the verifier compares a fresh
ID against the golden ID enrolled at the nearest count.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from . import rng as streams
from .errors import InvariantError
from .ro import Environment, ROInstance, count_edges, effective_period

if TYPE_CHECKING:
    from .population import Chip, DeviceId, MeasurementPlan


@dataclass(frozen=True)
class ThermometerSpec:
    counter_bits: int = 16
    window_cycles: int = 1000
    sysclk_hz: float = 50e6

    def __post_init__(self):
        if self.counter_bits < 1 or self.window_cycles < 1:
            raise InvariantError("counter_bits and window_cycles must be >= 1")
        if not self.sysclk_hz > 0:
            raise InvariantError("sysclk_hz must be > 0")

    @property
    def window(self) -> float:
        return self.window_cycles / self.sysclk_hz

    @property
    def max_count(self) -> int:
        return (1 << self.counter_bits) - 1


@dataclass(frozen=True)
class EnrollmentRecord:
    temperature: float
    count: int
    golden: "DeviceId"


@dataclass(frozen=True)
class SweepRow:
    temperature: float
    avg_hd: float  # mean HD of the samples at this temperature to the reference golden
    golden_hd: int  # HD between this temperature's golden and the reference golden
    count: int
    thermo_period: float
    golden: "DeviceId"

    def record(self) -> EnrollmentRecord:
        return EnrollmentRecord(self.temperature, self.count, self.golden)


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    record: EnrollmentRecord
    distance: int


def thermometer_count(ro3: ROInstance, spec: ThermometerSpec, env: Environment, noise: float = 0.0) -> int:
    period = effective_period(ro3, env, noise)
    return min(count_edges(spec.window, period), spec.max_count)


def _read_thermometer(chip: "Chip", spec: ThermometerSpec, plan: "MeasurementPlan", sigma: float):
    rng = streams.substream(plan.seed, streams.THERMO, plan.campaign, chip.chip_index)
    noise = sigma * float(rng.standard_normal())
    period = effective_period(chip.thermometer, plan.environment, noise)
    return thermometer_count(chip.thermometer, spec, plan.environment, noise), period


def _measure_at(chip, spec, plan, sigma, method):
    from .population import golden_bits, measure_bits

    samples = measure_bits(chip, plan)
    count, period = _read_thermometer(chip, spec, plan, sigma)
    return samples, golden_bits(samples, method), count, period


def temp_sweep(
    chip: "Chip",
    temps: Sequence[float],
    plan: "MeasurementPlan",
    spec: ThermometerSpec,
    thermo_noise_sigma: float = 0.0,
    method: str = "mode",
) -> list[SweepRow]:
    """Drift of the ID away from the golden enrolled at the reference temperature.

    Each temperature is its own measurement campaign (campaign = 1 + index);
    the reference golden comes from campaign 0 at ``ref_temperature``.
    """
    from .population import DeviceId

    ref_plan = plan.at(plan.environment.ref_temperature, 0)
    _, ref_golden, _, _ = _measure_at(chip, spec, ref_plan, thermo_noise_sigma, method)
    rows = []
    for i, temp in enumerate(temps):
        samples, golden, count, period = _measure_at(
            chip, spec, plan.at(temp, i + 1), thermo_noise_sigma, method
        )
        hd = (samples != ref_golden).sum(axis=1)
        rows.append(SweepRow(
            float(temp), float(hd.mean()), int((golden != ref_golden).sum()), count, period,
            DeviceId(golden, chip.bits_per_pair),
        ))
    return rows


def population_sweep(chips, temps, plan, spec, thermo_noise_sigma=0.0, method="mode"):
    """Per-chip sweep tables plus the chip-averaged avg-HD per temperature."""
    tables = [temp_sweep(c, temps, plan, spec, thermo_noise_sigma, method) for c in chips]
    mean_hd = [float(np.mean([t[i].avg_hd for t in tables])) for i in range(len(temps))]
    return tables, mean_hd


def enroll(
    chip: "Chip",
    temps: Sequence[float],
    plan: "MeasurementPlan",
    spec: ThermometerSpec,
    thermo_noise_sigma: float = 0.0,
    method: str = "mode",
) -> list[EnrollmentRecord]:
    from .population import DeviceId

    if not temps:
        raise ValueError("enroll needs at least one temperature")
    records = []
    for i, temp in enumerate(temps):
        _, golden, count, _ = _measure_at(chip, spec, plan.at(temp, i + 1), thermo_noise_sigma, method)
        records.append(EnrollmentRecord(float(temp), count, DeviceId(golden, chip.bits_per_pair)))
    return records


def default_threshold(id_length: int) -> int:
    return int(0.15 * id_length)


def verify(observed_count: int, observed_id, records: Sequence[EnrollmentRecord], hd_threshold: int | None = None) -> Verdict:
    if not records:
        raise ValueError("verify needs at least one enrollment record")
    record = min(records, key=lambda r: (abs(r.count - observed_count), r.temperature))
    observed = np.asarray(getattr(observed_id, "bits", observed_id), dtype=np.uint8)
    if observed.shape != record.golden.bits.shape:
        raise ValueError("observed ID length differs from the enrolled golden")
    if hd_threshold is None:
        hd_threshold = default_threshold(observed.size)
    hd = int((observed != record.golden.bits).sum())
    return Verdict(hd <= hd_threshold, record, hd)


def bits_to_hex(bits) -> str:
    """MSB-first hex of a bit sequence, left-padded to a whole number of nibbles."""
    bits = [int(b) for b in (bits.bits if hasattr(bits, "bits") else bits)]
    width = (len(bits) + 3) // 4
    value = int("".join(map(str, bits)) or "0", 2)
    return format(value, f"0{width}x")


def hex_to_bits(text: str, length: int) -> np.ndarray:
    value = int(text, 16)
    if value >> length:
        raise ValueError(f"hex {text!r} does not fit in {length} bits")
    return np.array([int(c) for c in format(value, f"0{length}b")], dtype=np.uint8)


def write_enrollment(records: Iterable[EnrollmentRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["temperature_C", "count", "golden_hex"])
    for r in records:
        w.writerow([repr(r.temperature), r.count, bits_to_hex(r.golden)])
    return buf.getvalue()


def read_enrollment(text: str, l_ro: int, num_pairs: int) -> list[EnrollmentRecord]:
    from .population import DeviceId

    rows = csv.DictReader(io.StringIO(text))
    length = l_ro * num_pairs
    return [
        EnrollmentRecord(float(r["temperature_C"]), int(r["count"]), DeviceId(hex_to_bits(r["golden_hex"], length), l_ro))
        for r in rows
    ]
