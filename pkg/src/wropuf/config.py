"""Scenario files.

A scenario is an INI file (see ``docs/config.md``) with one section per
model component.  Every key is optional except ``[scenario] seed``; unknown
sections or keys are rejected so that typos fail loudly.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .population import ChipSpec, MeasurementPlan
from .ro import Environment, ROModelSpec
from .sampler import PufUnitSpec
from .thermo import ThermometerSpec

DEFAULT_SWEEP = (20.0, 30.0, 40.0, 50.0, 60.0, 70.0)


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    num_chips: int
    num_samples: int
    chip_spec: ChipSpec
    environment: Environment = field(default_factory=Environment)
    sweep_temperatures: tuple[float, ...] | None = None
    thermo_noise_sigma: float = 0.0
    hd_threshold: int | None = None
    golden_method: str = "mode"
    output_dir: str = "out"
    workers: int = 1

    @property
    def plan(self) -> MeasurementPlan:
        return MeasurementPlan(self.num_samples, self.environment, self.seed)


_SCENARIO_KEYS = {
    "name": str, "seed": int, "num_chips": int, "num_samples": int,
    "golden_method": str, "output_dir": str, "workers": int,
}
_UNIT_EXTRA = {"num_pairs": int}
_THERMO_EXTRA = {"noise_sigma": float}
_SWEEP_KEYS = {"temperatures": str, "hd_threshold": int}


def _types(cls) -> dict[str, type]:
    out = {}
    for f in fields(cls):
        t = f.type if isinstance(f.type, str) else f.type.__name__
        out[f.name] = int if t == "int" else float
    return out


def _section(cp, name, allowed) -> dict:
    if not cp.has_section(name):
        return {}
    out = {}
    for key, raw in cp.items(name):
        if key not in allowed:
            raise ConfigError(f"unknown key [{name}] {key}")
        conv = allowed[key]
        try:
            out[key] = conv(raw) if conv is not int else int(raw, 0)
        except ValueError:
            raise ConfigError(f"[{name}] {key}: cannot parse {raw!r} as {conv.__name__}") from None
    return out


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    known = {"scenario", "ro", "unit", "thermo", "environment", "sweep"}
    extra = set(cp.sections()) - known
    if extra:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(extra))}")

    sc = _section(cp, "scenario", _SCENARIO_KEYS)
    if "seed" not in sc:
        raise ConfigError("[scenario] seed is mandatory")
    ro = _section(cp, "ro", _types(ROModelSpec))
    unit = _section(cp, "unit", {**_types(PufUnitSpec), **_UNIT_EXTRA})
    thermo = _section(cp, "thermo", {**_types(ThermometerSpec), **_THERMO_EXTRA})
    env = _section(cp, "environment", _types(Environment))
    sweep = _section(cp, "sweep", _SWEEP_KEYS)

    temps = None
    if cp.has_section("sweep"):
        temps = DEFAULT_SWEEP
        if "temperatures" in sweep:
            try:
                temps = tuple(float(t) for t in sweep["temperatures"].split(",") if t.strip())
            except ValueError:
                raise ConfigError(f"[sweep] temperatures: cannot parse {sweep['temperatures']!r}") from None
    method = sc.get("golden_method", "mode")
    if method not in ("mode", "majority"):
        raise ConfigError(f"[scenario] golden_method must be mode or majority, got {method!r}")

    num_pairs = unit.pop("num_pairs", 12)
    thermo_noise = thermo.pop("noise_sigma", 0.0)
    chip_spec = ChipSpec(num_pairs, PufUnitSpec(**unit), ROModelSpec(**ro), ThermometerSpec(**thermo))
    return Scenario(
        name=sc.get("name", Path(source).stem),
        seed=sc["seed"],
        num_chips=sc.get("num_chips", 11),
        num_samples=sc.get("num_samples", 1000),
        chip_spec=chip_spec,
        environment=Environment(**env),
        sweep_temperatures=temps,
        thermo_noise_sigma=thermo_noise,
        hd_threshold=sweep.get("hd_threshold"),
        golden_method=method,
        output_dir=sc.get("output_dir", "out"),
        workers=sc.get("workers", 1),
    )


def bundled_scenarios() -> list[str]:
    root = resources.files("wropuf") / "scenarios"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def load_scenario(path_or_name: str) -> Scenario:
    """Load a scenario file, or a bundled scenario by name (e.g. ``spartan6_like``)."""
    path = Path(path_or_name)
    if path.is_file():
        return parse_scenario(path.read_text(), str(path))
    if path_or_name in bundled_scenarios():
        res = resources.files("wropuf") / "scenarios" / f"{path_or_name}.ini"
        return parse_scenario(res.read_text(), f"{path_or_name}.ini")
    raise ConfigError(f"no such scenario file or bundled scenario: {path_or_name}")
