"""Command-line front end.

Exit status: 0 success, 1 runtime/input error, 2 configuration error,
3 model invariant violation.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import Scenario, load_scenario
from .corpus import dump_corpus, read_corpus
from .errors import ConfigError, CorpusError, InvariantError
from .metrics import MetricsReport, evaluate
from .population import generate_population, golden_bits, measure_population
from .report import (
    format_diffusiveness_table,
    format_fig4,
    format_histogram,
    format_report,
    format_sweep,
    write_atomic,
)
from .thermo import bits_to_hex, population_sweep, write_enrollment

log = logging.getLogger("wropuf")

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2, 3


def _scenario(args) -> Scenario:
    sc = load_scenario(args.config)
    if args.seed is not None:
        sc = replace(sc, seed=args.seed)
    if args.out_dir is not None:
        sc = replace(sc, output_dir=args.out_dir)
    if args.workers is not None:
        sc = replace(sc, workers=args.workers)
    return sc


def write_metrics(report: MetricsReport, out: Path, fmt: str) -> None:
    ext = "txt" if fmt == "kv" else "csv"
    write_atomic(out / f"report.{ext}", format_report(report, fmt))
    write_atomic(out / "intra_hd.csv", format_histogram(report.intra_hd_hist, report.id_length))
    write_atomic(out / "inter_hd.csv", format_histogram(report.inter_hd_hist, report.id_length))
    write_atomic(out / "diffusiveness.csv", format_diffusiveness_table(report))


def run_simulation(sc: Scenario, fmt: str = "kv") -> MetricsReport:
    """Simulate ``sc`` and write its artifacts to ``sc.output_dir``."""
    spec = sc.chip_spec
    l_ro = spec.unit_spec.bits_per_pair
    chips = generate_population(sc.num_chips, spec, sc.seed)
    samples = measure_population(chips, sc.plan, sc.workers)
    report = evaluate(samples, l_ro, sc.golden_method, sc.name)
    out = Path(sc.output_dir)
    write_metrics(report, out, fmt)
    write_atomic(out / "corpus.tsv", dump_corpus(samples, l_ro, sc.name))
    goldens = "chip,golden_hex\n" + "".join(
        f"{n},{bits_to_hex(golden_bits(s, sc.golden_method))}\n" for n, s in enumerate(samples)
    )
    write_atomic(out / "goldens.csv", goldens)
    if sc.sweep_temperatures is not None:
        run_sweep(sc, chips)
    return report


def run_sweep(sc: Scenario, chips=None) -> None:
    spec = sc.chip_spec
    if chips is None:
        chips = generate_population(sc.num_chips, spec, sc.seed)
    temps = sc.sweep_temperatures or ()
    tables, mean_hd = population_sweep(
        chips, temps, sc.plan, spec.thermo_spec, sc.thermo_noise_sigma, sc.golden_method
    )
    out = Path(sc.output_dir)
    write_atomic(out / "sweep.csv", format_sweep(tables, mean_hd))
    # Sweep campaigns are the enrollment campaigns, so reuse their goldens.
    for chip, rows in zip(chips, tables):
        records = [row.record() for row in rows]
        write_atomic(out / f"enrollment_chip{chip.chip_index}.csv", write_enrollment(records))


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    report = run_simulation(sc, args.format)
    sys.stdout.write(format_report(report, args.format))
    return EXIT_OK


def cmd_sweep(args) -> int:
    sc = _scenario(args)
    if sc.sweep_temperatures is None:
        from .config import DEFAULT_SWEEP

        sc = replace(sc, sweep_temperatures=DEFAULT_SWEEP)
    run_sweep(sc)
    sys.stdout.write((Path(sc.output_dir) / "sweep.csv").read_text())
    return EXIT_OK


def ingest(path, method: str = "mode") -> MetricsReport:
    corpus = read_corpus(path)
    report = evaluate(corpus.samples, corpus.l_ro, method, corpus.name)
    for w in report.warnings:
        log.warning(w)
    return report


def cmd_ingest(args) -> int:
    report = ingest(args.corpus, args.golden_method)
    if args.out_dir is not None:
        write_metrics(report, Path(args.out_dir), args.format)
    sys.stdout.write(format_report(report, args.format))
    return EXIT_OK


def cmd_fig4(args) -> int:
    ratios = [r.strip() for r in args.ratios.split(",") if r.strip()]
    text = format_fig4(ratios, args.len, args.duty)
    if args.out_dir is not None:
        write_atomic(Path(args.out_dir) / "fig4.csv", text)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wropuf", description="Waveform RO-PUF simulator and metric toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out-dir", default=None, help="directory for output artifacts")
        sp.add_argument("--format", choices=("csv", "kv"), default="kv", help="report format")

    for name, fn, help_ in (
        ("simulate", cmd_simulate, "simulate a scenario and evaluate it"),
        ("sweep", cmd_sweep, "temperature sweep and enrollment for a scenario"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", help="scenario file, or the name of a bundled scenario")
        sp.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        sp.add_argument("--workers", type=int, default=None, help="threads for chip measurement")
        common(sp)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("ingest", help="evaluate a measured response corpus")
    sp.add_argument("corpus")
    sp.add_argument("--golden-method", choices=("mode", "majority"), default="mode")
    sp.add_argument("--seed", type=int, default=None, help=argparse.SUPPRESS)
    common(sp)
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("fig4", help="ideal beat patterns for RO period ratios")
    sp.add_argument("--ratios", required=True, help="comma-separated t1/t2 ratios, e.g. 1.2,1.1")
    sp.add_argument("--len", type=int, default=32, help="number of samples")
    sp.add_argument("--duty", default="0.5")
    sp.add_argument("--seed", type=int, default=None, help=argparse.SUPPRESS)
    common(sp)
    sp.set_defaults(func=cmd_fig4)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config: %s", exc)
        return EXIT_CONFIG
    except InvariantError as exc:
        log.error("invariant violated: %s", exc)
        return EXIT_INVARIANT
    except (CorpusError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
