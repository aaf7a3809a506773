"""Text and CSV renderings of metric reports, histograms and sweep tables.

All output is locale-independent, uses ``\\n`` line endings and a fixed
column order, so the same inputs always give byte-identical files.
"""
from __future__ import annotations

import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .metrics import MetricsReport, hamming_distance, histogram_mode
from .sampler import ideal_beat
from .thermo import SweepRow


def pct(x: float | None) -> str:
    return "undefined" if x is None else f"{x:.2f}"


def _pct_list(xs) -> str:
    return "undefined" if xs is None else ",".join(f"{x:.2f}" for x in xs)


def report_items(r: MetricsReport) -> list[tuple[str, str]]:
    items = [
        ("name", r.name),
        ("num_chips", str(r.num_chips)),
        ("num_pairs", str(r.num_pairs)),
        ("bits_per_pair", str(r.bits_per_pair)),
        ("id_length", str(r.id_length)),
        ("num_samples", str(r.num_samples)),
        ("uniformity", pct(r.uniformity)),
        ("reliability", pct(r.reliability)),
        ("uniqueness", pct(r.uniqueness)),
        ("diffusiveness", pct(r.diffusiveness)),
        ("intra_hd_mode", str(histogram_mode(r.intra_hd_hist))),
        ("inter_hd_mode", str(histogram_mode(r.inter_hd_hist)) if r.inter_hd_hist else "undefined"),
        ("uniformity_per_chip", _pct_list(r.uniformity_per_chip)),
        ("reliability_per_chip", _pct_list(r.reliability_per_chip)),
        ("diffusiveness_per_chip", _pct_list(r.diffusiveness_per_chip)),
    ]
    items += [("warning", w) for w in r.warnings]
    return items


def format_report(r: MetricsReport, fmt: str = "kv") -> str:
    items = report_items(r)
    if fmt == "kv":
        return "".join(f"{k} = {v}\n" for k, v in items)
    if fmt == "csv":
        return "key,value\n" + "".join(f'{k},"{v}"\n' for k, v in items)
    raise ValueError(f"unknown report format {fmt!r}")


def format_histogram(hist: dict[int, int], length: int) -> str:
    """``hd,count`` rows for every HD from 0 to ``length``."""
    return "hd,count\n" + "".join(f"{h},{hist.get(h, 0)}\n" for h in range(length + 1))


def format_diffusiveness_table(r: MetricsReport) -> str:
    if r.diffusiveness_by_pairs is None:
        return "k\n"
    head = ["k"] + [f"chip_{n}" for n in range(r.num_chips)] + ["average"]
    avg = r.average_diffusiveness_by_pairs()
    lines = [",".join(head)]
    for i, k in enumerate(range(2, r.num_pairs + 1)):
        row = [str(k)] + [f"{c[i]:.2f}" for c in r.diffusiveness_by_pairs] + [f"{avg[i]:.2f}"]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def format_sweep(tables: Sequence[Sequence[SweepRow]], mean_hd: Sequence[float]) -> str:
    lines = ["chip,temperature_C,avg_hd,golden_hd,count,thermo_period_s"]
    for n, rows in enumerate(tables):
        for row in rows:
            lines.append(f"{n},{row.temperature!r},{row.avg_hd:.4f},{row.golden_hd},{row.count},{row.thermo_period!r}")
    for row, m in zip(tables[0], mean_hd):
        lines.append(f"mean,{row.temperature!r},{m:.4f},,,")
    return "\n".join(lines) + "\n"


def format_fig4(ratios: Sequence[str], length: int, duty: str = "0.5") -> str:
    """Ideal beat patterns, one column per RO1/RO2 period ratio, plus a
    pairwise-HD footer when more than one ratio is given."""
    d = Fraction(duty)
    cols = []
    for text in ratios:
        r = Fraction(text)
        if r <= 0:
            raise ValueError(f"ratio must be > 0, got {text}")
        cols.append(ideal_beat(r, Fraction(1), d, length).bits)
    lines = [",".join(["k"] + [f"ratio_{t}" for t in ratios])]
    for k in range(length):
        lines.append(",".join([str(k)] + [str(c[k]) for c in cols]))
    for i in range(len(cols)):
        for j in range(i + 1, len(cols)):
            lines.append(f"# hd ratio_{ratios[i]} ratio_{ratios[j]} = {hamming_distance(cols[i], cols[j])}")
    return "\n".join(lines) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
