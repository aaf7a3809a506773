from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from wropuf.cli import ingest, main
from wropuf.config import bundled_scenarios, load_scenario, parse_scenario
from wropuf.corpus import dump_corpus, parse_corpus
from wropuf.errors import ConfigError, CorpusError
from wropuf.metrics import evaluate

from test_metrics import MEASURED_PAIRS

TINY = """
[scenario]
seed = 5
num_chips = {n}
num_samples = 20
[unit]
num_pairs = 3
bits_per_pair = 16
ff_skew_sigma = 20e-12
[ro]
layout_sigma = 0.03
inter_chip_sigma = 0.01
meas_noise_sigma = 2e-4
"""


def write(tmp_path, text, name="s.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def snapshot(d: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_bundled_scenarios_load():
    assert "spartan6_like" in bundled_scenarios()
    for name in bundled_scenarios():
        sc = load_scenario(name)
        assert sc.seed is not None and sc.chip_spec.id_length > 0
    sc = load_scenario("spartan6_like")
    assert (sc.num_chips, sc.chip_spec.num_pairs, sc.chip_spec.unit_spec.bits_per_pair) == (11, 12, 32)


@pytest.mark.parametrize("text", [
    "[scenario]\nnum_chips = 3\n",
    "[scenario]\nseed = 1\n[bogus]\nx = 1\n",
    "[scenario]\nseed = 1\nnum_chip = 3\n",
    "[scenario]\nseed = abc\n",
    "[scenario]\nseed = 1\ngolden_method = median\n",
    "not an ini file",
])
def test_parse_errors(text):
    with pytest.raises(ConfigError):
        parse_scenario(text)


def test_config_error_exit_code(tmp_path, caplog):
    assert main(["simulate", write(tmp_path, "[scenario]\nseed = x\n")]) == 2
    assert "cannot parse" in caplog.text
    assert main(["simulate", str(tmp_path / "missing.ini")]) == 2


def test_invariant_exit_code(tmp_path):
    path = write(tmp_path, "[scenario]\nseed = 1\n[ro]\nstage_count = 4\n")
    assert main(["simulate", path, "--out-dir", str(tmp_path / "o")]) == 3


def test_simulate_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["simulate", write(tmp_path, TINY.format(n=4)), "--out-dir", str(out)]) == 0
    names = set(snapshot(out))
    assert {"report.txt", "intra_hd.csv", "inter_hd.csv", "diffusiveness.csv", "corpus.tsv", "goldens.csv"} <= names
    assert "uniqueness = " in capsys.readouterr().out


def test_single_chip_uniqueness_undefined(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["simulate", write(tmp_path, TINY.format(n=1)), "--out-dir", str(out)]) == 0
    assert "uniqueness = undefined" in capsys.readouterr().out


@pytest.mark.parametrize("workers", ["1", "3"])
def test_reruns_byte_identical(tmp_path, workers):
    cfg = write(tmp_path, TINY.format(n=4) + "[sweep]\ntemperatures = 20, 45, 70\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", cfg, "--out-dir", str(a)]) == 0
    assert main(["simulate", cfg, "--out-dir", str(b), "--workers", workers]) == 0
    assert snapshot(a) == snapshot(b)
    assert "sweep.csv" in snapshot(a)


def test_seed_override_changes_output(tmp_path):
    cfg = write(tmp_path, TINY.format(n=3))
    main(["simulate", cfg, "--out-dir", str(tmp_path / "a")])
    main(["simulate", cfg, "--out-dir", str(tmp_path / "b"), "--seed", "6"])
    assert (tmp_path / "a" / "corpus.tsv").read_bytes() != (tmp_path / "b" / "corpus.tsv").read_bytes()


def test_corpus_round_trip_gives_same_report(tmp_path):
    out = tmp_path / "o"
    main(["simulate", write(tmp_path, TINY.format(n=4)), "--out-dir", str(out)])
    corpus = out / "corpus.tsv"
    direct = parse_corpus(corpus.read_text())
    again = parse_corpus(dump_corpus(direct.samples, direct.l_ro, direct.name))
    assert all(np.array_equal(a, b) for a, b in zip(direct.samples, again.samples))
    assert ingest(corpus) == evaluate(direct.samples, direct.l_ro, name=direct.name)
    ing = tmp_path / "ing"
    assert main(["ingest", str(corpus), "--out-dir", str(ing)]) == 0
    assert (ing / "report.txt").read_bytes() == (out / "report.txt").read_bytes()


def five_pair_corpus() -> str:
    head = "#wropuf-corpus l_ro=36 K=5 N=1 T=1 name=five\n"
    return head + "".join(f"0\t{k}\t0\t{s}\n" for k, s in enumerate(MEASURED_PAIRS))


def test_ingest_five_pairs(tmp_path, caplog):
    path = tmp_path / "five.tsv"
    path.write_text(five_pair_corpus())
    r = ingest(path)
    per_pair = [float(Fraction(s.count("1"), 36) * 100) for s in MEASURED_PAIRS]
    assert per_pair == [float(Fraction(c, 36) * 100) for c in (17, 20, 12, 18, 4)]
    assert r.diffusiveness == float(Fraction(4 * 156, 36 * 25) * 100)
    assert r.reliability is None and r.uniqueness is None
    assert any("reliab" in rec.message for rec in caplog.records)


def test_identical_chips_have_zero_uniqueness():
    row = "".join(MEASURED_PAIRS[:2])
    text = "#wropuf-corpus l_ro=36 K=2 N=2 T=1\n" + "".join(
        f"{n}\t{k}\t0\t{MEASURED_PAIRS[k]}\n" for n in range(2) for k in range(2)
    )
    c = parse_corpus(text)
    assert len(row) == c.samples[0].shape[1]
    assert evaluate(c.samples, c.l_ro).uniqueness == 0


@pytest.mark.parametrize("text, line", [
    ("", None),
    ("#wropuf-corpus l_ro=4 K=1 N=1 T=1\n0\t0\t0\n", 2),
    ("#wropuf-corpus l_ro=4 K=1 N=1 T=2\n0\t0\t0\t0101\n0\t0\t1\t010\n", 3),
    ("#wropuf-corpus l_ro=4 K=1 N=1 T=1\n0\t0\t0\t01x1\n", 2),
    ("#wropuf-corpus l_ro=4 K=1 N=1 T=1\n0\t0\t0\t0101\n0\t0\t0\t0101\n", 3),
    ("#wropuf-corpus l_ro=4 K=1 N=1 T=1\n0\t0\t5\t0101\n", 2),
    ("#wropuf-corpus l_ro=4 K=1 N=1 T=2\n0\t0\t0\t0101\n", None),
    ("l_ro=4 K=1 N=1 T=1\n", 1),
])
def test_corpus_errors(text, line):
    with pytest.raises(CorpusError) as exc:
        parse_corpus(text)
    assert exc.value.line == line
    if line is not None:
        assert f"line {line}" in str(exc.value)


def test_sparse_corpus():
    text = "#wropuf-corpus l_ro=2 K=2 N=2 T=3 sparse=1\n" + (
        "0\t0\t0\t01\n0\t1\t0\t10\n0\t0\t2\t01\n0\t1\t2\t11\n"
        "1\t0\t1\t00\n1\t1\t1\t00\n"
    )
    c = parse_corpus(text)
    assert [s.shape for s in c.samples] == [(2, 4), (1, 4)]
    assert c.samples[0].tolist() == [[0, 1, 1, 0], [0, 1, 1, 1]]


def test_sparse_corpus_requires_whole_samples():
    text = "#wropuf-corpus l_ro=2 K=2 N=1 T=1 sparse=1\n0\t0\t0\t01\n"
    with pytest.raises(CorpusError):
        parse_corpus(text)


def test_ingest_bad_file_exit_code(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("#wropuf-corpus l_ro=4 K=1 N=1 T=1\n0\t0\t0\t01\n")
    assert main(["ingest", str(p)]) == 1


def test_fig4_two_ratios(capsys):
    assert main(["fig4", "--ratios", "1.2,1.1", "--len", "32"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "k,ratio_1.2,ratio_1.1"
    assert len(out) == 1 + 32 + 1
    assert out[-1] == "# hd ratio_1.2 ratio_1.1 = 17"
    col = "".join(line.split(",")[1] for line in out[1:9])
    assert col == "00011100"


def test_fig4_single_ratio_has_no_footer(capsys):
    main(["fig4", "--ratios", "1.1", "--len", "11"])
    out = capsys.readouterr().out.splitlines()
    assert not any(line.startswith("#") for line in out)
    assert "".join(line.split(",")[1] for line in out[1:]) == "00000011111"


def test_fig4_equal_ratios(tmp_path, capsys):
    assert main(["fig4", "--ratios", "1.0,1.0", "--out-dir", str(tmp_path)]) == 0
    assert capsys.readouterr().out.splitlines()[-1].endswith("= 0")
    assert (tmp_path / "fig4.csv").exists()


def test_fig4_rejects_bad_ratio():
    assert main(["fig4", "--ratios", "-1"]) == 1
