"""Response-corpus text format.

::

    #wropuf-corpus l_ro=36 K=5 N=1 T=1 [sparse=1] [name=...]
    <chip>\t<pair>\t<sample>\t<bitstring>
    ...

Indices are 0-based.  Blank lines and further ``#`` lines are ignored.  A
dense corpus must contain every (chip, pair, sample) triple of the header's
grid exactly once.  With ``sparse=1`` samples may be missing, but each
(chip, sample) that is present must carry all K pairs.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CorpusError

MAGIC = "#wropuf-corpus"


@dataclass
class Corpus:
    l_ro: int
    num_pairs: int
    num_chips: int
    num_samples: int
    samples: list[np.ndarray]  # per chip, (T_n, K·l_RO)
    sparse: bool = False
    name: str = ""


def dump_corpus(samples: Sequence[np.ndarray], l_ro: int, name: str = "") -> str:
    """Serialise per-chip (T, L) sample arrays, looping chip, sample, pair."""
    samples = [np.asarray(s, dtype=np.uint8) for s in samples]
    T, L = samples[0].shape
    K = L // l_ro
    buf = io.StringIO()
    buf.write(f"{MAGIC} l_ro={l_ro} K={K} N={len(samples)} T={T}")
    if name:
        buf.write(f" name={name}")
    buf.write("\n")
    table = np.array(["0", "1"])
    for n, chip in enumerate(samples):
        if chip.shape != (T, L):
            raise ValueError("all chips must share the (T, L) shape")
        rows = ["".join(r) for r in table[chip.reshape(T * K, l_ro)]]
        for idx, bits in enumerate(rows):
            t, k = divmod(idx, K)
            buf.write(f"{n}\t{k}\t{t}\t{bits}\n")
    return buf.getvalue()


def _parse_header(line: str) -> dict:
    parts = line.split()
    if not parts or parts[0] != MAGIC:
        raise CorpusError(f"missing '{MAGIC}' header", 1)
    fields = {}
    for p in parts[1:]:
        key, sep, value = p.partition("=")
        if not sep:
            raise CorpusError(f"bad header field {p!r}", 1)
        fields[key] = value
    try:
        out = {k: int(fields[k]) for k in ("l_ro", "K", "N", "T")}
    except KeyError as exc:
        raise CorpusError(f"header lacks {exc.args[0]}", 1) from None
    except ValueError:
        raise CorpusError("header sizes must be integers", 1) from None
    if min(out.values()) < 1:
        raise CorpusError("header sizes must be >= 1", 1)
    out["sparse"] = fields.get("sparse", "0") == "1"
    out["name"] = fields.get("name", "")
    return out


def parse_corpus(text: str) -> Corpus:
    lines = text.splitlines()
    if not lines or not text.strip():
        raise CorpusError("empty corpus")
    h = _parse_header(lines[0])
    l_ro, K, N, T = h["l_ro"], h["K"], h["N"], h["T"]
    grid = np.zeros((N, T, K, l_ro), dtype=np.uint8)
    seen = np.zeros((N, T, K), dtype=bool)
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 4:
            raise CorpusError(f"expected 4 tab-separated fields, got {len(cols)}", lineno)
        try:
            n, k, t = (int(c) for c in cols[:3])
        except ValueError:
            raise CorpusError("chip, pair and sample indices must be integers", lineno) from None
        bits = cols[3].strip()
        if len(bits) != l_ro:
            raise CorpusError(f"bitstring length {len(bits)} != l_ro={l_ro}", lineno)
        if bits.strip("01"):
            raise CorpusError("bitstring may contain only 0 and 1", lineno)
        if not (0 <= n < N and 0 <= k < K and 0 <= t < T):
            raise CorpusError(f"index ({n}, {k}, {t}) outside the N={N}, K={K}, T={T} grid", lineno)
        if seen[n, t, k]:
            raise CorpusError(f"duplicate record ({n}, {k}, {t})", lineno)
        seen[n, t, k] = True
        grid[n, t, k] = np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")

    if not h["sparse"]:
        if not seen.all():
            n, t, k = np.argwhere(~seen)[0]
            raise CorpusError(f"incomplete grid: missing (chip {n}, pair {k}, sample {t}); set sparse=1 to allow gaps")
        samples = [grid[n].reshape(T, K * l_ro) for n in range(N)]
    else:
        partial = seen.any(axis=2) & ~seen.all(axis=2)
        if partial.any():
            n, t = np.argwhere(partial)[0]
            raise CorpusError(f"chip {n} sample {t} lacks some RO pairs")
        samples = []
        for n in range(N):
            present = seen[n].all(axis=1)
            if not present.any():
                raise CorpusError(f"chip {n} has no samples")
            samples.append(grid[n][present].reshape(-1, K * l_ro))
    return Corpus(l_ro, K, N, T, samples, h["sparse"], h["name"])


def read_corpus(path) -> Corpus:
    with open(path, encoding="ascii") as fh:
        return parse_corpus(fh.read())
