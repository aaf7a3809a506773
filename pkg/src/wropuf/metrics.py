"""PUF quality metrics: Hamming distance, uniformity, reliability,
uniqueness, diffusiveness and intra/inter-chip HD histograms.

Each percentage is formed as one division of exact integers, so results are
the correctly rounded value of the underlying rational.

Bit sequences may be given as :class:`~wropuf.population.DeviceId`,
:class:`~wropuf.sampler.Response`, strings of ``0``/``1`` or array-likes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .population import golden_bits


def as_bits(x) -> np.ndarray:
    if isinstance(x, str):
        return np.frombuffer(x.encode(), dtype=np.uint8) - ord("0")
    x = getattr(x, "bits", x)
    return np.asarray(x, dtype=np.uint8)


def hamming_distance(a, b) -> int:
    a, b = as_bits(a), as_bits(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a != b))


def uniformity(bits) -> float:
    bits = as_bits(bits)
    if bits.size == 0:
        raise ValueError("uniformity of an empty ID")
    return 100 * int(np.count_nonzero(bits)) / bits.size


def reliability(golden, samples) -> float:
    """100 · (1 − mean over samples of HD(golden, sample) / L)."""
    g = as_bits(golden)
    s = np.stack([as_bits(x) for x in samples]) if not isinstance(samples, np.ndarray) else samples
    if s.ndim != 2 or s.shape[1] != g.size:
        raise ValueError("sample length differs from golden length")
    total = int(np.count_nonzero(s != g))
    n = s.shape[0] * g.size
    return 100 * (n - total) / n


def uniqueness(golden_ids) -> float:
    """Mean pairwise inter-chip HD over L, in percent."""
    g = np.stack([as_bits(x) for x in golden_ids])
    n, L = g.shape
    if n < 2:
        raise ValueError("uniqueness needs at least two IDs")
    total = sum(int(np.count_nonzero(g[i] != g[i + 1:])) for i in range(n - 1))
    return 200 * total / (n * (n - 1) * L)


def diffusiveness(chip_bits) -> float:
    """Diffusiveness of a (K, l_RO) matrix of one chip's pair responses.

    4/(l_RO·K²) times the number of differing (pair i < pair j, bit l)
    triples, in percent.  For odd K the maximum is 100·(K²−1)/K².
    """
    m = as_bits(chip_bits)
    if hasattr(chip_bits, "l_ro"):
        m = m.reshape(-1, chip_bits.l_ro)
    if m.ndim != 2 or m.shape[0] < 2:
        raise ValueError("diffusiveness needs at least two RO-pair responses")
    K, l_ro = m.shape
    # Per column, a ones and K-a zeros give a·(K-a) differing pairs.
    ones = m.sum(axis=0, dtype=np.int64)
    total = int((ones * (K - ones)).sum())
    return 400 * total / (l_ro * K * K)


def diffusiveness_by_pairs(chip_bits) -> list[float]:
    """Diffusiveness over the first k pairs for k = 2..K."""
    m = as_bits(chip_bits)
    return [diffusiveness(m[:k]) for k in range(2, m.shape[0] + 1)]


def hd_histograms(goldens: Sequence, samples: Sequence[np.ndarray]) -> tuple[dict[int, int], dict[int, int]]:
    """Intra-chip HDs (golden_n vs each of its samples) and inter-chip HDs
    (golden_i vs golden_j, i < j), as sorted {hd: count} maps."""
    g = np.stack([as_bits(x) for x in goldens])
    intra = np.concatenate([np.count_nonzero(np.asarray(s) != g[n], axis=1) for n, s in enumerate(samples)])
    inter = [int(np.count_nonzero(g[i] != g[j])) for i in range(len(g)) for j in range(i + 1, len(g))]
    return _counts(intra), _counts(inter)


def _counts(values) -> dict[int, int]:
    vals, cnt = np.unique(np.asarray(values, dtype=np.int64), return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, cnt)}


def histogram_mode(hist: dict[int, int]) -> int:
    """Most frequent HD; ties to the smallest."""
    best = max(hist.values())
    return min(h for h, c in hist.items() if c == best)


@dataclass
class MetricsReport:
    num_chips: int
    num_pairs: int
    bits_per_pair: int
    num_samples: int
    uniformity_per_chip: list[float]
    reliability_per_chip: list[float] | None
    uniqueness: float | None
    diffusiveness_per_chip: list[float] | None
    diffusiveness_by_pairs: list[list[float]] | None  # [chip][k-2]
    intra_hd_hist: dict[int, int]
    inter_hd_hist: dict[int, int]
    name: str = ""
    warnings: list[str] = field(default_factory=list)

    @property
    def id_length(self) -> int:
        return self.num_pairs * self.bits_per_pair

    @property
    def uniformity(self) -> float:
        return float(np.mean(self.uniformity_per_chip))

    @property
    def reliability(self) -> float | None:
        return None if self.reliability_per_chip is None else float(np.mean(self.reliability_per_chip))

    @property
    def diffusiveness(self) -> float | None:
        return None if self.diffusiveness_per_chip is None else float(np.mean(self.diffusiveness_per_chip))

    def average_diffusiveness_by_pairs(self) -> list[float] | None:
        if self.diffusiveness_by_pairs is None:
            return None
        return [float(v) for v in np.mean(np.array(self.diffusiveness_by_pairs), axis=0)]


def evaluate(samples: Sequence[np.ndarray], l_ro: int, method: str = "mode", name: str = "") -> MetricsReport:
    """Full metric suite for a population given per-chip (T, L) sample arrays."""
    samples = [np.asarray(s, dtype=np.uint8) for s in samples]
    if not samples:
        raise ValueError("no chips to evaluate")
    T = max(s.shape[0] for s in samples)
    L = samples[0].shape[1]
    K = L // l_ro
    goldens = [golden_bits(s, method) for s in samples]
    warnings = []
    rel = None
    if min(s.shape[0] for s in samples) > 1:
        rel = [reliability(g, s) for g, s in zip(goldens, samples)]
    else:
        warnings.append("reliability skipped: only one sample per chip")
    uniq = None
    if len(goldens) >= 2:
        uniq = uniqueness(goldens)
    else:
        warnings.append("uniqueness undefined: fewer than two chips")
    diff = diff_k = None
    if K >= 2:
        mats = [g.reshape(K, l_ro) for g in goldens]
        diff = [diffusiveness(m) for m in mats]
        diff_k = [diffusiveness_by_pairs(m) for m in mats]
    else:
        warnings.append("diffusiveness undefined: fewer than two RO pairs")
    intra, inter = hd_histograms(goldens, samples)
    return MetricsReport(
        num_chips=len(samples), num_pairs=K, bits_per_pair=l_ro, num_samples=T,
        uniformity_per_chip=[uniformity(g) for g in goldens],
        reliability_per_chip=rel, uniqueness=uniq,
        diffusiveness_per_chip=diff, diffusiveness_by_pairs=diff_k,
        intra_hd_hist=intra, inter_hd_hist=inter, name=name, warnings=warnings,
    )
