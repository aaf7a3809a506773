import numpy as np
import pytest
from hypothesis import given, strategies as st

from wropuf.population import (
    ChipSpec,
    DeviceId,
    MeasurementPlan,
    generate_chip,
    generate_population,
    golden_bits,
    golden_id,
    measure_bits,
    measure_device,
    measure_population,
)
from wropuf.ro import Environment, ROModelSpec
from wropuf.sampler import PufUnitSpec, Response, sample_response
from wropuf.rng import substream

import oracles

NOISY = ChipSpec(
    4,
    PufUnitSpec(16, 20e-12, 1e-12),
    ROModelSpec(inter_chip_sigma=0.01, layout_sigma=0.03, meas_noise_sigma=2e-4,
                temp_coeff_mean=1e-3, temp_coeff_sigma=5e-5),
)
NOISELESS = ChipSpec(4, PufUnitSpec(16), ROModelSpec(inter_chip_sigma=0.02))


def test_spartan6_shape():
    spec = ChipSpec(12, PufUnitSpec(32), ROModelSpec(inter_chip_sigma=0.01))
    chips = generate_population(11, spec, seed=1)
    assert len(chips) == 11
    assert all(c.num_pairs == 12 for c in chips)
    ids = measure_device(chips[0], MeasurementPlan(2, Environment(), 1))
    assert len(ids[0]) == 384 == spec.id_length


def test_single_chip_population():
    assert len(generate_population(1, NOISY, seed=0)) == 1


def test_population_deterministic():
    a = generate_population(3, NOISY, seed=9)
    b = generate_population(3, NOISY, seed=9)
    assert a == b


def test_distinct_seeds_differ():
    for s in range(100):
        a = generate_chip(0, NOISY, seed=2 * s)
        b = generate_chip(0, NOISY, seed=2 * s + 1)
        assert a.units[0].ro1.ref_period != b.units[0].ro1.ref_period


def test_chip_is_reproducible_in_isolation():
    pop = generate_population(5, NOISY, seed=4)
    assert generate_chip(3, NOISY, seed=4) == pop[3]


def test_device_id_concatenation():
    rs = [Response.from_string("0011"), Response.from_string("1110")]
    d = DeviceId.from_responses(rs)
    assert str(d) == "00111110"
    assert d.per_pair == tuple(rs)
    assert len(d) == d.num_pairs * d.l_ro


def test_noiseless_measurements_identical():
    chip = generate_chip(0, NOISELESS, seed=3)
    ids = measure_device(chip, MeasurementPlan(50, Environment(), 3))
    assert len(set(ids)) == 1
    assert golden_id(ids) == ids[0]


def test_single_sample_is_golden():
    chip = generate_chip(0, NOISY, seed=3)
    ids = measure_device(chip, MeasurementPlan(1, Environment(), 3))
    assert golden_id(ids) == ids[0]


def test_default_noise_flips_bits():
    chip = generate_chip(0, NOISY, seed=3)
    bits = measure_bits(chip, MeasurementPlan(1000, Environment(), 3))
    assert np.count_nonzero(bits != bits[0]) > 0


def test_measure_matches_per_pair_sampling_when_noiseless():
    chip = generate_chip(2, NOISELESS, seed=8)
    (row,) = measure_bits(chip, MeasurementPlan(1, Environment(), 8))
    expected = np.concatenate([sample_response(u, Environment(), substream(0, 0)).bits for u in chip.units])
    assert np.array_equal(row, expected)


def test_measurement_independent_of_workers():
    chips = generate_population(4, NOISY, seed=12)
    plan = MeasurementPlan(200, Environment(), 12)
    serial = measure_population(chips, plan, workers=1)
    threaded = measure_population(chips, plan, workers=4)
    assert all(np.array_equal(a, b) for a, b in zip(serial, threaded))


def test_measurement_subset_is_prefix():
    # Measurement t depends only on (seed, chip, t), not on T.
    chip = generate_chip(1, NOISY, seed=6)
    long = measure_bits(chip, MeasurementPlan(100, Environment(), 6))
    short = measure_bits(chip, MeasurementPlan(10, Environment(), 6))
    assert np.array_equal(long[:10], short)


A, B = DeviceId([0, 0, 1, 1], 2), DeviceId([0, 1, 0, 1], 2)


def test_golden_clear_mode():
    assert golden_id([A, A, B]) == A
    assert golden_id([B, A, B]) == B


def test_golden_tie_breaks_lexicographically():
    assert golden_id([B, A]) == A
    assert golden_id([A, B]) == A


def test_golden_empty():
    with pytest.raises(ValueError):
        golden_id([])


def test_golden_majority():
    s = np.array([[1, 0, 1], [1, 1, 0], [0, 0, 1], [1, 1, 0]])
    assert list(golden_bits(s, "majority")) == [1, 0, 0]


bit_rows = st.integers(1, 10).flatmap(
    lambda L: st.lists(st.lists(st.integers(0, 1), min_size=L, max_size=L), min_size=1, max_size=12)
)


@given(bit_rows, st.randoms())
def test_golden_mode_properties(rows, rnd):
    g = list(golden_bits(np.array(rows)))
    assert g in rows
    assert g == oracles.mode_pattern(rows)
    shuffled = rows[:]
    rnd.shuffle(shuffled)
    assert list(golden_bits(np.array(shuffled))) == g
