import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def spartan6_run():
    """The bundled calibrated scenario, simulated once per session."""
    import time

    from wropuf.config import load_scenario
    from wropuf.metrics import evaluate
    from wropuf.population import generate_population, measure_population

    sc = load_scenario("spartan6_like")
    t0 = time.perf_counter()
    chips = generate_population(sc.num_chips, sc.chip_spec, sc.seed)
    samples = measure_population(chips, sc.plan)
    report = evaluate(samples, sc.chip_spec.unit_spec.bits_per_pair, sc.golden_method, sc.name)
    elapsed = time.perf_counter() - t0
    return sc, chips, samples, report, elapsed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
