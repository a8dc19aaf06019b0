"""Shared fixtures and reporting hooks for the regscan test suite."""

import numpy as np
import pytest

from regscan.synth import SolverConfig, run_solver


@pytest.fixture(scope="session")
def tg_run():
    """A short, resolved decaying vortex run reused across suites."""
    cfg = SolverConfig(n=32, nu=0.05, dt=0.01, t_end=0.3, save_every=3)
    return run_solver(cfg)


@pytest.fixture(scope="session")
def tg_field(tg_run):
    return tg_run.field


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion."""
    severity = {"failed": 0, "error": 0, "skipped": 1, "passed": 2}
    status = {}
    for outcome in ("failed", "error", "skipped", "passed"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if name not in status or severity[outcome] < severity[status[name]]:
                status[name] = outcome
    if not status:
        return
    label = {"failed": "FAIL", "error": "FAIL", "skipped": "SKIP", "passed": "PASS"}
    terminalreporter.section("acceptance criteria")
    for name in sorted(status):
        terminalreporter.write_line(f"{label[status[name]]}  {name}")
