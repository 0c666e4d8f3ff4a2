import os
from pathlib import Path

import pytest

from isovolcano.library import load_phis

ALL_ELLS = (2, 3, 5, 7, 11, 13, 17, 19)


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    """Modular polynomial cache; reuses $ISOVOLCANO_TEST_CACHE when set."""
    env = os.environ.get("ISOVOLCANO_TEST_CACHE")
    if env:
        Path(env).mkdir(parents=True, exist_ok=True)
        return Path(env)
    return tmp_path_factory.mktemp("phicache")


@pytest.fixture(scope="session")
def phis(cache_dir):
    """Phi_ell for ell <= 19, built by the package's own pipelines on first use."""
    return load_phis(ALL_ELLS, cache_dir)


@pytest.fixture(scope="session")
def small_phis(phis):
    return {ell: phis[ell] for ell in (2, 3, 5, 7)}


ACCEPTANCE = {}


@pytest.fixture
def verdict(capsys):
    """Record and print one PASS/FAIL line for an acceptance criterion."""
    def _say(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        with capsys.disabled():
            print("\n" + line)
        return ok
    return _say


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
