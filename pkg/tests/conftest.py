import logging
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

from zetagaps import cli, store
from zetagaps.zeros import ordinates


@dataclass
class Dataset:
    T: float
    path: Path
    zeros: list
    g: np.ndarray
    zprimes: list
    pairings: list


def _build(T: float, root: Path) -> Dataset:
    d = root / f"T{int(T)}"
    cfg = cli.RunConfig(T=T, output_dir=str(d))
    if not (d / cli.ZETA_FILE).exists():
        cli.cmd_zeros(cfg)
    if not (d / cli.PAIRING_FILE).exists():
        cli.cmd_zprime(cfg)
    zeros = store.to_zeta_zeros(store.load_archive(d / cli.ZETA_FILE))
    zp = store.to_zprime_zeros(store.load_archive(d / cli.ZPRIME_FILE))
    pairs = store.to_pairings(store.load_archive(d / cli.PAIRING_FILE))
    return Dataset(T, d, zeros, ordinates(zeros), zp, pairs)


@pytest.fixture(scope="session")
def data_root(tmp_path_factory) -> Path:
    # ZETAGAPS_TEST_CACHE keeps computed archives between sessions
    cached = os.environ.get("ZETAGAPS_TEST_CACHE")
    if cached:
        p = Path(cached)
        p.mkdir(parents=True, exist_ok=True)
        return p
    return tmp_path_factory.mktemp("zero-data")


@pytest.fixture(scope="session")
def data_1e3(data_root) -> Dataset:
    logging.getLogger("zetagaps").setLevel(logging.WARNING)
    return _build(1e3, data_root)


@pytest.fixture(scope="session")
def data_1e4(data_root) -> Dataset:
    logging.getLogger("zetagaps").setLevel(logging.WARNING)
    return _build(1e4, data_root)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
