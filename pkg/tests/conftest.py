import csv
import pathlib

import pytest

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def golden_throughput() -> list[float]:
    """Frozen per-slot throughput values for K = 1..24, in K order."""
    with open(DATA_DIR / "golden_throughput.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["K"]) for r in rows] == list(range(1, 25))
    return [float(r["E_T"]) for r in rows]
