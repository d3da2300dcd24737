import os

# single-threaded BLAS before numpy loads: the solver factors many small
# systems and threaded BLAS only adds contention (and run-to-run jitter)
for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(var, "1")

import json
import pathlib

import pytest

FIXTURES = json.loads((pathlib.Path(__file__).parent / "fixtures_oracle.json").read_text())


@pytest.fixture(scope="session")
def oracle_fixtures():
    return FIXTURES
