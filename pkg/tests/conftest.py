import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
if str(TESTS_DIR) not in sys.path:
    sys.path.insert(0, str(TESTS_DIR))

from gigagap import dataio
from gigagap.gap import PreparedInputs, prepare_inputs


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return dataio.fixture_path()


@pytest.fixture(scope="session")
def dataset(fixture_dir):
    return dataio.load_dataset(fixture_dir)


@pytest.fixture(scope="session")
def prepared(dataset) -> PreparedInputs:
    return prepare_inputs(dataset)
