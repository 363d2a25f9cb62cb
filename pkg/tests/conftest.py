import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = REPO_ROOT / "data"


@pytest.fixture(scope="session")
def data_dir():
    if not DATA_DIR.is_dir():
        pytest.fail(f"benchmark data directory missing at {DATA_DIR}; see README for sources")
    return DATA_DIR


@pytest.fixture(scope="session")
def python_exe():
    return sys.executable
