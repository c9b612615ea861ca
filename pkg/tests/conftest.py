import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def chi4_zeros_path() -> Path:
    return DATA_DIR / "chi4_zeros.txt"
