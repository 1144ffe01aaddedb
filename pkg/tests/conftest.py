from pathlib import Path

import pytest

from lipsynth.pinyin import default_table
from lipsynth.synthetic import synthetic_library

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def syllabary() -> list[str]:
    lines = (DATA_DIR / "syllabary.txt").read_text(encoding="utf-8").splitlines()
    return [ln.strip() for ln in lines if ln.strip() and not ln.startswith("#")]


@pytest.fixture(scope="session")
def table():
    return default_table()


@pytest.fixture(scope="session")
def library():
    return synthetic_library()
