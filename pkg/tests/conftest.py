# tests/conftest.py
from pathlib import Path
import os
import sys

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

# 테스트 중 진행 표시 끔
os.environ.setdefault("HYPCOUNT_PROGRESS", "0")

from fuchsian.groups import load_group  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def bolza():
    return load_group("bolza")


@pytest.fixture(scope="session")
def cyclic():
    return load_group("cyclic-demo")


@pytest.fixture(scope="session")
def free2():
    return load_group("free2-demo")
