from __future__ import annotations

from pathlib import Path

import pytest

from support import FIXTURES


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return FIXTURES / "corpus"


@pytest.fixture(scope="session")
def manifests_dir() -> Path:
    return FIXTURES / "manifests"


@pytest.fixture(scope="session")
def expected_dir() -> Path:
    return FIXTURES / "expected"
