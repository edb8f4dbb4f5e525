from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from service_support import load_protocol_cases, make_client


@pytest.fixture
def client() -> TestClient:
    return make_client()


@pytest.fixture(scope="session")
def protocol_cases() -> list[dict]:
    return load_protocol_cases()
