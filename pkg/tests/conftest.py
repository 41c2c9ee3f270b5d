import pytest

import rsl.llm as llm_mod


@pytest.fixture(autouse=True)
def fast_backoff(monkeypatch):
    """Retry backoff must not consume wall-clock time in tests. Tests that
    assert the backoff schedule install their own recorder on top."""
    monkeypatch.setattr(llm_mod, "_sleep", lambda _: None)
