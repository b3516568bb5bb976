"""Shared fixtures: the hand-computed corpus and scratch directories."""

from __future__ import annotations

from pathlib import Path

import pytest

from ghreview.archive import load_archive

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"
TINY = FIXTURES / "tiny_corpus.ndjson"


@pytest.fixture(scope="session")
def tiny_path() -> str:
    return str(TINY)


@pytest.fixture(scope="session")
def tiny_corpus():
    # session-scoped: tests treat the loaded corpus as read-only
    corpus = load_archive(str(TINY))
    assert not corpus.rejected
    return corpus


@pytest.fixture
def out_dir(tmp_path) -> str:
    return str(tmp_path / "out")
