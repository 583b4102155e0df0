"""
Shared pytest fixtures for the IFC toolchain tests.
Provides lattices, parsed programs, fixture loaders and clients for the CLI and the API.
"""
import os
os.environ.setdefault("IFC_LOG_LEVEL", "WARNING")

from pathlib import Path
from typing import Dict, List, Tuple

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
LEAKS_DIR = FIXTURES / "leaks"
CORPUS_DIR = FIXTURES / "corpus"


def fixture_header(path: Path) -> Dict[str, str]:
    """The ``; key: value`` lines at the top of a fixture file."""
    from app.ifc.harness.storage import read_header

    return read_header(str(path))


def leak_cases() -> List[Tuple[str, Path]]:
    return [(p.stem, p) for p in sorted(LEAKS_DIR.glob("*.ifc"))]


def corpus_cases() -> List[Tuple[str, Path]]:
    return [(p.stem, p) for p in sorted(CORPUS_DIR.glob("*.ifc"))]


# ========== Lattices ==========

@pytest.fixture
def two_point():
    """Fixture providing the two-point lattice {L, H}."""
    from app.ifc.core.lattice import parse_lattice

    return parse_lattice("2pt")


@pytest.fixture
def powerset_ab():
    """Fixture providing the powerset lattice over {a, b}."""
    from app.ifc.core.lattice import parse_lattice

    return parse_lattice("(powerset a b)")


@pytest.fixture
def low(two_point):
    return two_point.bottom


@pytest.fixture
def high(two_point):
    return two_point.top


# ========== Programs ==========

@pytest.fixture
def parse_fg(two_point):
    """Fixture parsing FG expression text under the two-point lattice."""
    from app.ifc.surface.parser import parse_fg_expr

    return lambda text: parse_fg_expr(text, two_point)


@pytest.fixture
def parse_cg(two_point):
    """Fixture parsing CG expression text under the two-point lattice."""
    from app.ifc.surface.parser import parse_cg_expr

    return lambda text: parse_cg_expr(text, two_point)


@pytest.fixture
def fg_type(two_point):
    from app.ifc.surface.parser import parse_fg_type

    return lambda text: parse_fg_type(text, two_point)


@pytest.fixture
def cg_type(two_point):
    from app.ifc.surface.parser import parse_cg_type

    return lambda text: parse_cg_type(text, two_point)


@pytest.fixture
def write_program(tmp_path):
    """Fixture writing program text to a temporary ``.ifc`` file and returning its path."""
    def _write(text: str, name: str = "program.ifc") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


# ========== CLI Runner ==========

@pytest.fixture
def cli_runner():
    """Fixture providing a click CliRunner invoking the top-level command group."""
    from click.testing import CliRunner
    from app.cli.main import cli

    runner = CliRunner()

    def _invoke(*args: str):
        return runner.invoke(cli, list(args), obj={})
    return _invoke


# ========== API Test Client ==========

@pytest.fixture
def app_client():
    """Fixture providing a TestClient for FastAPI app testing."""
    from fastapi.testclient import TestClient
    from app.api.app import app

    return TestClient(app)


# ========== Environment Fixtures ==========

@pytest.fixture
def mock_env_vars(monkeypatch):
    """Fixture for mocking environment variables."""
    def _set_env(**kwargs):
        for key, value in kwargs.items():
            monkeypatch.setenv(key, str(value))
    return _set_env
