"""
Configuration and fixtures for pytest testing.
"""

import logging

import pytest

from dualkernel.config import Settings
from dualkernel.ctt_oracle import Oracle
from dualkernel.parser import parse_expr, parse_signature

OMEGA_TEXT = r"(\x. x x) (\x. x x)"


@pytest.fixture
def restore_logging():
    """The CLI reconfigures the root logger; put it back after each test."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def app():
    """The HTTP service in testing mode (pytest-flask builds ``client`` from it)."""
    from dualkernel_server import create_app

    flask_app = create_app(Settings(fuel=500))
    flask_app.config['TESTING'] = True
    return flask_app


@pytest.fixture
def settings():
    """Small budgets so that divergent inputs fail fast."""
    return Settings(fuel=200, max_classes=64)


@pytest.fixture
def oracle(settings):
    return Oracle(settings.fuel, settings.max_classes)


@pytest.fixture
def omega():
    """The self-application loop, which never reaches a canonical form."""
    return parse_expr(OMEGA_TEXT)


@pytest.fixture
def propositions():
    """A signature with two atoms and a constant proving the first."""
    return parse_signature("atom A; atom B; const a : A;")


@pytest.fixture
def write_file(tmp_path):
    """Write ``text`` to a fresh file and return its path as a string."""
    counter = {'n': 0}

    def write(text, suffix='.txt'):
        counter['n'] += 1
        path = tmp_path / f"input{counter['n']}{suffix}"
        path.write_text(text, encoding='utf-8')
        return str(path)

    return write


@pytest.fixture
def sample_texts():
    """Provide various inputs for the text-based drivers."""
    return {
        'value': r"(\x. x) tt",
        'stuck': "tt tt",
        'omega': OMEGA_TEXT,
        'open': "x",
        'garbage': r"\x x",
        'empty': "",
        'whitespace': "   \n\t   ",
        'unicode': "tt -- trailing comment 🌍",
    }

