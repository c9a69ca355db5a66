import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from scenarios.builtin import hm_scenario, spin_scenario

REPO_ROOT = Path(__file__).resolve().parent
SPECS_DIR = REPO_ROOT / "resources" / "specs"


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture(scope="session")
def spin():
    return spin_scenario()


@pytest.fixture(scope="session")
def hm2():
    return hm_scenario(2)


@pytest.fixture
def spec_path():
    def _path(name: str) -> Path:
        return SPECS_DIR / name
    return _path


@pytest.fixture
def run_cli():
    """Run main.py in a subprocess from the repository root."""

    def _run(*args: str) -> subprocess.CompletedProcess:
        env = dict(os.environ)
        env.pop("QH_MAX_D", None)
        env.pop("QH_DEFAULT_TOL", None)
        return subprocess.run(
            [sys.executable, "main.py", *args],
            cwd=REPO_ROOT,
            capture_output=True,
            text=True,
            env=env,
            timeout=120,
        )

    return _run
