import os
import shutil
import subprocess

import pytest


@pytest.fixture(scope="session")
def cli():
    """Path of the bjj executable, from BJJ_CLI or PATH."""
    path = os.environ.get("BJJ_CLI") or shutil.which("bjj")
    if not path:
        pytest.skip("bjj executable not available")
    return path


@pytest.fixture
def run_cli(cli, tmp_path):
    def run(*args, out=None):
        out = out or tmp_path
        return subprocess.run([cli, *args, "--out", str(out)], capture_output=True, text=True)

    return run
