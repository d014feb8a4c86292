import os
import subprocess
import sys

import pytest

from ghzforge import kernels
from ghzforge.config import Budgets, RunConfig, apply_overrides, env_overrides
from ghzforge.errors import ContractError


def test_env_overrides():
    env = {"GHZFORGE_N": "5", "GHZFORGE_TOL": "1e-9", "GHZFORGE_BUDGET": "64", "OTHER": "x", "GHZFORGE_SEED": ""}
    values = env_overrides(env)
    assert values == {"n": 5, "tol": 1e-9, "budgets.enumeration": 64}
    cfg = apply_overrides(RunConfig(command="refute"), values)
    assert cfg.n == 5 and cfg.budgets.enumeration == 64 and cfg.budgets.memory == Budgets().memory


def test_bad_env_value():
    with pytest.raises(ContractError):
        env_overrides({"GHZFORGE_WORKERS": "many"})


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(tol=0)
    with pytest.raises(ValueError):
        Budgets(enumeration=0)


def test_digest_tracks_config():
    a = RunConfig(command="bell", n=4)
    assert a.digest() == RunConfig(command="bell", n=4).digest()
    assert a.digest() != RunConfig(command="bell", n=5).digest()


def test_backend_selection():
    assert kernels.BACKEND in kernels.available()
    assert kernels.get("python").BACKEND == "python"
    with pytest.raises(ValueError):
        kernels.get("fortran")
    env = dict(os.environ, GHZFORGE_PURE_PYTHON="1")
    proc = subprocess.run(
        [sys.executable, "-c", "from ghzforge import kernels; print(kernels.BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
    )
    assert proc.stdout.strip() == "python"
