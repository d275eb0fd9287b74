import pytest

from fleetlab.causal import run_causal_suite
from fleetlab.config import SimConfig
from fleetlab.engine import run_cross_sectional, run_staggered_rollout


@pytest.fixture(scope="session")
def cfg():
    return SimConfig()


@pytest.fixture(scope="session")
def cross_panel(cfg):
    return run_cross_sectional(cfg)


@pytest.fixture(scope="session")
def rollout_panel(cfg):
    return run_staggered_rollout(cfg)


@pytest.fixture(scope="session")
def causal_suite(cfg, rollout_panel):
    return run_causal_suite(rollout_panel, cfg, n_placebo=50)
