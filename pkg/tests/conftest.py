import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dpadmm import admm, data, model, network

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def logistic():
    return model.logistic_loss()


@pytest.fixture(scope="session")
def l2():
    return model.l2_regularizer()


def small_problem(P=4, n=80, dim=3, seed=0, kind="ring"):
    graph = network.build_topology(kind, P)
    ds = data.synthetic_dataset(n, dim, seed=seed, separable=False)
    return data.partition(ds, graph, seed=seed), graph


@pytest.fixture
def problem():
    return small_problem()


@pytest.fixture(autouse=True)
def _quiet_alpha_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="alpha = .* > 1")
        yield


def random_node(rng, B=20, d=3):
    X = rng.standard_normal((B, d))
    X /= np.maximum(np.linalg.norm(X, axis=1, keepdims=True), 1.0)
    y = rng.choice([-1, 1], size=B)
    return data.NodeDataset(X, y)


def default_config(c_r=5.0, rho=0.1, eta=1.0, iters=30, **kw):
    return admm.AdmmConfig(model.ErmParams(c_r, rho), eta=eta, max_iters=iters, **kw)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
