import numpy as np
import pytest

from quantnet import (build_laplacian, build_stacked, builtin_graph,
                      builtin_problem, spectral_data)


@pytest.fixture(scope="session")
def fig1_graph():
    return builtin_graph()


@pytest.fixture(scope="session")
def ex1_problem():
    return builtin_problem("ex1")


@pytest.fixture(scope="session")
def ex4_problem():
    return builtin_problem("ex4")


@pytest.fixture(scope="session")
def ex1_setting(ex1_problem, fig1_graph):
    """(problem, graph, laplacian, stacked operators, spectral bundle)."""
    lap = build_laplacian(fig1_graph)
    ops = build_stacked(ex1_problem, lap)
    sp = spectral_data(ops, lap, ex1_problem.dim, ex1_problem.n_nodes)
    return ex1_problem, fig1_graph, lap, ops, sp


@pytest.fixture(scope="session")
def ex4_setting(ex4_problem, fig1_graph):
    lap = build_laplacian(fig1_graph)
    ops = build_stacked(ex4_problem, lap)
    sp = spectral_data(ops, lap, ex4_problem.dim, ex4_problem.n_nodes)
    return ex4_problem, fig1_graph, lap, ops, sp


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
