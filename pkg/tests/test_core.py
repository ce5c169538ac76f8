import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teleheat import analytic
from teleheat.core import (
    Field,
    ModelParams,
    ParameterDomainError,
    SolverConfig,
    grid_linspace,
    make_params,
    mass,
    params_from_eps,
    symmetric_grid,
)

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


def test_unit_params_give_unit_eps():
    p = make_params(1, 1, 1, 1, 6.2)
    assert p.epsilon == 1.0
    assert p.a == pytest.approx(6.2, abs=0)
    assert p.c == 1.0
    assert p.kappa == 1.0


def test_l_4_1_params():
    p = make_params(1, 1, 1, 1, 4.1)
    assert p.epsilon == 1.0
    assert p.a == 4.1


def test_hand_evaluated_params():
    # (gamma/k)(omega/tau)^l = (1/2) * 2^2 = 2
    p = make_params(2, 1, 1, 2, 2)
    assert p.epsilon == pytest.approx(2.0, rel=1e-15)
    assert p.a == pytest.approx(4.0, rel=1e-15)
    assert p.c == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert p.kappa == 2.0


@pytest.mark.parametrize(
    "args",
    [(0, 1, 1, 1, 6.2), (1, -1, 1, 1, 6.2), (1, 1, 0, 1, 6.2), (1, 1, 1, -2, 6.2), (1, 1, 1, 1, 1.0)],
)
def test_make_params_rejects_bad_domain(args):
    with pytest.raises(ParameterDomainError):
        make_params(*args)


def test_self_similar_constructor_needs_l_above_4():
    make_params(1, 1, 1, 1, 4.5, self_similar=True)
    with pytest.raises(ParameterDomainError):
        make_params(1, 1, 1, 1, 4.0, self_similar=True)


def test_params_from_eps_round_trip():
    p = params_from_eps(2.0, 6.2)
    assert p.epsilon == pytest.approx(2.0, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(positive, positive, positive, positive, st.floats(min_value=1.01, max_value=50))
def test_a_over_eps_is_l(k, gamma, tau, omega, l):
    p = ModelParams(k, gamma, tau, omega, l)
    assert p.a_over_eps == l
    # the computed ratio agrees to one rounding of each operation
    assert p.a / p.epsilon == pytest.approx(l, rel=4e-16)


def test_grid_three_nodes():
    g = grid_linspace(-1, 1, 3)
    np.testing.assert_array_equal(g.x, [-1.0, 0.0, 1.0])
    assert g.dx == 1.0


def test_grid_unit_interval():
    assert grid_linspace(0, 1, 101).dx == pytest.approx(0.01, rel=1e-15)


def test_grid_midpoint_node():
    g = grid_linspace(-5, 5, 2001)
    assert g.dx == pytest.approx(0.005, rel=1e-15)
    assert abs(g.node(1000)) < 1e-15
    assert abs(g.x[1000]) < 1e-15


@pytest.mark.parametrize("args", [(0, 1, 2), (1, 1, 10), (2, 1, 10)])
def test_grid_domain_errors(args):
    with pytest.raises(ParameterDomainError):
        grid_linspace(*args)


@settings(max_examples=100, deadline=None)
@given(
    st.floats(min_value=-100, max_value=100),
    st.floats(min_value=1e-2, max_value=100),
    st.integers(min_value=3, max_value=5000),
)
def test_grid_nodes_reproducible(x_min, width, n):
    g = grid_linspace(x_min, x_min + width, n)
    i = np.arange(n)
    scale = max(abs(x_min), abs(x_min + width), 1.0)
    assert np.max(np.abs(g.x - (x_min + i * g.dx))) <= 4 * np.finfo(float).eps * scale
    assert g.node(n - 1) == pytest.approx(x_min + (n - 1) * g.dx, abs=4e-16 * scale)


def test_symmetric_grid_has_centre_node():
    g = symmetric_grid(3.0, 0.01)
    assert g.dx == pytest.approx(0.01, rel=1e-14)
    assert abs(g.x[g.n // 2]) < 1e-14
    assert g.x[-1] >= 3.0


def test_grid_values_are_read_only():
    g = grid_linspace(0, 1, 11)
    with pytest.raises(ValueError):
        g.x[0] = 5.0


def test_field_validates():
    g = grid_linspace(0, 1, 11)
    with pytest.raises(ParameterDomainError):
        Field(g, 1.0, np.zeros(10))
    with pytest.raises(ParameterDomainError):
        Field(g, 1.0, np.full(11, np.nan))
    f = Field(g, 1.0, np.ones(11))
    with pytest.raises(ValueError):
        f.values[0] = 3.0


def test_mass_constant_and_zero():
    g = grid_linspace(0, 1, 101)
    assert mass(Field(g, 1.0, np.ones(g.n))) == pytest.approx(1.0, rel=1e-14)
    assert mass(Field(g, 1.0, g.zeros())) == 0.0


def test_mass_of_exact_profile():
    # oracle: Beta-function identity int (1 - eta^2)^p = B(1/2, p + 1)
    from scipy.special import beta

    g = symmetric_grid(5.0, 0.005)
    p = make_params(1, 1, 1, 1, 6.2)
    f = Field(g, 1.0, analytic.self_similar_T(g.x, 1.0, p))
    assert mass(f) == pytest.approx(1.048, abs=1e-3)
    assert mass(f) == pytest.approx(beta(0.5, 3.1), abs=1e-4)


@settings(max_examples=100, deadline=None)
@given(
    st.floats(min_value=-10, max_value=10),
    st.floats(min_value=-10, max_value=10),
    st.integers(min_value=0, max_value=2**31),
)
def test_mass_is_linear(alpha, beta_, seed):
    rng = np.random.default_rng(seed)
    g = grid_linspace(-1, 1, 51)
    F = Field(g, 1.0, rng.normal(size=g.n))
    G = Field(g, 1.0, rng.normal(size=g.n))
    combined = mass(F * alpha + G * beta_)
    expected = alpha * mass(F) + beta_ * mass(G)
    scale = abs(alpha) * np.sum(np.abs(F.values)) + abs(beta_) * np.sum(np.abs(G.values))
    assert abs(combined - expected) <= 1e-13 * (scale * g.dx + 1.0)


def test_solver_config_validation():
    SolverConfig(t0=1.0, t_end=2.0, snapshot_times=(1.5, 1.2))
    assert SolverConfig(snapshot_times=(1.4, 1.1)).snapshot_times == (1.1, 1.4)
    for bad in (
        dict(cfl=0.0),
        dict(cfl=1.5),
        dict(t_end=0.5),
        dict(delta=-1.0),
        dict(snapshot_times=(0.5,)),
        dict(snapshot_times=(2.0,)),
        dict(boundary="periodic"),
    ):
        with pytest.raises(ParameterDomainError):
            SolverConfig(**bad)
