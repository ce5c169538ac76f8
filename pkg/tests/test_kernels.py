import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from teleheat import analytic
from teleheat.core import Field, ParameterDomainError, grid_linspace, make_params
from teleheat.kernels import (
    Dirac,
    Exponential,
    HistoryRecord,
    Jeffrey,
    PowerLaw,
    UnsupportedOperation,
    cattaneo_flux_step,
    flux_history,
    flux_rate_fd,
    kernel_eval,
    kernel_total,
    mean_value_audit,
)

GRID = grid_linspace(-1.0, 1.0, 5)


def sine_history(dt, t_end=2.0, grid=GRID):
    """Gradient sin(t') * w(x) sampled on [0, t_end], zero before t' = 0."""
    times = np.arange(0.0, t_end + 0.5 * dt, dt)
    w = 1.0 + grid.x
    return HistoryRecord(times, np.sin(times)[:, None] * w[None, :], grid)


def test_kernel_eval_examples():
    assert kernel_eval(PowerLaw(1, 1, 1, 6.2), 0.0) == 1.0
    assert kernel_eval(Exponential(1, 2), 0.0) == 0.5
    assert kernel_eval(PowerLaw(1, 1, 1, 2), 1.0) == pytest.approx(0.25, rel=1e-15)
    assert kernel_eval(Jeffrey(3.0, 2.0, 4.0), 0.0) == 0.5
    assert Jeffrey(3.0, 2.0, 4.0).dirac_weight == 3.0


def test_kernel_eval_rejects_dirac_and_negative_lag():
    with pytest.raises(UnsupportedOperation):
        kernel_eval(Dirac(1.0), 0.0)
    with pytest.raises(ParameterDomainError):
        kernel_eval(Exponential(), -0.1)


@pytest.mark.parametrize(
    "ctor", [lambda: Dirac(0.0), lambda: Exponential(1, 0), lambda: PowerLaw(l=1.0), lambda: Jeffrey(1, -1, 1)]
)
def test_kernel_parameter_domain(ctor):
    with pytest.raises(ParameterDomainError):
        ctor()


@settings(max_examples=100, deadline=None)
@given(
    st.floats(min_value=0.1, max_value=10),
    st.floats(min_value=0.1, max_value=10),
    st.floats(min_value=0.1, max_value=10),
    st.floats(min_value=1.05, max_value=12),
)
def test_power_law_strictly_decreasing(k, tau, omega, l):
    s = np.linspace(0.0, 20.0, 200)
    q = kernel_eval(PowerLaw(k, tau, omega, l), s)
    assert np.all(np.diff(q) < 0)


@pytest.mark.parametrize("k, tau, omega, l", [(1, 1, 1, 6.2), (2.0, 0.5, 1.5, 1.5), (0.3, 2.0, 0.7, 4.1)])
def test_power_law_total_matches_quadrature(k, tau, omega, l):
    spec = PowerLaw(k, tau, omega, l)
    q, _ = integrate.quad(lambda s: float(kernel_eval(spec, s)), 0, np.inf, epsabs=1e-13, epsrel=1e-12)
    closed = k * tau**l / ((l - 1) * omega ** (l - 1))
    assert kernel_total(spec) == pytest.approx(closed, rel=1e-14)
    assert q == pytest.approx(closed, rel=1e-8)


def test_tails_match_quadrature():
    for spec in (Exponential(1.5, 0.7), PowerLaw(1.0, 1.2, 0.8, 3.0), Jeffrey(1.0, 2.0, 0.5)):
        for u in (0.0, 0.4, 3.0):
            q, _ = integrate.quad(lambda s: float(spec.smooth(s)), u, np.inf, epsabs=1e-13)
            assert spec.tail(u) == pytest.approx(q, rel=1e-9)


def test_dirac_flux_is_fourier_law():
    rng = np.random.default_rng(3)
    g = rng.normal(size=(4, GRID.n))
    rec = HistoryRecord(np.array([0.0, 0.5, 1.0, 1.5]), g, GRID)
    q = flux_history(rec, Dirac(1.0), 1.5)
    np.testing.assert_array_equal(q.values, -g[-1])
    assert q.t == 1.5
    q2 = flux_history(rec, Dirac(2.5), 1.5)
    np.testing.assert_array_equal(q2.values, -2.5 * g[-1])


def test_exponential_constant_gradient_gives_fourier_flux():
    G = np.linspace(-2, 2, GRID.n)
    # trapezoid error over the records is ~ dt^2 / (12 tau^2) relative
    rec = HistoryRecord(np.linspace(0, 3, 3001), np.tile(G, (3001, 1)), GRID, prehistory=G)
    for t in (0.0, 1.3, 3.0, 5.0):
        q = flux_history(rec, Exponential(k=2.0, tau=0.5), t)
        np.testing.assert_allclose(q.values, -2.0 * G, rtol=1e-6, atol=1e-15)
    # before any record only the closed-form tail contributes: exact
    q0 = flux_history(rec, Exponential(k=2.0, tau=0.5), 0.0)
    np.testing.assert_allclose(q0.values, -2.0 * G, rtol=1e-15)


def test_power_law_constant_gradient():
    G = np.full(GRID.n, 1.7)
    rec = HistoryRecord(np.array([0.0]), G[None, :], GRID, prehistory=G)
    spec = PowerLaw(1, 1, 1, 6.2)
    np.testing.assert_allclose(flux_history(rec, spec, 0.0).values, -1.7 / 5.2, rtol=1e-15)
    fine = HistoryRecord(np.linspace(0, 1, 2001), np.tile(G, (2001, 1)), GRID, prehistory=G)
    np.testing.assert_allclose(flux_history(fine, spec, 1.0).values, -1.7 / 5.2, rtol=1e-6)


def test_jeffrey_is_fourier_plus_cattaneo():
    rec = sine_history(1e-2)
    j = flux_history(rec, Jeffrey(0.7, 1.3, 0.4), 1.7).values
    parts = flux_history(rec, Dirac(0.7), 1.7).values + flux_history(rec, Exponential(1.3, 0.4), 1.7).values
    np.testing.assert_allclose(j, parts, rtol=1e-13, atol=1e-15)


def test_exponential_flux_matches_cattaneo_trajectory():
    # oracle: q(t) = -int_0^t exp(-(t - s)) sin(s) ds for k = tau = 1
    t_end, dt = 2.0, 1e-3
    exact = -((math.sin(2.0) - math.cos(2.0)) / 2.0 + math.exp(-2.0) / 2.0)
    assert exact == pytest.approx(-0.73039, abs=1e-5)
    w = 1.0 + GRID.x
    rec = sine_history(dt, t_end)
    q_hist = flux_history(rec, Exponential(1.0, 1.0), t_end).values
    q = Field(GRID, 0.0, np.zeros(GRID.n))
    for n in range(1, int(round(t_end / dt)) + 1):
        q = cattaneo_flux_step(q, Field(GRID, n * dt, math.sin(n * dt) * w), dt, 1.0, 1.0)
    np.testing.assert_allclose(q_hist, exact * w, atol=1e-6)
    assert np.max(np.abs(q.values - q_hist)) <= 1e-3
    assert np.max(np.abs(q.values - exact * w)) <= 1e-3


def test_cattaneo_error_shrinks_with_dt():
    errs = []
    exact = -((math.sin(2.0) - math.cos(2.0)) / 2.0 + math.exp(-2.0) / 2.0)
    g = grid_linspace(0, 1, 3)
    for dt in (4e-3, 2e-3, 1e-3):
        q = Field(g, 0.0, g.zeros())
        for n in range(1, int(round(2.0 / dt)) + 1):
            q = cattaneo_flux_step(q, Field(g, n * dt, np.full(3, math.sin(n * dt))), dt, 1.0, 1.0)
        errs.append(abs(q.values[0] - exact))
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(2.0, rel=0.1)


def test_history_quadrature_is_second_order():
    exact = -((math.sin(2.0) - math.cos(2.0)) / 2.0 + math.exp(-2.0) / 2.0)
    errs = [abs(flux_history(sine_history(dt), Exponential(), 2.0).values[2] - exact) for dt in (0.04, 0.02, 0.01)]
    order = np.polyfit(np.log([0.04, 0.02, 0.01]), np.log(errs), 1)[0]
    assert order == pytest.approx(2.0, abs=0.1)


def test_cattaneo_step_examples():
    q0 = Field(GRID, 0.0, np.ones(GRID.n))
    zero = Field(GRID, 0.0, GRID.zeros())
    q1 = cattaneo_flux_step(q0, zero, 0.1, 1.0, 0.5)
    np.testing.assert_allclose(q1.values, 1.0 / 1.2)
    G = Field(GRID, 0.0, np.full(GRID.n, 3.0))
    q = zero
    for _ in range(500):
        q = cattaneo_flux_step(q, G, 0.1, 2.0, 0.5)
    np.testing.assert_allclose(q.values, -6.0, rtol=1e-12)
    with pytest.raises(ParameterDomainError):
        cattaneo_flux_step(q0, zero, 0.0, 1.0, 1.0)
    with pytest.raises(ParameterDomainError):
        cattaneo_flux_step(q0, Field(grid_linspace(0, 1, 4), 0.0, np.zeros(4)), 0.1, 1.0, 1.0)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**31),
    st.floats(min_value=-5, max_value=5),
    st.floats(min_value=-5, max_value=5),
    st.sampled_from(["exp", "power", "jeffrey", "dirac"]),
    st.floats(min_value=0.0, max_value=3.0),
)
def test_flux_history_is_linear(seed, a, b, kind, t_offset):
    spec = {"exp": Exponential(1.2, 0.6), "power": PowerLaw(1, 1, 1, 3.5), "jeffrey": Jeffrey(0.5, 1, 1), "dirac": Dirac(2.0)}[kind]
    rng = np.random.default_rng(seed)
    times = np.cumsum(rng.uniform(0.05, 0.3, size=12))
    g1, g2 = rng.normal(size=(2, 12, GRID.n))
    p1, p2 = rng.normal(size=(2, GRID.n))
    t = times[0] + t_offset
    h1 = HistoryRecord(times, g1, GRID, p1)
    h2 = HistoryRecord(times, g2, GRID, p2)
    h12 = HistoryRecord(times, a * g1 + b * g2, GRID, a * p1 + b * p2)
    combined = flux_history(h12, spec, t).values
    separate = a * flux_history(h1, spec, t).values + b * flux_history(h2, spec, t).values
    np.testing.assert_allclose(combined, separate, rtol=1e-10, atol=1e-10)


def test_history_validation():
    with pytest.raises(ParameterDomainError):
        HistoryRecord(np.array([]), np.zeros((0, GRID.n)), GRID)
    with pytest.raises(ParameterDomainError):
        HistoryRecord(np.array([0.0, 0.0]), np.zeros((2, GRID.n)), GRID)
    with pytest.raises(ParameterDomainError):
        HistoryRecord(np.array([0.0, 1.0]), np.zeros((2, GRID.n + 1)), GRID)
    with pytest.raises(ParameterDomainError):
        HistoryRecord.from_fields([])
    other = grid_linspace(0, 1, 5)
    with pytest.raises(ParameterDomainError):
        HistoryRecord.from_fields([Field(GRID, 0.0, GRID.zeros()), Field(other, 1.0, other.zeros())])
    rec = HistoryRecord(np.array([1.0, 2.0]), np.zeros((2, GRID.n)), GRID)
    with pytest.raises(ParameterDomainError):
        flux_history(rec, Exponential(), 0.5)


def test_mean_value_audit_zero_history():
    p = make_params(1, 1, 1, 1, 6.2)
    rec = HistoryRecord(np.linspace(1, 2, 11), np.zeros((11, GRID.n)), GRID)
    audit = mean_value_audit(rec, p, 2.0)
    assert audit.gap == 0.0
    assert np.all(audit.lhs.values == 0) and np.all(audit.rhs.values == 0)


@pytest.mark.parametrize("t", [1.0, 2.0, 5.0])
def test_mean_value_audit_constant_gradient(t):
    p = make_params(1.3, 1.0, 1.1, 0.9, 6.2)
    G = 0.8
    k, tau, om, l = p.k, p.tau, p.omega, p.l
    expected_gap = abs(k * tau**l * G / om**l * (l * om / ((l - 1) * t) - 1.0))
    # history entirely in the closed-form prehistory: exact
    rec = HistoryRecord(np.array([t]), np.full((1, GRID.n), G), GRID, prehistory=G)
    audit = mean_value_audit(rec, p, t)
    np.testing.assert_allclose(audit.lhs.values, 0.0, atol=1e-14)
    assert audit.gap == pytest.approx(expected_gap, rel=1e-12)
    # sampled constant history: equal up to the trapezoid error dt^2/12 * |w'(0)|,
    # where the memory weight w = l Q(s)/(s + omega) is steep near s = 0
    n = 4001
    dt = (t - 0.5) / (n - 1)
    q0 = k * (tau / om) ** l
    budget = dt * dt / 12 * l * (l + 1) * q0 / om**2 * G
    rec = HistoryRecord(np.linspace(0.5, t, n), np.full((n, GRID.n), G), GRID, prehistory=G)
    audit = mean_value_audit(rec, p, t)
    np.testing.assert_allclose(audit.lhs.values, 0.0, atol=1.5 * budget)
    assert audit.gap == pytest.approx(expected_gap, abs=1.5 * budget)


def test_mean_value_audit_lhs_is_flux_rate():
    p = make_params(1, 1, 1, 1, 6.2)
    g = grid_linspace(-2.5, 2.5, 51)
    times = np.linspace(1.0, 2.0, 2001)
    grads = np.stack([analytic.self_similar_Tx(g.x, s, p) for s in times])
    rec = HistoryRecord(times, grads, g)
    audit = mean_value_audit(rec, p, 1.5)
    fd = flux_rate_fd(rec, PowerLaw.from_params(p), 1.5, 1e-3)
    # the time difference is not smooth across the front itself
    away = np.abs(np.abs(g.x) - 1.5) > 0.06
    np.testing.assert_allclose(audit.lhs.values[away], fd[away], atol=2e-5)
    assert math.isfinite(audit.gap) and audit.gap > 0


def test_mean_value_audit_domain():
    p = make_params(1, 1, 1, 1, 6.2)
    rec = HistoryRecord(np.array([1.0, 2.0]), np.zeros((2, GRID.n)), GRID)
    with pytest.raises(ParameterDomainError):
        mean_value_audit(rec, p, 0.5)
