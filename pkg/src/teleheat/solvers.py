"""Explicit finite-difference steppers and the time-marching driver.

Four equations are supported, all on a uniform grid with Dirichlet-zero
ends:

* ``TelegraphModified``: ``eps T_tt + a/(t + delta) T_t = T_xx``
* ``TelegraphClassical``: ``T_tt + T_t / tau = c**2 T_xx``
* ``Heat``: ``T_t = kappa T_xx``
* ``PorousMedium``: ``T_t = (T**m)_xx``

The two damped-wave equations use a three-level scheme. ``T_xx`` is
explicit at the middle level and the damping uses the centered difference
``(T_next - T_prev) / (2 dt)``, which is linear in ``T_next``, so each node
is updated in closed form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from teleheat import analytic
from teleheat.core import (
    Field,
    FloatArray,
    Grid1D,
    ModelParams,
    ParameterDomainError,
    SolverConfig,
    mass,
)


class CFLWarning(RuntimeWarning):
    pass


class NumericalInstability(RuntimeError):
    """Non-finite values appeared during time stepping."""


@dataclass(frozen=True)
class TelegraphModified:
    params: ModelParams
    delta: float = 0.0

    def __post_init__(self):
        if self.delta < 0:
            raise ParameterDomainError("delta must be non-negative")


@dataclass(frozen=True)
class TelegraphClassical:
    tau: float
    c: float

    def __post_init__(self):
        if not (self.tau > 0 and self.c > 0):
            raise ParameterDomainError("tau and c must be positive")


@dataclass(frozen=True)
class Heat:
    kappa: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise ParameterDomainError("kappa must be positive")


@dataclass(frozen=True)
class PorousMedium:
    m: float

    def __post_init__(self):
        if not self.m > 1:
            raise ParameterDomainError("porous-medium exponent m must exceed 1")


PDEKind = Union[TelegraphModified, TelegraphClassical, Heat, PorousMedium]

SECOND_ORDER_KINDS = (TelegraphModified, TelegraphClassical)


def stable_dt(kind: PDEKind, grid: Grid1D, cfl: float, T: Optional[FloatArray] = None) -> float:
    """Largest explicit time step allowed by the CFL number ``cfl``.

    The porous-medium bound depends on the current state and needs ``T``.
    """
    dx = grid.dx
    if isinstance(kind, TelegraphModified):
        return cfl * dx * math.sqrt(kind.params.epsilon)
    if isinstance(kind, TelegraphClassical):
        return cfl * dx / kind.c
    if isinstance(kind, Heat):
        return cfl * dx * dx / (2.0 * kind.kappa)
    if isinstance(kind, PorousMedium):
        if T is None:
            raise ParameterDomainError("porous-medium time step needs the current field")
        peak = float(np.max(np.abs(T)))
        if peak == 0.0:
            return math.inf
        return cfl * dx * dx / (2.0 * kind.m * peak ** (kind.m - 1.0))
    raise TypeError(f"unknown PDE kind {kind!r}")


def _second_difference(T: FloatArray, dx: float) -> FloatArray:
    out = np.zeros_like(T)
    out[1:-1] = (T[2:] - 2.0 * T[1:-1] + T[:-2]) / (dx * dx)
    return out


def _damped_wave_update(Tp, Tc, dt, inertia, damping, stiffness, dx):
    # inertia*(Tn - 2Tc + Tp)/dt^2 + damping*(Tn - Tp)/(2dt) = stiffness*D_xx Tc
    half = 0.5 * damping * dt
    rhs = inertia * (2.0 * Tc - Tp) + half * Tp + dt * dt * stiffness * _second_difference(Tc, dx)
    Tn = rhs / (inertia + half)
    Tn[0] = Tn[-1] = 0.0
    return Tn


def _heat_update(Tc, dt, kappa, dx):
    Tn = Tc + dt * kappa * _second_difference(Tc, dx)
    Tn[0] = Tn[-1] = 0.0
    return Tn


def _pme_update(Tc, dt, m, dx):
    Tn = Tc + dt * _second_difference(np.maximum(Tc, 0.0) ** m, dx)
    Tn[0] = Tn[-1] = 0.0
    clipped = float(-np.sum(Tn[Tn < 0.0])) * dx
    np.maximum(Tn, 0.0, out=Tn)
    return Tn, clipped


def _check_cfl(kind, grid, dt, T=None):
    limit = stable_dt(kind, grid, 1.0, T)
    if dt > limit * (1.0 + 1e-12):
        warnings.warn(f"dt={dt:g} exceeds the explicit stability limit {limit:g}", CFLWarning, stacklevel=3)


def _same_grid(*fields: Field) -> Grid1D:
    grid = fields[0].grid
    if any(f.grid != grid for f in fields[1:]):
        raise ParameterDomainError("fields live on different grids")
    return grid


def _damping(params: ModelParams, t: float, delta: float) -> float:
    if t + delta <= 0:
        raise ParameterDomainError("a/(t + delta) is singular; need t + delta > 0")
    return params.a / (t + delta)


def step_telegraph_modified(
    T_prev: Field, T_curr: Field, t: float, dt: float, params: ModelParams, delta: float = 0.0
) -> Field:
    """Advance the non-autonomous telegraph equation from ``t`` to ``t + dt``.

    ``T_prev`` and ``T_curr`` are the solution at ``t - dt`` and ``t``.
    """
    grid = _same_grid(T_prev, T_curr)
    kind = TelegraphModified(params, delta)
    _check_cfl(kind, grid, dt)
    Tn = _damped_wave_update(
        T_prev.values, T_curr.values, dt, params.epsilon, _damping(params, t, delta), 1.0, grid.dx
    )
    return Field(grid, t + dt, Tn)


def step_telegraph_classical(T_prev: Field, T_curr: Field, dt: float, tau: float, c: float) -> Field:
    """Three-level step of ``T_tt + T_t/tau = c**2 T_xx``; ``tau=inf`` gives the wave equation."""
    grid = _same_grid(T_prev, T_curr)
    _check_cfl(TelegraphClassical(tau, c), grid, dt)
    Tn = _damped_wave_update(T_prev.values, T_curr.values, dt, 1.0, 1.0 / tau, c * c, grid.dx)
    return Field(grid, T_curr.t + dt, Tn)


def step_heat(T_curr: Field, dt: float, kappa: float) -> Field:
    """Forward-time centered-space step of the heat equation."""
    _check_cfl(Heat(kappa), T_curr.grid, dt)
    return Field(T_curr.grid, T_curr.t + dt, _heat_update(T_curr.values, dt, kappa, T_curr.grid.dx))


def step_porous_medium(T_curr: Field, dt: float, m: float) -> Field:
    """Explicit step of ``T_t = (T**m)_xx``; negative undershoot is clipped to zero."""
    if np.any(T_curr.values < 0):
        raise ParameterDomainError("porous-medium field must be non-negative")
    _check_cfl(PorousMedium(m), T_curr.grid, dt, T_curr.values)
    Tn, _ = _pme_update(T_curr.values, dt, m, T_curr.grid.dx)
    return Field(T_curr.grid, T_curr.t + dt, Tn)


def track_front(
    field: Field, threshold: Optional[float] = None, rel_threshold: float = 1e-10
) -> Optional[tuple[float, float]]:
    """Outermost points where ``|T|`` crosses ``threshold``.

    Crossings are located by linear interpolation between the bracketing
    nodes. The default threshold is ``rel_threshold * max|T|``. Returns
    ``None`` when nothing exceeds the threshold; a support touching the
    domain edge reports the grid bound.
    """
    v = np.abs(field.values)
    if threshold is None:
        threshold = rel_threshold * float(np.max(v))
        if threshold == 0.0:
            return None
    if threshold <= 0:
        raise ParameterDomainError("threshold must be positive")
    above = np.flatnonzero(v > threshold)
    if above.size == 0:
        return None
    x = field.grid.x
    dx = field.grid.dx
    i, j = int(above[0]), int(above[-1])
    if i == 0:
        left = x[0]
    else:
        left = x[i - 1] + (threshold - v[i - 1]) / (v[i] - v[i - 1]) * dx
    if j == field.grid.n - 1:
        right = x[-1]
    else:
        right = x[j] + (v[j] - threshold) / (v[j] - v[j + 1]) * dx
    return float(left), float(right)


def extrapolate_front(
    field: Field, p: float, lo: float = 1e-3, hi: float = 5e-2
) -> Optional[tuple[float, float]]:
    """Front positions from a degenerate profile ``T ~ dist**p`` near its edge.

    ``T**(1/p)`` vanishes linearly at the front (for the self-similar and
    ZK solutions it is exactly quadratic in ``x``). On each side of the
    peak a quadratic is fitted by least squares on nodes with
    ``lo < T/max T < hi`` and its outward root is taken; a straight-line
    fit is the fallback if that root does not exist. Samples below ``lo``
    are ignored, so the smeared numerical tail ahead of the front does not
    bias the result the way a tiny crossing threshold does.
    """
    v = np.maximum(field.values, 0.0)
    peak = float(np.max(v))
    if peak == 0.0:
        return None
    x = field.grid.x
    w = (v / peak) ** (1.0 / p)
    centre = int(np.argmax(v))
    band = (v > lo * peak) & (v < hi * peak)
    idx = np.arange(field.grid.n)
    out = []
    for outward, side in ((-1.0, idx < centre), (1.0, idx > centre)):
        sel = band & side
        if np.count_nonzero(sel) < 2:
            return None
        xs = x[sel]
        edge = xs.min() if outward < 0 else xs.max()
        root = None
        if xs.size >= 3:
            roots = np.roots(np.polyfit(xs, w[sel], 2))
            roots = roots[np.isreal(roots)].real
            roots = roots[outward * (roots - edge) >= -field.grid.dx]
            if roots.size:
                root = roots[np.argmin(np.abs(roots - edge))]
        if root is None:
            slope, intercept = np.polyfit(xs, w[sel], 1)
            root = -intercept / slope
        out.append(float(root))
    return out[0], out[1]


def rescale_to_profile(field: Field, t: Optional[float] = None) -> tuple[FloatArray, FloatArray]:
    """Undo the similarity substitution: return ``eta = x/t`` and ``t * T``."""
    t = field.t if t is None else t
    if not t > 0:
        raise ParameterDomainError("rescaling needs t > 0")
    return field.grid.x / t, t * field.values


def reconstruct_flux(T_prev: Field, T_next: Field, gamma: float = 1.0) -> Field:
    """Flux from energy balance ``q_x = -gamma T_t``, with ``q = 0`` at the left end."""
    grid = _same_grid(T_prev, T_next)
    dt = T_next.t - T_prev.t
    Tt = (T_next.values - T_prev.values) / dt
    q = np.zeros(grid.n)
    q[1:] = -gamma * np.cumsum(0.5 * (Tt[1:] + Tt[:-1])) * grid.dx
    return Field(grid, 0.5 * (T_prev.t + T_next.t), q)


@dataclass
class SolveResult:
    snapshots: list[Field]
    mass_trace: FloatArray
    front_trace: FloatArray
    dt_used: float
    steps: int
    final: Field
    diagnostics: dict = field(default_factory=dict)

    def snapshot_near(self, t: float) -> Field:
        return min(self.snapshots, key=lambda f: abs(f.t - t))

    @property
    def relative_mass_drift(self) -> float:
        m = self.mass_trace[:, 1]
        return float(np.max(np.abs(m - m[0])) / abs(m[0]))


def exact_initial_data(kind: PDEKind, grid: Grid1D, t0: float, zk: Optional[analytic.ZKParams] = None):
    """Initial ``(T, T_t)`` sampled from the exact solution belonging to ``kind``."""
    x = grid.x
    if isinstance(kind, TelegraphModified):
        if kind.delta:
            raise ParameterDomainError("exact self-similar data assumes delta = 0")
        return analytic.self_similar_T(x, t0, kind.params), analytic.self_similar_Tt(x, t0, kind.params)
    if isinstance(kind, Heat):
        return analytic.heat_kernel(x, t0, kind.kappa), None
    if isinstance(kind, PorousMedium):
        zk = zk or analytic.ZKParams(m=kind.m)
        if zk.m != kind.m:
            raise ParameterDomainError("ZK parameters do not match the porous-medium exponent")
        return analytic.zk_solution(x, t0, zk), None
    raise ParameterDomainError(f"no exact solution available for {type(kind).__name__}")


class _Recorder:
    def __init__(self, grid, config, n_expected=None):
        self.grid = grid
        self.config = config
        self.masses = []
        self.fronts = []
        self.snapshots = []

    def trace(self, t, T):
        if not np.all(np.isfinite(T)):
            raise NumericalInstability(f"non-finite values at t={t:g}")
        f = Field(self.grid, t, T)
        self.masses.append((t, mass(f)))
        front = track_front(f, rel_threshold=self.config.front_rel_threshold)
        self.fronts.append((t, *(front if front else (math.nan, math.nan))))

    def snap(self, t, T):
        if not np.all(np.isfinite(T)):
            raise NumericalInstability(f"non-finite values at t={t:g}")
        self.snapshots.append(Field(self.grid, t, T.copy()))

    def result(self, dt, steps, final_t, final_T, **diag):
        return SolveResult(
            snapshots=self.snapshots,
            mass_trace=np.array(self.masses),
            front_trace=np.array(self.fronts),
            dt_used=dt,
            steps=steps,
            final=Field(self.grid, final_t, final_T),
            diagnostics=diag,
        )


def _as_array(values, grid: Grid1D) -> FloatArray:
    if isinstance(values, Field):
        values = values.values
    arr = np.array(values, dtype=float)
    if arr.shape != (grid.n,):
        raise ParameterDomainError("initial data does not match the grid")
    return arr


def solve(
    kind: PDEKind,
    grid: Grid1D,
    init_T=None,
    init_Tt=None,
    config: SolverConfig = SolverConfig(),
    *,
    exact_init: bool = False,
    zk: Optional[analytic.ZKParams] = None,
) -> SolveResult:
    """March ``kind`` from ``config.t0`` to ``config.t_end``.

    Second-order kinds need ``init_Tt``; ``exact_init=True`` samples ``T``
    (and ``T_t``) from the kind's exact solution instead. Uniform steps are
    used for the linear kinds, with ``dt`` shrunk slightly from the CFL
    limit so that ``t_end`` is hit exactly; snapshots are taken at the
    nearest step. The porous-medium step adapts to the current peak and is
    clipped to land on every snapshot time.
    """
    if isinstance(kind, TelegraphModified):
        if config.delta != kind.delta:
            kind = TelegraphModified(kind.params, config.delta)
        if not config.t0 + kind.delta > 0:
            raise ParameterDomainError("a/t is singular at t = 0; start at t0 > 0 or set delta > 0")
    if exact_init:
        init_T, init_Tt = exact_initial_data(kind, grid, config.t0, zk)
    if init_T is None:
        raise ParameterDomainError("initial temperature is required")
    T0 = _as_array(init_T, grid)
    T0[0] = T0[-1] = 0.0
    if isinstance(kind, SECOND_ORDER_KINDS):
        if init_Tt is None:
            raise ParameterDomainError("second-order kinds need an initial time derivative")
        return _solve_damped_wave(kind, grid, T0, _as_array(init_Tt, grid), config)
    if isinstance(kind, Heat):
        return _solve_heat(kind, grid, T0, config)
    if isinstance(kind, PorousMedium):
        return _solve_pme(kind, grid, T0, config)
    raise TypeError(f"unknown PDE kind {kind!r}")


def _uniform_steps(kind, grid, config):
    span = config.t_end - config.t0
    n_steps = int(math.ceil(span / stable_dt(kind, grid, config.cfl) - 1e-9))
    dt = span / n_steps
    snap_idx = {}
    for s in config.snapshot_times:
        snap_idx.setdefault(int(round((s - config.t0) / dt)), []).append(s)
    return n_steps, dt, snap_idx


def _solve_damped_wave(kind, grid, T0, Tt0, config):
    n_steps, dt, snap_idx = _uniform_steps(kind, grid, config)
    dx = grid.dx
    t0 = config.t0
    if isinstance(kind, TelegraphModified):
        p = kind.params
        inertia, stiffness = p.epsilon, 1.0
        damping_at = lambda t: _damping(p, t, kind.delta)  # noqa: E731
    else:
        inertia, stiffness = 1.0, kind.c**2
        damping_at = lambda t: 1.0 / kind.tau  # noqa: E731

    rec = _Recorder(grid, config)
    every = config.trace_every
    rec.trace(t0, T0)
    if 0 in snap_idx:
        rec.snap(t0, T0)

    # Taylor start with T_tt taken from the equation itself
    Ttt0 = (stiffness * _second_difference(T0, dx) - damping_at(t0) * Tt0) / inertia
    T1 = T0 + dt * Tt0 + 0.5 * dt * dt * Ttt0
    T1[0] = T1[-1] = 0.0
    Tp, Tc = T0, T1
    for n in range(1, n_steps + 1):
        t = t0 + n * dt
        if n % every == 0 or n == n_steps:
            rec.trace(t, Tc)
        if n in snap_idx:
            rec.snap(t, Tc)
        if n == n_steps:
            break
        Tp, Tc = Tc, _damped_wave_update(Tp, Tc, dt, inertia, damping_at(t), stiffness, dx)
    if not np.all(np.isfinite(Tc)):
        raise NumericalInstability("non-finite values at end of run")
    return rec.result(dt, n_steps, config.t_end, Tc)


def _solve_heat(kind, grid, T0, config):
    n_steps, dt, snap_idx = _uniform_steps(kind, grid, config)
    rec = _Recorder(grid, config)
    T = T0
    rec.trace(config.t0, T)
    if 0 in snap_idx:
        rec.snap(config.t0, T)
    for n in range(1, n_steps + 1):
        T = _heat_update(T, dt, kind.kappa, grid.dx)
        t = config.t0 + n * dt
        if n % config.trace_every == 0 or n == n_steps:
            rec.trace(t, T)
        if n in snap_idx:
            rec.snap(t, T)
    return rec.result(dt, n_steps, config.t_end, T)


def _solve_pme(kind, grid, T0, config):
    rec = _Recorder(grid, config)
    T = np.maximum(T0, 0.0)
    t = config.t0
    targets = sorted({s for s in config.snapshot_times if s > t} | {config.t_end})
    rec.trace(t, T)
    if config.t0 in config.snapshot_times:
        rec.snap(t, T)
    n = 0
    clipped = 0.0
    dt_min = math.inf
    for target in targets:
        while t < target:
            dt = min(stable_dt(kind, grid, config.cfl, T), target - t)
            T, c = _pme_update(T, dt, kind.m, grid.dx)
            clipped += c
            n += 1
            t = target if target - t - dt <= 1e-12 * target else t + dt
            dt_min = min(dt_min, dt)
            if n % config.trace_every == 0:
                rec.trace(t, T)
        if target in config.snapshot_times:
            rec.snap(t, T)
    if n % config.trace_every:
        rec.trace(t, T)
    return rec.result(dt_min, n, t, T, clipped_mass=clipped)
