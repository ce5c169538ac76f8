"""Composed numerical experiments.

* :func:`run_convergence`: grid refinement against an exact solution.
* :func:`run_asymptotics`: distance between the rescaled solution and the
  self-similar profile over time. This only measures; whether general data
  approach the profile is an open question and nothing here asserts it.
* :func:`reproduce_figures`: profile and surface data as CSV.
* :func:`front_regularity_probe`: one-sided derivative jumps at the fronts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from teleheat import analytic
from teleheat.core import (
    FloatArray,
    ModelParams,
    ParameterDomainError,
    SolverConfig,
    make_params,
    params_from_eps,
    symmetric_grid,
)
from teleheat.csvio import write_csv
from teleheat.solvers import (
    Heat,
    PDEKind,
    PorousMedium,
    TelegraphModified,
    rescale_to_profile,
    solve,
    track_front,
)

NORMS = ("L1", "L2", "Linf")


def error_norm(err: FloatArray, dx: float, kind: str) -> float:
    if kind == "L1":
        return float(np.sum(np.abs(err)) * dx)
    if kind == "L2":
        return float(np.sqrt(np.sum(err * err) * dx))
    if kind == "Linf":
        return float(np.max(np.abs(err)))
    raise ParameterDomainError(f"unknown norm {kind!r}; expected one of {NORMS}")


def fit_order(dx: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(dx)."""
    return float(np.polyfit(np.log(dx), np.log(errors), 1)[0])


def default_exact(kind: PDEKind, zk: Optional[analytic.ZKParams] = None) -> Callable:
    if isinstance(kind, TelegraphModified):
        return lambda x, t: analytic.self_similar_T(x, t, kind.params)
    if isinstance(kind, Heat):
        return lambda x, t: analytic.heat_kernel(x, t, kind.kappa)
    if isinstance(kind, PorousMedium):
        zk = zk or analytic.ZKParams(m=kind.m)
        return lambda x, t: analytic.zk_solution(x, t, zk)
    raise ParameterDomainError(f"no exact solution available for {type(kind).__name__}")


def default_half_width(kind: PDEKind, t_end: float, zk: Optional[analytic.ZKParams] = None) -> float:
    """Domain half-width that keeps the solution away from the boundary."""
    if isinstance(kind, TelegraphModified):
        return 1.2 * t_end / math.sqrt(kind.params.epsilon)
    if isinstance(kind, Heat):
        # Gaussian below exp(-40) of its peak at the edge
        return math.sqrt(160.0 * kind.kappa * t_end)
    if isinstance(kind, PorousMedium):
        zk = zk or analytic.ZKParams(m=kind.m)
        return 1.2 * zk.front(t_end)
    raise ParameterDomainError(f"no default domain for {type(kind).__name__}")


@dataclass
class ConvergenceReport:
    levels: list[tuple[float, float, float]]
    fitted_order: float
    norm_kind: str

    @property
    def errors(self) -> list[float]:
        return [e for _, _, e in self.levels]


def run_convergence(
    kind: PDEKind,
    exact_solution_ref: Optional[Callable] = None,
    levels: Sequence[float] = (0.02, 0.01, 0.005),
    config: SolverConfig = SolverConfig(),
    *,
    norm: str = "L1",
    region: Optional[Callable[[FloatArray, float], FloatArray]] = None,
    zk: Optional[analytic.ZKParams] = None,
    half_width: Optional[float] = None,
) -> ConvergenceReport:
    """Run ``solve`` at each ``dx`` in ``levels`` and fit the error order.

    Initial data are sampled from the kind's exact solution at ``config.t0``.
    The error at ``config.t_end`` is measured against ``exact_solution_ref``
    (defaulting to the same exact solution). ``region(x, t)`` can restrict
    the norm to a mask, e.g. the interior of the cone.
    """
    levels = [float(d) for d in levels]
    if len(levels) < 3:
        raise ParameterDomainError("a convergence study needs at least 3 levels")
    if any(b >= a for a, b in zip(levels, levels[1:])):
        raise ParameterDomainError("dx levels must be strictly decreasing")
    exact = exact_solution_ref or default_exact(kind, zk)
    L = half_width or default_half_width(kind, config.t_end, zk)
    rows = []
    for dx in levels:
        grid = symmetric_grid(L, dx)
        res = solve(kind, grid, config=config, exact_init=True, zk=zk)
        err = res.final.values - exact(grid.x, res.final.t)
        if region is not None:
            err = np.where(region(grid.x, res.final.t), err, 0.0)
        rows.append((dx, res.dt_used, error_norm(err, grid.dx, norm)))
    order = fit_order([r[0] for r in rows], [r[2] for r in rows])
    return ConvergenceReport(levels=rows, fitted_order=order, norm_kind=norm)


# -- intermediate asymptotics --------------------------------------------------


def smooth_bump(x: FloatArray, centre: float, width: float) -> FloatArray:
    """C-infinity bump ``exp(1 - 1/(1 - r**2))`` supported on ``|x - centre| < width``."""
    r2 = ((x - centre) / width) ** 2
    out = np.zeros_like(x)
    inside = r2 < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
    return out


@dataclass
class AsymptoticsReport:
    times: list[float]
    l1_distances: list[float]
    mass: float
    notes: list[str] = field(default_factory=list)
    init_kind: str = "exact"
    initial_support: tuple[float, float] = (0.0, 0.0)
    fronts: list[tuple[float, float]] = field(default_factory=list)
    mass_trace: Optional[FloatArray] = None

    @property
    def relative_mass_drift(self) -> float:
        m = self.mass_trace[:, 1]
        return float(np.max(np.abs(m - m[0])) / abs(m[0]))


INIT_KINDS = ("exact", "bump", "two_bumps")


def initial_data(init_kind, x, t0, params, seed=0):
    """``(T, T_t, support, notes)`` for one of :data:`INIT_KINDS` at ``t0``.

    Bump data carry unit mass and start at rest; ``params`` is only used by
    ``"exact"``.
    """
    notes = []
    if init_kind == "exact":
        T = analytic.self_similar_T(x, t0, params)
        Tt = analytic.self_similar_Tt(x, t0, params)
        half = t0 / math.sqrt(params.epsilon)
        return T, Tt, (-half, half), notes
    if init_kind == "bump":
        width = 0.5
        T = smooth_bump(x, 0.0, width)
        support = (-width, width)
    elif init_kind == "two_bumps":
        rng = np.random.default_rng(seed)
        offset = rng.uniform(0.3, 0.8)
        width = 0.25
        T = smooth_bump(x, -offset, width) + smooth_bump(x, offset, width)
        support = (-offset - width, offset + width)
        notes.append(f"two bumps at +-{offset:.17g} (seed={seed}), width {width}")
    else:
        raise ParameterDomainError(f"init_kind must be one of {INIT_KINDS}, got {init_kind!r}")
    dx = x[1] - x[0]
    T = T / (np.trapezoid(T, dx=dx))
    notes.append("second initial condition T_t(x, t0) = 0")
    return T, np.zeros_like(x), support, notes


def run_asymptotics(
    init_kind: str,
    params: ModelParams,
    t_schedule: Sequence[float],
    config: Optional[SolverConfig] = None,
    *,
    dx: float = 0.005,
    seed: int = 0,
) -> AsymptoticsReport:
    """Measure how far the rescaled solution is from the self-similar profile.

    At each scheduled time the solution is mapped to ``(x/t, t T)`` and
    compared in L1 (over ``eta``) with the profile ``f`` rescaled to carry
    the run's conserved mass.
    """
    analytic.classify_regularity(params.l)
    times = sorted(float(t) for t in t_schedule)
    if config is None:
        config = SolverConfig(t0=1.0, t_end=times[-1])
    config = SolverConfig(
        t0=config.t0,
        t_end=max(config.t_end, times[-1]),
        cfl=config.cfl,
        delta=config.delta,
        snapshot_times=times,
        trace_every=config.trace_every,
        front_rel_threshold=config.front_rel_threshold,
    )
    c = 1.0 / math.sqrt(params.epsilon)
    # largest possible initial support is |x| < 1.05
    grid = symmetric_grid(1.2 * (1.05 + c * (config.t_end - config.t0)) + 0.2, dx)
    T0, Tt0, support, notes = initial_data(init_kind, grid.x, config.t0, params, seed)
    run_mass = float(np.trapezoid(T0, dx=grid.dx))
    if not run_mass > 0:
        raise ParameterDomainError("initial data must carry positive mass")
    res = solve(TelegraphModified(params, config.delta), grid, T0, Tt0, config)
    profile_mass = analytic.self_similar_mass(params)
    distances = []
    fronts = []
    for snap in res.snapshots:
        eta, g = rescale_to_profile(snap)
        candidate = run_mass / profile_mass * analytic.profile_f(eta, params)
        distances.append(float(np.trapezoid(np.abs(g - candidate), x=eta)))
        fr = track_front(snap, rel_threshold=config.front_rel_threshold)
        fronts.append(fr if fr else (math.nan, math.nan))
    notes.append("candidate profile scaled to the run's mass")
    return AsymptoticsReport(
        times=[s.t for s in res.snapshots],
        l1_distances=distances,
        mass=run_mass,
        notes=notes,
        init_kind=init_kind,
        initial_support=support,
        fronts=fronts,
        mass_trace=res.mass_trace,
    )


def write_asymptotics_csv(report: AsymptoticsReport, path, meta=None, precision=None) -> Path:
    meta = dict(meta or {})
    meta.update(init=report.init_kind, mass=report.mass)
    for i, note in enumerate(report.notes):
        meta[f"note{i}"] = note
    rows = [
        (t, d, fl, fr) for t, d, (fl, fr) in zip(report.times, report.l1_distances, report.fronts)
    ]
    return write_csv(path, ["t", "l1_distance", "x_left", "x_right"], rows, meta, precision)


# -- figure data -------------------------------------------------------------


def reproduce_figures(out_dir, precision: Optional[int] = None) -> list[Path]:
    """Write ``fig1_profiles.csv`` and ``fig2_surface.csv`` into ``out_dir``.

    Figure 1 data: the profile for l = 6.2 and l = 4.1 (eps = 1) on 801
    points of [-1, 1]. Figure 2 data: the l = 6.2 solution on the quarter
    plane, x in [0, 5] by 101 points and t in (0, 5] by 100 points.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    eta = np.linspace(-1.0, 1.0, 801)
    eta[400] = 0.0
    p62 = make_params(l=6.2, self_similar=True)
    p41 = make_params(l=4.1, self_similar=True)
    fig1 = write_csv(
        out / "fig1_profiles.csv",
        ["eta", "f_l6.2", "f_l4.1"],
        zip(eta, analytic.profile_f(eta, p62), analytic.profile_f(eta, p41)),
        {"eps": 1.0, "l_values": "6.2;4.1", "samples": 801},
        precision,
    )
    xs = np.linspace(0.0, 5.0, 101)
    ts = 0.05 * np.arange(1, 101)
    X, Tm = np.meshgrid(xs, ts, indexing="ij")
    surf = analytic.self_similar_T(X, Tm, p62)
    fig2 = write_csv(
        out / "fig2_surface.csv",
        ["x", "t", "T"],
        zip(X.ravel(), Tm.ravel(), surf.ravel()),
        {"eps": 1.0, "l": 6.2, "nx": xs.size, "nt": ts.size},
        precision,
    )
    return [fig1, fig2]


# -- front regularity --------------------------------------------------------


@dataclass(frozen=True)
class FrontRegularity:
    """One-sided derivative jumps at the right front for one ``l``.

    A jump of ``inf`` means the inside derivative diverges at the front.
    """

    l: float
    p: float
    jump_Tx: float
    jump_Tt: float
    jump_Txx: float
    order_Txx: float
    first_continuous: bool
    second_continuous: bool


def _inside_derivatives(s, t, params):
    """``T_x``, ``T_t``, ``T_xx`` of the exact solution at distance ``s`` inside the right front."""
    eps = params.epsilon
    p = analytic.profile_exponent(params)
    r = s * math.sqrt(eps) / t
    u = r * (2.0 - r)  # 1 - eps x^2 / t^2 without cancellation
    x = t / math.sqrt(eps) - s
    eta = x / t
    u_x = -2.0 * eps * x / (t * t)
    u_xx = -2.0 * eps / (t * t)
    T_x = p * u ** (p - 1.0) * u_x / t
    T_xx = (p * (p - 1.0) * u ** (p - 2.0) * u_x**2 + p * u ** (p - 1.0) * u_xx) / t
    f = u**p
    fp = -2.0 * eps * eta * p * u ** (p - 1.0)
    T_t = -(f + eta * fp) / (t * t)
    return np.array([T_x, T_t, T_xx])


def _limit(values, ratio):
    """Aitken-style limit of ``J + C s**q`` sampled at ``s, s/ratio, s/ratio**2``.

    Returns ``(J, q)``; ``J`` is ``inf`` when the samples grow (``q < 0``).
    """
    d1, d2, d3 = values
    if d2 == d3 and d1 == d2:
        return d3, math.inf
    if (d1 - d2) * (d2 - d3) <= 0:
        # non-monotone: fall back to the last sample
        return d3, math.nan
    q = math.log((d1 - d2) / (d2 - d3)) / math.log(ratio)
    if q <= 0:
        return math.inf, q
    return d3 - (d2 - d3) / (ratio**q - 1.0), q


def front_regularity_probe(
    l_values: Sequence[float],
    t: float = 1.0,
    eps: float = 1.0,
    s0: float = 1e-10,
    ratio: float = 10.0,
    tol: float = 1e-6,
) -> list[FrontRegularity]:
    """Estimate derivative jumps across the front ``x = t/sqrt(eps)``.

    Outside the cone every derivative is zero, so the jump equals the
    limit of the inside derivative. That limit is extrapolated from
    closed-form derivatives taken at distances ``s0``, ``s0/ratio`` and
    ``s0/ratio**2`` inside the front.
    """
    out = []
    for l in l_values:
        l = float(l)
        prof = analytic.classify_regularity(l)
        if prof.regularity is analytic.Regularity.INVALID:
            raise ParameterDomainError(f"front probe needs l > 4, got {l}")
        params = params_from_eps(eps, l)
        samples = np.array(
            [_inside_derivatives(s0 / ratio**i, t, params) for i in range(3)]
        )
        jumps = []
        orders = []
        for j in range(3):
            J, q = _limit(samples[:, j], ratio)
            jumps.append(float(abs(J)))
            orders.append(float(q))
        out.append(
            FrontRegularity(
                l=l,
                p=prof.p,
                jump_Tx=jumps[0],
                jump_Tt=jumps[1],
                jump_Txx=jumps[2],
                order_Txx=orders[2],
                first_continuous=bool(jumps[0] <= tol and jumps[1] <= tol),
                second_continuous=bool(jumps[2] <= tol),
            )
        )
    return out
