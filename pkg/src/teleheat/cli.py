"""Command-line front end.

Each subcommand writes CSV files whose ``# key=value`` preamble echoes the
fully resolved configuration. Values come from, in increasing priority,
built-in defaults, a flat ``key = value`` file given by ``--config``, and
command-line flags.

Exit codes: 0 success, 2 parameter or domain error, 3 numerical instability.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from teleheat import __version__, analytic, harness, kernels, solvers
from teleheat.core import (
    ModelParams,
    ParameterDomainError,
    SolverConfig,
    params_from_eps,
    symmetric_grid,
)
from teleheat.csvio import default_precision, write_csv

EXIT_OK, EXIT_PARAM, EXIT_UNSTABLE = 0, 2, 3


def _float_list(text: str) -> list[float]:
    return [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]


# name, type, default, help; the flag is "--" + name with "_" -> "-"
COMMON = [("precision", int, None, "significant digits in CSV output (default 17)")]

OPTIONS: dict[str, list[tuple[str, Callable, object, str]]] = {
    "profile": [
        ("l", float, 6.2, "memory exponent (> 4)"),
        ("eps", float, 1.0, "epsilon"),
        ("samples", int, 801, "number of samples on [-1/sqrt(eps), 1/sqrt(eps)]"),
        ("out", str, "profile.csv", "output CSV path"),
    ],
    "solve": [
        ("model", str, "telegraph-mod", "telegraph-mod | telegraph | heat | pme"),
        ("l", float, 6.2, "memory exponent"),
        ("eps", float, 1.0, "epsilon"),
        ("m", float, 2.0, "porous-medium exponent"),
        ("tau", float, 1.0, "classical telegraph relaxation time"),
        ("c", float, 1.0, "classical telegraph wave speed"),
        ("kappa", float, 1.0, "heat diffusivity"),
        ("delta", float, 0.0, "shift a/t -> a/(t + delta)"),
        ("t0", float, 1.0, "start time"),
        ("t_end", float, 3.0, "end time"),
        ("dx", float, 0.005, "grid spacing"),
        ("cfl", float, 0.5, "Courant number"),
        ("half_width", float, None, "domain half-width (default: sized from t_end)"),
        ("init", str, "exact", "exact | bump | two-bumps"),
        ("seed", int, 0, "seed for two-bumps placement"),
        ("snapshots", str, "", "comma-separated snapshot times"),
        ("out_dir", str, "solve_out", "output directory"),
    ],
    "dispersion": [
        ("l", float, 6.2, "memory exponent"),
        ("eps", float, 1.0, "epsilon"),
        ("omega_tilde", float, 1.0, "angular frequency"),
        ("t_min", float, 1e-2, "first time of the log-spaced scan"),
        ("t_max", float, 1e12, "last time of the scan"),
        ("points", int, 57, "number of scan points"),
        ("out", str, "dispersion.csv", "output CSV path"),
    ],
    "converge": [
        ("model", str, "telegraph-mod", "telegraph-mod | heat | pme"),
        ("levels", int, 3, "number of refinement levels"),
        ("dx0", float, 0.02, "coarsest grid spacing (halved per level)"),
        ("norm", str, "L1", "L1 | L2 | Linf"),
        ("l", float, 6.2, "memory exponent"),
        ("eps", float, 1.0, "epsilon"),
        ("m", float, 2.0, "porous-medium exponent"),
        ("kappa", float, 1.0, "heat diffusivity"),
        ("t0", float, 1.0, "start time"),
        ("t_end", float, 1.5, "end time"),
        ("cfl", float, 0.5, "Courant number"),
        ("out", str, "convergence.csv", "output CSV path"),
    ],
    "asymptotics": [
        ("init", str, "bump", "exact | bump | two-bumps"),
        ("l", float, 6.2, "memory exponent"),
        ("eps", float, 1.0, "epsilon"),
        ("t0", float, 1.0, "start time"),
        ("times", str, "1.5,2,3,4", "comma-separated measurement times"),
        ("dx", float, 0.005, "grid spacing"),
        ("cfl", float, 0.5, "Courant number"),
        ("seed", int, 0, "seed for two-bumps placement"),
        ("out", str, "asymptotics.csv", "output CSV path"),
    ],
    "figures": [("out_dir", str, "figures", "output directory")],
    "flux": [
        ("kernel", str, "power-law", "dirac | exponential | power-law | jeffrey"),
        ("k", float, 1.0, "conductivity (dirac, exponential, power-law)"),
        ("tau", float, 1.0, "relaxation time"),
        ("omega", float, 1.0, "power-law time shift"),
        ("l", float, 6.2, "power-law exponent"),
        ("k1", float, 1.0, "Jeffrey instantaneous weight"),
        ("k2", float, 1.0, "Jeffrey relaxing weight"),
        ("profile_l", float, 6.2, "memory exponent of the self-similar gradient history"),
        ("t_start", float, 1.0, "first recorded history time"),
        ("t", float, 2.0, "evaluation time"),
        ("history_dt", float, 1e-3, "history sampling interval"),
        ("dx", float, 0.01, "grid spacing"),
        ("half_width", float, 2.5, "domain half-width"),
        ("audit", int, 0, "1 to add the local-law audit (power-law only)"),
        ("out", str, "flux.csv", "output CSV path"),
    ],
}


def read_config_file(path) -> dict[str, str]:
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParameterDomainError(f"config line is not key = value: {raw!r}")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="teleheat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"teleheat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, opts in OPTIONS.items():
        sp = sub.add_parser(name, help=COMMANDS[name].__doc__.splitlines()[0])
        sp.add_argument("--config", default=None, help="flat key = value config file")
        for key, typ, default, help_text in opts + COMMON:
            flag = "--" + key.replace("_", "-")
            shown = "" if default is None else f" [default: {default}]"
            sp.add_argument(flag, dest=key, type=typ, default=None, help=help_text + shown)
    return parser


def resolve(command: str, ns: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags (flags win).

    An empty value in the file means "use the default", so an echoed CSV
    header can be fed back as a config file.
    """
    file_values = read_config_file(ns.config) if ns.config else {}
    out = {}
    for key, typ, default, _ in OPTIONS[command] + COMMON:
        flag_value = getattr(ns, key)
        if flag_value is not None:
            out[key] = flag_value
        elif file_values.get(key, "") != "":
            try:
                out[key] = typ(file_values[key])
            except ValueError as exc:
                raise ParameterDomainError(f"bad value for {key}: {file_values[key]!r}") from exc
        else:
            out[key] = default
    unknown = set(file_values) - set(out)
    if unknown:
        raise ParameterDomainError(f"unknown config keys: {sorted(unknown)}")
    if out["precision"] is None:
        out["precision"] = default_precision()
    return out


def _meta(command: str, cfg: dict) -> dict:
    meta = {"command": command}
    meta.update({k: ("" if v is None else v) for k, v in cfg.items()})
    return meta


def cmd_profile(cfg: dict) -> int:
    """Sample the similarity profile f(eta)."""
    params = params_from_eps(cfg["eps"], cfg["l"], self_similar=True)
    if cfg["samples"] < 2:
        raise ParameterDomainError("need at least 2 samples")
    edge = 1.0 / math.sqrt(params.epsilon)
    eta = np.linspace(-edge, edge, cfg["samples"])
    if cfg["samples"] % 2 == 1:
        eta[cfg["samples"] // 2] = 0.0
    eta[0], eta[-1] = -edge, edge
    f = analytic.profile_f(eta, params)
    write_csv(cfg["out"], ["eta", "f"], zip(eta, f), _meta("profile", cfg), cfg["precision"])
    return EXIT_OK


MODELS = ("telegraph-mod", "telegraph", "heat", "pme")


def _kind_from(cfg: dict):
    model = cfg["model"]
    if model == "telegraph-mod":
        return solvers.TelegraphModified(params_from_eps(cfg["eps"], cfg["l"]), cfg.get("delta", 0.0))
    if model == "telegraph":
        return solvers.TelegraphClassical(cfg["tau"], cfg["c"])
    if model == "heat":
        return solvers.Heat(cfg["kappa"])
    if model == "pme":
        return solvers.PorousMedium(cfg["m"])
    raise ParameterDomainError(f"--model must be one of {MODELS}, got {model!r}")


def _default_half_width(kind, cfg: dict) -> float:
    if cfg["init"] == "exact":
        return harness.default_half_width(kind, cfg["t_end"])
    # bump data are supported in |x| < 1.05
    span = cfg["t_end"] - cfg["t0"]
    if isinstance(kind, solvers.TelegraphModified):
        return 1.2 * (1.05 + kind.params.c * span) + 0.2
    if isinstance(kind, solvers.TelegraphClassical):
        return 1.2 * (1.05 + kind.c * span) + 0.2
    return 1.05 + harness.default_half_width(kind, cfg["t_end"])


def cmd_solve(cfg: dict) -> int:
    """Run one of the finite-difference solvers and write snapshots."""
    kind = _kind_from(cfg)
    snaps = _float_list(cfg["snapshots"]) or [cfg["t_end"]]
    config = SolverConfig(
        t0=cfg["t0"], t_end=cfg["t_end"], cfl=cfg["cfl"], delta=cfg["delta"], snapshot_times=snaps
    )
    half = cfg["half_width"] or _default_half_width(kind, cfg)
    grid = symmetric_grid(half, cfg["dx"])
    init = cfg["init"].replace("-", "_")
    if init == "exact":
        res = solvers.solve(kind, grid, config=config, exact_init=True)
    elif init in ("bump", "two_bumps"):
        T0, Tt0, _, _ = harness.initial_data(init, grid.x, cfg["t0"], None, cfg["seed"])
        res = solvers.solve(kind, grid, T0, Tt0, config)
    else:
        raise ParameterDomainError(f"--init must be exact, bump or two-bumps, got {cfg['init']!r}")
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    meta = _meta("solve", cfg)
    prec = cfg["precision"]
    for i, snap in enumerate(res.snapshots):
        write_csv(
            out / f"snapshot_{i:03d}.csv",
            ["x", "T"],
            zip(snap.x, snap.values),
            {**meta, "t": snap.t},
            prec,
        )
    write_csv(out / "mass.csv", ["t", "mass"], res.mass_trace, {**meta, "dt": res.dt_used}, prec)
    write_csv(out / "fronts.csv", ["t", "x_left", "x_right"], res.front_trace, meta, prec)
    return EXIT_OK


def cmd_dispersion(cfg: dict) -> int:
    """Scan phase velocity and attenuation distance over time."""
    params = params_from_eps(cfg["eps"], cfg["l"])
    if not 0 < cfg["t_min"] < cfg["t_max"] or cfg["points"] < 2:
        raise ParameterDomainError("need 0 < t_min < t_max and at least 2 points")
    ts = np.geomspace(cfg["t_min"], cfg["t_max"], cfg["points"])
    rows = []
    for t in ts:
        d = analytic.dispersion(cfg["omega_tilde"], t, params)
        vp_pr, att_pr = analytic.printed_dispersion(cfg["omega_tilde"], t, params)
        rows.append((t, d.k_tilde.real, d.k_tilde.imag, d.v_p, d.alpha_tilde, vp_pr, att_pr))
    write_csv(
        cfg["out"],
        ["t", "re_k", "im_k", "v_p", "attenuation", "v_p_closed_formula", "attenuation_closed_formula"],
        rows,
        _meta("dispersion", cfg),
        cfg["precision"],
    )
    return EXIT_OK


def cmd_converge(cfg: dict) -> int:
    """Grid-refinement study against an exact solution; prints the fitted order."""
    if cfg["model"] == "telegraph":
        raise ParameterDomainError("the classical telegraph model has no exact solution here")
    kind = _kind_from({**cfg, "tau": 1.0, "c": 1.0})
    levels = [cfg["dx0"] / 2**i for i in range(cfg["levels"])]
    config = SolverConfig(t0=cfg["t0"], t_end=cfg["t_end"], cfl=cfg["cfl"])
    rep = harness.run_convergence(kind, None, levels, config, norm=cfg["norm"])
    write_csv(
        cfg["out"],
        ["dx", "dt", "error"],
        rep.levels,
        {**_meta("converge", cfg), "fitted_order": rep.fitted_order},
        cfg["precision"],
    )
    print(f"fitted_order={rep.fitted_order:.6f}")
    return EXIT_OK


def cmd_asymptotics(cfg: dict) -> int:
    """Distance of the rescaled solution from the self-similar profile."""
    params = params_from_eps(cfg["eps"], cfg["l"], self_similar=True)
    times = _float_list(cfg["times"])
    if not times:
        raise ParameterDomainError("--times must list at least one time")
    config = SolverConfig(t0=cfg["t0"], t_end=max(times), cfl=cfg["cfl"])
    rep = harness.run_asymptotics(
        cfg["init"].replace("-", "_"), params, times, config, dx=cfg["dx"], seed=cfg["seed"]
    )
    harness.write_asymptotics_csv(rep, cfg["out"], _meta("asymptotics", cfg), cfg["precision"])
    return EXIT_OK


def cmd_figures(cfg: dict) -> int:
    """Write the profile and surface figure data."""
    harness.reproduce_figures(cfg["out_dir"], cfg["precision"])
    return EXIT_OK


def _kernel_from(cfg: dict) -> kernels.KernelSpec:
    name = cfg["kernel"]
    if name == "dirac":
        return kernels.Dirac(cfg["k"])
    if name == "exponential":
        return kernels.Exponential(cfg["k"], cfg["tau"])
    if name == "power-law":
        return kernels.PowerLaw(cfg["k"], cfg["tau"], cfg["omega"], cfg["l"])
    if name == "jeffrey":
        return kernels.Jeffrey(cfg["k1"], cfg["k2"], cfg["tau"])
    raise ParameterDomainError(f"unknown kernel {name!r}")


def cmd_flux(cfg: dict) -> int:
    """History-integral flux for a self-similar gradient history."""
    spec = _kernel_from(cfg)
    prof = params_from_eps(1.0, cfg["profile_l"], self_similar=True)
    if not cfg["t"] >= cfg["t_start"] > 0:
        raise ParameterDomainError("need t >= t_start > 0")
    grid = symmetric_grid(cfg["half_width"], cfg["dx"])
    if cfg["t"] > cfg["t_start"]:
        n_hist = int(math.ceil((cfg["t"] - cfg["t_start"]) / cfg["history_dt"]))
        times = np.linspace(cfg["t_start"], cfg["t"], n_hist + 1)
    else:
        times = np.array([cfg["t"]])
    grads = np.stack([analytic.self_similar_Tx(grid.x, tt, prof) for tt in times])
    record = kernels.HistoryRecord(times, grads, grid)
    q = kernels.flux_history(record, spec, cfg["t"])
    columns = ["x", "grad_T", "q"]
    cols = [grid.x, grads[-1], q.values]
    meta = _meta("flux", cfg)
    if cfg["audit"]:
        if not isinstance(spec, kernels.PowerLaw):
            raise ParameterDomainError("the local-law audit applies to the power-law kernel only")
        params = ModelParams(k=spec.k, gamma=1.0, tau=spec.tau, omega=spec.omega, l=spec.l)
        audit = kernels.mean_value_audit(record, params, cfg["t"])
        columns += ["dqdt_exact", "dqdt_local_law"]
        cols += [audit.lhs.values, audit.rhs.values]
        meta["audit_gap"] = audit.gap
        print(f"audit_gap={audit.gap:.6e}")
    write_csv(cfg["out"], columns, zip(*cols), meta, cfg["precision"])
    return EXIT_OK


COMMANDS = {
    "profile": cmd_profile,
    "solve": cmd_solve,
    "dispersion": cmd_dispersion,
    "converge": cmd_converge,
    "asymptotics": cmd_asymptotics,
    "figures": cmd_figures,
    "flux": cmd_flux,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = resolve(ns.command, ns)
        return COMMANDS[ns.command](cfg)
    except ParameterDomainError as exc:
        print(f"teleheat {ns.command}: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except solvers.NumericalInstability as exc:
        print(f"teleheat {ns.command}: numerical instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE


if __name__ == "__main__":
    sys.exit(main())
