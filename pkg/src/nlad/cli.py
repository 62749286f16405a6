"""Command-line front end.

Subcommands expose each pipeline stage and emit plot-ready CSV tables:
``dispersion`` and ``thresholds`` for the linear analysis, ``wnl`` and
``branch`` for the amplitude-equation results, ``simulate`` for a single
time integration and ``continuation`` for swept bifurcation diagrams.
Simulation-scale commands read a flat ``key = value`` config file with
``--set`` overrides (overrides win).  Exit codes: 0 success, 2 usage or
parameter error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import io
from ._version import __version__
from .continuation import (
    build_diagram,
    classify_modulation,
    default_gamma_grid,
    sweep,
    trace_diagram,
)
from .linear_stability import (
    NeverDestabilizedError,
    critical_mode,
    default_m_max,
    dispersion,
    instability_thresholds,
)
from .model import Kernel, ModelParams
from .spectral import (
    BlowUpError,
    SolverConfig,
    default_initial_state,
    mode_amplitude,
    phase_correlation,
    run,
)
from .weakly_nonlinear import (
    SecondHarmonicResonanceError,
    analytic_branch,
    classify,
    stability_coefficient_tophat,
    wnl_coefficients,
)

__all__ = ["main"]


class UsageError(Exception):
    """Invalid flags or configuration; maps to exit code 2."""


MODEL_KEYS = {"gamma", "u1_bar", "u2_bar", "L", "kernel"}
SOLVER_KEYS = {"n", "dt", "t_max", "steady_tol", "dealias", "seed", "record_every", "ic"}
SWEEP_KEYS = {"gamma_min", "gamma_max", "n_points", "direction", "side", "refine"}
ALL_KEYS = MODEL_KEYS | SOLVER_KEYS | SWEEP_KEYS


def _parse_bool(key: str, value: str) -> bool:
    low = value.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"key {key!r} expects a boolean, got {value!r}")


def _load_config(path: str, overrides: list[str]) -> dict[str, str]:
    try:
        cfg = io.read_config(path)
    except (OSError, ValueError) as err:
        raise UsageError(str(err)) from err
    for item in overrides:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        cfg[key.strip()] = value.strip()
    unknown = set(cfg) - ALL_KEYS
    if unknown:
        raise UsageError(
            f"unknown configuration keys: {', '.join(sorted(unknown))}"
        )
    return cfg


def _cfg_float(cfg, key, default=None):
    if key not in cfg:
        if default is None:
            raise UsageError(f"missing required key {key!r}")
        return default
    try:
        return float(cfg[key])
    except ValueError as err:
        raise UsageError(f"key {key!r} expects a number, got {cfg[key]!r}") from err


def _cfg_int(cfg, key, default=None):
    if key not in cfg:
        if default is None:
            raise UsageError(f"missing required key {key!r}")
        return default
    try:
        return int(cfg[key])
    except ValueError as err:
        raise UsageError(f"key {key!r} expects an integer, got {cfg[key]!r}") from err


def _model_from_config(cfg: dict[str, str], need_gamma: bool = True) -> ModelParams:
    kernel_name = cfg.get("kernel", "top_hat")
    if kernel_name != "top_hat":
        raise UsageError(
            f"only the top_hat kernel is available from the CLI, got {kernel_name!r}"
        )
    gamma = _cfg_float(cfg, "gamma") if need_gamma else _cfg_float(cfg, "gamma", 0.0)
    try:
        return ModelParams(
            gamma=gamma,
            u1_bar=_cfg_float(cfg, "u1_bar"),
            u2_bar=_cfg_float(cfg, "u2_bar"),
            L=_cfg_float(cfg, "L"),
            kernel=Kernel.top_hat(),
        )
    except ValueError as err:
        raise UsageError(str(err)) from err


def _solver_from_config(cfg: dict[str, str]) -> SolverConfig:
    kwargs = {}
    if "n" in cfg:
        kwargs["n"] = _cfg_int(cfg, "n")
    if "dt" in cfg:
        kwargs["dt"] = _cfg_float(cfg, "dt")
    if "t_max" in cfg:
        kwargs["t_max"] = _cfg_float(cfg, "t_max")
    if "steady_tol" in cfg:
        kwargs["steady_tol"] = _cfg_float(cfg, "steady_tol")
    if "dealias" in cfg:
        kwargs["dealias"] = _parse_bool("dealias", cfg["dealias"])
    if "record_every" in cfg:
        kwargs["record_every"] = _cfg_int(cfg, "record_every")
    try:
        return SolverConfig(**kwargs)
    except ValueError as err:
        raise UsageError(str(err)) from err


def _model_from_args(args) -> ModelParams:
    try:
        return ModelParams(
            gamma=getattr(args, "gamma", 0.0) or 0.0,
            u1_bar=args.u1,
            u2_bar=args.u2,
            L=args.L,
            kernel=Kernel.top_hat(),
        )
    except ValueError as err:
        raise UsageError(str(err)) from err


def _parse_scan(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"--scan-L expects lo:hi:step, got {spec!r}")
    try:
        lo, hi, step = (float(s) for s in parts)
    except ValueError as err:
        raise UsageError(f"--scan-L expects numbers, got {spec!r}") from err
    if step <= 0 or hi <= lo:
        raise UsageError(f"--scan-L needs lo < hi and step > 0, got {spec!r}")
    return np.arange(lo, hi + step / 2, step)


def _emit(path: str | None, columns, meta):
    if path is None:
        io.write_csv("/dev/stdout", columns, meta)
    else:
        io.write_csv(path, columns, meta)


def cmd_dispersion(args) -> int:
    p = _model_from_args(args)
    mmax = args.mmax if args.mmax is not None else default_m_max(p.L)
    points = dispersion(p, mmax)
    _emit(
        args.out,
        {
            "m": [pt.m for pt in points],
            "q": [pt.q for pt in points],
            "lambda_plus": [pt.lambda_plus for pt in points],
            "lambda_minus": [pt.lambda_minus for pt in points],
        },
        {"command": "dispersion", "gamma": p.gamma, "u1_bar": p.u1_bar,
         "u2_bar": p.u2_bar, "L": p.L, "kernel": "top_hat", "mmax": mmax},
    )
    return 0


def cmd_thresholds(args) -> int:
    if args.scan_L is not None:
        Ls = _parse_scan(args.scan_L)
        rows = {"L": [], "m_c": [], "q_c": [], "gamma_c_plus": [], "gamma_c_minus": []}
        for L in Ls:
            p = ModelParams(gamma=0.0, u1_bar=args.u1, u2_bar=args.u2, L=float(L))
            crit = critical_mode(p)
            rows["L"].append(float(L))
            rows["m_c"].append(crit.m_c)
            rows["q_c"].append(crit.q_c)
            rows["gamma_c_plus"].append(crit.gamma_c_plus)
            rows["gamma_c_minus"].append(crit.gamma_c_minus)
        _emit(args.out, rows, {"command": "thresholds", "u1_bar": args.u1,
                               "u2_bar": args.u2, "scan_L": args.scan_L})
        return 0
    p = _model_from_args(args)
    if args.m is not None:
        g_plus, g_minus = instability_thresholds(p, args.m)
        q_m = 2 * np.pi * args.m / p.L
        print(f"m = {args.m}")
        print(f"q_m = {io.format_float(q_m, io.SUMMARY_DIGITS)}")
        print(f"gamma_m_plus = {io.format_float(g_plus, io.SUMMARY_DIGITS)}")
        print(f"gamma_m_minus = {io.format_float(g_minus, io.SUMMARY_DIGITS)}")
        return 0
    crit = critical_mode(p)
    print(f"m_c = {crit.m_c}")
    print(f"q_c = {io.format_float(crit.q_c, io.SUMMARY_DIGITS)}")
    print(f"gamma_c_plus = {io.format_float(crit.gamma_c_plus, io.SUMMARY_DIGITS)}")
    print(f"gamma_c_minus = {io.format_float(crit.gamma_c_minus, io.SUMMARY_DIGITS)}")
    return 0


def cmd_wnl(args) -> int:
    if args.scan_L is not None:
        Ls = _parse_scan(args.scan_L)
        rows = {"L": [], "Lambda": [], "Gamma": [], "bifurcation_class": []}
        for L in Ls:
            p = ModelParams(gamma=0.0, u1_bar=args.u1, u2_bar=args.u2, L=float(L))
            c = wnl_coefficients(p, side=args.side, regime="unstable")
            rows["L"].append(float(L))
            rows["Lambda"].append(c.Lambda)
            rows["Gamma"].append("" if c.Gamma is None else c.Gamma)
            rows["bifurcation_class"].append(classify(c).value)
        _emit(args.out, rows, {"command": "wnl", "side": args.side,
                               "u1_bar": args.u1, "u2_bar": args.u2,
                               "scan_L": args.scan_L})
        return 0
    p = _model_from_args(args)
    c = wnl_coefficients(p, side=args.side, regime=args.regime)
    kind = classify(wnl_coefficients(p, side=args.side, regime="unstable"))
    d = io.SUMMARY_DIGITS
    print(f"side = {c.side}")
    print(f"regime = {c.regime}")
    print(f"m_c = {c.m_c}")
    print(f"q_c = {io.format_float(c.q_c, d)}")
    print(f"gamma_c = {io.format_float(c.gamma_c, d)}")
    for name in ("rho2", "a2", "psi1", "psi2", "sigma", "Lambda", "nu", "mu", "eta"):
        print(f"{name} = {io.format_float(getattr(c, name), d)}")
    print(f"Gamma = {'absent' if c.Gamma is None else io.format_float(c.Gamma, d)}")
    print(f"bifurcation_class = {kind.value}")
    if args.out is not None:
        names = ["side", "regime", "m_c", "q_c", "gamma_c", "rho2", "a2", "psi1",
                 "psi2", "sigma", "Lambda", "nu", "mu", "eta", "Gamma",
                 "bifurcation_class"]
        values = [c.side, c.regime, c.m_c, c.q_c, c.gamma_c, c.rho2, c.a2, c.psi1,
                  c.psi2, c.sigma, c.Lambda, c.nu, c.mu, c.eta,
                  "" if c.Gamma is None else c.Gamma, kind.value]
        io.write_csv(args.out, {"name": names, "value": values},
                     {"command": "wnl", "L": p.L, "u1_bar": p.u1_bar,
                      "u2_bar": p.u2_bar, "side": args.side})
    return 0


def cmd_branch(args) -> int:
    p = _model_from_args(args)
    side = args.side
    crit = critical_mode(p)
    gamma_c = crit.gamma_c(side)
    lo = args.gamma_min if args.gamma_min is not None else 0.9 * gamma_c
    hi = args.gamma_max if args.gamma_max is not None else 1.3 * gamma_c
    branch = analytic_branch(p, side, (lo, hi), args.n_points)
    _emit(
        args.out,
        {
            "gamma": branch.gamma_values,
            "epsilon": branch.epsilon_values,
            "amplitude": branch.amplitude_values,
            "stable": branch.stability_flags,
        },
        {"command": "branch", "side": side, "gamma_c": gamma_c,
         "L": p.L, "u1_bar": p.u1_bar, "u2_bar": p.u2_bar,
         "n_points": args.n_points},
    )
    return 0


def _resolved_meta(p: ModelParams, cfg: SolverConfig, extra=None) -> dict:
    meta = {
        "gamma": p.gamma, "u1_bar": p.u1_bar, "u2_bar": p.u2_bar, "L": p.L,
        "kernel": "top_hat", "n": cfg.n, "dt": cfg.dt, "t_max": cfg.t_max,
        "dealias": cfg.dealias, "steady_tol": cfg.steady_tol,
        "record_every": cfg.record_every,
    }
    meta.update(extra or {})
    return meta


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config, args.set or [])
    p = _model_from_config(cfg)
    solver = _solver_from_config(cfg).resolved(p.L)
    seed = _cfg_int(cfg, "seed", 0)
    ic = cfg.get("ic", "cosine")
    if ic not in ("cosine", "noise"):
        raise UsageError(f"ic must be 'cosine' or 'noise', got {ic!r}")
    initial = default_initial_state(p, solver.n, kind=ic, seed=seed)
    result = run(initial, p, solver)

    out_dir = io.ensure_dir(args.out_dir)
    meta = _resolved_meta(p, solver, {"seed": seed, "ic": ic})
    state = result.final_state
    io.write_csv(
        os.path.join(out_dir, "state.csv"),
        {"x": state.x, "u1": state.u1, "u2": state.u2},
        {**meta, "t_final": result.t_final, "reached_steady": result.reached_steady},
    )
    io.write_csv(
        os.path.join(out_dir, "timeseries.csv"),
        {"t": result.times, "amplitude": result.amplitude_series},
        meta,
    )
    io.save_checkpoint(os.path.join(out_dir, "state.ckpt"), state, p, result.t_final)

    d = io.SUMMARY_DIGITS
    masses = state.mass()
    print(f"reached_steady = {result.reached_steady}")
    print(f"t_final = {io.format_float(result.t_final, d)}")
    print(f"amplitude = {io.format_float(result.amplitude_series[-1], d)}")
    print(f"mode1_amplitude = {io.format_float(mode_amplitude(state, 1), d)}")
    print(f"phase_correlation = {io.format_float(phase_correlation(state), d)}")
    print(f"mass_u1 = {io.format_float(masses[0], d)}")
    print(f"mass_u2 = {io.format_float(masses[1], d)}")
    print(f"min_density = {io.format_float(result.min_density, d)}")
    return 0


def _diagram_columns(points, direction):
    return {
        "gamma": [bp.gamma for bp in points],
        "amplitude": [bp.amplitude for bp in points],
        "total_amplitude": [bp.total_amplitude for bp in points],
        "mode1_energy_fraction": [bp.mode1_energy_fraction for bp in points],
        "direction": [direction] * len(points),
        "converged": [bp.converged for bp in points],
        "modulation_class": [classify_modulation(bp).value for bp in points],
    }


def cmd_continuation(args) -> int:
    cfg = _load_config(args.config, args.set or [])
    p = _model_from_config(cfg, need_gamma=False)
    solver = _solver_from_config(cfg)
    seed = _cfg_int(cfg, "seed", 0)
    side = cfg.get("side", "plus")
    if side not in ("plus", "minus"):
        raise UsageError(f"side must be 'plus' or 'minus', got {side!r}")
    direction = cfg.get("direction", "both")
    if direction not in ("both", "up", "down"):
        raise UsageError(f"direction must be both, up or down, got {direction!r}")
    n_points = _cfg_int(cfg, "n_points", 40)
    gamma_c = critical_mode(p).gamma_c(side)
    lo = _cfg_float(cfg, "gamma_min", 0.9 * gamma_c)
    hi = _cfg_float(cfg, "gamma_max", 1.3 * gamma_c)
    refine = _parse_bool("refine", cfg["refine"]) if "refine" in cfg else True
    grid = np.linspace(lo, hi, n_points)
    grid = grid[np.argsort(np.abs(grid))]

    out_dir = io.ensure_dir(args.out_dir)
    meta = _resolved_meta(replace(p, gamma=0.0), solver.resolved(p.L),
                          {"side": side, "direction": direction, "seed": seed,
                           "gamma_min": lo, "gamma_max": hi, "n_points": n_points,
                           "gamma_c": gamma_c})

    if direction == "both":
        diagram = trace_diagram(p, solver, gammas=grid, side=side, seed=seed,
                                refine=refine)
        up, down = diagram.upward, diagram.downward
        io.write_csv(os.path.join(out_dir, "sweep_up.csv"),
                     _diagram_columns(up, "up"), meta)
        io.write_csv(os.path.join(out_dir, "sweep_down.csv"),
                     _diagram_columns(down, "down"), meta)
        merged = _diagram_columns(up, "up")
        down_cols = _diagram_columns(down, "down")
        for key in merged:
            merged[key] = list(merged[key]) + list(down_cols[key])
        hyst = diagram.hysteresis_interval
        io.write_csv(os.path.join(out_dir, "diagram.csv"), merged,
                     {**meta, "hysteresis_lo": "" if hyst is None else hyst[0],
                      "hysteresis_hi": "" if hyst is None else hyst[1]})
        if hyst is None:
            print("hysteresis = none")
        else:
            d = io.SUMMARY_DIGITS
            print(f"hysteresis = [{io.format_float(hyst[0], d)}, "
                  f"{io.format_float(hyst[1], d)}]")
        not_conv = [bp.gamma for bp in up + down if not bp.converged]
    else:
        path = grid if direction == "up" else grid[::-1]
        points = sweep(p, path, solver, seed_mode="previous_state", seed=seed)
        io.write_csv(os.path.join(out_dir, f"sweep_{direction}.csv"),
                     _diagram_columns(points, direction), meta)
        not_conv = [bp.gamma for bp in points if not bp.converged]

    branch = analytic_branch(p, side, (min(lo, hi), max(lo, hi)), max(n_points, 100))
    io.write_csv(
        os.path.join(out_dir, "analytic_branch.csv"),
        {
            "gamma": branch.gamma_values,
            "epsilon": branch.epsilon_values,
            "amplitude": branch.amplitude_values,
            "stable": branch.stability_flags,
        },
        meta,
    )
    if not_conv:
        print(f"warning: {len(not_conv)} point(s) did not converge", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlad",
        description="Bifurcation toolkit for a two-species nonlocal "
                    "advection-diffusion system",
    )
    parser.add_argument("--version", action="version", version=f"nlad {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add_model_args(sp, with_gamma):
        sp.add_argument("--L", type=float, required=True, help="domain length over sensing radius")
        sp.add_argument("--u1", type=float, required=True, help="equilibrium density of species 1")
        sp.add_argument("--u2", type=float, required=True, help="equilibrium density of species 2")
        if with_gamma:
            sp.add_argument("--gamma", type=float, required=True, help="advection strength")

    sp = sub.add_parser("dispersion", help="growth rates of the admissible modes")
    add_model_args(sp, with_gamma=True)
    sp.add_argument("--mmax", type=int, default=None, help="largest mode index (default 4L)")
    sp.add_argument("--out", default=None, help="CSV path (default stdout)")
    sp.set_defaults(func=cmd_dispersion)

    sp = sub.add_parser("thresholds", help="critical mode and bifurcation thresholds")
    sp.add_argument("--L", type=float, help="domain length over sensing radius")
    sp.add_argument("--u1", type=float, required=True)
    sp.add_argument("--u2", type=float, required=True)
    sp.add_argument("--m", type=int, default=None, help="specific mode instead of the critical one")
    sp.add_argument("--scan-L", default=None, metavar="LO:HI:STEP",
                    help="emit a threshold curve over a range of L")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_thresholds)

    sp = sub.add_parser("wnl", help="amplitude-equation coefficients and classification")
    sp.add_argument("--L", type=float)
    sp.add_argument("--u1", type=float, required=True)
    sp.add_argument("--u2", type=float, required=True)
    sp.add_argument("--side", choices=("plus", "minus"), default="plus")
    sp.add_argument("--regime", choices=("unstable", "stable"), default="unstable")
    sp.add_argument("--scan-L", default=None, metavar="LO:HI:STEP")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_wnl)

    sp = sub.add_parser("branch", help="analytic small-amplitude branch")
    add_model_args(sp, with_gamma=False)
    sp.add_argument("--side", choices=("plus", "minus"), default="plus")
    sp.add_argument("--gamma-min", type=float, default=None)
    sp.add_argument("--gamma-max", type=float, default=None)
    sp.add_argument("--n-points", type=int, default=50)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_branch)

    sp = sub.add_parser("simulate", help="one time integration from a config file")
    sp.add_argument("config", help="flat key = value configuration file")
    sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                    help="override a config key (repeatable)")
    sp.add_argument("--out-dir", default=".", help="output directory")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("continuation", help="swept bifurcation diagram from a config file")
    sp.add_argument("config")
    sp.add_argument("--set", action="append", metavar="KEY=VALUE")
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=cmd_continuation)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.cmd in ("thresholds", "wnl") and getattr(args, "scan_L", None) is None:
            if args.L is None:
                raise UsageError("--L is required unless --scan-L is given")
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (BlowUpError, SecondHarmonicResonanceError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3
    except NeverDestabilizedError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
