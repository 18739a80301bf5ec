"""Command-line driver.

Subcommands: run, mms, tau-sweep, eps-sweep, bounded, check-ic, report.

Exit codes: 0 success (verdict PASS where one applies), 1 a check ran and
its verdict is FAIL, 2 invalid configuration or an INVALID verdict (regime
left, reference missing), 3 a run aborted on a numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import diagnostics, experiments, plots
from .artifacts import (RunConfig, read_energy_csv, read_snapshot_csv,
                        write_run_artifact, write_sweep_json)
from .core import Grid1D
from .initial_data import compatibility_report, make_initial_data
from .operators import trapz

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_ABORT = 3


def _say(quiet: bool, *parts):
    if not quiet:
        print(*parts)


def _load_config(path: str) -> RunConfig:
    try:
        return RunConfig.from_json(path)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def _out_dir(args, config) -> str:
    out = args.out or (config.output_dir if config else None) or "out"
    os.makedirs(out, exist_ok=True)
    return out


def _float_list(text: str):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        print(f"error: cannot parse float list {text!r}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def cmd_run(args) -> int:
    config = _load_config(args.config)
    grid = Grid1D(config.n)
    artifact = experiments.execute(config)
    out = _out_dir(args, config)
    write_run_artifact(artifact, grid, out)
    if artifact.energy:
        plots.plot_energy_decay(artifact.energy, os.path.join(out, "energy.svg"))
    shown = artifact.states[:: max(1, len(artifact.states) // 6)]
    if artifact.states[-1] is not shown[-1]:
        shown = shown + [artifact.states[-1]]
    plots.plot_snapshots(shown, grid, os.path.join(out, "snapshots.svg"))
    _say(args.quiet, f"status {artifact.status}, {artifact.n_steps} steps, wrote {out}/")
    if artifact.status != "completed":
        _say(args.quiet, f"abort reason: {artifact.abort_reason}")
        return EXIT_ABORT
    return EXIT_PASS


def cmd_mms(args) -> int:
    config = _load_config(args.config) if args.config else RunConfig()
    try:
        result = experiments.mms_convergence(
            args.solver, config.params, base_n=args.base_n,
            levels=args.levels, cfl=config.cfl, t_end=args.t_end)
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ABORT
    out = _out_dir(args, config)
    write_sweep_json(result.rows, result.verdict, result.order,
                     os.path.join(out, "convergence.json"),
                     extra={"solver": args.solver})
    plots.plot_convergence(result.rows, os.path.join(out, "convergence.svg"),
                           order=result.order)
    for row in result.rows:
        _say(args.quiet, f"n = {row['n']:6d}  err = {row['err_total']:.6e}")
    _say(args.quiet, f"order {result.order:.3f}, verdict {result.verdict}")
    return EXIT_PASS if result.verdict == "PASS" else EXIT_FAIL


def _sweep_exit(verdict) -> int:
    if verdict == "PASS":
        return EXIT_PASS
    if verdict == "INVALID":
        return EXIT_INVALID
    return EXIT_FAIL


def cmd_tau_sweep(args) -> int:
    config = _load_config(args.config)
    taus = _float_list(args.taus)
    try:
        result = experiments.tau_sweep(config, taus)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = _out_dir(args, config)
    write_sweep_json(result.rows, result.verdict, result.slope,
                     os.path.join(out, "tau_sweep.json"))
    plots.plot_sweep(result.rows, os.path.join(out, "tau_sweep.svg"), "tau")
    for row in result.rows:
        if row["status"] == "completed":
            _say(args.quiet,
                 f"tau = {row['param_value']:.4g}  dist = {row['sup_distance']:.6e}"
                 f"  resid integral = {row['residual_time_integral']:.6e}")
        else:
            _say(args.quiet, f"tau = {row['param_value']:.4g}  {row['status']}")
    _say(args.quiet, f"verdict {result.verdict}, slope {result.slope}")
    return _sweep_exit(result.verdict)


def cmd_eps_sweep(args) -> int:
    config = _load_config(args.config)
    epsilons = _float_list(args.epsilons)
    try:
        result = experiments.eps_sweep(config, epsilons)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = _out_dir(args, config)
    write_sweep_json(result.rows, result.verdict, result.slope,
                     os.path.join(out, "eps_sweep.json"))
    plots.plot_sweep(result.rows, os.path.join(out, "eps_sweep.svg"), "epsilon")
    for row in result.rows:
        if row["status"] == "completed":
            _say(args.quiet, f"eps = {row['param_value']:.4g}  dist = {row['sup_distance']:.6e}")
        else:
            _say(args.quiet, f"eps = {row['param_value']:.4g}  {row['status']}")
    _say(args.quiet, f"verdict {result.verdict}, slope {result.slope}")
    return _sweep_exit(result.verdict)


def cmd_bounded(args) -> int:
    config = _load_config(args.config)
    result = experiments.boundedness_proxy(config)
    payload = {
        "verdict": result.verdict,
        "sup_ratio": result.sup_ratio,
        "tail_fraction": result.tail_fraction,
        "v_range": list(result.v_range),
        "reason": result.reason,
    }
    if args.deltas:
        deltas = _float_list(args.deltas)
        family, apriori = experiments.apriori_family(config, deltas)
        payload["apriori"] = {
            "verdict": apriori.status,
            "ratios": apriori.ratios,
            "reason": apriori.reason,
        }
    out = _out_dir(args, config)
    with open(os.path.join(out, "bounded.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if result.artifact.energy:
        plots.plot_energy_decay(result.artifact.energy, os.path.join(out, "energy.svg"))
    _say(args.quiet, result.reason)
    _say(args.quiet, f"verdict {result.verdict}")
    if "apriori" in payload:
        _say(args.quiet, f"a-priori family verdict {payload['apriori']['verdict']}")
    if result.artifact.status != "completed":
        return EXIT_ABORT
    verdicts = [result.verdict] + ([payload["apriori"]["verdict"]] if "apriori" in payload else [])
    if "INVALID" in verdicts or "VACUOUS" in verdicts:
        return EXIT_INVALID
    return EXIT_PASS if all(v == "PASS" for v in verdicts) else EXIT_FAIL


def cmd_check_ic(args) -> int:
    config = _load_config(args.config)
    grid = Grid1D(config.n)
    try:
        state = make_initial_data(config.ic_family, config.ic_delta, grid,
                                  config.params, path=config.ic_path)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report = compatibility_report(state, config.params, grid)
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "compatibility.json"), "w") as fh:
            fh.write(text + "\n")
    _say(args.quiet, text)
    return EXIT_PASS


def cmd_report(args) -> int:
    meta_path = os.path.join(args.dir, "meta.json")
    snap_path = os.path.join(args.dir, "snapshots.csv")
    if not os.path.exists(meta_path) or not os.path.exists(snap_path):
        print(f"error: {args.dir} lacks meta.json / snapshots.csv", file=sys.stderr)
        return EXIT_INVALID
    with open(meta_path) as fh:
        meta = json.load(fh)
    states, x = read_snapshot_csv(snap_path)
    dx = float(x[1] - x[0])
    masses = np.array([trapz(s.v, dx) for s in states])
    lines = [
        f"status      {meta['status']}  ({meta['n_steps']} steps)",
        f"snapshots   {len(states)}, t in [{states[0].t:.6g}, {states[-1].t:.6g}]",
        f"v range     [{min(float(np.min(s.v)) for s in states):.6g}, "
        f"{max(float(np.max(s.v)) for s in states):.6g}]",
        f"mass drift  {float(np.max(np.abs(masses - masses[0]))):.3e}",
    ]
    energy_path = os.path.join(args.dir, "energy.csv")
    if os.path.exists(energy_path):
        table = read_energy_csv(energy_path)
        e = table["e_phys"]
        lines.append(f"e_phys      {e[0]:.6e} -> {e[-1]:.6e}"
                     f" ({'monotone decay' if np.all(np.diff(e) <= 0) else 'NOT monotone'})")
        r = table["relax_residual"]
        lines.append(f"relax resid {r[0]:.6e} -> {r[-1]:.6e}")
    print("\n".join(lines))
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaxns",
        description="1D compressible flow with relaxed stress: runs, sweeps, checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required,
                       help="path to a run-config JSON file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")

    p = sub.add_parser("run", help="integrate one configuration, write CSV/JSON/SVG")
    common(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("mms", help="manufactured-solution convergence study")
    common(p, config_required=False)
    p.add_argument("--solver", choices=("relaxed", "parabolic"), default="relaxed")
    p.add_argument("--base-n", type=int, default=65)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--t-end", type=float, default=0.5)
    p.set_defaults(fn=cmd_mms)

    p = sub.add_parser("tau-sweep", help="distance to the parabolic limit per tau")
    common(p)
    p.add_argument("--taus", required=True, help="comma-separated tau values")
    p.set_defaults(fn=cmd_tau_sweep)

    p = sub.add_parser("eps-sweep", help="effect of the boundary transport term per eps")
    common(p)
    p.add_argument("--epsilons", required=True,
                   help="comma-separated epsilon values, must include 0")
    p.set_defaults(fn=cmd_eps_sweep)

    p = sub.add_parser("bounded", help="long-horizon boundedness and decay proxy")
    common(p)
    p.add_argument("--deltas", default=None,
                   help="optional comma-separated amplitudes for the scaling check")
    p.set_defaults(fn=cmd_bounded)

    p = sub.add_parser("check-ic", help="compatibility report for the configured initial data")
    common(p)
    p.set_defaults(fn=cmd_check_ic)

    p = sub.add_parser("report", help="summarize a finished run directory")
    p.add_argument("--dir", required=True, help="directory holding run artifacts")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
