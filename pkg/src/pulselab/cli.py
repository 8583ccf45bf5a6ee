"""Command-line orchestration.

Subcommands: ``stationary`` (resting profile CSV), ``pulse`` (wave speed +
profile CSV), ``threshold`` (critical stiffness over source widths),
``simulate`` (trajectory CSVs), ``sweep`` (bifurcation diagram), ``stability``
(decay-fit CSVs), ``oracle`` (oracle-vs-fast report).

Exit status: 0 on success, 1 on usage/config errors, 2 when a run-level
assertion (deformation balance, a-priori bound, boundary floor) fails.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analytic, experiments, oracle
from .config import ConfigError, RunConfig, parse_config
from .dynamics import (SimSystem, discrete_pulse, new_state, simulate,
                       stationary_field)
from .grid import Field
from .io_utils import fmt, write_csv, write_manifest
from .model import ModelParams

USAGE_ERROR = 1
ASSERTION_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(USAGE_ERROR)


def _common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=str, default=None, help="JSON config path")
    sub.add_argument("--out", type=str, default=None,
                     help="artifact directory (default runs/<subcommand>)")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker processes for sweep points")
    sub.add_argument("--verbose", action="store_true")


def build_parser() -> _Parser:
    parser = _Parser(prog="pulselab", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("stationary", "write the resting deformation profile"),
        ("pulse", "solve the wave-speed relation and write the pulse profile"),
        ("threshold", "critical stiffness over a list of source widths"),
        ("simulate", "integrate the coupled dynamics and write the trajectory"),
        ("sweep", "speed-versus-stiffness bifurcation diagram"),
        ("stability", "perturbation decay experiment with exponential fits"),
        ("oracle", "brute-force oracle vs fast-path comparison table"),
    ]:
        _common(subs.add_parser(name, help=helptext))
    return parser


def _load(args) -> tuple[RunConfig, Path]:
    cfg = parse_config(args.config)
    out = Path(args.out) if args.out else Path("runs") / args.command
    return cfg, out


def _profile_table(evaluator, half_width: float, n: int = 2001):
    xs = np.linspace(-half_width, half_width, n)
    return xs, np.asarray(evaluator(xs), dtype=float)


def cmd_stationary(args) -> int:
    cfg, out = _load(args)
    prof = analytic.stationary_profile(cfg.model_params())
    xs, vals = _profile_table(prof, cfg.data["grid"]["half_width"])
    write_csv(out / "stationary.csv", ["x", "s"], zip(xs, vals))
    write_manifest(out, cfg.data)
    if args.verbose:
        print(f"peak {vals.max():.6g} at x={xs[np.argmax(vals)]:.3g}")
    return 0


def cmd_pulse(args) -> int:
    cfg, out = _load(args)
    params = cfg.model_params()
    ts = analytic.critical_stiffness(params)
    sol = analytic.pulse_velocity(params)
    rows = [("eta", params.eta), ("eta_star", ts.eta_star),
            ("below_threshold", sol is None),
            ("v_c", 0.0 if sol is None else sol.v_c)]
    write_csv(out / "pulse_summary.csv", ["key", "value"], rows)
    if sol is not None:
        xs, vals = _profile_table(sol.profile, cfg.data["grid"]["half_width"], n=801)
        write_csv(out / "pulse_profile.csv", ["x", "s"], zip(xs, vals))
    write_manifest(out, cfg.data)
    if args.verbose:
        print(f"eta*={ts.eta_star:.8g}; " +
              ("below threshold" if sol is None else f"v_c={sol.v_c:.8g}"))
    return 0


def cmd_threshold(args) -> int:
    cfg, out = _load(args)
    m = cfg.data["model"]
    rows = []
    for eps in cfg.data["threshold"]["epsilons"]:
        params = ModelParams(alpha=m["alpha"], beta=m["beta"], gamma=m["gamma"],
                             eta=m["eta"], epsilon=float(eps))
        ts = analytic.critical_stiffness(params)
        rows.append((eps, ts.eta_star, ts.quadrature_error))
        if args.verbose:
            print(f"eps={eps:g}: eta*={ts.eta_star:.10g}")
    write_csv(out / "threshold.csv", ["epsilon", "eta_star", "quadrature_error"], rows)
    write_manifest(out, cfg.data)
    return 0


def _initial_state(cfg: RunConfig, system: SimSystem):
    kind = cfg.experiment["type"]
    shift = cfg.experiment["initial_shift"]
    if kind == "stationary":
        fld, x0 = stationary_field(system, center=shift), shift
        reference = fld
    elif kind == "shifted":
        fld, x0 = stationary_field(system, center=shift), 0.0
        reference = fld
    elif kind == "cold":
        fld, x0 = Field.zeros(system.grid), 0.0
        reference = None
    elif kind == "pulse":
        got = discrete_pulse(system)
        if got is None:
            raise ConfigError("experiment.type 'pulse': stiffness below threshold "
                              "on this grid; no traveling pulse to start from")
        fld, _v = got
        x0, reference = 0.0, fld
    else:  # pragma: no cover - schema forbids
        raise ConfigError(f"unknown experiment type {kind!r}")
    pert = cfg.perturbation()
    if not pert.is_null():
        fld = fld + experiments.perturbation_field(system.grid, pert, reference=reference)
    return new_state(system, fld, x_c=x0)


def cmd_simulate(args) -> int:
    cfg, out = _load(args)
    system = SimSystem(cfg.grid(), cfg.model_params())
    state0 = _initial_state(cfg, system)
    traj, report, _ = simulate(
        system, state0, cfg.step_config(), cfg.experiment["T"],
        output_stride=cfg.experiment["output_stride"],
        snapshot_times=cfg.experiment["snapshot_times"],
        boundary_floor=cfg.checks["boundary_floor"])
    write_csv(out / "trajectory.csv",
              ["t", "x_c", "v_c", "s_tot", "norm_inf", "norm_w1"],
              zip(traj.t, traj.x_c, traj.v_c, traj.s_tot, traj.norm_inf, traj.norm_w1))
    for snap in traj.snapshots:
        write_csv(out / f"field_t{snap.t:.6f}.csv", ["x", "s"], zip(snap.x, snap.s))
    write_manifest(out, cfg.data, extra={"run_checks": {
        "mass_law_max_rel_err": report.mass_law_max_rel_err,
        "bound_max_violation": report.bound_max_violation,
        "boundary_max": report.boundary_max,
        "n_rejections": report.n_rejections,
    }})
    if args.verbose:
        print(f"steps={report.n_steps} mass_err={report.mass_law_max_rel_err:.2e} "
              f"bound_viol={report.bound_max_violation:.2e}")
    if not report.ok:
        sys.stderr.write("assertion failure: " + "; ".join(
            name for name, ok in [("mass-law", report.mass_law_ok),
                                  ("a-priori-bound", report.bound_ok),
                                  ("boundary-floor", report.boundary_ok)] if not ok) + "\n")
        return ASSERTION_ERROR
    return 0


def cmd_sweep(args) -> int:
    cfg, out = _load(args)
    sw = cfg.sweep
    etas = np.linspace(sw["eta_min"], sw["eta_max"], sw["n_etas"])
    points = experiments.bifurcation_sweep(
        etas, epsilon=cfg.data["model"]["epsilon"], workers=max(1, args.threads),
        point_kwargs=dict(
            half_width=cfg.data["grid"]["half_width"],
            n_points=cfg.data["grid"]["n_points"],
            dt=sw["dt"], T=sw["T"], kick_amplitude=sw["kick_amplitude"],
            kick_width=sw["kick_width"], seed=cfg.seed,
            slope_window=tuple(sw["slope_window"]),
            boundary_floor=cfg.checks["boundary_floor"]))
    write_csv(out / "sweep.csv",
              ["eta", "v_measured", "v_predicted", "below_threshold", "exempt",
               "agrees", "error"],
              [(p.eta, p.v_measured,
                "" if p.v_predicted is None else p.v_predicted,
                p.below_threshold, p.exempt,
                "" if p.agrees is None else p.agrees, p.error or "")
               for p in points])
    write_manifest(out, cfg.data)
    failures = [p for p in points if p.error is not None]
    if args.verbose:
        for p in points:
            print(f"eta={p.eta:.3f} v={p.v_measured:.5f} "
                  f"pred={p.v_predicted if p.v_predicted is not None else '-'}")
    if failures:
        sys.stderr.write(f"{len(failures)} sweep point(s) failed\n")
        return ASSERTION_ERROR
    return 0


def cmd_stability(args) -> int:
    cfg, out = _load(args)
    system = SimSystem(cfg.grid(), cfg.model_params())
    exp = cfg.experiment
    window = tuple(exp["fit_window"])
    if exp["type"] == "pulse":
        res = experiments.pulse_stability_run(
            system, cfg.perturbation(), exp["T"], cfg=cfg.step_config(),
            output_stride=exp["output_stride"], fit_window=window,
            boundary_floor=cfg.checks["boundary_floor"])
        write_csv(out / "timeseries.csv", ["t", "z_norm_inf", "ydot"],
                  zip(res.t, res.z_norm, res.ydot))
        fits = [("z_norm_inf", res.fit_z), ("ydot", res.fit_ydot)]
        report = res.report
    else:
        res = experiments.stationary_stability_run(
            system, exp["T"], initial=exp["type"],
            initial_shift=exp["initial_shift"], perturbation=cfg.perturbation(),
            cfg=cfg.step_config(), output_stride=exp["output_stride"],
            fit_window=window, boundary_floor=cfg.checks["boundary_floor"])
        write_csv(out / "timeseries.csv", ["t", "residual_w1"],
                  zip(res.t, res.residual_w1))
        write_csv(out / "limit.csv", ["key", "value"],
                  [("x_bar", res.x_bar), ("settled", res.settled),
                   ("residual_final", res.residual_final),
                   ("extend_run_advisory", res.extend_run_advisory)])
        fits = [("residual_w1", res.fit)]
        report = res.report
    write_csv(out / "fits.csv",
              ["quantity", "delta", "prefactor", "window_t1", "window_t2",
               "r_squared", "n_points", "conclusive"],
              [(name, f.delta, f.prefactor, f.window[0], f.window[1],
                f.r_squared, f.n_points, f.conclusive)
               for name, f in fits if f is not None])
    write_manifest(out, cfg.data)
    if args.verbose:
        for name, f in fits:
            if f is not None:
                print(f"{name}: delta={f.delta:.4f} R2={f.r_squared:.5f}")
    if not report.ok:
        sys.stderr.write("assertion failure in run checks\n")
        return ASSERTION_ERROR
    return 0


def cmd_oracle(args) -> int:
    cfg, out = _load(args)
    rows = oracle.standard_suite()
    write_csv(out / "oracle.csv",
              ["quantity", "oracle_value", "fast_value", "abs_discrepancy",
               "rel_discrepancy", "tolerance", "pass"],
              [(r.quantity, r.oracle_value, r.fast_value, r.abs_discrepancy,
                r.rel_discrepancy, r.tolerance, r.passed) for r in rows])
    write_manifest(out, cfg.data)
    n_fail = sum(not r.passed for r in rows)
    if args.verbose or n_fail:
        for r in rows:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.quantity}: "
                  f"oracle={fmt(r.oracle_value)} fast={fmt(r.fast_value)}")
    return ASSERTION_ERROR if n_fail else 0


_COMMANDS = {
    "stationary": cmd_stationary,
    "pulse": cmd_pulse,
    "threshold": cmd_threshold,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "stability": cmd_stability,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
