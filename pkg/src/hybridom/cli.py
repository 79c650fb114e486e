"""Command line interface.

Subcommands: steady, scan-detuning, hysteresis, cooling, dynamics.
All frequencies/detunings are angular (rad/s), powers in watts, times in
seconds. --config takes a JSON file path or a shipped preset name
(fig2, fig3a..c, fig4, fig5..fig8).

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import dynamics as dyn
from . import sweeps
from .atomic_feedback import feedback_for
from .errors import ConfigError, NumericalError
from .params import derive
from .presets import preset_names, resolve_config
from .stability import classify
from .steady_state import solve_branches


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hybridom",
        description="Steady states, stability and cooling of a hybrid "
        "two-cavity optomechanical system.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument(
            "--config", required=True,
            help=f"JSON config file or preset name ({', '.join(preset_names())})",
        )

    p = sub.add_parser("steady", help="branch report at one operating point (JSON to stdout)")
    add_config(p)
    p.add_argument("--delta-a", type=float, default=None, help="detuning Delta_A [rad/s]; default from config")
    p.add_argument("--power", type=float, default=None, help="drive power [W]; default from config")

    p = sub.add_parser("scan-detuning", help="branches vs Delta_A at fixed power (CSV)")
    add_config(p)
    p.add_argument("--power", type=float, required=True, help="drive power [W]")
    p.add_argument("--from", dest="lo", type=float, required=True, help="first Delta_A [rad/s]")
    p.add_argument("--to", dest="hi", type=float, required=True, help="last Delta_A [rad/s]")
    p.add_argument("--points", type=int, default=sweeps.DEFAULT_POINTS)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("hysteresis", help="up/down power scans with jump powers (CSV)")
    add_config(p)
    p.add_argument("--delta-a", type=float, required=True, help="fixed Delta_A [rad/s]")
    p.add_argument("--p-from", dest="p_lo", type=float, required=True, help="first power [W]")
    p.add_argument("--p-to", dest="p_hi", type=float, required=True, help="last power [W]")
    p.add_argument("--points", type=int, default=sweeps.DEFAULT_POINTS)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("cooling", help="cooling quantities vs Delta_A (CSV)")
    add_config(p)
    p.add_argument("--from", dest="lo", type=float, required=True, help="first Delta_A [rad/s]")
    p.add_argument("--to", dest="hi", type=float, required=True, help="last Delta_A [rad/s]")
    p.add_argument("--points", type=int, default=sweeps.DEFAULT_POINTS)
    p.add_argument("--feedback", choices=("on", "off", "both"), default="both")
    p.add_argument("--branch", choices=("lower", "upper", "follow"), default="lower")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("dynamics", help="mean-field time integration (CSV trajectory)")
    add_config(p)
    p.add_argument("--delta-a", type=float, default=None, help="Delta_A [rad/s]; default from config")
    p.add_argument("--power", type=float, default=None, help="drive power [W]; default from config")
    p.add_argument("--duration", type=float, required=True, help="integration time [s]")
    p.add_argument("--dt", type=float, required=True, help="time step [s]")
    p.add_argument("--stride", type=int, default=1, help="sample every N steps")
    p.add_argument("--out", required=True, help="output CSV path")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4


def _dispatch(args) -> int:
    from dataclasses import replace

    config = resolve_config(args.config)
    if getattr(args, "delta_a", None) is not None:
        config = replace(config, Delta_A=args.delta_a)
    if getattr(args, "power", None) is not None:
        config = replace(config, P_in=args.power)

    if args.command == "steady":
        der = derive(config)
        sig = feedback_for(config, der)
        report = {
            "delta_A": config.Delta_A,
            "power_W": config.P_in,
            "omega_m": config.omega_m,
            "sigma": [sig.sigma.real, sig.sigma.imag],
            "branches": [],
        }
        for i, b in enumerate(solve_branches(der, config.Delta_A, sig)):
            b, v = classify(b, der, config)
            report["branches"].append(
                {
                    "index": i,
                    "I": b.I,
                    "a_S": [b.a_S.real, b.a_S.imag],
                    "Q_S": b.Q_S,
                    "chi_Q_S": der.chi * b.Q_S,
                    "Delta_eff": b.Delta_eff,
                    "residual": b.residual,
                    "stable": b.stable,
                    "margin": v.margin,
                    "rh_pass": list(v.rh_pass),
                    "eig_pass": v.eig_pass,
                }
            )
        json.dump(report, sys.stdout, indent=2)
        print()
        return 0

    if args.command == "scan-detuning":
        grid = np.linspace(args.lo, args.hi, args.points)
        rows = sweeps.detuning_scan(config, args.power, grid, workers=args.workers)
        sweeps.write_csv(rows, args.out)
        return 0

    if args.command == "hysteresis":
        grid = np.linspace(args.p_lo, args.p_hi, args.points)
        res = sweeps.hysteresis_scan(config, args.delta_a, grid, workers=args.workers)
        sweeps.write_csv(list(res.up) + list(res.down), args.out)
        p1 = "none" if res.P1 is None else format(res.P1, ".17g")
        p2 = "none" if res.P2 is None else format(res.P2, ".17g")
        print(f"P1_W={p1}")
        print(f"P2_W={p2}")
        return 0

    if args.command == "cooling":
        grid = np.linspace(args.lo, args.hi, args.points)
        rows = sweeps.cooling_scan(
            config, grid, branch_policy=args.branch, feedback=args.feedback,
            workers=args.workers,
        )
        sweeps.write_csv(rows, args.out)
        return 0

    if args.command == "dynamics":
        der = derive(config)
        sig = feedback_for(config, der)
        state0 = dyn.MeanFieldState(Q=0.0, P=0.0, a=0j, t=0.0)
        traj = dyn.integrate(
            state0, args.duration, args.dt, der, config, sig, stride=args.stride
        )
        dyn.write_trajectory_csv(traj, args.out)
        return 0

    raise ConfigError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
