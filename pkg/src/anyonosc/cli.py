"""Command-line interface: rate tables, effective-matrix sweeps, exceptional
point location, 2D spectra and the figure presets, with CSV/JSON/SVG output.

Diagnostics go to stderr; data goes to files (--out) or stdout. Exit codes:
0 success, 1 validation error, 2 compute error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .dimer import find_exceptional_point
from .fock import FockSystem
from .output import (csv_text, write_csv, write_grid_csv, write_grid_svg,
                     write_metadata)
from .params import AnyonParams, ParameterError
from .spectra import GridSpec, build_dipole, rephasing_response
from .sweeps import (ConfigError, Conventions, RunConfig, SweepAxis,
                     SweepResult, load_config, parse_range, run_fig1,
                     run_fig2, run_fig3, run_sweep)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_param_flags(p):
    p.add_argument("--theta", type=float, default=0.0, help="statistical angle [rad]")
    p.add_argument("--xi", type=float, default=0.0, help="bath correlation in [-1, 1]")
    p.add_argument("--beta", type=float, default=1.0, help="inverse temperature (beta*omega)")
    p.add_argument("--gamma", type=float, default=0.1, help="bath coupling rate [omega]")
    p.add_argument("--coupling", type=float, default=0.2, help="hopping J [omega]")
    p.add_argument("--omega", type=float, default=1.0, help="mode frequency (unit scale)")


def _add_convention_flags(p):
    p.add_argument("--convention", choices=("appendix", "maintext"), default="appendix",
                   help="normal-mode frequency convention")
    p.add_argument("--conjugation", choices=("modulus", "analytic"), default="modulus",
                   help="channel-coefficient conjugation convention")
    p.add_argument("--jump-basis", choices=("site", "deformed"), default="site",
                   help="Liouvillian jump-operator basis")
    p.add_argument("--stat-dephasing", choices=("on", "off"), default="off",
                   help="add the statistical dephasing rate to the diagonals")


def _add_output_flags(p, svg_path=True):
    p.add_argument("--out", help="output CSV path (stdout when omitted)")
    if svg_path:
        p.add_argument("--svg", help="optional SVG heatmap path")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> _Parser:
    ap = _Parser(prog="anyonosc",
                 description="Anyonic-oscillator Lindblad rates, effective-matrix "
                             "analysis and rephasing 2D spectra")
    sub = ap.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("single-rates", help="single-oscillator rates over theta")
    _add_param_flags(p1)
    p1.add_argument("--range", default="0:3.141592653589793", help="theta range lo:hi")
    p1.add_argument("--grid", type=int, default=201, help="number of sweep points")
    _add_output_flags(p1, svg_path=False)

    p2 = sub.add_parser("dimer-rates", help="effective-matrix eigenvalues over theta")
    _add_param_flags(p2)
    _add_convention_flags(p2)
    p2.add_argument("--range", default="0:3.141592653589793", help="theta range lo:hi")
    p2.add_argument("--grid", type=int, default=201)
    _add_output_flags(p2, svg_path=False)

    p3 = sub.add_parser("ep-locate", help="locate the exceptional point in theta")
    _add_param_flags(p3)
    _add_convention_flags(p3)
    p3.add_argument("--range", default=None, help="theta bracket lo:hi (default 0:pi-0.01)")
    _add_output_flags(p3, svg_path=False)

    p4 = sub.add_parser("spectrum", help="one rephasing 2D spectrum grid")
    _add_param_flags(p4)
    _add_convention_flags(p4)
    p4.add_argument("--cutoff", type=int, default=2)
    p4.add_argument("--t2", type=float, default=0.0, help="waiting time")
    p4.add_argument("--grid", type=int, default=256, help="points per axis")
    p4.add_argument("--range", default="-0.5:0.5", help="detuning range lo:hi")
    _add_output_flags(p4)

    for name, helptxt in (("fig1", "statistical-rate sweep preset"),
                          ("fig2", "dimer bifurcation sweep preset"),
                          ("fig3", "2D-spectra panels preset")):
        pf = sub.add_parser(name, help=helptxt)
        _add_param_flags(pf)
        _add_convention_flags(pf)
        pf.add_argument("--grid", type=int, default=None, help="sweep/axis point count")
        if name == "fig2":
            pf.add_argument("--temp", choices=("low", "high"), default="low",
                            help="temperature regime (beta*omega = 1 or 0.1)")
            pf.add_argument("--xi-list", default="0,0.25,0.5,0.75,1")
        if name == "fig3":
            pf.add_argument("--cutoff", type=int, default=2)
            pf.add_argument("--t2", type=float, default=0.0)
            pf.add_argument("--theta-list", default=None,
                            help="comma-separated theta values")
            pf.add_argument("--xi-list", default="0,1")
            pf.add_argument("--svg", action="store_true",
                            help="also render one SVG heatmap per grid")
        pf.add_argument("--out", help="output path (fig3: directory)")
        pf.add_argument("--threads", type=int, default=1)

    p8 = sub.add_parser("sweep", help="generic sweep from a JSON config")
    p8.add_argument("--config", required=True, help="JSON config path")
    p8.add_argument("--out", help="override output CSV path")
    p8.add_argument("--threads", type=int, default=None, help="override thread count")
    return ap


def _params_from(args) -> AnyonParams:
    return AnyonParams(theta=args.theta, omega=args.omega, coupling_j=args.coupling,
                       gamma=args.gamma, beta=args.beta, xi=args.xi)


def _conventions_from(args) -> Conventions:
    return Conventions(frequency=args.convention, conjugation=args.conjugation,
                       jump_basis=args.jump_basis,
                       stat_dephasing=args.stat_dephasing == "on")


def _emit(result, args, config):
    if args.out:
        write_csv(result, args.out)
        write_metadata(result, config, args.out + ".meta.json")
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(csv_text(result))


def _run(args) -> int:
    if args.command == "single-rates":
        ax = parse_range(args.range, args.grid)
        cfg = RunConfig(params=_params_from(args),
                        sweep=(SweepAxis("theta", ax.start, ax.stop, ax.count),),
                        threads=args.threads)
        _emit(run_fig1(cfg), args, cfg)
        return 0

    if args.command == "dimer-rates":
        ax = parse_range(args.range, args.grid)
        cfg = RunConfig(params=_params_from(args), conventions=_conventions_from(args),
                        sweep=(SweepAxis("theta", ax.start, ax.stop, ax.count),),
                        threads=args.threads, xi_list=(args.xi,))
        _emit(run_fig2(cfg), args, cfg)
        return 0

    if args.command == "ep-locate":
        params = _params_from(args)
        conv = _conventions_from(args)
        bracket = None
        if args.range:
            ax = parse_range(args.range, 2)
            bracket = (ax.start, ax.stop)
        ep = find_exceptional_point(params, bracket, conv.frequency, conv.conjugation,
                                    conv.stat_dephasing)
        cfg = RunConfig(params=params, conventions=conv)
        res = SweepResult(columns=("theta_star", "gap", "ep_found", "threshold"),
                          units=("rad", "omega", "bool", "omega"),
                          rows=[(ep.theta, ep.gap, int(ep.found), ep.threshold)],
                          metadata={"generator": "ep-locate",
                                    "config_sha256": cfg.sha256(),
                                    "conventions": conv.as_dict()})
        _emit(res, args, cfg)
        return 0

    if args.command == "spectrum":
        params = _params_from(args)
        conv = _conventions_from(args)
        rng = parse_range(args.range, 2)
        grid = GridSpec(count=args.grid, lo=rng.start, hi=rng.stop)
        system = FockSystem(cutoff=args.cutoff, theta=params.theta, modes=2)
        dip = build_dipole(system, conv.conjugation)
        g = rephasing_response(system, dip, params, t2=args.t2, grid=grid,
                               jump_basis=conv.jump_basis, conjugation=conv.conjugation,
                               threads=args.threads)
        cfg = RunConfig(params=params, conventions=conv, cutoff=args.cutoff,
                        grid=grid, t2=args.t2, threads=args.threads)
        if args.out:
            write_grid_csv(g, args.out, cfg)
            print(f"wrote {args.out}", file=sys.stderr)
        else:
            from .sweeps import SweepResult as SR
            rows = [(float(wt), float(wv), v.real, v.imag)
                    for wt, row in zip(g.omega_tau_axis, g.values)
                    for wv, v in zip(g.omega_t_axis, row)]
            sys.stdout.write(csv_text(SR(("omega_tau", "omega_t", "re", "im"),
                                         ("omega", "omega", "arb", "arb"), rows)))
        if args.svg:
            write_grid_svg(g, args.svg, title=f"Re R3, theta={params.theta:.3f}, xi={params.xi:.2f}")
            print(f"wrote {args.svg}", file=sys.stderr)
        return 0

    if args.command == "fig1":
        n = args.grid or 201
        cfg = RunConfig(params=_params_from(args), conventions=_conventions_from(args),
                        sweep=(SweepAxis("theta", 0.0, math.pi, n),), threads=args.threads)
        _emit(run_fig1(cfg), args, cfg)
        return 0

    if args.command == "fig2":
        n = args.grid or 201
        beta = 1.0 if args.temp == "low" else 0.1
        xis = tuple(float(x) for x in args.xi_list.split(","))
        cfg = RunConfig(params=_params_from(args).with_(beta=beta),
                        conventions=_conventions_from(args),
                        sweep=(SweepAxis("theta", 0.0, math.pi, n),),
                        threads=args.threads, xi_list=xis)
        _emit(run_fig2(cfg), args, cfg)
        return 0

    if args.command == "fig3":
        if not args.out:
            raise ConfigError("fig3 writes multiple files; --out DIR is required")
        os.makedirs(args.out, exist_ok=True)
        n = args.grid or 256
        thetas = (tuple(float(x) for x in args.theta_list.split(","))
                  if args.theta_list else tuple(np.linspace(0.0, math.pi, 9)))
        xis = tuple(float(x) for x in args.xi_list.split(","))
        cfg = RunConfig(params=_params_from(args), conventions=_conventions_from(args),
                        cutoff=args.cutoff, grid=GridSpec(count=n), t2=args.t2,
                        threads=args.threads, theta_list=thetas, xi_list=xis)
        fig3 = run_fig3(cfg)
        slices_path = os.path.join(args.out, "fig3_slices.csv")
        overlay_path = os.path.join(args.out, "fig3_overlay.csv")
        write_csv(fig3.slices, slices_path)
        write_metadata(fig3.slices, cfg, slices_path + ".meta.json")
        write_csv(fig3.overlay, overlay_path)
        write_metadata(fig3.overlay, cfg, overlay_path + ".meta.json")
        if args.svg:
            for theta, xi, g in fig3.grids:
                name = f"fig3_grid_theta{theta:.3f}_xi{xi:.2f}.svg"
                diag = g.omega_tau_axis
                write_grid_svg(g, os.path.join(args.out, name),
                               title=f"Re R3, theta={theta:.3f}, xi={xi:.2f}",
                               overlays=[(diag, diag)])
        print(f"wrote fig3 outputs under {args.out}", file=sys.stderr)
        return 0

    if args.command == "sweep":
        cfg = load_config(args.config)
        if args.threads is not None:
            cfg.threads = args.threads
        if args.out:
            cfg.output_path = args.out
        res = run_sweep(cfg)
        if cfg.output_path:
            write_csv(res, cfg.output_path)
            write_metadata(res, cfg, cfg.output_path + ".meta.json")
            print(f"wrote {cfg.output_path}", file=sys.stderr)
        else:
            sys.stdout.write(csv_text(res))
        return 0

    raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args)
    except (ConfigError, ParameterError, ValueError, OSError) as exc:
        print(f"anyonosc: error: {exc}", file=sys.stderr)
        return 1
    except (np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"anyonosc: compute error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
