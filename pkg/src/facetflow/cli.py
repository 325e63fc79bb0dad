"""Command line front end.

Subcommands:

* ``run``              -- one flow or denoising run; CSV artifacts plus summary.
* ``compare-schemes``  -- sup-difference of the two 1D fidelity schemes at
                          matched times across a grid sweep.
* ``extinction-table`` -- crossing-step table for the cosine extinction
                          experiment against reference counts and the bound.
* ``report``           -- render matplotlib figures for an existing run
                          directory, next to its CSVs.

``run`` reads an optional flat JSON config (--config); any flag given on the
command line overrides the file value.  Exit codes: 0 on success, 2 on
configuration errors, 1 on solver failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .presets import PRESETS_1D, PRESETS_2D
from .runner import (
    EXTINCTION_ROWS,
    RunConfig,
    compare_schemes,
    extinction_step_table,
    run,
    write_report_json,
)


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat JSON key-value config file")
    p.add_argument("--preset", choices=PRESETS_1D + PRESETS_2D, help="named initial profile")
    p.add_argument("--init", dest="init_path", help="custom initial data file (cell values)")
    p.add_argument("--dim", type=int, choices=(1, 2), help="spatial dimension")
    p.add_argument("--n", type=int, help="cells per axis (1D, or both axes in 2D)")
    p.add_argument("--nx", type=int, help="2D cells in x")
    p.add_argument("--ny", type=int, help="2D cells in y")
    p.add_argument("--model", help="roughness model: tv|spohn (1D), iso|aniso|spohn (2D)")
    p.add_argument("--scheme", choices=("approx-J", "exact-H"), help="dual-norm fidelity scheme")
    p.add_argument("--clambda", dest="c_lambda", type=float,
                   help="fidelity scale: lam = clambda * h^-3 (1D) or * (hx hy)^-2 (2D)")
    p.add_argument("--cmu", dest="c_mu", type=float,
                   help="coupling scale: mu = cmu * h^-1 (1D) or * (hx hy)^-1 (2D)")
    p.add_argument("--beta", type=float, help="linear coefficient of the crystalline energy")
    p.add_argument("--mode", choices=("flow", "osv"), help="gradient flow or stationary denoising")
    p.add_argument("--stop-supnorm", dest="stop_supnorm", type=float,
                   help="stop the flow once the sup-norm drops below this")
    p.add_argument("--max-steps", dest="max_steps", type=int, help="step budget of the flow")
    p.add_argument("--snap-every", dest="snap_every", type=int, help="snapshot period in steps")
    p.add_argument("--record-every", dest="record_every", type=int,
                   help="thin the trajectory records to every k-th step")
    p.add_argument("--out", help="output directory")
    p.add_argument("--plot", action="store_true", help="render figures after the run")
    p.add_argument("--verbose", action="store_true", help="print a one-line outcome")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {
        name: getattr(args, name)
        for name in (
            "preset", "init_path", "dim", "n", "nx", "ny", "model", "scheme",
            "c_lambda", "c_mu", "beta", "mode", "stop_supnorm", "max_steps",
            "snap_every", "record_every", "out",
        )
        if getattr(args, name, None) is not None
    }
    if args.config:
        base = RunConfig.from_file(args.config)
        return base.override(**overrides)
    return RunConfig.from_mapping(overrides) if overrides else RunConfig()


def _cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    summary = run(config, quiet=not args.verbose)
    if args.plot:
        from . import plots

        for path in plots.render_run(config.out):
            if args.verbose:
                print(f"[facetflow] figure: {path}")
    return 0 if summary["status"] in ("extinct", "max-steps", "converged") else 1


def _cmd_compare(args: argparse.Namespace) -> int:
    base = RunConfig.from_file(args.config) if args.config else RunConfig(
        preset=args.preset or "cusp1d",
        c_lambda=args.c_lambda if args.c_lambda is not None else 1.0,
        c_mu=args.c_mu if args.c_mu is not None else 5.0,
    )
    config_a = base.override(scheme="approx-J")
    config_b = base.override(scheme="exact-H")
    n_values = tuple(int(v) for v in args.n_values.split(","))
    report = compare_schemes(
        config_a, config_b, n_values=n_values, coarse_steps=args.coarse_steps
    )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    write_report_json(report, outdir / "scheme_gap.json")
    with open(outdir / "scheme_gap.csv", "w", newline="") as fh:
        fh.write("n,stamp_time,sup_diff\n")
        for n in report["n_values"]:
            for t, d in zip(report["stamp_times"], report["sup_diff"][n]):
                fh.write(f"{n},{t:.17g},{d:.17g}\n")
    if args.plot:
        from . import plots

        plots.render_scheme_gap(report, outdir / "scheme_gap.png")
    for n in report["n_values"]:
        print(f"[facetflow] N={n}: sup diff at final stamp = {report['final_sup_diff'][n]:.6e}")
    return 0


def _cmd_extinction(args: argparse.Namespace) -> int:
    thresholds = tuple(float(v) for v in args.thresholds.split(","))
    rows = EXTINCTION_ROWS
    if args.rows:
        picked = sorted({int(i) for i in args.rows.split(",")})
        if any(i < 1 or i > len(EXTINCTION_ROWS) for i in picked):
            raise ValueError(f"row indices must be in 1..{len(EXTINCTION_ROWS)}")
        rows = tuple(EXTINCTION_ROWS[i - 1] for i in picked)
    report = extinction_step_table(
        thresholds=thresholds,
        c_mu=args.c_mu if args.c_mu is not None else 5.0,
        rows=rows,
        max_steps=args.max_steps,
    )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    write_report_json(report, outdir / "extinction_table.json")
    with open(outdir / "extinction_table.csv", "w", newline="") as fh:
        fh.write("n,c_lambda,tau,bound_steps,threshold,crossing_step,reference_step\n")
        for row in report["rows"]:
            for t in thresholds:
                crossing = row["crossings"].get(t)
                ref = row["reference"].get(t)
                fh.write(
                    f"{row['n']},{row['c_lambda']:.17g},{row['tau']:.17g},"
                    f"{row['bound_steps']},{t:.17g},"
                    f"{'' if crossing is None else crossing},"
                    f"{'' if ref is None else ref}\n"
                )
    if args.plot:
        from . import plots

        plots.render_extinction_table(report, outdir / "extinction_table.png")
    print(report["mu_note"])
    for row in report["rows"]:
        pieces = ", ".join(
            f"{t:g}: {row['crossings'].get(t)}" for t in thresholds
        )
        print(
            f"[facetflow] N={row['n']} c_lambda={row['c_lambda']:g} "
            f"tau={row['tau']:.3e} bound={row['bound_steps']} crossings: {pieces}"
        )
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    from . import plots

    run_dir = Path(args.run_dir)
    if not (run_dir / "trajectory.csv").exists():
        raise ValueError(f"{run_dir} does not look like a run directory (no trajectory.csv)")
    written = plots.render_run(run_dir)
    for path in written:
        print(f"[facetflow] figure: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facetflow",
        description="Split Bregman solvers for fourth-order singular diffusion on periodic grids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one flow or denoising run")
    _add_run_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare-schemes", help="1D fidelity-scheme gap across grid sizes")
    p_cmp.add_argument("--config", help="flat JSON config for the shared run parameters")
    p_cmp.add_argument("--preset", choices=PRESETS_1D, help="initial profile (default cusp1d)")
    p_cmp.add_argument("--clambda", dest="c_lambda", type=float)
    p_cmp.add_argument("--cmu", dest="c_mu", type=float)
    p_cmp.add_argument("--n-values", default="40,80,160", help="comma-separated grid sizes")
    p_cmp.add_argument("--coarse-steps", type=int, default=64,
                       help="flow steps on the coarsest grid up to the final stamp")
    p_cmp.add_argument("--out", default="runs/scheme_gap")
    p_cmp.add_argument("--plot", action="store_true")
    p_cmp.set_defaults(func=_cmd_compare)

    p_ext = sub.add_parser("extinction-table", help="crossing-step table for the cosine profile")
    p_ext.add_argument("--thresholds", default="1e-4,1e-6,1e-8")
    p_ext.add_argument("--cmu", dest="c_mu", type=float,
                       help="assumed coupling scale (the reference runs do not pin it)")
    p_ext.add_argument("--rows", help="subset of rows, e.g. 1 or 1,3")
    p_ext.add_argument("--max-steps", dest="max_steps", type=int, default=2_000_000)
    p_ext.add_argument("--out", default="runs/extinction")
    p_ext.add_argument("--plot", action="store_true")
    p_ext.set_defaults(func=_cmd_extinction)

    p_rep = sub.add_parser("report", help="render figures for an existing run directory")
    p_rep.add_argument("run_dir")
    p_rep.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"facetflow: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # solver or I/O failure
        print(f"facetflow: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
