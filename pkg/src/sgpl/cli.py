"""Command-line interface.

Subcommands:
  simulate      run a scenario grid from a JSON config, write metrics and
                per-replicate CSVs (plus figures)
  fit           fit the pairwise model to a CSV of point data
  export-pairs  run the sampler once and export the selected pairs
  timing        benchmark-vs-sampled timing table over a scenario grid

Exit codes: 0 success, 1 input/config error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from sgpl import harness
from sgpl.dgp import DGPSpec, gen_dataset
from sgpl.hexgrid import GridSpec
from sgpl.pairsample import SamplerConfig
from sgpl.plfit import NumericalError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; this CLI reserves 2 for
    # numerical failures, so remap usage errors to 1.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--resolution", type=int, default=6, help="grid resolution level (default 6)")
    p.add_argument(
        "--base-edge", type=float, default=4.0, help="hex edge length at resolution 0 (default 4.0)"
    )
    p.add_argument(
        "--cell-edge",
        type=float,
        default=None,
        help="set the cell edge length directly (overrides --resolution/--base-edge)",
    )


def _grid_from_args(args) -> GridSpec:
    if args.cell_edge is not None:
        return GridSpec(resolution=0, base_edge=args.cell_edge)
    return GridSpec(resolution=args.resolution, base_edge=args.base_edge)


def _add_sampler_args(p: argparse.ArgumentParser, q_default: int) -> None:
    p.add_argument("--q-target", type=int, default=q_default, help="target number of pairs")
    p.add_argument("--k-ring", type=int, default=1, help="isolation buffer (default 1)")
    p.add_argument(
        "--n-min", type=int, default=2, help="minimum points per candidate cell (default 2)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sgpl", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a scenario grid from a JSON config")
    p_sim.add_argument("config", help="path to the JSON scenario config")
    p_sim.add_argument("--outdir", default="sgpl_out", help="output directory (default sgpl_out)")
    p_sim.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    p_fit = sub.add_parser("fit", help="fit the pairwise model to a CSV of points")
    p_fit.add_argument("csv", help="input CSV with a header row")
    p_fit.add_argument("--x-col", required=True, help="regressor column name")
    p_fit.add_argument("--y-col", required=True, help="response column name")
    p_fit.add_argument(
        "--coord-mode", choices=("planar", "latlon"), default="planar", help="coordinate columns type"
    )
    p_fit.add_argument("--px-col", default="px", help="planar x column (default px)")
    p_fit.add_argument("--py-col", default="py", help="planar y column (default py)")
    p_fit.add_argument("--lat-col", default="lat", help="latitude column (default lat)")
    p_fit.add_argument("--lon-col", default="long", help="longitude column (default long)")
    _add_grid_args(p_fit)
    _add_sampler_args(p_fit, q_default=1000)
    p_fit.add_argument("--runs", type=int, default=100, help="number of sampling runs (default 100)")
    p_fit.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p_fit.add_argument("--outdir", default="sgpl_out", help="output directory (default sgpl_out)")
    p_fit.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    p_exp = sub.add_parser("export-pairs", help="sample once and export the selected pairs")
    src = p_exp.add_mutually_exclusive_group(required=True)
    src.add_argument("--from-csv", help="CSV of points with px/py columns")
    src.add_argument("--n", type=int, help="generate a synthetic dataset of this size instead")
    p_exp.add_argument("--px-col", default="px", help="x column for --from-csv (default px)")
    p_exp.add_argument("--py-col", default="py", help="y column for --from-csv (default py)")
    p_exp.add_argument(
        "--pattern", choices=("uniform", "clustered"), default="uniform", help="synthetic pattern"
    )
    p_exp.add_argument("--lambda-sem", type=float, default=0.3, help="synthetic spatial parameter")
    p_exp.add_argument("--dgp-seed", type=int, default=0, help="synthetic dataset seed")
    _add_grid_args(p_exp)
    _add_sampler_args(p_exp, q_default=1000)
    p_exp.add_argument("--seed", type=int, default=0, help="sampler seed (default 0)")
    p_exp.add_argument("--out", default="pairs.csv", help="output CSV path (default pairs.csv)")
    p_exp.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    p_tim = sub.add_parser("timing", help="timing comparison over a scenario grid")
    p_tim.add_argument("config", help="path to the JSON scenario config (benchmark=ml_oracle)")
    p_tim.add_argument("--outdir", default="sgpl_out", help="output directory (default sgpl_out)")
    p_tim.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    return parser


def _cmd_simulate(args) -> int:
    cfg = harness.load_scenario_config(args.config)
    metrics, replicates = harness.run_scenario_detailed(cfg)
    outdir = Path(args.outdir)
    harness.write_metrics_csv(metrics, outdir / "metrics.csv")
    harness.write_replicates_csv(replicates, outdir / "replicates.csv")
    if not args.no_figures:
        from sgpl import figures

        figures.render_estimate_spread(replicates, outdir / "estimates.png")
        if any(m.re_beta1 is not None for m in metrics):
            figures.render_relative_efficiency(metrics, outdir / "relative_efficiency.png")
    for m in metrics:
        print(
            f"[{m.scenario_index}] n={m.n} lambda_sem={m.lambda_sem:g} {m.pattern}: "
            f"slope mean {m.beta1_mean:.4f} (bias {m.beta1_bias:+.4f}), "
            f"spatial-corr mean {m.lambda_mean:.4f}, "
            f"mean time {m.mean_time_sgpl_ms:.3f} ms"
            + (f", note: {m.benchmark_note}" if m.benchmark_note else "")
        )
    print(f"wrote {outdir / 'metrics.csv'} and {outdir / 'replicates.csv'}")
    return EXIT_OK


def _cmd_fit(args) -> int:
    grid = _grid_from_args(args)
    sampler = SamplerConfig(n_min_per_cell=args.n_min, k_ring=args.k_ring, q_target=args.q_target)
    result = harness.fit_file(
        args.csv,
        x_col=args.x_col,
        y_col=args.y_col,
        coord_mode=args.coord_mode,
        px_col=args.px_col,
        py_col=args.py_col,
        lat_col=args.lat_col,
        lon_col=args.lon_col,
        grid=grid,
        sampler=sampler,
        runs=args.runs,
        master_seed=args.seed,
    )
    outdir = Path(args.outdir)
    harness.write_fit_runs_csv(result.runs, outdir / "fit_runs.csv")
    if not args.no_figures:
        from sgpl import figures

        figures.render_fit_runs(result, outdir / "fit_runs.png")
    print(f"n={result.n} points, {len(result.runs)} runs, cell edge {result.cell_edge:g}")
    print(
        f"averaged estimates: slope {result.beta1_mean:.6g}, "
        f"spatial correlation {result.lambda_mean:.6g}, variance {result.sigma2_mean:.6g}"
    )
    print(
        f"mean pairs per run {result.q_mean:.1f}; "
        f"{result.n_achieved_target}/{len(result.runs)} runs hit the pair target"
    )
    print(f"wrote {outdir / 'fit_runs.csv'}")
    return EXIT_OK


def _cmd_export_pairs(args) -> int:
    if args.from_csv is not None:
        header, rows = harness.read_table(args.from_csv)
        if len(rows) < 2:
            raise ValueError(f"{args.from_csv}: need at least 2 data rows, got {len(rows)}")
        px = harness.read_float_column(rows, args.px_col, header, Path(args.from_csv))
        py = harness.read_float_column(rows, args.py_col, header, Path(args.from_csv))
        coords = np.column_stack([px, py])
    else:
        spec = DGPSpec(
            n=args.n, pattern=args.pattern, lambda_sem=args.lambda_sem, seed=args.dgp_seed
        )
        coords = gen_dataset(spec).coords
    grid = _grid_from_args(args)
    sampler = SamplerConfig(
        n_min_per_cell=args.n_min, k_ring=args.k_ring, q_target=args.q_target, seed=args.seed
    )
    pairset = harness.export_pairs(coords, grid, sampler, args.out)
    if not args.no_figures:
        from sgpl import figures

        figures.render_pair_map(coords, pairset, Path(args.out).with_suffix(".png"))
    print(
        f"wrote {args.out}: q={pairset.q} pairs"
        + ("" if pairset.achieved_target else " (pair target not reached)")
    )
    return EXIT_OK


def _cmd_timing(args) -> int:
    cfg = harness.load_scenario_config(args.config)
    rows = harness.timing_report(cfg)
    outdir = Path(args.outdir)
    harness.write_timing_csv(rows, outdir / "timing.csv")
    if not args.no_figures:
        from sgpl import figures

        figures.render_timing(rows, outdir / "timing.png")
    for r in rows:
        print(
            f"[{r.scenario_index}] n={r.n}: benchmark {r.time_benchmark_ms:.3f} ms, "
            f"sampled {r.mean_time_sgpl_ms:.3f} ms, ratio {r.relative_time:.1f}"
        )
    print(f"wrote {outdir / 'timing.csv'}")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "export-pairs": _cmd_export_pairs,
    "timing": _cmd_timing,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NumericalError as exc:
        print(f"sgpl: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"sgpl: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
