"""Experiment orchestration: scenario grids, replication, metrics, file I/O.

A scenario grid crosses dataset sizes, spatial-dependence strengths and
point patterns.  Per cell, one seeded dataset is generated and the
grid-sampled estimator is re-run ``reps`` times with replicate-derived
seeds (the paper-style design: replication measures the sampling noise of
the estimator on a fixed dataset).  An optional ``fresh_dataset_per_rep``
mode draws a new dataset for every replicate instead, which is the right
design for bias studies.

Seeds derive from (master_seed, scenario_index, stream) through a
splitmix64 mix, so runs are reproducible byte-for-byte (timing columns
aside) and extending ``reps`` never disturbs earlier replicates.

Timing uses a monotonic clock and is reported in milliseconds with
microsecond resolution; the per-replicate window covers cell selection,
pair sampling and estimation, never dataset generation or grid overlay.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field, fields, replace
from itertools import product
from pathlib import Path

import numpy as np

from sgpl.benchmarks import DENSE_ML_CAP, fit_ml_sem
from sgpl.dgp import DGPSpec, PointSet, gen_dataset, knn_weights
from sgpl.hexgrid import CellAssignment, GridSpec, assign_all
from sgpl.pairsample import (
    PairSet,
    SamplerConfig,
    candidate_cells,
    run_sgpl_sampling,
    sample_pairs,
    select_isolated_cells,
)
from sgpl.plfit import FitOptions, PairData, PLFit, fit_pl

__all__ = [
    "DGPDefaults",
    "ScenarioConfig",
    "MetricsRow",
    "ReplicateRecord",
    "TimingRow",
    "FitRunRecord",
    "FitFileResult",
    "derive_seed",
    "run_scenario",
    "run_scenario_detailed",
    "timing_report",
    "fit_file",
    "export_pairs",
    "scenario_config_from_dict",
    "load_scenario_config",
    "write_metrics_csv",
    "write_replicates_csv",
    "write_timing_csv",
    "write_pairs_csv",
    "write_points_csv",
    "write_fit_runs_csv",
    "read_table",
    "read_float_column",
]

EARTH_RADIUS_KM = 6371.0

_MASK64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, scenario_index: int, stream: int) -> int:
    """Mix (master_seed, scenario_index, stream) into one 64-bit seed.

    Stream 0 is the scenario's shared dataset; replicate r samples with
    stream r + 1; fresh-dataset mode draws replicate r's dataset with
    stream 2**32 + r.  Chained splitmix64 steps keep distinct triples on
    distinct, well-scrambled seeds.
    """
    z = master_seed & _MASK64
    for word in (scenario_index, stream):
        z = _splitmix64(z ^ (word & _MASK64))
    return _splitmix64(z)


_DATASET_STREAM = 0
_FRESH_DATASET_STREAM_BASE = 1 << 32


@dataclass(frozen=True)
class DGPDefaults:
    """Data-generation parameters shared by every scenario cell."""

    beta0: float = 1.0
    beta1: float = 1.5
    mu_x: float = 0.0
    sigma_x: float = 1.0
    sigma_eps2: float = 0.1
    k_w: int = 4
    k_taylor: int = 50
    lambda_c: float = 5.0
    sigma_cluster: float = 0.05

    def build(self, n: int, pattern: str, lambda_sem: float, seed: int) -> DGPSpec:
        return DGPSpec(
            n=n,
            pattern=pattern,
            lambda_sem=lambda_sem,
            seed=seed,
            beta0=self.beta0,
            beta1=self.beta1,
            mu_x=self.mu_x,
            sigma_x=self.sigma_x,
            sigma_eps2=self.sigma_eps2,
            k_w=self.k_w,
            k_taylor=self.k_taylor,
            lambda_c=self.lambda_c,
            sigma_cluster=self.sigma_cluster,
        )


BENCHMARKS = ("none", "ml_oracle")


@dataclass(frozen=True)
class ScenarioConfig:
    """A full experiment: the scenario grid plus shared machinery settings."""

    n_values: tuple[int, ...]
    lambda_sem_values: tuple[float, ...]
    patterns: tuple[str, ...]
    reps: int
    master_seed: int
    benchmark: str = "none"
    fresh_dataset_per_rep: bool = False
    grid: GridSpec = field(default_factory=lambda: GridSpec(resolution=6))
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    dgp: DGPDefaults = field(default_factory=DGPDefaults)

    def __post_init__(self) -> None:
        if not self.n_values or not self.lambda_sem_values or not self.patterns:
            raise ValueError("scenario grid must be non-empty in every dimension")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if self.benchmark not in BENCHMARKS:
            raise ValueError(f"benchmark must be one of {BENCHMARKS}, got {self.benchmark!r}")

    def cells(self) -> list[tuple[int, int, float, str]]:
        """(scenario_index, n, lambda_sem, pattern) in enumeration order."""
        combos = product(self.n_values, self.lambda_sem_values, self.patterns)
        return [(i, n, lam, pat) for i, (n, lam, pat) in enumerate(combos)]


@dataclass(frozen=True)
class ReplicateRecord:
    """One SG-PL run on one dataset: estimates plus timing."""

    scenario_index: int
    n: int
    lambda_sem: float
    pattern: str
    replicate: int
    seed: int
    q: int
    achieved_target: bool
    beta1: float
    lam: float
    sigma2: float
    iterations: int
    converged: bool
    loglik: float
    time_sampling_ms: float
    time_estimation_ms: float


@dataclass(frozen=True)
class MetricsRow:
    """Aggregated scenario-cell metrics (one output row)."""

    scenario_index: int
    n: int
    lambda_sem: float
    pattern: str
    reps: int
    beta1_mean: float
    beta1_bias: float
    beta1_mse: float
    lambda_mean: float
    lambda_bias: float
    lambda_mse: float
    sigma2_mean: float
    sigma2_bias: float
    sigma2_mse: float
    bench_beta1: float | None
    bench_lambda: float | None
    bench_sigma2: float | None
    re_beta1: float | None
    re_lambda: float | None
    re_sigma2: float | None
    mean_time_sgpl_ms: float
    mean_time_benchmark_ms: float | None
    relative_time: float | None
    benchmark_note: str


@dataclass(frozen=True)
class TimingRow:
    scenario_index: int
    n: int
    lambda_sem: float
    pattern: str
    mean_time_sgpl_ms: float
    time_benchmark_ms: float
    relative_time: float


# --- core replication loop ----------------------------------------------


def _demeaned(points: PointSet) -> tuple[np.ndarray, np.ndarray]:
    # The pairwise model carries no intercept; centering on full-sample
    # means concentrates it out.
    return points.x - float(np.mean(points.x)), points.y - float(np.mean(points.y))


def _pair_data(pairset: PairSet, x: np.ndarray, y: np.ndarray) -> PairData:
    idx_i = np.asarray([p[0] for p in pairset.pairs], dtype=np.int64)
    idx_l = np.asarray([p[1] for p in pairset.pairs], dtype=np.int64)
    return PairData(x_i=x[idx_i], x_l=x[idx_l], y_i=y[idx_i], y_l=y[idx_l])


def _one_replicate(
    assignment: CellAssignment,
    candidates: set,
    x_c: np.ndarray,
    y_c: np.ndarray,
    sampler: SamplerConfig,
    fit_options: FitOptions,
) -> tuple[PairSet, PLFit, float, float]:
    """Timed selection + sampling + estimation on a prepared dataset."""
    rng = np.random.default_rng(sampler.seed)
    t0 = time.perf_counter()
    selected = select_isolated_cells(candidates, sampler, rng)
    pairset = sample_pairs(assignment, selected, sampler, rng)
    t1 = time.perf_counter()
    if pairset.q < 2:
        raise ValueError(
            f"sampling produced q={pairset.q} < 2 pairs; use a coarser grid or more data"
        )
    data = _pair_data(pairset, x_c, y_c)
    fit = fit_pl(data, fit_options)
    t2 = time.perf_counter()
    return pairset, fit, (t1 - t0) * 1e3, (t2 - t1) * 1e3


def _prepare_dataset(
    cfg: ScenarioConfig, n: int, lambda_sem: float, pattern: str, seed: int
) -> tuple[PointSet, CellAssignment, set, np.ndarray, np.ndarray]:
    spec = cfg.dgp.build(n=n, pattern=pattern, lambda_sem=lambda_sem, seed=seed)
    points = gen_dataset(spec)
    assignment = assign_all(cfg.grid, points.coords)
    candidates = candidate_cells(assignment, cfg.sampler)
    if not candidates:
        raise ValueError(
            f"scenario (n={n}, lambda_sem={lambda_sem}, pattern={pattern}): no cell reaches "
            f"n_min_per_cell={cfg.sampler.n_min_per_cell}; lower the grid resolution"
        )
    x_c, y_c = _demeaned(points)
    return points, assignment, candidates, x_c, y_c


def run_scenario_detailed(
    cfg: ScenarioConfig, fit_options: FitOptions = FitOptions()
) -> tuple[list[MetricsRow], list[ReplicateRecord]]:
    """Run the whole scenario grid, returning metrics and per-replicate rows."""
    metrics: list[MetricsRow] = []
    replicates: list[ReplicateRecord] = []
    for idx, n, lambda_sem, pattern in cfg.cells():
        shared_seed = derive_seed(cfg.master_seed, idx, _DATASET_STREAM)
        shared = _prepare_dataset(cfg, n, lambda_sem, pattern, shared_seed)

        cell_reps: list[ReplicateRecord] = []
        for r in range(cfg.reps):
            if cfg.fresh_dataset_per_rep:
                ds_seed = derive_seed(cfg.master_seed, idx, _FRESH_DATASET_STREAM_BASE + r)
                points, assignment, candidates, x_c, y_c = _prepare_dataset(
                    cfg, n, lambda_sem, pattern, ds_seed
                )
            else:
                points, assignment, candidates, x_c, y_c = shared
            rep_seed = derive_seed(cfg.master_seed, idx, r + 1)
            sampler = replace(cfg.sampler, seed=rep_seed)
            pairset, fit, t_sample, t_fit = _one_replicate(
                assignment, candidates, x_c, y_c, sampler, fit_options
            )
            cell_reps.append(
                ReplicateRecord(
                    scenario_index=idx,
                    n=n,
                    lambda_sem=lambda_sem,
                    pattern=pattern,
                    replicate=r,
                    seed=rep_seed,
                    q=pairset.q,
                    achieved_target=pairset.achieved_target,
                    beta1=fit.beta,
                    lam=fit.lam,
                    sigma2=fit.sigma2,
                    iterations=fit.iterations,
                    converged=fit.converged,
                    loglik=fit.loglik,
                    time_sampling_ms=t_sample,
                    time_estimation_ms=t_fit,
                )
            )
        replicates.extend(cell_reps)

        bench = None
        bench_time_ms = None
        bench_note = ""
        if cfg.benchmark == "ml_oracle":
            if n > DENSE_ML_CAP:
                bench_note = f"ml_oracle skipped: N={n} exceeds dense cap {DENSE_ML_CAP}"
            else:
                points = shared[0]
                w = knn_weights(points.coords, cfg.dgp.k_w)
                x_mat = np.column_stack([np.ones(points.n), points.x])
                t0 = time.perf_counter()
                bench = fit_ml_sem(w, x_mat, points.y)
                bench_time_ms = (time.perf_counter() - t0) * 1e3
        metrics.append(
            _aggregate_cell(
                cfg, idx, n, lambda_sem, pattern, cell_reps, bench, bench_time_ms, bench_note
            )
        )
    return metrics, replicates


def run_scenario(cfg: ScenarioConfig, fit_options: FitOptions = FitOptions()) -> list[MetricsRow]:
    """Scenario grid -> one aggregated metrics row per cell."""
    return run_scenario_detailed(cfg, fit_options)[0]


def _aggregate_cell(
    cfg: ScenarioConfig,
    idx: int,
    n: int,
    lambda_sem: float,
    pattern: str,
    reps: list[ReplicateRecord],
    bench,
    bench_time_ms: float | None,
    bench_note: str,
) -> MetricsRow:
    beta1s = np.asarray([r.beta1 for r in reps])
    lams = np.asarray([r.lam for r in reps])
    sigma2s = np.asarray([r.sigma2 for r in reps])
    true_beta1 = cfg.dgp.beta1
    true_sigma2 = cfg.dgp.sigma_eps2

    def agg(est: np.ndarray, true: float) -> tuple[float, float, float]:
        mean = float(np.mean(est))
        return mean, mean - true, float(np.mean((est - true) ** 2))

    b_mean, b_bias, b_mse = agg(beta1s, true_beta1)
    l_mean, l_bias, l_mse = agg(lams, lambda_sem)
    s_mean, s_bias, s_mse = agg(sigma2s, true_sigma2)

    times = np.asarray([r.time_sampling_ms + r.time_estimation_ms for r in reps])
    mean_time = float(np.mean(times))

    bench_beta1 = bench_lambda = bench_sigma2 = None
    re_beta1 = re_lambda = re_sigma2 = None
    relative_time = None
    if bench is not None:
        bench_beta1 = bench.beta1
        bench_lambda = bench.lambda_ml
        bench_sigma2 = bench.sigma2_ml
        re_beta1 = (bench.beta1 - true_beta1) ** 2 / b_mse if b_mse > 0 else None
        re_lambda = (bench.lambda_ml - lambda_sem) ** 2 / l_mse if l_mse > 0 else None
        re_sigma2 = (bench.sigma2_ml - true_sigma2) ** 2 / s_mse if s_mse > 0 else None
        relative_time = bench_time_ms / mean_time if mean_time > 0 else None

    return MetricsRow(
        scenario_index=idx,
        n=n,
        lambda_sem=lambda_sem,
        pattern=pattern,
        reps=len(reps),
        beta1_mean=b_mean,
        beta1_bias=b_bias,
        beta1_mse=b_mse,
        lambda_mean=l_mean,
        lambda_bias=l_bias,
        lambda_mse=l_mse,
        sigma2_mean=s_mean,
        sigma2_bias=s_bias,
        sigma2_mse=s_mse,
        bench_beta1=bench_beta1,
        bench_lambda=bench_lambda,
        bench_sigma2=bench_sigma2,
        re_beta1=re_beta1,
        re_lambda=re_lambda,
        re_sigma2=re_sigma2,
        mean_time_sgpl_ms=mean_time,
        mean_time_benchmark_ms=bench_time_ms,
        relative_time=relative_time,
        benchmark_note=bench_note,
    )


def timing_report(cfg: ScenarioConfig, fit_options: FitOptions = FitOptions()) -> list[TimingRow]:
    """Benchmark-vs-SG-PL wall-time table over the scenario grid.

    Requires benchmark="ml_oracle" and every N within the dense cap, since
    the whole point is the timing ratio.
    """
    if cfg.benchmark != "ml_oracle":
        raise ValueError('timing_report requires benchmark="ml_oracle"')
    over = [n for n in cfg.n_values if n > DENSE_ML_CAP]
    if over:
        raise ValueError(
            f"timing_report needs every N within the dense cap {DENSE_ML_CAP}; got {over}"
        )
    rows = []
    for m in run_scenario(cfg, fit_options):
        rows.append(
            TimingRow(
                scenario_index=m.scenario_index,
                n=m.n,
                lambda_sem=m.lambda_sem,
                pattern=m.pattern,
                mean_time_sgpl_ms=m.mean_time_sgpl_ms,
                time_benchmark_ms=m.mean_time_benchmark_ms,
                relative_time=m.relative_time,
            )
        )
    return rows


# --- real-data fitting ----------------------------------------------------


@dataclass(frozen=True)
class FitRunRecord:
    run: int
    seed: int
    q: int
    achieved_target: bool
    beta1: float
    lam: float
    sigma2: float
    iterations: int
    converged: bool
    time_ms: float


@dataclass(frozen=True)
class FitFileResult:
    """Averaged estimates over repeated sampling runs on one dataset."""

    n: int
    runs: tuple[FitRunRecord, ...]
    beta1_mean: float
    lambda_mean: float
    sigma2_mean: float
    q_mean: float
    n_achieved_target: int
    coord_mode: str
    cell_edge: float


def read_table(path: str | Path) -> tuple[list[str], list[dict[str, str]]]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: file is empty, expected a CSV header row")
        header = list(reader.fieldnames)
        rows = list(reader)
    return header, rows


def read_float_column(rows: list[dict[str, str]], col: str, header: list[str], path: Path) -> np.ndarray:
    if col not in header:
        raise ValueError(f"{path}: missing column {col!r}; available columns: {header}")
    out = np.empty(len(rows))
    for i, row in enumerate(rows):
        raw = row.get(col)
        try:
            out[i] = float(raw)
        except (TypeError, ValueError):
            raise ValueError(
                f"{path}: non-numeric value {raw!r} in column {col!r} at data row {i + 1}"
            ) from None
    return out


def equirectangular_km(lat: np.ndarray, lon: np.ndarray) -> np.ndarray:
    """Project lat/long degrees to planar kilometers.

    x = R * (lon - mean lon in radians) * cos(mean lat), y = R * (lat -
    mean lat in radians), R = 6371 km.  Good enough at city scale, which
    is all the grid needs.
    """
    lat = np.asarray(lat, dtype=np.float64)
    lon = np.asarray(lon, dtype=np.float64)
    lat_ref = float(np.mean(lat))
    lon_ref = float(np.mean(lon))
    x = EARTH_RADIUS_KM * np.radians(lon - lon_ref) * math.cos(math.radians(lat_ref))
    y = EARTH_RADIUS_KM * np.radians(lat - lat_ref)
    return np.column_stack([x, y])


def fit_file(
    path: str | Path,
    *,
    x_col: str,
    y_col: str,
    coord_mode: str = "planar",
    px_col: str = "px",
    py_col: str = "py",
    lat_col: str = "lat",
    lon_col: str = "lon",
    grid: GridSpec,
    sampler: SamplerConfig,
    runs: int = 100,
    master_seed: int = 0,
    fit_options: FitOptions = FitOptions(),
) -> FitFileResult:
    """Fit the pairwise model to a CSV of point data, averaging over runs.

    Lat/long input is projected to planar kilometers first; the regressor
    and response are demeaned on full-sample means (no intercept in the
    pairwise model); each run re-samples pairs with a seed derived from
    (master_seed, 0, run + 1) and the estimates are averaged.
    """
    if coord_mode not in ("planar", "latlon"):
        raise ValueError(f'coord_mode must be "planar" or "latlon", got {coord_mode!r}')
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    path = Path(path)
    header, rows = read_table(path)
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least 2 data rows, got {len(rows)}")
    x = read_float_column(rows, x_col, header, path)
    y = read_float_column(rows, y_col, header, path)
    if coord_mode == "planar":
        coords = np.column_stack(
            [read_float_column(rows, px_col, header, path), read_float_column(rows, py_col, header, path)]
        )
    else:
        coords = equirectangular_km(
            read_float_column(rows, lat_col, header, path), read_float_column(rows, lon_col, header, path)
        )

    x_c = x - float(np.mean(x))
    y_c = y - float(np.mean(y))
    assignment = assign_all(grid, coords)
    candidates = candidate_cells(assignment, sampler)
    if not candidates:
        raise ValueError(
            f"{path}: no cell reaches n_min_per_cell={sampler.n_min_per_cell} at cell edge "
            f"{grid.edge:g}; increase the cell edge"
        )

    records: list[FitRunRecord] = []
    for r in range(runs):
        seed_r = derive_seed(master_seed, 0, r + 1)
        run_sampler = replace(sampler, seed=seed_r)
        t0 = time.perf_counter()
        pairset, fit, _, _ = _one_replicate(
            assignment, candidates, x_c, y_c, run_sampler, fit_options
        )
        elapsed_ms = (time.perf_counter() - t0) * 1e3
        records.append(
            FitRunRecord(
                run=r,
                seed=seed_r,
                q=pairset.q,
                achieved_target=pairset.achieved_target,
                beta1=fit.beta,
                lam=fit.lam,
                sigma2=fit.sigma2,
                iterations=fit.iterations,
                converged=fit.converged,
                time_ms=elapsed_ms,
            )
        )

    return FitFileResult(
        n=len(rows),
        runs=tuple(records),
        beta1_mean=float(np.mean([r.beta1 for r in records])),
        lambda_mean=float(np.mean([r.lam for r in records])),
        sigma2_mean=float(np.mean([r.sigma2 for r in records])),
        q_mean=float(np.mean([r.q for r in records])),
        n_achieved_target=sum(r.achieved_target for r in records),
        coord_mode=coord_mode,
        cell_edge=grid.edge,
    )


def export_pairs(
    coords: np.ndarray, grid: GridSpec, sampler: SamplerConfig, path: str | Path
) -> PairSet:
    """Run the sampler once and write the selected pairs to CSV."""
    pairset = run_sgpl_sampling(coords, grid, sampler)
    write_pairs_csv(coords, pairset, path)
    return pairset


# --- CSV output ------------------------------------------------------------

METRICS_COLUMNS = [f.name for f in fields(MetricsRow)]
REPLICATE_COLUMNS = [f.name for f in fields(ReplicateRecord)]
TIMING_COLUMNS = [f.name for f in fields(TimingRow)]
FIT_RUN_COLUMNS = [f.name for f in fields(FitRunRecord)]
PAIRS_COLUMNS = ["cell_q", "cell_r", "i", "l", "xi_coord", "yi_coord", "xl_coord", "yl_coord"]
POINTS_COLUMNS = ["px", "py", "x", "y"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        # repr of the builtin float round-trips exactly and is stable.
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _write_rows(path: str | Path, columns: list[str], rows: list[list]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _dataclass_rows(items, columns: list[str]) -> list[list]:
    return [[getattr(item, c) for c in columns] for item in items]


def write_metrics_csv(rows: list[MetricsRow], path: str | Path) -> None:
    _write_rows(path, METRICS_COLUMNS, _dataclass_rows(rows, METRICS_COLUMNS))


def write_replicates_csv(rows: list[ReplicateRecord], path: str | Path) -> None:
    _write_rows(path, REPLICATE_COLUMNS, _dataclass_rows(rows, REPLICATE_COLUMNS))


def write_timing_csv(rows: list[TimingRow], path: str | Path) -> None:
    _write_rows(path, TIMING_COLUMNS, _dataclass_rows(rows, TIMING_COLUMNS))


def write_fit_runs_csv(rows: list[FitRunRecord] | tuple[FitRunRecord, ...], path: str | Path) -> None:
    _write_rows(path, FIT_RUN_COLUMNS, _dataclass_rows(rows, FIT_RUN_COLUMNS))


def write_pairs_csv(coords: np.ndarray, pairset: PairSet, path: str | Path) -> None:
    """Pair export: one row per pair with both member coordinates."""
    coords = np.asarray(coords, dtype=np.float64)
    rows = []
    for i, l, cell in pairset.pairs:
        rows.append(
            [cell.q, cell.r, i, l, coords[i, 0], coords[i, 1], coords[l, 0], coords[l, 1]]
        )
    _write_rows(path, PAIRS_COLUMNS, rows)


def write_points_csv(points: PointSet, path: str | Path) -> None:
    rows = [
        [points.coords[i, 0], points.coords[i, 1], points.x[i], points.y[i]]
        for i in range(points.n)
    ]
    _write_rows(path, POINTS_COLUMNS, rows)


# --- config files -----------------------------------------------------------


def scenario_config_from_dict(raw: dict) -> ScenarioConfig:
    """Build a ScenarioConfig from parsed JSON, rejecting unknown keys."""
    known = {
        "n_values",
        "lambda_sem_values",
        "patterns",
        "reps",
        "master_seed",
        "benchmark",
        "fresh_dataset_per_rep",
        "grid",
        "sampler",
        "dgp",
    }
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}; known keys: {sorted(known)}")
    for key in ("n_values", "lambda_sem_values", "patterns", "reps", "master_seed"):
        if key not in raw:
            raise ValueError(f"config is missing required key {key!r}")

    def sub(name: str, cls, allowed: set[str], base: dict):
        section = raw.get(name, {})
        if not isinstance(section, dict):
            raise ValueError(f"config section {name!r} must be an object")
        bad = set(section) - allowed
        if bad:
            raise ValueError(f"unknown keys in config section {name!r}: {sorted(bad)}")
        try:
            return cls(**{**base, **section})
        except TypeError as exc:
            raise ValueError(f"invalid config section {name!r}: {exc}") from exc

    grid = sub("grid", GridSpec, {"resolution", "base_edge"}, {"resolution": 6})
    sampler = sub("sampler", SamplerConfig, {"n_min_per_cell", "k_ring", "q_target"}, {})
    dgp = sub(
        "dgp",
        DGPDefaults,
        {
            "beta0",
            "beta1",
            "mu_x",
            "sigma_x",
            "sigma_eps2",
            "k_w",
            "k_taylor",
            "lambda_c",
            "sigma_cluster",
        },
        {},
    )
    return ScenarioConfig(
        n_values=tuple(int(v) for v in raw["n_values"]),
        lambda_sem_values=tuple(float(v) for v in raw["lambda_sem_values"]),
        patterns=tuple(str(p) for p in raw["patterns"]),
        reps=int(raw["reps"]),
        master_seed=int(raw["master_seed"]),
        benchmark=str(raw.get("benchmark", "none")),
        fresh_dataset_per_rep=bool(raw.get("fresh_dataset_per_rep", False)),
        grid=grid,
        sampler=sampler,
        dgp=dgp,
    )


def load_scenario_config(path: str | Path) -> ScenarioConfig:
    import json

    path = Path(path)
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: top-level config must be a JSON object")
    return scenario_config_from_dict(raw)
