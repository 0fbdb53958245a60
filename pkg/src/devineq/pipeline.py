"""End-to-end analyses: per-year regional rankings joined with wage
inequality, and pooled country-level curves and color maps.

The two main paths are ``run_region_year`` (per year: shares ->
binarize -> fitness ranks; per region: between-sector Theil, average
wage, development index) and ``run_country_pooled`` (join macro panel,
inequality series, and a fitness ranking; pool across years; kernel
estimate with bands). Everything is written under one output directory
and documented in ``report.json``; identical spec and seed give
byte-identical outputs.
"""

from __future__ import annotations

import hashlib
import json
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import bipartite, development, fitness, ingest, inequality, smoothing
from .errors import DevineqError, EmptyResult, EmptyWindow, MissingColumn, MissingJoin
from .smoothing import DEFAULT_SEED
from .tableio import read_table, write_table

PAIRS_1D = ("gdp:inequality", "fitness:inequality", "cdi:inequality")
PAIRS_2D = ("fitness-gdp:capital", "fitness-gdp:inequality")


@dataclass(frozen=True)
class AnalysisSpec:
    """Everything one run needs; flags and spec-file values merge into this."""

    out_dir: str = "out"
    panel_path: str | None = None
    panel_schema: dict[str, str] | None = None
    country_panel_path: str | None = None
    country_schema: dict[str, str] | None = None
    inequality_path: str | None = None
    inequality_schema: dict[str, str] | None = None
    fitness_ranks_path: str | None = None
    delimiter: str = ","
    year_range: tuple[int, int] | None = None
    threshold: float = 1.0
    solver: fitness.SolverConfig = field(default_factory=fitness.SolverConfig)
    cdi_params: development.CDIParams = field(default_factory=development.CDIParams)
    kernel: smoothing.KernelConfig = field(default_factory=smoothing.KernelConfig)
    seed: int = DEFAULT_SEED
    pair: str = "cdi:inequality"
    windows: tuple[tuple[int, int], ...] | None = None
    fitness_col: str = "rank"  # which fitness column feeds kernel x-axes
    avg_wage_weighted: bool = True  # employment-weighted region average wage
    resume: bool = False

    def echo(self) -> dict:
        """JSON-ready resolved configuration (recorded in report.json)."""
        return {
            "out_dir": self.out_dir,
            "panel": self.panel_path,
            "panel_map": self.panel_schema or {},
            "country_panel": self.country_panel_path,
            "country_map": self.country_schema or {},
            "inequality_series": self.inequality_path,
            "inequality_map": self.inequality_schema or {},
            "fitness_ranks": self.fitness_ranks_path,
            "delimiter": self.delimiter,
            "years": list(self.year_range) if self.year_range else None,
            "threshold": self.threshold,
            "solver": {
                "value_tol": self.solver.value_tol,
                "rank_patience": self.solver.rank_patience,
                "max_iterations": self.solver.max_iterations,
            },
            "cdi": {"beta": self.cdi_params.beta, "standardize": self.cdi_params.standardize},
            "kernel": {
                "bandwidth": self.kernel.bandwidth,
                "grid_points": self.kernel.grid_points,
                "bootstrap_reps": self.kernel.bootstrap_reps,
                "band_level": self.kernel.band_level,
                "support_floor": self.kernel.support_floor,
            },
            "seed": self.seed,
            "pair": self.pair,
            "windows": [list(w) for w in self.windows] if self.windows else None,
            "fitness_col": self.fitness_col,
            "avg_wage_weighted": self.avg_wage_weighted,
        }


@dataclass(frozen=True)
class RegionYearSummary:
    region_id: str
    year: int
    fitness_value: float
    fitness_rank: int
    avg_wage: float
    avg_wage_rel: float
    theil_between_sectors: float
    cdi_raw: float
    cdi: float


@contextmanager
def _stage(year, name):
    try:
        yield
    except DevineqError as exc:
        exc.args = (f"[year {year}, stage {name}] {exc}",)
        raise


def _select_years(available: Sequence[int], year_range: tuple[int, int] | None) -> list[int]:
    if year_range is None:
        years = list(available)
    else:
        lo, hi = year_range
        if lo > hi:
            raise ValueError(f"empty year range [{lo}, {hi}]")
        years = [y for y in available if lo <= y <= hi]
    if not years:
        raise EmptyResult(f"no panel year in range {year_range} (have {list(available)})")
    return years


# --- per-year fitness with content-hash resume -------------------------

def _solve_digest(bm: bipartite.BinaryMatrix, solver: fitness.SolverConfig) -> str:
    h = hashlib.sha256()
    h.update(bm.entries.tobytes())
    h.update("\x1f".join(bm.regions).encode())
    h.update("\x1f".join(bm.sectors).encode())
    h.update(repr((solver.value_tol, solver.rank_patience, solver.max_iterations)).encode())
    return h.hexdigest()


def _write_fitness_tables(out: Path, year: int, result: fitness.FitnessResult) -> list[Path]:
    region_values = result.region_values()
    sector_values = result.sector_values()
    region_rows = [
        (rid, region_values[rid], rank)
        for rank, rid in enumerate(result.region_ranking.ids, start=1)
    ]
    sector_rows = [
        (sid, sector_values[sid], rank)
        for rank, sid in enumerate(result.sector_ranking.ids, start=1)
    ]
    meta = {
        "year": year,
        "iterations": result.iterations_used,
        "value_residual": result.value_residual,
        "converged_values": result.converged_values,
        "converged_ranks": result.converged_ranks,
    }
    paths = [
        write_table(out / "fitness" / f"{year}.csv",
                    ["id", "fitness_value", "fitness_rank"], region_rows, metadata=meta),
        write_table(out / "fitness" / f"{year}_sectors.csv",
                    ["id", "complexity_value", "complexity_rank"], sector_rows, metadata=meta),
        write_table(out / "fitness" / f"{year}_convergence.csv",
                    ["iteration", "residual", "ranks_stable"],
                    [(i, r, s) for i, r, s in result.history], metadata={"year": year}),
    ]
    return paths


def _load_cached_fitness(out: Path, year: int, entry: dict):
    _, _, region_rows = read_table(out / "fitness" / f"{year}.csv")
    _, _, sector_rows = read_table(out / "fitness" / f"{year}_sectors.csv")
    region_values = {rid: float(v) for rid, v, _ in region_rows}
    sector_values = {sid: float(v) for sid, v, _ in sector_rows}
    return {
        "region_values": region_values,
        "sector_values": sector_values,
        "region_ranking": tuple(rid for rid, _, _ in region_rows),
        "sector_ranking": tuple(sid for sid, _, _ in sector_rows),
        "iterations": int(entry["iterations"]),
        "residual": float(entry["residual"]),
        "converged_values": bool(entry["converged_values"]),
        "converged_ranks": bool(entry["converged_ranks"]),
    }


def _solve_year(
    bm: bipartite.BinaryMatrix,
    spec: AnalysisSpec,
    out: Path,
    manifest: dict,
    year: int,
) -> dict:
    """Solve (or reload) one year's fixed point; returns a plain dict so
    cache hits and fresh solves are indistinguishable downstream."""
    digest = _solve_digest(bm, spec.solver)
    key = f"fitness:{year}"
    cached = manifest.get(key)
    files_exist = all(
        (out / "fitness" / name).exists()
        for name in (f"{year}.csv", f"{year}_sectors.csv", f"{year}_convergence.csv")
    )
    if spec.resume and cached and cached.get("digest") == digest and files_exist:
        return _load_cached_fitness(out, year, cached)

    result = fitness.solve(bm, spec.solver)
    _write_fitness_tables(out, year, result)
    manifest[key] = {
        "digest": digest,
        "iterations": result.iterations_used,
        "residual": result.value_residual,
        "converged_values": result.converged_values,
        "converged_ranks": result.converged_ranks,
    }
    return {
        "region_values": result.region_values(),
        "sector_values": result.sector_values(),
        "region_ranking": result.region_ranking.ids,
        "sector_ranking": result.sector_ranking.ids,
        "iterations": result.iterations_used,
        "residual": result.value_residual,
        "converged_values": result.converged_values,
        "converged_ranks": result.converged_ranks,
    }


def _region_average_wages(
    panel: bipartite.WeightedBipartitePanel, year: int, weighted: bool
) -> dict[str, float]:
    w = panel.wage_slice(year)
    e = panel.employment_slice(year)
    out = {}
    for i, rid in enumerate(panel.regions):
        total_emp = e[i].sum()
        if total_emp <= 0:
            continue
        if weighted:
            out[rid] = float(w[i].sum() / total_emp)
        else:
            active = e[i] > 0
            out[rid] = float((w[i][active] / e[i][active]).mean())
    return out


def run_region_year(
    spec: AnalysisSpec, panel: bipartite.WeightedBipartitePanel | None = None
) -> tuple[list[RegionYearSummary], dict]:
    """The regional study: fitness ranks, between-sector Theil, average
    wages, and the development index, one row per surviving (region, year).

    Writes matrices/<year>.csv (rank-sorted binary grid), fitness tables,
    theil/<year>.csv, and summary.csv under the output directory, and
    returns the summary rows plus a report fragment (prune lists,
    convergence diagnostics, join accounting).
    """
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.json"
    manifest = json.loads(manifest_path.read_text()) if manifest_path.exists() else {}

    if panel is None:
        if spec.panel_path is None:
            raise ValueError("no panel given (spec.panel_path is unset)")
        load = ingest.load_region_sector_panel(
            spec.panel_path, spec.panel_schema, spec.delimiter
        )
        panel = load.panel
    years = _select_years(panel.years, spec.year_range)

    per_year: dict[int, dict] = {}
    monetary_rows: list[tuple[str, int, float]] = []
    theil_by_key: dict[tuple[str, int], float] = {}
    value_by_key: dict[tuple[str, int], float] = {}
    rank_by_key: dict[tuple[str, int], int] = {}
    dropped: list[tuple[str, int, str]] = []

    for year in years:
        with _stage(year, "rca"):
            rca_m = bipartite.rca(panel, year)
        with _stage(year, "binarize"):
            bm = bipartite.binarize(rca_m, spec.threshold)
        with _stage(year, "fitness"):
            solved = _solve_year(bm, spec, out, manifest, year)
        region_rank = {rid: k for k, rid in enumerate(solved["region_ranking"], start=1)}

        with _stage(year, "matrix-export"):
            sorted_m = bipartite.sort_by_rank(
                bm, solved["region_ranking"], solved["sector_ranking"]
            )
            bipartite.write_dense_grid(sorted_m, out / "matrices" / f"{year}.csv")

        with _stage(year, "theil"):
            avg_wages = _region_average_wages(panel, year, spec.avg_wage_weighted)
            e_slice = panel.employment_slice(year)
            avg_cell = panel.average_wage(year)
            region_index = {rid: i for i, rid in enumerate(panel.regions)}
            theil_rows = []
            for rid in bm.regions:
                i = region_index[rid]
                if rid not in avg_wages or avg_wages[rid] <= 0:
                    dropped.append((rid, year, "no positive average wage"))
                    continue
                table = inequality.SectorWageTable(
                    sectors=panel.sectors, employment=e_slice[i], avg_wage=avg_cell[i]
                )
                t_between = inequality.between_sector_theil(table)
                theil_by_key[(rid, year)] = t_between
                value_by_key[(rid, year)] = solved["region_values"][rid]
                rank_by_key[(rid, year)] = region_rank[rid]
                monetary_rows.append((rid, year, avg_wages[rid]))
                theil_rows.append((rid, year, t_between))
            write_table(
                out / "theil" / f"{year}.csv",
                ["region_id", "year", "theil_between_sectors"], theil_rows,
                metadata={"year": year},
            )

        per_year[year] = {
            "pruned_regions": list(bm.pruned_regions),
            "pruned_sectors": list(bm.pruned_sectors),
            "n_regions": bm.shape[0],
            "n_sectors": bm.shape[1],
            "iterations": solved["iterations"],
            "value_residual": solved["residual"],
            "converged_values": solved["converged_values"],
            "converged_ranks": solved["converged_ranks"],
        }

    with _stage("all", "cdi"):
        monetary = development.relative_monetary(monetary_rows)
        monetary_map = {(m.unit_id, m.year): m for m in monetary}
        joined, join_report = development.join_development_inputs(rank_by_key, monetary_map)
        dev_records = development.cdi(joined, spec.cdi_params)

    summary = []
    for rec in dev_records:
        key = (rec.unit_id, rec.year)
        summary.append(
            RegionYearSummary(
                region_id=rec.unit_id, year=rec.year,
                fitness_value=value_by_key[key], fitness_rank=rec.fitness_rank,
                avg_wage=rec.monetary, avg_wage_rel=rec.monetary_rel,
                theil_between_sectors=theil_by_key[key],
                cdi_raw=rec.cdi_raw, cdi=rec.cdi,
            )
        )
    summary.sort(key=lambda r: (r.year, r.region_id))
    write_table(
        out / "summary.csv",
        ["region_id", "year", "fitness_value", "fitness_rank", "avg_wage",
         "avg_wage_rel", "theil_between_sectors", "cdi_raw", "cdi"],
        [(r.region_id, r.year, r.fitness_value, r.fitness_rank, r.avg_wage,
          r.avg_wage_rel, r.theil_between_sectors, r.cdi_raw, r.cdi) for r in summary],
        metadata={"beta": spec.cdi_params.beta, "threshold": spec.threshold},
    )
    measure_rows = []
    for r in summary:
        for measure, value in (
            ("theil_between_sectors", r.theil_between_sectors),
            ("avg_wage", r.avg_wage),
            ("avg_wage_rel", r.avg_wage_rel),
            ("fitness_value", r.fitness_value),
            ("fitness_rank", r.fitness_rank),
            ("cdi", r.cdi),
        ):
            measure_rows.append((r.region_id, r.year, measure, value))
    write_table(
        out / "measures.csv", ["unit_id", "year", "measure", "value"], measure_rows,
        metadata={"beta": spec.cdi_params.beta, "threshold": spec.threshold},
    )
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2))

    report = {
        "years": {str(y): per_year[y] for y in years},
        "dropped_regions": [list(d) for d in sorted(dropped)],
        "join": {
            "kept": len(join_report.kept),
            "dropped": [list(d) for d in join_report.dropped],
        },
        "rows": len(summary),
    }
    return summary, report


# --- country-level pooled analyses --------------------------------------

def load_fitness_ranks(path: str | Path) -> tuple[dict, dict]:
    """Read an externally supplied ranking table.

    Expected columns: unit_id, year, fitness_rank, and optionally
    fitness_value (may be blank; strongly triangular matrices admit
    rankings but not values). Returns (ranks, values) keyed (unit, year).
    """
    _, columns, rows = read_table(path)
    required = {"unit_id", "year", "fitness_rank"}
    if not required <= set(columns):
        raise MissingColumn(
            f"fitness ranks table needs columns {sorted(required)}, found {columns}"
        )
    pos = {name: columns.index(name) for name in columns}
    ranks: dict[tuple[str, int], int] = {}
    values: dict[tuple[str, int], float] = {}
    for cells in rows:
        key = (cells[pos["unit_id"]], int(cells[pos["year"]]))
        ranks[key] = int(cells[pos["fitness_rank"]])
        if "fitness_value" in pos and cells[pos["fitness_value"]] != "":
            values[key] = float(cells[pos["fitness_value"]])
    return ranks, values


def _rank_quantile(ranks: Mapping[tuple[str, int], int]) -> dict[tuple[str, int], float]:
    # per-year (n - rank + 1)/n in (0, 1]: monotone with fitness and
    # comparable across years whose unit counts differ
    n_by_year: dict[int, int] = {}
    for (_, year), r in ranks.items():
        n_by_year[year] = max(n_by_year.get(year, 0), r)
    return {
        key: (n_by_year[key[1]] - r + 1) / n_by_year[key[1]] for key, r in ranks.items()
    }


@dataclass(frozen=True)
class PooledOutput:
    estimate: smoothing.KernelEstimate
    observations: list[tuple[str, int, tuple[float, ...], float]]  # (unit, year, x, y)
    report: dict


def _pair_sources(pair: str) -> tuple[bool, bool, bool]:
    """(needs_country, needs_ranks, needs_inequality) for a pair."""
    if pair not in PAIRS_1D + PAIRS_2D:
        raise ValueError(f"unknown pair '{pair}' (know {PAIRS_1D + PAIRS_2D})")
    x_part, y_part = pair.split(":")
    needs_country = "gdp" in x_part or y_part == "capital"
    needs_ranks = "fitness" in x_part or x_part == "cdi"
    needs_inequality = y_part == "inequality"
    if x_part == "cdi":
        needs_country = True
    return needs_country, needs_ranks, needs_inequality


def assemble_pooled_observations(
    spec: AnalysisSpec,
    country: Sequence[ingest.CountryYearRecord] | None = None,
    inequality_series: Sequence[ingest.InequalitySeriesRecord] | None = None,
    ranks: Mapping[tuple[str, int], int] | None = None,
    fitness_values: Mapping[tuple[str, int], float] | None = None,
) -> tuple[list[tuple[str, int, tuple[float, ...], float]], dict]:
    """Join the inputs a pair needs and pool observations over the years.

    Raises MissingJoin (with the full unmatched pair list) when the
    intersection of the required inputs is empty.
    """
    needs_country, needs_ranks, needs_inequality = _pair_sources(spec.pair)

    if needs_country and country is None:
        if spec.country_panel_path is None:
            raise ValueError(f"pair '{spec.pair}' needs a country panel")
        country = ingest.load_country_panel(
            spec.country_panel_path, spec.country_schema, spec.delimiter
        ).records
    if needs_inequality and inequality_series is None:
        if spec.inequality_path is None:
            raise ValueError(f"pair '{spec.pair}' needs an inequality series")
        inequality_series = ingest.load_inequality_series(
            spec.inequality_path, spec.inequality_schema, spec.delimiter
        ).records
    if needs_ranks and ranks is None:
        if spec.fitness_ranks_path is None:
            raise ValueError(
                f"pair '{spec.pair}' needs a fitness ranking (--fitness-ranks table)"
            )
        ranks, loaded_values = load_fitness_ranks(spec.fitness_ranks_path)
        fitness_values = fitness_values or loaded_values

    country_map = {(r.country_id, r.year): r for r in (country or [])}
    ineq_map = {(r.country_id, r.year): r.theil_value for r in (inequality_series or [])}

    sources: list[set] = []
    if needs_country:
        sources.append(set(country_map))
    if needs_ranks:
        sources.append(set(ranks))
    if needs_inequality:
        sources.append(set(ineq_map))
    universe = set.union(*sources)
    keys = set.intersection(*sources)
    if spec.year_range is not None:
        lo, hi = spec.year_range
        keys = {k for k in keys if lo <= k[1] <= hi}
    if not keys:
        raise MissingJoin(sorted(universe))

    x_part, y_part = spec.pair.split(":")
    report = {
        "pair": spec.pair,
        "joinable": len(universe),
        "kept": len(keys),
        "dropped": [list(k) for k in sorted(universe - keys)],
    }

    gdp_rel: dict[tuple[str, int], float] = {}
    if needs_country:
        rows = [(cid, year, country_map[(cid, year)].gdp_pc) for cid, year in sorted(keys)]
        gdp_rel = {
            (m.unit_id, m.year): m.monetary_rel
            for m in development.relative_monetary(rows)
        }

    fitness_x: dict[tuple[str, int], float] = {}
    if needs_ranks:
        if spec.fitness_col == "value":
            if not fitness_values:
                raise ValueError("fitness_col='value' but the ranking table has no values")
            fitness_x = dict(fitness_values)
        else:
            fitness_x = _rank_quantile(ranks)

    cdi_x: dict[tuple[str, int], float] = {}
    if x_part == "cdi":
        joined = [
            development.CDIInput(
                unit_id=cid, year=year, fitness_rank=ranks[(cid, year)],
                monetary=country_map[(cid, year)].gdp_pc, monetary_rel=gdp_rel[(cid, year)],
            )
            for cid, year in sorted(keys)
        ]
        cdi_x = {
            (rec.unit_id, rec.year): rec.cdi
            for rec in development.cdi(joined, spec.cdi_params)
        }

    observations = []
    for cid, year in sorted(keys):
        key = (cid, year)
        if x_part == "gdp":
            x = (gdp_rel[key],)
        elif x_part == "fitness":
            x = (fitness_x[key],)
        elif x_part == "cdi":
            x = (cdi_x[key],)
        elif x_part == "fitness-gdp":
            x = (fitness_x[key], gdp_rel[key])
        y = ineq_map[key] if y_part == "inequality" else country_map[key].capital_share
        observations.append((cid, year, x, y))
    return observations, report


def _pair_filename(pair: str) -> str:
    x_part, y_part = pair.split(":")
    return f"{y_part}_vs_{x_part}"


def run_country_pooled(
    spec: AnalysisSpec,
    country=None,
    inequality_series=None,
    ranks=None,
    fitness_values=None,
) -> PooledOutput:
    """Pool all countries and years for the requested pair and smooth it.

    1D pairs get a bootstrap-banded curve under curves/; 2D pairs get a
    color-map grid under grids/.
    """
    observations, report = assemble_pooled_observations(
        spec, country, inequality_series, ranks, fitness_values
    )
    x = np.array([obs[2] for obs in observations])
    y = np.array([obs[3] for obs in observations])
    out = Path(spec.out_dir)
    name = _pair_filename(spec.pair)
    kernel = replace(spec.kernel, seed=spec.seed)

    write_table(
        out / "pooled" / f"{name}.csv",
        ["unit_id", "year", *(f"x{i+1}" for i in range(x.shape[1])), "y"],
        [(u, yr, *xs, yv) for u, yr, xs, yv in observations],
        metadata={"pair": spec.pair, "observations": len(observations)},
    )
    if spec.pair in PAIRS_2D:
        estimate = smoothing.colormap_grid(x, y, kernel)
        smoothing.write_grid(estimate, out / "grids" / f"{name}.csv")
    else:
        estimate = smoothing.bootstrap_bands(x[:, 0], y, kernel)
        smoothing.write_curve(estimate, out / "curves" / f"{name}.csv")
    report["observations"] = len(observations)
    return PooledOutput(estimate=estimate, observations=observations, report=report)


def run_time_windows(
    spec: AnalysisSpec,
    windows: Sequence[tuple[int, int]] | None = None,
    country=None,
    inequality_series=None,
    ranks=None,
    fitness_values=None,
) -> list[PooledOutput]:
    """One pooled kernel curve per time window, for trend-reversal reading."""
    windows = tuple(windows if windows is not None else (spec.windows or ()))
    if not windows:
        raise ValueError("no time windows given")
    outputs = []
    for lo, hi in windows:
        window_spec = replace(spec, year_range=(lo, hi))
        try:
            observations, report = assemble_pooled_observations(
                window_spec, country, inequality_series, ranks, fitness_values
            )
        except MissingJoin as exc:
            raise EmptyWindow(f"window [{lo}, {hi}] has no observations") from exc
        x = np.array([obs[2] for obs in observations])
        y = np.array([obs[3] for obs in observations])
        if spec.pair in PAIRS_2D:
            raise ValueError("time windows are defined for 1D pairs only")
        kernel = replace(spec.kernel, seed=spec.seed)
        estimate = smoothing.bootstrap_bands(x[:, 0], y, kernel)
        name = f"{_pair_filename(spec.pair)}_{lo}-{hi}"
        smoothing.write_curve(estimate, Path(spec.out_dir) / "curves" / f"{name}.csv")
        report["window"] = [lo, hi]
        outputs.append(PooledOutput(estimate=estimate, observations=observations, report=report))
    return outputs


# --- the whole thing -----------------------------------------------------

def _summary_curves(spec: AnalysisSpec, summary: list[RegionYearSummary]) -> dict:
    """Kernel fits over the pooled regional summary (inequality against
    the development coordinates), mirroring the cross-year curves."""
    out = Path(spec.out_dir)
    kernel = replace(spec.kernel, seed=spec.seed)
    report = {}
    theil = np.array([r.theil_between_sectors for r in summary])
    for name, xs in (
        ("theil_vs_cdi", np.array([r.cdi for r in summary])),
        ("theil_vs_avg_wage", np.array([r.avg_wage_rel for r in summary])),
    ):
        estimate = smoothing.bootstrap_bands(xs, theil, kernel)
        smoothing.write_curve(estimate, out / "curves" / f"{name}.csv")
        report[name] = {"observations": len(summary)}
    # fitness x wage plane, the regional analogue of the capital-share map
    ranks = {(r.region_id, r.year): r.fitness_rank for r in summary}
    quantile = _rank_quantile(ranks)
    x2 = np.array(
        [[quantile[(r.region_id, r.year)], r.avg_wage_rel] for r in summary]
    )
    estimate = smoothing.colormap_grid(x2, theil, kernel)
    smoothing.write_grid(estimate, out / "grids" / "theil_vs_fitness-wage.csv")
    report["theil_vs_fitness-wage"] = {"observations": len(summary)}
    return report


def run_all(spec: AnalysisSpec) -> dict:
    """Run every analysis the spec's inputs allow and write report.json.

    Regional panel -> per-year tables, summary, and summary curves;
    country panel (+ inequality series / rankings) -> pooled pair curve
    or grid, plus per-window curves when windows are set.
    """
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report: dict = {"config": spec.echo(), "stages": {}}

    if spec.panel_path is not None:
        summary, region_report = run_region_year(spec)
        report["stages"]["region_year"] = region_report
        if len(summary) >= 2:
            report["stages"]["summary_curves"] = _summary_curves(spec, summary)

    wants_pooled = spec.country_panel_path is not None and (
        spec.inequality_path is not None or spec.pair.endswith(":capital")
    )
    if wants_pooled:
        pooled = run_country_pooled(spec)
        report["stages"]["country_pooled"] = pooled.report
        if spec.windows:
            window_outputs = run_time_windows(spec)
            report["stages"]["windows"] = [o.report for o in window_outputs]

    if not report["stages"]:
        raise ValueError("spec provides no inputs to analyze")

    report_path = out / "report.json"
    report_path.write_text(json.dumps(report, sort_keys=True, indent=2))
    return report
