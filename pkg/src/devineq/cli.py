"""Command-line front end: every pipeline analysis as a subcommand.

Exit codes: 0 success, 1 input error (bad flags, unreadable or invalid
files, empty joins), 2 numeric failure (non-convergence, degenerate
matrices, underflow). Each run echoes its fully resolved configuration
to stderr, prints one line per artifact written to stdout, and sends
per-row ingest diagnostics to stderr.

All randomness flows from --seed; without the flag a fixed default
(12345) is used, never environment entropy. For run-all, a TOML spec
file can replace the flags; explicit flags override file values.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import bipartite, development, fitness, ingest, inequality, pipeline, smoothing
from .errors import InputError, NumericError
from .smoothing import DEFAULT_SEED
from .tableio import write_table

_DEFAULTS = {
    "threshold": 1.0,
    "beta": 0.5,
    "reps": 1000,
    "level": 0.9,
    "grid": 200,
    "seed": DEFAULT_SEED,
    "out": "out",
    "delimiter": ",",
    "pair": "cdi:inequality",
    "fitness_col": "rank",
}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_common(p: _Parser, *names: str) -> None:
    if "panel" in names:
        p.add_argument("--panel", help="region-sector wage/employment panel (CSV)")
    if "country-panel" in names:
        p.add_argument("--country-panel", dest="country_panel",
                       help="country-year macro panel (CSV)")
    if "inequality-series" in names:
        p.add_argument("--inequality-series", dest="inequality_series",
                       help="country-year inequality coefficient series (CSV)")
    if "fitness-ranks" in names:
        p.add_argument("--fitness-ranks", dest="fitness_ranks",
                       help="externally computed ranking table (unit_id,year,fitness_rank[,fitness_value])")
    if "map" in names:
        p.add_argument("--map", action="append", default=[], metavar="FIELD=COLUMN",
                       help="map a canonical field onto a file column; repeatable (default: identity)")
    if "year" in names:
        p.add_argument("--year", type=int, help="single year to process")
    if "years" in names:
        p.add_argument("--years", metavar="A:B", help="inclusive year range (default: all years)")
    if "threshold" in names:
        p.add_argument("--threshold", type=float, default=_DEFAULTS["threshold"],
                       help="presence threshold on the share ratio (default: %(default)s)")
    if "beta" in names:
        p.add_argument("--beta", type=float, default=_DEFAULTS["beta"],
                       help="weight of the fitness-rank term in the development index (default: %(default)s)")
    if "bandwidth" in names:
        p.add_argument("--bandwidth", type=float, default=None,
                       help="kernel bandwidth (default: Silverman rule per predictor)")
    if "reps" in names:
        p.add_argument("--reps", type=int, default=_DEFAULTS["reps"],
                       help="bootstrap replicates (default: %(default)s)")
    if "level" in names:
        p.add_argument("--level", type=float, default=_DEFAULTS["level"],
                       help="confidence band coverage (default: %(default)s)")
    if "grid" in names:
        p.add_argument("--grid", type=int, default=_DEFAULTS["grid"],
                       help="grid points per predictor (default: %(default)s)")
    if "avg-wage" in names:
        p.add_argument("--unweighted-avg-wage", dest="unweighted_avg_wage",
                       action="store_true", default=False,
                       help="region average wage as the unweighted sector mean instead "
                            "of total wages over total employment (default: weighted)")
    if "seed" in names:
        p.add_argument("--seed", type=int, default=_DEFAULTS["seed"],
                       help="seed for all randomness (default: %(default)s)")
    if "delimiter" in names:
        p.add_argument("--delimiter", default=_DEFAULTS["delimiter"],
                       help="field delimiter of input files (default: '%(default)s')")
    p.add_argument("--out", default=_DEFAULTS["out"],
                   help="output directory (default: %(default)s)")


def build_parser() -> _Parser:
    parser = _Parser(prog="devineq", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest-check",
                       help="validate an input file, reporting every rejected row")
    p.add_argument("--kind", choices=["panel", "country", "inequality"], default="panel",
                   help="which panel family the file belongs to (default: %(default)s)")
    p.add_argument("--panel", required=True, help="file to check")
    _add_common(p, "map", "delimiter")

    p = sub.add_parser("rca",
                       help="share-ratio (revealed comparative advantage) matrix for one year")
    _add_common(p, "panel", "map", "year", "delimiter")

    p = sub.add_parser("binarize",
                       help="threshold a year slice into a pruned 0/1 matrix")
    _add_common(p, "panel", "map", "year", "threshold", "delimiter")

    p = sub.add_parser("fitness",
                       help="fitness/complexity values and rankings per year")
    _add_common(p, "panel", "map", "year", "years", "threshold", "delimiter")

    p = sub.add_parser("theil",
                       help="between-sector wage inequality per region-year")
    _add_common(p, "panel", "map", "year", "years", "delimiter")

    p = sub.add_parser("cdi",
                       help="comparative development index per region-year")
    _add_common(p, "panel", "map", "year", "years", "threshold", "beta", "avg-wage",
                "delimiter")

    p = sub.add_parser("curve",
                       help="pooled 1D kernel curve with bootstrap bands")
    _add_common(p, "country-panel", "inequality-series", "fitness-ranks", "map",
                "years", "beta", "bandwidth", "reps", "level", "grid", "seed", "delimiter")
    p.add_argument("--pair", default=_DEFAULTS["pair"], choices=pipeline.PAIRS_1D,
                   help="x:y pooled pair (default: %(default)s)")
    p.add_argument("--fitness-col", dest="fitness_col", choices=["rank", "value"],
                   default=_DEFAULTS["fitness_col"],
                   help="fitness axis: per-year rank quantile or raw value (default: %(default)s)")

    p = sub.add_parser("colormap",
                       help="pooled 2D kernel color-map grid")
    _add_common(p, "country-panel", "inequality-series", "fitness-ranks", "map",
                "years", "bandwidth", "reps", "level", "grid", "seed", "delimiter")
    p.add_argument("--pair", default="fitness-gdp:capital", choices=pipeline.PAIRS_2D,
                   help="x1-x2:y pooled pair (default: %(default)s)")
    p.add_argument("--fitness-col", dest="fitness_col", choices=["rank", "value"],
                   default=_DEFAULTS["fitness_col"],
                   help="fitness axis: per-year rank quantile or raw value (default: %(default)s)")

    p = sub.add_parser("windows",
                       help="one pooled curve per time window")
    _add_common(p, "country-panel", "inequality-series", "fitness-ranks", "map",
                "beta", "bandwidth", "reps", "level", "grid", "seed", "delimiter")
    p.add_argument("--pair", default=_DEFAULTS["pair"], choices=pipeline.PAIRS_1D,
                   help="x:y pooled pair (default: %(default)s)")
    p.add_argument("--fitness-col", dest="fitness_col", choices=["rank", "value"],
                   default=_DEFAULTS["fitness_col"],
                   help="fitness axis: per-year rank quantile or raw value (default: %(default)s)")
    p.add_argument("--windows", required=True, metavar="A:B,C:D,...",
                   help="comma-separated inclusive year intervals")

    p = sub.add_parser("run-all",
                       help="every analysis the inputs allow, plus report.json")
    _add_common(p, "panel", "country-panel", "inequality-series", "fitness-ranks", "map",
                "years", "threshold", "beta", "avg-wage", "bandwidth", "reps", "level",
                "grid", "seed", "delimiter")
    p.add_argument("--pair", default=_DEFAULTS["pair"],
                   choices=pipeline.PAIRS_1D + pipeline.PAIRS_2D,
                   help="pooled pair for the country stage (default: %(default)s)")
    p.add_argument("--fitness-col", dest="fitness_col", choices=["rank", "value"],
                   default=_DEFAULTS["fitness_col"],
                   help="fitness axis: per-year rank quantile or raw value (default: %(default)s)")
    p.add_argument("--windows", metavar="A:B,C:D,...",
                   help="comma-separated inclusive year intervals (optional)")
    p.add_argument("--spec", help="TOML file supplying any of the above; flags override it")
    return parser


def _parse_map(pairs: list[str]) -> dict[str, str]:
    schema = {}
    for pair in pairs:
        if "=" not in pair:
            raise InputError(f"--map expects FIELD=COLUMN, got '{pair}'")
        field, _, column = pair.partition("=")
        schema[field.strip()] = column.strip()
    return schema


def _parse_years(text: str | None) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        lo, _, hi = text.partition(":")
        return (int(lo), int(hi))
    except ValueError:
        raise InputError(f"--years expects A:B, got '{text}'") from None


def _parse_windows(text: str | None) -> tuple[tuple[int, int], ...] | None:
    if text is None:
        return None
    windows = []
    for chunk in text.split(","):
        rng = _parse_years(chunk.strip())
        if rng is None:
            raise InputError(f"bad window '{chunk}'")
        windows.append(rng)
    return tuple(windows)


def _year_selector(args) -> tuple[int, int] | None:
    if getattr(args, "year", None) is not None:
        return (args.year, args.year)
    return _parse_years(getattr(args, "years", None))


def _spec_from_args(args) -> pipeline.AnalysisSpec:
    schema = _parse_map(getattr(args, "map", []) or [])
    kernel = smoothing.KernelConfig(
        bandwidth=getattr(args, "bandwidth", None),
        grid_points=getattr(args, "grid", _DEFAULTS["grid"]),
        bootstrap_reps=getattr(args, "reps", _DEFAULTS["reps"]),
        band_level=getattr(args, "level", _DEFAULTS["level"]),
        seed=getattr(args, "seed", _DEFAULTS["seed"]),
    )
    return pipeline.AnalysisSpec(
        out_dir=args.out,
        panel_path=getattr(args, "panel", None),
        panel_schema=schema or None,
        country_panel_path=getattr(args, "country_panel", None),
        country_schema=schema or None,
        inequality_path=getattr(args, "inequality_series", None),
        inequality_schema=schema or None,
        fitness_ranks_path=getattr(args, "fitness_ranks", None),
        delimiter=getattr(args, "delimiter", ","),
        year_range=_year_selector(args),
        threshold=getattr(args, "threshold", _DEFAULTS["threshold"]),
        cdi_params=development.CDIParams(beta=getattr(args, "beta", _DEFAULTS["beta"])),
        kernel=kernel,
        seed=getattr(args, "seed", _DEFAULTS["seed"]),
        pair=getattr(args, "pair", _DEFAULTS["pair"]),
        windows=_parse_windows(getattr(args, "windows", None)),
        fitness_col=getattr(args, "fitness_col", _DEFAULTS["fitness_col"]),
        avg_wage_weighted=not getattr(args, "unweighted_avg_wage", False),
    )


def _explicit_flags(argv: list[str] | None) -> set[str]:
    """Which run-all flags the user actually typed (so they beat the file)."""
    probe = build_parser()
    sub_action = probe._subparsers._group_actions[0]
    for action in sub_action.choices["run-all"]._actions:
        if action.dest != "help":
            action.default = argparse.SUPPRESS
    try:
        ns = probe.parse_args(argv if argv is not None else sys.argv[1:])
    except SystemExit:
        return set()
    return set(vars(ns)) - {"command"}


def _merge_spec_file(args, explicit: set[str]) -> None:
    """Fill args from the TOML spec file; typed flags keep priority."""
    with open(args.spec, "rb") as fh:
        data = tomllib.load(fh)
    flat: dict[str, object] = {}
    for section in ("inputs", "params", "output"):
        flat.update(data.get(section, {}))
    flat.update({k: v for k, v in data.items() if not isinstance(v, dict)})
    renames = {
        "country-panel": "country_panel", "inequality-series": "inequality_series",
        "fitness-ranks": "fitness_ranks", "fitness-col": "fitness_col", "dir": "out",
    }
    known = set(vars(args))
    for key, value in flat.items():
        dest = renames.get(key, key.replace("-", "_"))
        if dest not in known:
            raise InputError(f"spec file sets unknown key '{key}'")
        if dest == "map" and isinstance(value, dict):
            value = [f"{k}={v}" for k, v in value.items()]
        if dest not in explicit:
            setattr(args, dest, value)


def _echo_config(spec: pipeline.AnalysisSpec) -> None:
    for key, value in spec.echo().items():
        print(f"# {key} = {value}", file=sys.stderr)


def _echo_args(args) -> None:
    for key in sorted(vars(args)):
        if key not in ("command", "spec"):
            print(f"# {key} = {getattr(args, key)}", file=sys.stderr)


def _print_artifacts(out_dir: str | Path, before: set[Path]) -> None:
    written = sorted(p for p in Path(out_dir).rglob("*") if p.is_file() and p not in before)
    for path in written:
        print(f"wrote {path}")


def _run_ingest_check(args) -> int:
    loaders = {
        "panel": ingest.load_region_sector_panel,
        "country": ingest.load_country_panel,
        "inequality": ingest.load_inequality_series,
    }
    result = loaders[args.kind](args.panel, _parse_map(args.map) or None, args.delimiter)
    for diag in result.diagnostics:
        print(str(diag), file=sys.stderr)
    print(
        f"{args.panel}: {result.total_rows} rows, {result.accepted} accepted, "
        f"{result.rejected} rejected"
    )
    return 0 if result.rejected == 0 else 1


def _load_panel(args):
    schema = _parse_map(args.map) or None
    result = ingest.load_region_sector_panel(args.panel, schema, args.delimiter)
    for diag in result.diagnostics:
        print(str(diag), file=sys.stderr)
    return result.panel


def _years_for(panel, args) -> list[int]:
    selector = _year_selector(args)
    if selector is None:
        return list(panel.years)
    lo, hi = selector
    years = [y for y in panel.years if lo <= y <= hi]
    if not years:
        raise InputError(f"no panel year in [{lo}, {hi}] (have {list(panel.years)})")
    return years


def _run_rca(args) -> int:
    panel = _load_panel(args)
    for year in _years_for(panel, args):
        matrix = bipartite.rca(panel, year)
        rows = [
            [rid, *(float(v) for v in matrix.values[i])]
            for i, rid in enumerate(matrix.regions)
        ]
        path = write_table(
            Path(args.out) / "rca" / f"{year}.csv",
            ["region", *matrix.sectors], rows, metadata={"year": year},
        )
        print(f"wrote {path}")
    return 0


def _run_binarize(args) -> int:
    panel = _load_panel(args)
    for year in _years_for(panel, args):
        bm = bipartite.binarize(bipartite.rca(panel, year), args.threshold)
        out = Path(args.out) / "matrices"
        grid = bipartite.write_dense_grid(bm, out / f"{year}.csv")
        edges = bipartite.write_edge_list(bm, out / f"{year}_edges.csv")
        if bm.pruned_regions or bm.pruned_sectors:
            print(
                f"year {year}: pruned {len(bm.pruned_regions)} region(s) "
                f"{list(bm.pruned_regions)}, {len(bm.pruned_sectors)} sector(s) "
                f"{list(bm.pruned_sectors)}",
                file=sys.stderr,
            )
        print(f"wrote {grid}")
        print(f"wrote {edges}")
    return 0


def _run_fitness(args) -> int:
    spec = _spec_from_args(args)
    panel = _load_panel(args)
    out = Path(args.out)
    for year in _years_for(panel, args):
        bm = bipartite.binarize(bipartite.rca(panel, year), args.threshold)
        result = fitness.solve(bm, spec.solver)
        for path in pipeline._write_fitness_tables(out, year, result):
            print(f"wrote {path}")
    return 0


def _run_theil(args) -> int:
    panel = _load_panel(args)
    out = Path(args.out)
    for year in _years_for(panel, args):
        e_slice = panel.employment_slice(year)
        avg_cell = panel.average_wage(year)
        rows = []
        for i, rid in enumerate(panel.regions):
            if e_slice[i].sum() <= 0:
                continue
            table = inequality.SectorWageTable(
                sectors=panel.sectors, employment=e_slice[i], avg_wage=avg_cell[i]
            )
            rows.append((rid, year, inequality.between_sector_theil(table)))
        path = write_table(
            out / "theil" / f"{year}.csv",
            ["region_id", "year", "theil_between_sectors"], rows, metadata={"year": year},
        )
        print(f"wrote {path}")
    return 0


def _run_cdi(args) -> int:
    spec = _spec_from_args(args)
    summary, report = pipeline.run_region_year(spec)
    for unit, year, reason in report["join"]["dropped"]:
        print(f"dropped ({unit}, {year}): {reason}", file=sys.stderr)
    path = write_table(
        Path(args.out) / "cdi.csv",
        ["unit_id", "year", "fitness_rank", "monetary", "monetary_rel",
         "cdi_raw", "cdi_standardized"],
        [(r.region_id, r.year, r.fitness_rank, r.avg_wage, r.avg_wage_rel, r.cdi_raw, r.cdi)
         for r in summary],
        metadata={"beta": spec.cdi_params.beta, "standardize": spec.cdi_params.standardize},
    )
    print(f"wrote {path}")
    return 0


def _run_curve(args) -> int:
    spec = _spec_from_args(args)
    pipeline.run_country_pooled(spec)
    name = pipeline._pair_filename(spec.pair)
    print(f"wrote {Path(args.out) / 'pooled' / (name + '.csv')}")
    print(f"wrote {Path(args.out) / 'curves' / (name + '.csv')}")
    return 0


def _run_colormap(args) -> int:
    spec = _spec_from_args(args)
    pipeline.run_country_pooled(spec)
    name = pipeline._pair_filename(spec.pair)
    print(f"wrote {Path(args.out) / 'pooled' / (name + '.csv')}")
    print(f"wrote {Path(args.out) / 'grids' / (name + '.csv')}")
    return 0


def _run_windows(args) -> int:
    spec = _spec_from_args(args)
    outputs = pipeline.run_time_windows(spec)
    for output in outputs:
        lo, hi = output.report["window"]
        name = f"{pipeline._pair_filename(spec.pair)}_{lo}-{hi}"
        print(f"wrote {Path(args.out) / 'curves' / (name + '.csv')}")
    return 0


def _run_all(args, argv) -> int:
    if getattr(args, "spec", None):
        _merge_spec_file(args, _explicit_flags(argv))
    spec = _spec_from_args(args)
    before = {p for p in Path(args.out).rglob("*") if p.is_file()} if Path(args.out).exists() else set()
    _echo_config(spec)
    pipeline.run_all(spec)
    _print_artifacts(args.out, before)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    handlers = {
        "ingest-check": _run_ingest_check,
        "rca": _run_rca,
        "binarize": _run_binarize,
        "fitness": _run_fitness,
        "theil": _run_theil,
        "cdi": _run_cdi,
        "curve": _run_curve,
        "colormap": _run_colormap,
        "windows": _run_windows,
    }
    try:
        if args.command == "run-all":
            return _run_all(args, argv)
        _echo_args(args)
        return handlers[args.command](args)
    except (InputError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
