"""Loading and validation of the three delimited panel families.

Files are UTF-8 delimited text with a header row. Column names are
mapped onto canonical fields through an explicit schema (dataset
vintages disagree about labels, so nothing is hard-coded). Rows that
fail to parse or violate an invariant are rejected one by one and
reported with their data-row number (first data row = 1); loading never
aborts on a bad row, so accepted + rejected always equals the input row
count. A record with any missing required field is rejected, not
imputed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .bipartite import WeightedBipartitePanel
from .errors import (
    DuplicateKey,
    EmptyResult,
    InvariantViolation,
    MissingColumn,
    ParseFailure,
)
from .tableio import write_table

REGION_SECTOR_FIELDS = ("region_id", "sector_id", "year", "wage_total", "employment")
COUNTRY_FIELDS = ("country_id", "year", "gdp_pc", "population", "labor_share")
INEQUALITY_FIELDS = ("country_id", "year", "theil_value")


@dataclass(frozen=True)
class RegionSectorRecord:
    region_id: str
    sector_id: str
    year: int
    wage_total: float
    employment: float


@dataclass(frozen=True)
class CountryYearRecord:
    country_id: str
    year: int
    gdp_pc: float
    population: float
    labor_share: float
    capital_share: float


@dataclass(frozen=True)
class InequalitySeriesRecord:
    country_id: str
    year: int
    theil_value: float


@dataclass(frozen=True)
class RowDiagnostic:
    """One reported row: its number, what happened, and whether it was
    dropped (flags like zero-wage-with-employment are kept but noted)."""

    row: int
    kind: str
    message: str
    rejected: bool

    def __str__(self) -> str:
        action = "rejected" if self.rejected else "flagged"
        return f"row {self.row} {action} [{self.kind}]: {self.message}"


@dataclass(frozen=True)
class LoadResult:
    records: tuple
    diagnostics: tuple[RowDiagnostic, ...]
    total_rows: int

    @property
    def accepted(self) -> int:
        return len(self.records)

    @property
    def rejected(self) -> int:
        return sum(1 for d in self.diagnostics if d.rejected)


@dataclass(frozen=True)
class PanelLoadResult(LoadResult):
    panel: WeightedBipartitePanel = None


def _resolve_columns(
    header: Sequence[str], fields: Sequence[str], schema: dict[str, str] | None
) -> dict[str, int]:
    schema = dict(schema or {})
    unknown = set(schema) - set(fields)
    if unknown:
        raise ValueError(f"schema maps unknown field(s): {sorted(unknown)}")
    positions = {}
    for field in fields:
        column = schema.get(field, field)
        if column not in header:
            raise MissingColumn(f"column '{column}' (field '{field}') not in header {list(header)}")
        positions[field] = header.index(column)
    return positions


def _cell(cells: Sequence[str], pos: int, field: str, row: int) -> str:
    if pos >= len(cells):
        raise ParseFailure(row, f"row has {len(cells)} cells, field '{field}' missing")
    value = cells[pos].strip()
    if value == "":
        raise ParseFailure(row, f"field '{field}' is empty")
    return value


def _parse_number(text: str, field: str, row: int, as_int: bool = False):
    try:
        return int(text) if as_int else float(text)
    except ValueError:
        kind = "integer" if as_int else "number"
        raise ParseFailure(row, f"field '{field}' value '{text}' is not a {kind}") from None


def _load_rows(
    path: str | Path,
    fields: Sequence[str],
    schema: dict[str, str] | None,
    delimiter: str,
    build: Callable,
) -> LoadResult:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        # tolerate '#'-prefixed metadata lines, so our own outputs reload
        reader = csv.reader(
            (line for line in fh if not line.startswith("#")), delimiter=delimiter
        )
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise MissingColumn(f"{path} is empty (no header row)") from None
        positions = _resolve_columns(header, fields, schema)
        records = []
        diagnostics: list[RowDiagnostic] = []
        seen_keys: set = set()
        total = 0
        for row_num, cells in enumerate(reader, start=1):
            total += 1
            try:
                record, flags = build(cells, positions, row_num, seen_keys)
            except (ParseFailure, DuplicateKey, InvariantViolation) as exc:
                diagnostics.append(
                    RowDiagnostic(
                        row=getattr(exc, "row", row_num), kind=type(exc).__name__,
                        message=str(exc), rejected=True,
                    )
                )
                continue
            records.append(record)
            diagnostics.extend(flags)
    return LoadResult(records=tuple(records), diagnostics=tuple(diagnostics), total_rows=total)


def _build_region_sector(cells, pos, row, seen):
    region = _cell(cells, pos["region_id"], "region_id", row)
    sector = _cell(cells, pos["sector_id"], "sector_id", row)
    year = _parse_number(_cell(cells, pos["year"], "year", row), "year", row, as_int=True)
    wage = _parse_number(_cell(cells, pos["wage_total"], "wage_total", row), "wage_total", row)
    employment = _parse_number(
        _cell(cells, pos["employment"], "employment", row), "employment", row
    )
    if wage < 0:
        raise InvariantViolation(row, f"wage_total {wage} is negative")
    if employment < 0:
        raise InvariantViolation(row, f"employment {employment} is negative")
    if employment == 0 and wage > 0:
        raise InvariantViolation(row, f"employment 0 with positive wage_total {wage}")
    key = (region, sector, year)
    if key in seen:
        raise DuplicateKey(row, f"key (region, sector, year) = {key} already present")
    seen.add(key)
    flags = []
    if employment > 0 and wage == 0:
        flags.append(
            RowDiagnostic(
                row=row, kind="ZeroWage",
                message=f"employment {employment} with zero wage_total (kept)", rejected=False,
            )
        )
    record = RegionSectorRecord(
        region_id=region, sector_id=sector, year=year, wage_total=wage, employment=employment
    )
    return record, flags


def _build_country(cells, pos, row, seen):
    country = _cell(cells, pos["country_id"], "country_id", row)
    year = _parse_number(_cell(cells, pos["year"], "year", row), "year", row, as_int=True)
    gdp_pc = _parse_number(_cell(cells, pos["gdp_pc"], "gdp_pc", row), "gdp_pc", row)
    population = _parse_number(
        _cell(cells, pos["population"], "population", row), "population", row
    )
    labor_share = _parse_number(
        _cell(cells, pos["labor_share"], "labor_share", row), "labor_share", row
    )
    if gdp_pc <= 0:
        raise InvariantViolation(row, f"gdp_pc {gdp_pc} is not positive")
    if population <= 0:
        raise InvariantViolation(row, f"population {population} is not positive")
    if not 0.0 <= labor_share <= 1.0:
        raise InvariantViolation(row, f"labor_share {labor_share} outside [0, 1]")
    key = (country, year)
    if key in seen:
        raise DuplicateKey(row, f"key (country, year) = {key} already present")
    seen.add(key)
    record = CountryYearRecord(
        country_id=country, year=year, gdp_pc=gdp_pc, population=population,
        labor_share=labor_share, capital_share=1.0 - labor_share,
    )
    return record, []


def _build_inequality(cells, pos, row, seen):
    country = _cell(cells, pos["country_id"], "country_id", row)
    year = _parse_number(_cell(cells, pos["year"], "year", row), "year", row, as_int=True)
    value = _parse_number(_cell(cells, pos["theil_value"], "theil_value", row), "theil_value", row)
    if value < 0:
        raise InvariantViolation(row, f"theil_value {value} is negative")
    key = (country, year)
    if key in seen:
        raise DuplicateKey(row, f"key (country, year) = {key} already present")
    seen.add(key)
    return InequalitySeriesRecord(country_id=country, year=year, theil_value=value), []


def load_region_sector_panel(
    path: str | Path, schema: dict[str, str] | None = None, delimiter: str = ","
) -> PanelLoadResult:
    """Load a region-sector wage/employment panel and group it by year."""
    result = _load_rows(path, REGION_SECTOR_FIELDS, schema, delimiter, _build_region_sector)
    panel = WeightedBipartitePanel.from_records(result.records)
    return PanelLoadResult(
        records=result.records, diagnostics=result.diagnostics,
        total_rows=result.total_rows, panel=panel,
    )


def load_country_panel(
    path: str | Path, schema: dict[str, str] | None = None, delimiter: str = ","
) -> LoadResult:
    """Load a country-year macro panel; capital_share = 1 - labor_share."""
    return _load_rows(path, COUNTRY_FIELDS, schema, delimiter, _build_country)


def load_inequality_series(
    path: str | Path, schema: dict[str, str] | None = None, delimiter: str = ","
) -> LoadResult:
    """Load a country-year inequality coefficient series (as published,
    never recomputed)."""
    return _load_rows(path, INEQUALITY_FIELDS, schema, delimiter, _build_inequality)


def pool_panel(records: Iterable, year_range: tuple[int, int]) -> list:
    """All observations whose year falls in the inclusive range, unaveraged."""
    lo, hi = year_range
    if lo > hi:
        raise ValueError(f"empty year range [{lo}, {hi}]")
    pooled = [r for r in records if lo <= r.year <= hi]
    if not pooled:
        raise EmptyResult(f"no observation in year range [{lo}, {hi}]")
    return pooled


def write_region_sector_records(records: Iterable[RegionSectorRecord], path: str | Path) -> Path:
    rows = [
        (r.region_id, r.sector_id, r.year, r.wage_total, r.employment) for r in records
    ]
    return write_table(path, list(REGION_SECTOR_FIELDS), rows)


def write_country_records(records: Iterable[CountryYearRecord], path: str | Path) -> Path:
    rows = [(r.country_id, r.year, r.gdp_pc, r.population, r.labor_share) for r in records]
    return write_table(path, list(COUNTRY_FIELDS), rows)


def write_inequality_records(records: Iterable[InequalitySeriesRecord], path: str | Path) -> Path:
    rows = [(r.country_id, r.year, r.theil_value) for r in records]
    return write_table(path, list(INEQUALITY_FIELDS), rows)
