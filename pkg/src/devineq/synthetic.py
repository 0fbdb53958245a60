"""Deterministic synthetic inputs for tests, acceptance runs, and demos.

The real source panels are licensed, so everything here fabricates
structurally similar data: nested-plus-noise presence patterns, wage
and employment magnitudes with region and sector scale factors, and
country series whose inequality follows a known curve. Every generator
is a pure function of its seed (PCG64).
"""

from __future__ import annotations

import numpy as np

from .ingest import CountryYearRecord, InequalitySeriesRecord, RegionSectorRecord
from .smoothing import DEFAULT_SEED


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, stream))))


def staircase_matrix(n_regions: int, n_sectors: int) -> np.ndarray:
    """Perfectly nested 0/1 matrix: row i is active in the first k_i
    sectors, with k_i nondecreasing in i and the last row full."""
    out = np.zeros((n_regions, n_sectors), dtype=np.uint8)
    for i in range(n_regions):
        k = max(1, int(np.ceil((i + 1) * n_sectors / n_regions)))
        out[i, :k] = 1
    return out


def _repair_margins(matrix: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # no all-zero rows or columns: the fitness iteration cannot take them
    for i in np.flatnonzero(matrix.sum(axis=1) == 0):
        matrix[i, rng.integers(matrix.shape[1])] = 1
    for j in np.flatnonzero(matrix.sum(axis=0) == 0):
        matrix[rng.integers(matrix.shape[0]), j] = 1
    return matrix


def noisy_nested_matrix(
    n_regions: int, n_sectors: int, flip_fraction: float = 0.05, seed: int = DEFAULT_SEED
) -> np.ndarray:
    """Staircase matrix with a fraction of entries flipped at random."""
    rng = _rng(seed, 1)
    out = staircase_matrix(n_regions, n_sectors).copy()
    n_flips = int(flip_fraction * out.size)
    rows = rng.integers(0, n_regions, size=n_flips)
    cols = rng.integers(0, n_sectors, size=n_flips)
    out[rows, cols] = 1 - out[rows, cols]
    return _repair_margins(out, rng)


def random_binary_matrix(
    n_regions: int, n_sectors: int, density: float, seed: int = DEFAULT_SEED
) -> np.ndarray:
    """Bernoulli 0/1 matrix at the given density, margins repaired."""
    rng = _rng(seed, 2)
    out = (rng.random((n_regions, n_sectors)) < density).astype(np.uint8)
    return _repair_margins(out, rng)


def region_sector_records(
    n_regions: int = 50,
    n_sectors: int = 20,
    years: tuple[int, ...] = (1998, 1999, 2000, 2001, 2002),
    seed: int = DEFAULT_SEED,
) -> list[RegionSectorRecord]:
    """Wage/employment panel records with a nested activity structure.

    Employment counts are integers >= 1 on active cells; wage totals are
    employment times a positive average wage that varies by region,
    sector, and year, so average wages, RCA patterns, and between-sector
    Theil values are all nontrivial.
    """
    rng = _rng(seed, 3)
    presence = noisy_nested_matrix(n_regions, n_sectors, flip_fraction=0.08, seed=seed)
    region_ids = [f"R{i:03d}" for i in range(n_regions)]
    sector_ids = [f"S{j:02d}" for j in range(n_sectors)]
    region_emp_scale = rng.lognormal(mean=3.0, sigma=0.7, size=n_regions)
    sector_emp_scale = rng.lognormal(mean=1.5, sigma=0.5, size=n_sectors)
    region_wage_level = rng.lognormal(mean=0.0, sigma=0.25, size=n_regions)
    sector_wage_level = rng.lognormal(mean=3.4, sigma=0.45, size=n_sectors)

    records = []
    for year_idx, year in enumerate(years):
        growth = (1.0 + 0.03 * year_idx) * rng.lognormal(
            mean=0.0, sigma=0.05, size=(n_regions, n_sectors)
        )
        emp_noise = rng.lognormal(mean=0.0, sigma=0.6, size=(n_regions, n_sectors))
        wage_noise = rng.lognormal(mean=0.0, sigma=0.2, size=(n_regions, n_sectors))
        for i in range(n_regions):
            for j in range(n_sectors):
                if not presence[i, j]:
                    continue
                employment = max(
                    1.0,
                    np.floor(region_emp_scale[i] * sector_emp_scale[j] * emp_noise[i, j]),
                )
                avg_wage = (
                    region_wage_level[i] * sector_wage_level[j] * wage_noise[i, j]
                    * growth[i, j]
                )
                records.append(
                    RegionSectorRecord(
                        region_id=region_ids[i], sector_id=sector_ids[j], year=year,
                        wage_total=float(employment * avg_wage), employment=float(employment),
                    )
                )
    return records


def country_records(
    n_countries: int = 60,
    years: tuple[int, ...] = tuple(range(1995, 2009)),
    seed: int = DEFAULT_SEED,
) -> list[CountryYearRecord]:
    """Country-year macro panel with lognormal GDP per capita levels."""
    rng = _rng(seed, 4)
    ids = [f"C{i:03d}" for i in range(n_countries)]
    base_gdp = rng.lognormal(mean=9.0, sigma=1.0, size=n_countries)
    base_pop = rng.lognormal(mean=16.0, sigma=1.2, size=n_countries)
    base_labor = rng.uniform(0.45, 0.75, size=n_countries)
    records = []
    for t, year in enumerate(years):
        for i, cid in enumerate(ids):
            gdp = base_gdp[i] * (1.0 + 0.02 * t) * rng.lognormal(0.0, 0.03)
            labor = float(np.clip(base_labor[i] + rng.normal(0.0, 0.01), 0.0, 1.0))
            records.append(
                CountryYearRecord(
                    country_id=cid, year=year, gdp_pc=float(gdp),
                    population=float(base_pop[i]), labor_share=labor,
                    capital_share=1.0 - labor,
                )
            )
    return records


def fitness_rank_map(
    records: list[CountryYearRecord], seed: int = DEFAULT_SEED
) -> dict[tuple[str, int], int]:
    """Per-year ordinal fitness ranks loosely correlated with GDP.

    Mimics an externally supplied ranking: richer countries tend to rank
    better, with persistent country-level deviations.
    """
    rng = _rng(seed, 5)
    countries = sorted({r.country_id for r in records})
    deviation = dict(zip(countries, rng.normal(0.0, 0.7, size=len(countries))))
    ranks: dict[tuple[str, int], int] = {}
    by_year: dict[int, list[CountryYearRecord]] = {}
    for rec in records:
        by_year.setdefault(rec.year, []).append(rec)
    for year, rows in by_year.items():
        scores = {
            r.country_id: np.log(r.gdp_pc) + deviation[r.country_id] for r in rows
        }
        ordered = sorted(scores, key=lambda c: (-scores[c], c))
        for pos, cid in enumerate(ordered, start=1):
            ranks[(cid, year)] = pos
    return ranks


def inequality_records(
    records: list[CountryYearRecord],
    ranks: dict[tuple[str, int], int],
    shape: str = "inverted_u",
    noise: float = 0.4,
    seed: int = DEFAULT_SEED,
) -> list[InequalitySeriesRecord]:
    """Inequality series whose level follows a known curve in development.

    ``shape="inverted_u"`` peaks mid-development (rises, then falls);
    ``shape="monotone"`` increases throughout. The development score is
    the per-year standardized combination of rank and log relative GDP
    used by the index itself, so pooled fits should recover the curve.
    """
    rng = _rng(seed, 6)
    by_year: dict[int, list[CountryYearRecord]] = {}
    for rec in records:
        by_year.setdefault(rec.year, []).append(rec)
    out = []
    for year, rows in sorted(by_year.items()):
        n = len(rows)
        gdp = np.array([r.gdp_pc for r in rows])
        log_rel = np.log(gdp / gdp.mean())
        rk = np.array([ranks[(r.country_id, year)] for r in rows], dtype=float)
        reoriented = n + 1 - rk

        def z(v):
            return (v - v.mean()) / v.std()

        score = 0.5 * z(reoriented) + 0.5 * z(log_rel)
        if shape == "inverted_u":
            level = 8.0 - 3.0 * score**2
        elif shape == "monotone":
            level = 6.0 + 2.5 * score
        else:
            raise ValueError(f"unknown shape '{shape}'")
        level = np.maximum(level + rng.normal(0.0, noise, size=n), 0.0)
        out.extend(
            InequalitySeriesRecord(country_id=r.country_id, year=year, theil_value=float(v))
            for r, v in zip(rows, level)
        )
    return out
