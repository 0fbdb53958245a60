"""Relative monetary series and the comparative development index.

The index places each unit on a single industrialization axis by
combining its fitness ranking with the log of its monetary level
relative to the cross-sectional mean of the same year:

    cdi = beta * R(rank) + (1 - beta) * log(monetary_rel)

R reorients ranks so that larger means more fit, and both terms are
standardized per year (zero mean, unit variance) before combining, since
raw ranks and logs live on incomparable scales.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyYear, MissingInput


@dataclass(frozen=True)
class MonetaryObservation:
    unit_id: str
    year: int
    monetary: float
    monetary_rel: float


@dataclass(frozen=True)
class CDIParams:
    beta: float = 0.5
    standardize: bool = True

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")


@dataclass(frozen=True)
class CDIInput:
    """One joined observation: a fitness rank plus a monetary level."""

    unit_id: str
    year: int
    fitness_rank: int
    monetary: float
    monetary_rel: float


@dataclass(frozen=True)
class DevelopmentRecord:
    unit_id: str
    year: int
    monetary: float
    monetary_rel: float
    fitness_rank: int
    cdi_raw: float
    cdi: float


def relative_monetary(
    series: Iterable[tuple[str, int, float]]
) -> list[MonetaryObservation]:
    """Divide each unit's monetary value by its year's cross-sectional mean.

    Input rows are (unit_id, year, monetary) with monetary > 0. The
    per-year mean of the returned relative values is one by construction.
    """
    rows = list(series)
    if not rows:
        raise EmptyYear("no observations supplied")
    by_year: dict[int, list[float]] = defaultdict(list)
    for unit_id, year, monetary in rows:
        if not monetary > 0:
            raise ValueError(f"monetary value must be positive for ({unit_id}, {year})")
        by_year[year].append(float(monetary))
    year_mean = {year: float(np.mean(vals)) for year, vals in by_year.items()}
    return [
        MonetaryObservation(
            unit_id=unit_id, year=year, monetary=float(monetary),
            monetary_rel=float(monetary) / year_mean[year],
        )
        for unit_id, year, monetary in rows
    ]


def _zscore(values: np.ndarray) -> np.ndarray:
    sd = values.std()
    if sd == 0:
        return np.zeros_like(values)
    return (values - values.mean()) / sd


def cdi(records: Sequence[CDIInput], params: CDIParams | None = None) -> list[DevelopmentRecord]:
    """Comparative development index per (unit, year).

    Ranks are ordinal with 1 = most fit; within a year of n units, rank
    r is reoriented to n + 1 - r so the most fit unit takes the largest
    value. The reoriented rank and log(monetary_rel) are combined with
    weight beta; ``cdi`` carries the per-year standardized combination
    (unless ``params.standardize`` is off), ``cdi_raw`` the
    unstandardized one.
    """
    params = params or CDIParams()
    for rec in records:
        if rec.fitness_rank is None or rec.monetary_rel is None or not rec.monetary_rel > 0:
            raise MissingInput(rec.unit_id, rec.year)

    by_year: dict[int, list[int]] = defaultdict(list)
    for i, rec in enumerate(records):
        by_year[rec.year].append(i)

    raw_out = np.empty(len(records))
    std_out = np.empty(len(records))
    for year, idx in by_year.items():
        n = len(idx)
        ranks = np.array([records[i].fitness_rank for i in idx], dtype=float)
        rel = np.array([records[i].monetary_rel for i in idx], dtype=float)
        reoriented = n + 1 - ranks
        log_rel = np.log(rel)
        raw_out[idx] = params.beta * reoriented + (1 - params.beta) * log_rel
        if params.standardize:
            std_out[idx] = params.beta * _zscore(reoriented) + (1 - params.beta) * _zscore(log_rel)
        else:
            std_out[idx] = raw_out[idx]

    return [
        DevelopmentRecord(
            unit_id=rec.unit_id, year=rec.year, monetary=rec.monetary,
            monetary_rel=rec.monetary_rel, fitness_rank=int(rec.fitness_rank),
            cdi_raw=float(raw_out[i]), cdi=float(std_out[i]),
        )
        for i, rec in enumerate(records)
    ]


@dataclass(frozen=True)
class JoinReport:
    """Accounting for an inner join: kept keys plus per-side dropouts."""

    kept: tuple[tuple[str, int], ...]
    dropped: tuple[tuple[str, int, str], ...]  # (unit, year, reason)

    @property
    def complete(self) -> bool:
        return not self.dropped


def join_development_inputs(
    ranks: Mapping[tuple[str, int], int],
    monetary: Mapping[tuple[str, int], MonetaryObservation],
) -> tuple[list[CDIInput], JoinReport]:
    """Inner-join rank and monetary series on (unit, year).

    Returns rows ready for :func:`cdi` plus a report listing every key
    that appeared on one side only.
    """
    keys = sorted(set(ranks) | set(monetary))
    joined = []
    kept = []
    dropped = []
    for key in keys:
        in_rank, in_money = key in ranks, key in monetary
        if in_rank and in_money:
            obs = monetary[key]
            joined.append(
                CDIInput(
                    unit_id=key[0], year=key[1], fitness_rank=ranks[key],
                    monetary=obs.monetary, monetary_rel=obs.monetary_rel,
                )
            )
            kept.append(key)
        elif in_rank:
            dropped.append((key[0], key[1], "missing monetary series"))
        else:
            dropped.append((key[0], key[1], "missing fitness rank"))
    return joined, JoinReport(kept=tuple(kept), dropped=tuple(dropped))
