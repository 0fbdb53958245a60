"""Entropy-based inequality measures and their group decomposition.

The Theil index is zero at perfect equality and log(n) when a single
member holds everything; it splits exactly into a between-group and a
within-group component, which is what makes it usable both across whole
populations and across industrial sectors inside one region. Natural
logarithms throughout, so values are in nats. Terms with zero income
use the entropy convention x*log(x) -> 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import AllZeroIncomes, InconsistentTotals, NoSectors


def _as_income_vector(incomes) -> np.ndarray:
    y = np.asarray(incomes, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("incomes must be a nonempty 1-d vector")
    if not np.isfinite(y).all() or (y < 0).any():
        raise ValueError("incomes must be finite and nonnegative")
    if y.sum() <= 0:
        raise AllZeroIncomes("all incomes are zero")
    return y


def _xlogx(x: np.ndarray) -> np.ndarray:
    # x*log(x) with the limit value 0 at x = 0
    out = np.zeros_like(x)
    positive = x > 0
    out[positive] = x[positive] * np.log(x[positive])
    return out


def theil(incomes) -> float:
    """Theil index: mean of (y/mu) * log(y/mu) over the population.

    Parameters
    ----------
    incomes : array-like
        Nonnegative individual incomes, at least one positive.

    Returns
    -------
    float in [0, log(n)].
    """
    y = _as_income_vector(incomes)
    ratios = y / y.mean()
    return float(_xlogx(ratios).mean())


def theil_share_form(incomes) -> float:
    """Theil index in income-share form: sum of s_p * log(s_p / (1/n)).

    Algebraically identical to :func:`theil`; exposed separately because
    the share form reads as the discrepancy between the distribution of
    income and the uniform distribution of individuals.
    """
    y = _as_income_vector(incomes)
    shares = y / y.sum()
    n = y.size
    positive = shares > 0
    return float((shares[positive] * np.log(shares[positive] * n)).sum())


@dataclass(frozen=True)
class Group:
    """One population group: member count, total income, optional members."""

    count: int
    total: float
    incomes: np.ndarray | None = None

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("group count must be >= 1")
        if self.total < 0:
            raise ValueError("group total must be >= 0")
        if self.incomes is not None:
            arr = np.array(self.incomes, dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, "incomes", arr)


@dataclass(frozen=True)
class GroupedDistribution:
    """Disjoint groups covering a population of n members with total income Y."""

    groups: tuple[Group, ...]

    def __post_init__(self):
        if not self.groups:
            raise ValueError("at least one group required")
        for g in self.groups:
            if g.incomes is not None:
                if len(g.incomes) != g.count:
                    raise InconsistentTotals(
                        f"group holds {len(g.incomes)} incomes but states count {g.count}"
                    )
                if abs(float(g.incomes.sum()) - g.total) > 1e-9 * max(g.total, 1.0):
                    raise InconsistentTotals(
                        f"group incomes sum to {g.incomes.sum()}, stated total {g.total}"
                    )
        if self.total_income <= 0:
            raise AllZeroIncomes("grand total income is zero")

    @classmethod
    def from_member_incomes(cls, member_incomes: Iterable) -> "GroupedDistribution":
        groups = []
        for arr in member_incomes:
            arr = np.asarray(arr, dtype=float)
            groups.append(Group(count=arr.size, total=float(arr.sum()), incomes=arr))
        return cls(groups=tuple(groups))

    @property
    def total_count(self) -> int:
        return sum(g.count for g in self.groups)

    @property
    def total_income(self) -> float:
        return float(sum(g.total for g in self.groups))

    @property
    def has_member_incomes(self) -> bool:
        return all(g.incomes is not None for g in self.groups)


@dataclass(frozen=True)
class TheilDecomposition:
    """total = between + within; within/per_group are None when member
    incomes were not supplied."""

    total: float | None
    between: float
    within: float | None
    per_group: tuple[float, ...] | None


def decompose(grouped: GroupedDistribution) -> TheilDecomposition:
    """Split the Theil index into between-group and within-group parts.

    Between: sum over groups of (Y_i/Y) * log((Y_i/Y)/(n_i/n)).
    Within: income-share-weighted sum of the per-group Theil indices.
    When member incomes are present the sum is cross-checked against the
    Theil of the flattened population.
    """
    n = grouped.total_count
    y_total = grouped.total_income

    between = 0.0
    for g in grouped.groups:
        income_share = g.total / y_total
        pop_share = g.count / n
        if income_share > 0:
            between += income_share * np.log(income_share / pop_share)

    if not grouped.has_member_incomes:
        return TheilDecomposition(total=None, between=float(between), within=None, per_group=None)

    per_group = []
    within = 0.0
    for g in grouped.groups:
        t_i = theil(g.incomes) if g.total > 0 else 0.0
        per_group.append(t_i)
        within += (g.total / y_total) * t_i
    total = float(between + within)

    flat = np.concatenate([g.incomes for g in grouped.groups])
    direct = theil(flat)
    if abs(direct - total) > 1e-9 * max(abs(direct), 1.0):
        raise InconsistentTotals(
            f"decomposition sum {total} disagrees with direct Theil {direct}"
        )
    return TheilDecomposition(
        total=total, between=float(between), within=float(within), per_group=tuple(per_group)
    )


@dataclass(frozen=True)
class SectorWageTable:
    """Employment counts and average wages per sector for one region-year.

    Zero-employment sectors carry no weight and have undefined average
    wages; they are dropped at construction.
    """

    sectors: tuple[str, ...]
    employment: np.ndarray
    avg_wage: np.ndarray

    def __post_init__(self):
        emp = np.array(self.employment, dtype=float)
        wage = np.array(self.avg_wage, dtype=float)
        keep = emp > 0
        emp, wage = emp[keep], wage[keep]
        kept_ids = tuple(s for s, k in zip(self.sectors, keep) if k)
        if emp.size == 0:
            raise NoSectors("no sector with positive employment")
        if (wage < 0).any():
            raise ValueError("average wages must be nonnegative")
        if float(emp @ wage) <= 0:
            raise AllZeroIncomes("total wages are zero")
        emp.setflags(write=False)
        wage.setflags(write=False)
        object.__setattr__(self, "sectors", kept_ids)
        object.__setattr__(self, "employment", emp)
        object.__setattr__(self, "avg_wage", wage)

    @property
    def mean_wage(self) -> float:
        return float(self.employment @ self.avg_wage / self.employment.sum())


def between_sector_theil(table: SectorWageTable) -> float:
    """Between-group Theil where the groups are sectors.

    Sum over sectors of (employment share) * (y_i/mu) * log(y_i/mu),
    with y_i the sector average wage and mu the overall average. Zero
    iff every sector pays the same average wage; it falls when
    low-paying sectors catch up and rises when wage gaps widen.
    """
    shares = table.employment / table.employment.sum()
    ratios = table.avg_wage / table.mean_wage
    return float((shares * _xlogx(ratios)).sum())


def gini(incomes) -> float:
    """Gini coefficient via the sorted-prefix formulation.

    Equivalent to the mean-absolute-difference double sum
    sum_pq |y_p - y_q| / (2 n^2 mu), but O(n log n).
    """
    y = np.sort(_as_income_vector(incomes))
    n = y.size
    index = np.arange(1, n + 1)
    return float(((2 * index - n - 1) @ y) / (n * n * y.mean()))


def capital_share_series(records: Sequence) -> list[tuple[str, int, float]]:
    """(country, year, capital_share) rows from country-year records."""
    return [(rec.country_id, rec.year, rec.capital_share) for rec in records]
