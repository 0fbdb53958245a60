"""Region-sector matrices: weighted panels, RCA/LQ shares, binarization.

The weighted panel holds one wage matrix and one employment matrix per
year. A year slice is turned into a presence/absence matrix by
thresholding revealed comparative advantage; the binary matrix is what
the fitness-complexity iteration consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import AllZeroSlice, DegenerateMatrix, OrderMismatch, YearAbsent
from .tableio import write_table


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr)  # private copy, so freezing never touches caller data
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WeightedBipartitePanel:
    """Wage totals and employment counts on a region x sector grid, by year.

    ``wages[year][r, s]`` is the total yearly wage bill of sector ``s``
    in region ``r``; ``employment[year][r, s]`` the worker count. Both
    matrices are dense, nonnegative, and immutable after construction.
    """

    regions: tuple[str, ...]
    sectors: tuple[str, ...]
    wages: dict[int, np.ndarray]
    employment: dict[int, np.ndarray]

    def __post_init__(self):
        shape = (len(self.regions), len(self.sectors))
        for year in self.wages:
            w, e = self.wages[year], self.employment[year]
            if w.shape != shape or e.shape != shape:
                raise ValueError(f"year {year}: matrix shape {w.shape} != {shape}")
            if (w < 0).any() or (e < 0).any():
                raise ValueError(f"year {year}: negative entries")
            self.wages[year] = _readonly(w.astype(float))
            self.employment[year] = _readonly(e.astype(float))

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(sorted(self.wages))

    def _check_year(self, year: int) -> None:
        if year not in self.wages:
            raise YearAbsent(f"year {year} not in panel (have {self.years})")

    def wage_slice(self, year: int) -> np.ndarray:
        self._check_year(year)
        return self.wages[year]

    def employment_slice(self, year: int) -> np.ndarray:
        self._check_year(year)
        return self.employment[year]

    def average_wage(self, year: int) -> np.ndarray:
        """Per-cell average wage W/E, zero where employment is zero."""
        w, e = self.wage_slice(year), self.employment_slice(year)
        return np.divide(w, e, out=np.zeros_like(w), where=e > 0)

    @classmethod
    def from_records(cls, records: Iterable) -> "WeightedBipartitePanel":
        """Build a panel from records carrying region_id, sector_id, year,
        wage_total and employment. Missing (region, sector) cells are zero."""
        records = list(records)
        regions = tuple(sorted({r.region_id for r in records}))
        sectors = tuple(sorted({r.sector_id for r in records}))
        ridx = {rid: i for i, rid in enumerate(regions)}
        sidx = {sid: j for j, sid in enumerate(sectors)}
        wages: dict[int, np.ndarray] = {}
        employment: dict[int, np.ndarray] = {}
        for rec in records:
            if rec.year not in wages:
                wages[rec.year] = np.zeros((len(regions), len(sectors)))
                employment[rec.year] = np.zeros((len(regions), len(sectors)))
            wages[rec.year][ridx[rec.region_id], sidx[rec.sector_id]] = rec.wage_total
            employment[rec.year][ridx[rec.region_id], sidx[rec.sector_id]] = rec.employment
        return cls(regions=regions, sectors=sectors, wages=wages, employment=employment)


@dataclass(frozen=True)
class LabeledMatrix:
    """A real-valued region x sector matrix with its id lists and year."""

    values: np.ndarray
    regions: tuple[str, ...]
    sectors: tuple[str, ...]
    year: int
    kind: str = "rca"

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))


@dataclass(frozen=True)
class BinaryMatrix:
    """0/1 presence matrix after thresholding and pruning.

    Pruning removes all-zero rows and columns (they would break the
    fitness iteration, which divides by column sums); the dropped ids
    are kept so rankings can be mapped back to the original universe.
    """

    entries: np.ndarray
    regions: tuple[str, ...]
    sectors: tuple[str, ...]
    year: int
    pruned_regions: tuple[str, ...] = ()
    pruned_sectors: tuple[str, ...] = ()

    def __post_init__(self):
        ent = np.asarray(self.entries)
        if not np.isin(ent, (0, 1)).all():
            raise ValueError("binary matrix entries must be 0 or 1")
        if ent.size == 0 or (ent.sum(axis=1) == 0).any() or (ent.sum(axis=0) == 0).any():
            raise DegenerateMatrix("binary matrix has an all-zero row or column")
        object.__setattr__(self, "entries", _readonly(ent.astype(np.uint8)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def _share_ratio(matrix: np.ndarray) -> np.ndarray:
    """Ratio of within-column share to within-grid row share.

    Entries whose column total or row total is zero are defined as 0,
    so absent sectors/regions never produce infinities; they are pruned
    at binarization.
    """
    matrix = np.asarray(matrix, dtype=float)
    total = matrix.sum()
    if total <= 0:
        raise AllZeroSlice("slice sums to zero")
    col_totals = matrix.sum(axis=0)
    row_totals = matrix.sum(axis=1)
    col_share = np.divide(
        matrix, col_totals[None, :], out=np.zeros_like(matrix), where=col_totals > 0
    )
    row_share = row_totals / total
    return np.divide(
        col_share, row_share[:, None], out=np.zeros_like(col_share), where=row_share[:, None] > 0
    )


def rca(panel: WeightedBipartitePanel, year: int) -> LabeledMatrix:
    """Revealed comparative advantage of each sector in each region.

    The wage share of sector s in region r divided by the wage share of
    sector s in the whole area: values above 1 mark sectors the region
    hosts more intensely than the reference distribution does.
    """
    values = _share_ratio(panel.wage_slice(year))
    return LabeledMatrix(values, panel.regions, panel.sectors, year, kind="rca")


def location_quotient(panel: WeightedBipartitePanel, year: int) -> LabeledMatrix:
    """Employment-based analogue of RCA (the location quotient)."""
    values = _share_ratio(panel.employment_slice(year))
    return LabeledMatrix(values, panel.regions, panel.sectors, year, kind="lq")


@dataclass(frozen=True)
class IdentityReport:
    """Entry-wise outcome of the RCA = LQ x wage-ratio consistency check."""

    checked: np.ndarray
    passed: np.ndarray
    max_relative_error: float
    tolerance: float

    @property
    def all_pass(self) -> bool:
        return bool(self.passed[self.checked].all()) if self.checked.any() else True


def check_rca_lq_identity(
    panel: WeightedBipartitePanel, year: int, tol: float = 1e-9
) -> IdentityReport:
    """Verify that RCA factors into LQ times a relative-average-wage term.

    With w = W/E the cell average wage, the exact factorization is
    RCA = LQ * (w / sector_avg_wage) / (region_avg_wage / grand_avg_wage),
    where the reference wages are employment-weighted (sector average =
    sector wage bill / sector employment, and likewise for region and
    grand totals). Entries with zero employment or any zero reference
    total are excluded from the check.
    """
    w_mat = panel.wage_slice(year)
    e_mat = panel.employment_slice(year)
    lhs = rca(panel, year).values
    lq = location_quotient(panel, year).values

    sec_w, sec_e = w_mat.sum(axis=0), e_mat.sum(axis=0)
    reg_w, reg_e = w_mat.sum(axis=1), e_mat.sum(axis=1)
    grand_w, grand_e = w_mat.sum(), e_mat.sum()

    checked = (
        (e_mat > 0)
        & (sec_w > 0)[None, :]
        & (sec_e > 0)[None, :]
        & (reg_w > 0)[:, None]
        & (reg_e > 0)[:, None]
        & (grand_w > 0)
        & (grand_e > 0)
    )

    avg = np.divide(w_mat, e_mat, out=np.zeros_like(w_mat), where=e_mat > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        sector_avg = np.where(sec_e > 0, sec_w / sec_e, 0.0)
        region_avg = np.where(reg_e > 0, reg_w / reg_e, 0.0)
        grand_avg = grand_w / grand_e if grand_e > 0 else 0.0
        rhs = lq * np.where(sector_avg > 0, avg / sector_avg, 0.0)
        rhs = np.where(
            (region_avg > 0)[:, None] & (grand_avg > 0),
            rhs / (region_avg[:, None] / grand_avg),
            0.0,
        )

    scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-300)
    rel_err = np.abs(lhs - rhs) / scale
    passed = checked & (rel_err <= tol)
    max_err = float(rel_err[checked].max()) if checked.any() else 0.0
    return IdentityReport(checked=checked, passed=passed, max_relative_error=max_err, tolerance=tol)


def binarize(matrix: LabeledMatrix, threshold: float = 1.0) -> BinaryMatrix:
    """Threshold a share-ratio matrix into presence/absence and prune.

    A cell is present when its value is >= threshold (the boundary
    counts as presence). All-zero rows/columns are dropped and reported
    in the result's pruned id lists.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    entries = (matrix.values >= threshold).astype(np.uint8)
    keep_rows = entries.sum(axis=1) > 0
    keep_cols = entries.sum(axis=0) > 0
    if not keep_rows.any() or not keep_cols.any():
        raise DegenerateMatrix(
            f"no entry reaches threshold {threshold}; matrix is empty after pruning"
        )
    pruned_regions = tuple(r for r, k in zip(matrix.regions, keep_rows) if not k)
    pruned_sectors = tuple(s for s, k in zip(matrix.sectors, keep_cols) if not k)
    return BinaryMatrix(
        entries=entries[np.ix_(keep_rows, keep_cols)],
        regions=tuple(r for r, k in zip(matrix.regions, keep_rows) if k),
        sectors=tuple(s for s, k in zip(matrix.sectors, keep_cols) if k),
        year=matrix.year,
        pruned_regions=pruned_regions,
        pruned_sectors=pruned_sectors,
    )


def sort_by_rank(
    m: BinaryMatrix, region_order: Sequence[str], sector_order: Sequence[str]
) -> BinaryMatrix:
    """Permute rows/columns into the given id orders (for export/plotting).

    Sorting by fitness/complexity rank makes a nested matrix visibly
    triangular; the entry multiset is unchanged.
    """
    if sorted(region_order) != sorted(m.regions):
        raise OrderMismatch("region order is not a permutation of the matrix regions")
    if sorted(sector_order) != sorted(m.sectors):
        raise OrderMismatch("sector order is not a permutation of the matrix sectors")
    ridx = {rid: i for i, rid in enumerate(m.regions)}
    sidx = {sid: j for j, sid in enumerate(m.sectors)}
    rows = [ridx[r] for r in region_order]
    cols = [sidx[s] for s in sector_order]
    return BinaryMatrix(
        entries=m.entries[np.ix_(rows, cols)],
        regions=tuple(region_order),
        sectors=tuple(sector_order),
        year=m.year,
        pruned_regions=m.pruned_regions,
        pruned_sectors=m.pruned_sectors,
    )


def nestedness(matrix) -> float:
    """Paired-overlap nestedness (NODF-style), in [0, 100].

    For every pair of rows with different degrees, the smaller-degree
    row contributes the fraction of its ones shared with the larger;
    likewise for columns. Equal-degree pairs contribute zero. The score
    is the average contribution over all pairs, times 100.
    """
    ent = matrix.entries if isinstance(matrix, BinaryMatrix) else np.asarray(matrix)
    ent = ent.astype(float)
    n, m = ent.shape

    def _axis_score(mat: np.ndarray) -> float:
        deg = mat.sum(axis=1)
        overlap = mat @ mat.T
        mins = np.minimum.outer(deg, deg)
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(mins > 0, overlap / mins, 0.0)
        differ = deg[:, None] != deg[None, :]
        iu = np.triu_indices(len(deg), k=1)
        return float((frac * differ)[iu].sum())

    pairs = n * (n - 1) / 2 + m * (m - 1) / 2
    if pairs == 0:
        return 0.0
    return 100.0 * (_axis_score(ent) + _axis_score(ent.T)) / pairs


def triangularity(matrix) -> float:
    """Packing statistic of a rank-sorted matrix, in [0, 100].

    With rows sorted by descending fitness and columns by ascending
    complexity (most ubiquitous first), a nested matrix packs each row's
    ones into its own prefix, forming a triangular staircase. The score
    is 100 times the fraction of ones inside their row prefix (the
    complement of the discrepancy count). Unlike pure overlap measures,
    the spill outside the prefix is not fixed by the margins, so this
    statistic separates genuinely nested matrices from degree-preserving
    shuffles.
    """
    ent = matrix.entries if isinstance(matrix, BinaryMatrix) else np.asarray(matrix)
    ent = ent.astype(float)
    total = ent.sum()
    if total == 0:
        return 0.0
    deg = ent.sum(axis=1)
    in_prefix = np.arange(ent.shape[1])[None, :] < deg[:, None]
    packed = ent[in_prefix].sum()
    return float(100.0 * packed / total)


def degree_preserving_shuffles(
    matrix, count: int, seed: int, trades_per_sample: int | None = None
) -> list[np.ndarray]:
    """Null-model ensemble: shuffles preserving every row and column sum.

    Uses curveball trades: two random rows swap a random subset of the
    sectors they do not share, which leaves both margins intact. Samples
    are taken along one mixing chain, ``trades_per_sample`` trades apart
    (default 5x the number of rows).
    """
    ent = matrix.entries if isinstance(matrix, BinaryMatrix) else np.asarray(matrix)
    n_rows, n_cols = ent.shape
    if trades_per_sample is None:
        trades_per_sample = 5 * n_rows
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    row_sets = [set(np.flatnonzero(ent[i])) for i in range(n_rows)]

    samples = []
    for _ in range(count):
        for _ in range(trades_per_sample):
            i, j = rng.choice(n_rows, size=2, replace=False)
            a, b = row_sets[i], row_sets[j]
            a_only = a - b
            b_only = b - a
            pool = sorted(a_only | b_only)
            if not a_only or not b_only:
                continue
            take = rng.permutation(len(pool))[: len(a_only)]
            chosen = {pool[k] for k in take}
            shared = a & b
            row_sets[i] = shared | chosen
            row_sets[j] = shared | (set(pool) - chosen)
        out = np.zeros_like(ent, dtype=np.uint8)
        for i, cols in enumerate(row_sets):
            out[i, sorted(cols)] = 1
        samples.append(out)
    return samples


def write_edge_list(m: BinaryMatrix, path: str | Path) -> Path:
    """Export present (region, sector) pairs as a delimited edge list."""
    rows = [
        (m.regions[i], m.sectors[j])
        for i, j in zip(*np.nonzero(m.entries))
    ]
    meta = {"year": m.year, "format": "edge-list"}
    return write_table(path, ["region", "sector"], rows, metadata=meta)


def write_dense_grid(m: BinaryMatrix, path: str | Path) -> Path:
    """Export the 0/1 grid with a header row and a leading region column."""
    rows = [[rid, *map(int, m.entries[i])] for i, rid in enumerate(m.regions)]
    meta = {"year": m.year, "format": "dense-grid"}
    return write_table(path, ["region", *m.sectors], rows, metadata=meta)
