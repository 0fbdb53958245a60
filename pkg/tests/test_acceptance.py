"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines as they complete. Tolerances and runtime budgets are asserted, not
just reported.
"""

import functools
import hashlib
import math
import time
from pathlib import Path

import numpy as np
import pytest

from devineq import cli, pipeline, synthetic
from devineq.bipartite import (
    BinaryMatrix,
    binarize,
    degree_preserving_shuffles,
    rca,
    sort_by_rank,
    triangularity,
)
from devineq.fitness import randomized_state, solve, step
from devineq.inequality import (
    GroupedDistribution,
    SectorWageTable,
    between_sector_theil,
    decompose,
    gini,
    theil,
)
from devineq.ingest import write_region_sector_records
from devineq.smoothing import KernelConfig, bootstrap_bands, kernel_regress
from devineq.bipartite import WeightedBipartitePanel


def criterion(number, description):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {number:>2} FAIL  {description}")
                raise
            print(f"ACCEPTANCE {number:>2} PASS  {description}")

        return wrapper

    return decorate


def labeled(entries, year=1998):
    entries = np.asarray(entries, dtype=np.uint8)
    return BinaryMatrix(
        entries,
        tuple(f"r{i:03d}" for i in range(entries.shape[0])),
        tuple(f"s{j:03d}" for j in range(entries.shape[1])),
        year,
    )


@criterion(1, "Theil decomposition identity on 500 randomized grouped populations")
def test_decomposition_identity_at_scale():
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(500):
        n_groups = int(rng.integers(1, 51))
        sizes = rng.integers(1, 2001, size=n_groups)
        overshoot = sizes.sum() - 10_000
        if overshoot > 0:
            sizes = np.maximum(1, sizes - overshoot // n_groups - 1)
        groups = []
        for size in sizes:
            incomes = rng.lognormal(mean=1.0, sigma=1.0, size=size)
            incomes[rng.random(size) < 0.03] = 0.0
            groups.append(incomes)
        if sum(g.sum() for g in groups) == 0:
            groups[0][0] = 1.0
        result = decompose(GroupedDistribution.from_member_incomes(groups))
        direct = theil(np.concatenate(groups))
        rel = abs(result.between + result.within - direct) / max(direct, 1e-300)
        worst = max(worst, rel)
    elapsed = time.perf_counter() - start
    assert worst <= 1e-12, f"worst relative identity error {worst:.3e}"
    assert elapsed < 5.0, f"took {elapsed:.2f}s"


@criterion(2, "Theil extremes: equality exactly 0; single owner of n=4 reaches log 4")
def test_theil_extremes():
    assert theil([3.7, 3.7, 3.7, 3.7]) == 0.0
    value = theil([123.4, 0.0, 0.0, 0.0])
    assert abs(value - math.log(4)) <= 1e-12 * math.log(4)


@criterion(3, "All-ones matrix is a fixed point at iteration 1 (residual <= 1e-13)")
def test_all_ones_fixed_point():
    m = labeled(np.ones((6, 6)))
    result = solve(m)
    assert result.iterations_used == 1
    assert result.converged_values and result.converged_ranks
    assert np.allclose(result.final_state.f, 1.0) and np.allclose(result.final_state.q, 1.0)
    after = step(m, result.final_state)
    assert np.abs(after.f - result.final_state.f).max() <= 1e-13
    assert np.abs(after.q - result.final_state.q).max() <= 1e-13


@criterion(4, "Rankings identical from uniform and 10 randomized starts, 100 matrices")
def test_ranking_robust_to_initial_conditions():
    rng = np.random.default_rng(4001)
    for k in range(100):
        density = float(rng.uniform(0.2, 0.8))
        entries = synthetic.random_binary_matrix(50, 30, density=density, seed=5000 + k)
        m = labeled(entries)
        baseline = solve(m)
        for s in range(10):
            result = solve(m, start=randomized_state(m, seed=9000 + 10 * k + s))
            assert result.region_ranking.ids == baseline.region_ranking.ids, f"matrix {k} start {s}"
            assert result.sector_ranking.ids == baseline.sector_ranking.ids, f"matrix {k} start {s}"


@criterion(5, "Perfect staircases up to 200x100 rank by diversification exactly")
def test_staircase_diversification_order():
    for n_regions, n_sectors in ((10, 5), (60, 30), (120, 60), (200, 100)):
        entries = synthetic.staircase_matrix(n_regions, n_sectors)
        m = labeled(entries)
        result = solve(m)
        row_sums = entries.sum(axis=1)
        expected = [
            rid
            for _, rid in sorted(
                zip(-row_sums.astype(float), m.regions), key=lambda t: (t[0], t[1])
            )
        ]
        assert list(result.region_ranking.ids) == expected, f"{n_regions}x{n_sectors}"


@criterion(6, "Rank-sorted nested-plus-noise matrix beats 99 of 100 margin shuffles")
def test_triangularity_witness():
    rng = np.random.default_rng(6001)
    entries = synthetic.staircase_matrix(60, 30).copy()
    flips = rng.random(entries.shape) < 0.05
    entries[flips] = 1 - entries[flips]
    entries[entries.sum(axis=1) == 0, 0] = 1
    for j in np.flatnonzero(entries.sum(axis=0) == 0):
        entries[rng.integers(entries.shape[0]), j] = 1

    def sorted_score(binary_entries):
        m = labeled(binary_entries)
        result = solve(m)
        ubiquitous_first = tuple(reversed(result.sector_ranking.ids))
        return triangularity(sort_by_rank(m, result.region_ranking.ids, ubiquitous_first))

    observed = sorted_score(entries)
    null = np.array(
        [sorted_score(s) for s in degree_preserving_shuffles(entries, count=100, seed=6002)]
    )
    assert (observed > null).sum() >= 99, f"beats only {(observed > null).sum()}/100"


@criterion(7, "Kernel: constants exact; linear recovered within 0.05 at n=2000")
def test_kernel_correctness():
    start = time.perf_counter()
    x = np.linspace(0, 1, 100)
    est = kernel_regress(x, np.full(100, 2.5), KernelConfig(grid_points=80))
    assert np.allclose(est.estimate[est.supported], 2.5, rtol=1e-12)

    rng = np.random.default_rng(7001)
    x = rng.uniform(0, 1, 2000)
    est = kernel_regress(x, x.copy(), KernelConfig(bandwidth=0.03, grid_points=200))
    grid = est.axes[0]
    interior = (grid >= 0.1) & (grid <= 0.9) & est.supported
    max_err = np.abs(est.estimate[interior] - grid[interior]).max()
    elapsed = time.perf_counter() - start
    assert max_err <= 0.05, f"max interior error {max_err:.4f}"
    assert elapsed < 10.0, f"took {elapsed:.2f}s"


@criterion(8, "90% bootstrap bands cover a linear truth at 0.85-0.95, 200 repetitions")
def test_bootstrap_coverage():
    start = time.perf_counter()
    hits = total = 0
    config_proto = dict(bootstrap_reps=400, grid_points=100, band_level=0.90)
    for rep in range(200):
        rng = np.random.default_rng(8000 + rep)
        x = rng.uniform(0, 1, 500)
        y = 1.0 + 2.0 * x + 0.5 * rng.standard_normal(500)
        est = bootstrap_bands(x, y, KernelConfig(seed=rep, **config_proto))
        grid = est.axes[0]
        interior = (grid >= 0.1) & (grid <= 0.9) & est.supported
        truth = 1.0 + 2.0 * grid[interior]
        hits += ((est.lower[interior] <= truth) & (truth <= est.upper[interior])).sum()
        total += interior.sum()
    coverage = hits / total
    elapsed = time.perf_counter() - start
    assert 0.85 <= coverage <= 0.95, f"coverage {coverage:.4f}"
    assert elapsed < 120.0, f"took {elapsed:.2f}s"


@criterion(9, "Synthetic Kuznets shapes: peak within 0.05; monotone curve nondecreasing")
def test_kuznets_shape_recovery():
    rng = np.random.default_rng(9001)
    x = rng.uniform(0, 1, 2500)
    y = -((x - 0.5) ** 2) + 0.05 * rng.standard_normal(x.size)
    est = kernel_regress(x, y, KernelConfig(grid_points=200))
    grid = est.axes[0]
    peak = grid[np.nanargmax(np.where(est.supported, est.estimate, -np.inf))]
    assert abs(peak - 0.5) <= 0.05, f"peak at {peak:.3f}"

    y_mono = 0.2 + 1.7 * x + 0.05 * rng.standard_normal(x.size)
    est_mono = kernel_regress(x, y_mono, KernelConfig(grid_points=200))
    interior = np.flatnonzero(est_mono.supported & (grid >= 0.1) & (grid <= 0.9))
    diffs = np.diff(est_mono.estimate[interior])
    share = (diffs >= 0).mean()
    assert share >= 0.95, f"only {share:.2%} of adjacent pairs nondecreasing"


@criterion(10, "run-all on the bundled 50x20x5 panel: < 60 s, byte-identical reruns")
def test_run_all_determinism(tmp_path):
    records = synthetic.region_sector_records(
        n_regions=50, n_sectors=20, years=(1998, 1999, 2000, 2001, 2002), seed=42
    )
    panel_path = tmp_path / "panel.csv"
    write_region_sector_records(records, panel_path)
    out = tmp_path / "out"

    def run_once():
        import contextlib
        import io

        with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(
            io.StringIO()
        ):
            code = cli.main(
                ["run-all", "--panel", str(panel_path), "--seed", "42", "--out", str(out)]
            )
        assert code == 0
        return {
            str(p.relative_to(out)): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(out.rglob("*"))
            if p.is_file()
        }

    start = time.perf_counter()
    first = run_once()
    second = run_once()
    elapsed = time.perf_counter() - start
    assert first == second
    assert "report.json" in first and "summary.csv" in first
    assert elapsed < 60.0, f"two runs took {elapsed:.2f}s"


@criterion(11, "Scaling all wages by 7.3 changes no RCA, matrix, ranking, or Theil")
def test_scale_invariance_suite():
    records = synthetic.region_sector_records(
        n_regions=30, n_sectors=12, years=(1998,), seed=1101
    )
    panel = WeightedBipartitePanel.from_records(records)
    scaled = WeightedBipartitePanel(
        regions=panel.regions,
        sectors=panel.sectors,
        wages={1998: panel.wage_slice(1998) * 7.3},
        employment={1998: panel.employment_slice(1998).copy()},
    )

    base_rca = rca(panel, 1998)
    scaled_rca = rca(scaled, 1998)
    nonzero = base_rca.values > 0
    rel = np.abs(scaled_rca.values - base_rca.values)[nonzero] / base_rca.values[nonzero]
    assert rel.max() <= 1e-12
    assert np.array_equal(scaled_rca.values == 0, base_rca.values == 0)
    # guard: no entry sits so close to the threshold that scaling could flip it
    assert np.abs(base_rca.values[nonzero] - 1.0).min() > 1e-9

    base_m = binarize(base_rca, 1.0)
    scaled_m = binarize(scaled_rca, 1.0)
    assert np.array_equal(base_m.entries, scaled_m.entries)
    assert base_m.regions == scaled_m.regions and base_m.sectors == scaled_m.sectors

    base_fit = solve(base_m)
    scaled_fit = solve(scaled_m)
    assert base_fit.region_ranking.ids == scaled_fit.region_ranking.ids
    assert base_fit.sector_ranking.ids == scaled_fit.sector_ranking.ids

    e = panel.employment_slice(1998)
    avg_base = panel.average_wage(1998)
    avg_scaled = scaled.average_wage(1998)
    for i in range(len(panel.regions)):
        if e[i].sum() == 0:
            continue
        t_base = between_sector_theil(
            SectorWageTable(sectors=panel.sectors, employment=e[i], avg_wage=avg_base[i])
        )
        t_scaled = between_sector_theil(
            SectorWageTable(sectors=panel.sectors, employment=e[i], avg_wage=avg_scaled[i])
        )
        assert abs(t_base - t_scaled) <= 1e-12 * max(t_base, 1.0)

    incomes = np.random.default_rng(1102).lognormal(size=500)
    assert abs(theil(incomes) - theil(7.3 * incomes)) <= 1e-12 * theil(incomes)
    assert abs(gini(incomes) - gini(7.3 * incomes)) <= 1e-12
