"""Coupled fitness-complexity iteration on a binary region-sector matrix.

Each step sets a region's raw fitness to the sum of the complexities of
its sectors, and a sector's raw complexity to the harmonic-style inverse
of the summed reciprocal fitness of the regions hosting it; both vectors
are then rescaled to mean one. The fixed point ranks regions by
capability and sectors by sophistication.

On strongly triangular matrices the value vectors need not converge
(some entries decay toward zero indefinitely) while the induced rankings
do; convergence is therefore declared on rankings, with value
convergence as an early exit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bipartite import BinaryMatrix
from .errors import DegenerateMatrix, NoConvergence, NumericUnderflow

#: Reciprocal fitness beyond this switches the complexity update to the
#: log-domain evaluation to survive value decay.
_LOG_FALLBACK_FLOOR = 1e-300


@dataclass(frozen=True)
class SolverConfig:
    value_tol: float = 1e-13
    rank_patience: int = 20
    max_iterations: int = 5000


@dataclass(frozen=True)
class FitnessState:
    """One iterate: mean-one positive vectors over regions and sectors."""

    f: np.ndarray
    q: np.ndarray
    iteration: int

    def __post_init__(self):
        for name in ("f", "q"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class Ranking:
    """Total order over ids: rank 1 is the highest value, ties broken by id."""

    ids: tuple[str, ...]

    @property
    def ranks(self) -> dict[str, int]:
        return {rid: i + 1 for i, rid in enumerate(self.ids)}

    def rank_of(self, rid: str) -> int:
        return self.ids.index(rid) + 1


@dataclass(frozen=True)
class FitnessResult:
    final_state: FitnessState
    regions: tuple[str, ...]
    sectors: tuple[str, ...]
    region_ranking: Ranking
    sector_ranking: Ranking
    converged_values: bool
    converged_ranks: bool
    iterations_used: int
    value_residual: float
    #: one (iteration, residual, ranks_stable) triple per iteration
    history: tuple[tuple[int, float, bool], ...] = field(repr=False, default=())

    def region_values(self) -> dict[str, float]:
        return dict(zip(self.regions, self.final_state.f))

    def sector_values(self) -> dict[str, float]:
        return dict(zip(self.sectors, self.final_state.q))


def rank(values: Sequence[float], ids: Sequence[str]) -> Ranking:
    """Descending ranking of ids by value; equal values follow id order."""
    values = np.asarray(values, dtype=float)
    if len(values) != len(ids):
        raise ValueError("values and ids differ in length")
    if not np.isfinite(values).all() or (values <= 0).any():
        raise ValueError("rank requires finite positive values")
    id_arr = np.asarray(ids)
    order = np.lexsort((id_arr, -values))  # descending value, then id
    return Ranking(ids=tuple(id_arr[order].tolist()))


def initialize(m: BinaryMatrix) -> FitnessState:
    """Uniform mean-one starting point."""
    n_regions, n_sectors = m.shape
    if n_regions == 0 or n_sectors == 0:
        raise DegenerateMatrix("empty matrix")
    return FitnessState(f=np.ones(n_regions), q=np.ones(n_sectors), iteration=0)


def _complexity_log_domain(entries: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Mean-one complexity update evaluated through logs.

    The reciprocal-fitness sums are shifted by their per-column maximum
    before exponentiation, and the mean normalization is applied in the
    log domain, so the result stays finite as long as the spread of the
    column sums is representable.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        neg_log_f = -np.log(f)
        masked = np.where(entries > 0, neg_log_f[:, None], -np.inf)
        col_max = masked.max(axis=0)
        sums = np.where(entries > 0, np.exp(masked - col_max[None, :]), 0.0).sum(axis=0)
        log_q = -(col_max + np.log(sums))
    shift = log_q.max()
    log_mean = shift + np.log(np.exp(log_q - shift).sum() / log_q.size)
    return np.exp(log_q - log_mean)


def step(m: BinaryMatrix, state: FitnessState) -> FitnessState:
    """One simultaneous update followed by mean-one normalization.

    Raw fitness: row sums of the matrix weighted by the previous
    complexities. Raw complexity: reciprocal of the column sums of the
    previous reciprocal fitness, so a sector is dragged down by the
    least fit region hosting it.
    """
    entries = m.entries.astype(float)
    f, q = state.f, state.q

    f_raw = entries @ q
    if f.min() < _LOG_FALLBACK_FLOOR:
        q_new = _complexity_log_domain(entries, f)
    else:
        q_raw = 1.0 / (entries.T @ (1.0 / f))
        q_new = q_raw / q_raw.mean()
    f_new = f_raw / f_raw.mean()

    bad_q = ~np.isfinite(q_new) | (q_new <= 0)
    if bad_q.any():
        offenders = [m.sectors[j] for j in np.flatnonzero(bad_q)[:5]]
        raise NumericUnderflow(
            f"complexity underflowed for sector(s) {offenders} at iteration {state.iteration + 1}"
        )
    bad_f = ~np.isfinite(f_new) | (f_new <= 0)
    if bad_f.any():
        offenders = [m.regions[i] for i in np.flatnonzero(bad_f)[:5]]
        raise NumericUnderflow(
            f"fitness underflowed for region(s) {offenders} at iteration {state.iteration + 1}"
        )
    return FitnessState(f=f_new, q=q_new, iteration=state.iteration + 1)


def _residual(new: FitnessState, old: FitnessState) -> float:
    rel_f = np.abs(new.f - old.f) / old.f
    rel_q = np.abs(new.q - old.q) / old.q
    return float(max(rel_f.max(), rel_q.max()))


def solve(
    m: BinaryMatrix,
    config: SolverConfig | None = None,
    start: FitnessState | None = None,
) -> FitnessResult:
    """Iterate to the fixed point and extract values plus rankings.

    Stops when the maximum relative change of both vectors drops below
    ``value_tol`` (true fixed point; rankings trivially stable from
    there), or when both rankings have been identical for
    ``rank_patience`` consecutive iterations. Rank convergence without
    value convergence is a legal, expected outcome.
    """
    config = config or SolverConfig()
    state = start if start is not None else initialize(m)

    region_arr = np.asarray(m.regions)
    sector_arr = np.asarray(m.sectors)

    def _ranking(values: np.ndarray, id_arr: np.ndarray) -> Ranking:
        return Ranking(ids=tuple(id_arr[np.lexsort((id_arr, -values))].tolist()))

    prev_region = _ranking(state.f, region_arr)
    prev_sector = _ranking(state.q, sector_arr)
    stable_count = 0
    history: list[tuple[int, float, bool]] = []
    converged_values = False
    converged_ranks = False
    residual = np.inf

    while state.iteration < config.max_iterations:
        new_state = step(m, state)
        residual = _residual(new_state, state)
        region_ranking = _ranking(new_state.f, region_arr)
        sector_ranking = _ranking(new_state.q, sector_arr)
        ranks_stable = (
            region_ranking.ids == prev_region.ids and sector_ranking.ids == prev_sector.ids
        )
        stable_count = stable_count + 1 if ranks_stable else 0
        history.append((new_state.iteration, residual, ranks_stable))
        state = new_state
        prev_region, prev_sector = region_ranking, sector_ranking

        if residual < config.value_tol:
            converged_values = True
            converged_ranks = True
            break
        if stable_count >= config.rank_patience:
            converged_ranks = True
            break

    if not converged_ranks:
        raise NoConvergence(
            f"no value or rank convergence in {config.max_iterations} iterations "
            f"(final residual {residual:.3e})"
        )
    return FitnessResult(
        final_state=state,
        regions=m.regions,
        sectors=m.sectors,
        region_ranking=prev_region,
        sector_ranking=prev_sector,
        converged_values=converged_values,
        converged_ranks=converged_ranks,
        iterations_used=state.iteration,
        value_residual=residual,
        history=tuple(history),
    )


def randomized_state(m: BinaryMatrix, seed: int) -> FitnessState:
    """Random positive mean-one starting point (for robustness checks)."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    f = rng.uniform(0.1, 10.0, size=m.shape[0])
    q = rng.uniform(0.1, 10.0, size=m.shape[1])
    return FitnessState(f=f / f.mean(), q=q / q.mean(), iteration=0)
