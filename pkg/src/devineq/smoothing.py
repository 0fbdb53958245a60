"""Nadaraya-Watson kernel regression with bootstrap confidence bands.

Estimates are kernel-weighted local averages on a regular grid, in one
or two predictor dimensions (product Gaussian kernel in 2D). Bands are
pointwise percentile intervals from pairs-resampling: observations are
resampled jointly with replacement, so no model assumption enters.

Grid cells receiving almost no kernel mass are masked as low-support
instead of being reported, which keeps smooth color maps from
extrapolating into empty regions of the predictor plane.

All randomness flows from an explicit seed through a PCG64 generator;
each bootstrap replicate derives its own stream from (seed, replicate),
so results do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DegenerateBandwidth, TooFewObservations
from .tableio import write_table

#: Package-wide default seed, used whenever no seed is given explicitly.
DEFAULT_SEED = 12345


@dataclass(frozen=True)
class Observation:
    """One data point: 1 or 2 predictors and a response."""

    x: tuple[float, ...]
    y: float


@dataclass(frozen=True)
class KernelConfig:
    bandwidth: float | tuple[float, ...] | None = None  # None -> Silverman rule
    grid_points: int | tuple[int, ...] = 200
    grid_range: tuple[tuple[float, float], ...] | None = None  # None -> data range
    bootstrap_reps: int = 1000
    band_level: float = 0.90
    seed: int = DEFAULT_SEED
    support_floor: float = 0.01  # fraction of the densest cell's kernel mass

    def __post_init__(self):
        if not 0.0 < self.band_level < 1.0:
            raise ValueError("band_level must lie in (0, 1)")
        if self.bootstrap_reps < 1:
            raise ValueError("bootstrap_reps must be >= 1")
        if not 0.0 <= self.support_floor < 1.0:
            raise ValueError("support_floor must lie in [0, 1)")


@dataclass(frozen=True)
class KernelEstimate:
    """Grid, point estimates, optional bands, and the low-support mask.

    ``estimate`` is NaN at masked cells; ``mass`` is the raw kernel
    weight each cell received. For 2D the arrays are indexed
    [axis0, axis1].
    """

    axes: tuple[np.ndarray, ...]
    estimate: np.ndarray
    lower: np.ndarray | None
    upper: np.ndarray | None
    mass: np.ndarray
    supported: np.ndarray
    metadata: dict

    @property
    def ndim(self) -> int:
        return len(self.axes)


def _as_arrays(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[1] not in (1, 2):
        raise ValueError("x must have 1 or 2 predictor columns")
    if y.shape != (x.shape[0],):
        raise ValueError("y must be one response per observation")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValueError("observations must be finite")
    if x.shape[0] < 2:
        raise TooFewObservations(f"need at least 2 observations, got {x.shape[0]}")
    return x, y


def observations_to_arrays(data: Sequence[Observation]) -> tuple[np.ndarray, np.ndarray]:
    xs = np.array([obs.x for obs in data], dtype=float)
    ys = np.array([obs.y for obs in data], dtype=float)
    return xs, ys


def silverman_bandwidth(x: np.ndarray) -> np.ndarray:
    """Rule-of-thumb bandwidth per predictor: 1.06 * sd * n^(-1/(d+4))."""
    n, d = x.shape
    sd = x.std(axis=0)
    if (sd == 0).any():
        flat = [f"column {j}" for j in np.flatnonzero(sd == 0)]
        raise DegenerateBandwidth(f"constant predictor ({', '.join(flat)}) gives zero bandwidth")
    return 1.06 * sd * n ** (-1.0 / (d + 4))


def _resolve_bandwidth(x: np.ndarray, config: KernelConfig) -> np.ndarray:
    d = x.shape[1]
    if config.bandwidth is None:
        return silverman_bandwidth(x)
    h = np.atleast_1d(np.asarray(config.bandwidth, dtype=float))
    if h.size == 1:
        h = np.repeat(h, d)
    if h.size != d or (h <= 0).any():
        raise DegenerateBandwidth(f"bandwidth {config.bandwidth!r} invalid for {d} predictor(s)")
    return h


def _grid_axes(x: np.ndarray, config: KernelConfig) -> tuple[np.ndarray, ...]:
    d = x.shape[1]
    counts = config.grid_points
    if isinstance(counts, int):
        counts = (counts,) * d
    if len(counts) != d:
        raise ValueError("one grid point count per predictor required")
    axes = []
    for j in range(d):
        if config.grid_range is not None:
            lo, hi = config.grid_range[j]
        else:
            lo, hi = float(x[:, j].min()), float(x[:, j].max())
        axes.append(np.array([lo]) if lo == hi else np.linspace(lo, hi, counts[j]))
    return tuple(axes)


def _kernel_factors(
    axes: tuple[np.ndarray, ...], x: np.ndarray, h: np.ndarray
) -> list[np.ndarray]:
    # One (grid_j x n) Gaussian factor per dimension; the product kernel
    # on the full grid is contracted from these without materializing it.
    return [
        np.exp(-0.5 * ((axis[:, None] - x[None, :, j]) / h[j]) ** 2)
        for j, axis in enumerate(axes)
    ]


def _contract(factors: list[np.ndarray], weights: np.ndarray) -> np.ndarray:
    """Sum over observations of the product kernel times weights."""
    if len(factors) == 1:
        return factors[0] @ weights
    return factors[0] @ (factors[1] * weights[None, :]).T


def _estimate_on_grid(
    factors: list[np.ndarray], y: np.ndarray, counts: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray]:
    c = np.ones(y.size) if counts is None else counts.astype(float)
    mass = _contract(factors, c)
    num = _contract(factors, c * y)
    with np.errstate(invalid="ignore", divide="ignore"):
        est = np.where(mass > 0, num / np.where(mass > 0, mass, 1.0), np.nan)
    return est, mass


def _metadata(h: np.ndarray, config: KernelConfig, with_bands: bool) -> dict:
    meta = {
        "kernel": "gaussian",
        "bandwidth": tuple(h.tolist()),
        "support_floor": config.support_floor,
    }
    if with_bands:
        meta.update(
            {
                "bootstrap_reps": config.bootstrap_reps,
                "band_level": config.band_level,
                "band_type": "pointwise-percentile",
                "rng": "pcg64",
                "seed": config.seed,
            }
        )
    return meta


def kernel_regress(x, y, config: KernelConfig | None = None) -> KernelEstimate:
    """Kernel-weighted local average of y over a grid of x.

    Low-support cells (kernel mass below ``support_floor`` times the
    densest cell's mass) come back masked with NaN estimates.
    """
    config = config or KernelConfig()
    x, y = _as_arrays(x, y)
    h = _resolve_bandwidth(x, config)
    axes = _grid_axes(x, config)
    factors = _kernel_factors(axes, x, h)
    est, mass = _estimate_on_grid(factors, y)
    supported = mass >= config.support_floor * mass.max()
    est = np.where(supported, est, np.nan)
    return KernelEstimate(
        axes=axes, estimate=est, lower=None, upper=None, mass=mass,
        supported=supported, metadata=_metadata(h, config, with_bands=False),
    )


def _bootstrap_counts(n: int, seed: int, replicate: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, replicate))))
    return np.bincount(rng.integers(0, n, size=n), minlength=n)


def bootstrap_bands(x, y, config: KernelConfig | None = None) -> KernelEstimate:
    """Kernel estimate plus pointwise percentile bands from pairs resampling.

    Each replicate resamples the n observations with replacement and
    re-evaluates the estimator on the same grid with the same bandwidth;
    the band at a grid point is the [(1-level)/2, 1-(1-level)/2]
    empirical quantile interval of the replicate estimates, widened if
    necessary to include the point estimate. Same seed, same data:
    bit-identical bands.
    """
    config = config or KernelConfig()
    x, y = _as_arrays(x, y)
    h = _resolve_bandwidth(x, config)
    axes = _grid_axes(x, config)
    factors = _kernel_factors(axes, x, h)
    est, mass = _estimate_on_grid(factors, y)
    supported = mass >= config.support_floor * mass.max()
    est = np.where(supported, est, np.nan)

    n = y.size
    reps = np.empty((config.bootstrap_reps,) + est.shape)
    for b in range(config.bootstrap_reps):
        counts = _bootstrap_counts(n, config.seed, b)
        reps[b], _ = _estimate_on_grid(factors, y, counts)

    alpha = (1.0 - config.band_level) / 2.0
    reps[:, ~supported] = 0.0  # masked afterward; avoids all-NaN quantile slices
    with np.errstate(invalid="ignore"):
        lower = np.nanquantile(reps, alpha, axis=0)
        upper = np.nanquantile(reps, 1.0 - alpha, axis=0)
    lower = np.where(supported, np.fmin(lower, est), np.nan)
    upper = np.where(supported, np.fmax(upper, est), np.nan)
    return KernelEstimate(
        axes=axes, estimate=est, lower=lower, upper=upper, mass=mass,
        supported=supported, metadata=_metadata(h, config, with_bands=True),
    )


def colormap_grid(x, y, config: KernelConfig | None = None) -> KernelEstimate:
    """2D kernel surface for color-map rendering (no bands)."""
    x_arr = np.asarray(x, dtype=float)
    if x_arr.ndim != 2 or x_arr.shape[1] != 2:
        raise ValueError("colormap_grid requires exactly 2 predictors")
    return kernel_regress(x_arr, y, config)


def write_curve(estimate: KernelEstimate, path: str | Path) -> Path:
    """1D export: (x, estimate, lower, upper, supported); masked cells
    carry no numbers."""
    if estimate.ndim != 1:
        raise ValueError("write_curve expects a 1D estimate")
    rows = []
    for i, xv in enumerate(estimate.axes[0]):
        ok = bool(estimate.supported[i])
        rows.append(
            (
                float(xv),
                float(estimate.estimate[i]) if ok else None,
                float(estimate.lower[i]) if ok and estimate.lower is not None else None,
                float(estimate.upper[i]) if ok and estimate.upper is not None else None,
                ok,
            )
        )
    return write_table(
        path, ["x", "estimate", "lower", "upper", "supported"], rows, metadata=estimate.metadata
    )


def write_grid(estimate: KernelEstimate, path: str | Path) -> Path:
    """2D long-format export: (x1, x2, estimate, supported)."""
    if estimate.ndim != 2:
        raise ValueError("write_grid expects a 2D estimate")
    rows = []
    for i, x1 in enumerate(estimate.axes[0]):
        for j, x2 in enumerate(estimate.axes[1]):
            ok = bool(estimate.supported[i, j])
            rows.append(
                (float(x1), float(x2), float(estimate.estimate[i, j]) if ok else None, ok)
            )
    return write_table(path, ["x1", "x2", "estimate", "supported"], rows, metadata=estimate.metadata)
