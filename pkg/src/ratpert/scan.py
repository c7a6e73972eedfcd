"""Parameter-space sweeps for the unicritical families z**d + c.

Each grid or path point is classified (escaping / attracting / candidate);
candidates get the full orbit diagnostics: summability evidence, the
obstruction growth exponent for the configured field, and the constant-field
orbit sum.  Rows are independent work items; results are always aggregated
in index order, so the output is byte-reproducible regardless of the worker
count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import CriticalRelationError, RatpertError, ShapeError
from .fields import CONSTANT_ONE, VectorFieldSpec
from .maps import MapSpec, default_escape_radius
from .mu import mu_functional
from .obstruction import obstruction_sequence
from .orbits import (
    classify_parameter,
    default_summability_window,
    iterate_orbit,
    summability_report,
)


@dataclass(frozen=True)
class Rectangle:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min <= self.re_max and self.im_min <= self.im_max):
            raise ValueError("rectangle must have re_min <= re_max and im_min <= im_max")


@dataclass(frozen=True)
class ScanConfig:
    """A sweep over a pixel-centered rectangle grid or an explicit c path."""

    d: int = 2
    region: Rectangle | None = None
    resolution: tuple[int, int] | None = None  # (nx, ny)
    path: tuple[complex, ...] | None = None
    orbit_length: int = 256
    field: VectorFieldSpec = dataclass_field(default_factory=lambda: CONSTANT_ONE)
    escape_radius: float | None = None
    worker_count: int = 1

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("family degree must be >= 2")
        if self.orbit_length < 16:
            raise ValueError("orbit_length must be >= 16")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")
        has_grid = self.region is not None or self.resolution is not None
        if has_grid == (self.path is not None):
            raise ValueError("provide either region+resolution or a path, not both")
        if has_grid:
            if self.region is None or self.resolution is None:
                raise ValueError("grid scans need both region and resolution")
            nx, ny = self.resolution
            if nx < 1 or ny < 1:
                raise ValueError("resolution must be >= 1 in each axis")
        elif not self.path:
            raise ValueError("path must be nonempty")

    def points(self) -> tuple[complex, ...]:
        """Scan points: the path as given, or grid pixel centers row-major
        (imaginary axis outer, real axis inner)."""
        if self.path is not None:
            return tuple(complex(c) for c in self.path)
        nx, ny = self.resolution
        r = self.region
        dx = (r.re_max - r.re_min) / nx
        dy = (r.im_max - r.im_min) / ny
        return tuple(
            complex(r.re_min + (ix + 0.5) * dx, r.im_min + (iy + 0.5) * dy)
            for iy in range(ny)
            for ix in range(nx)
        )


@dataclass(frozen=True)
class ScanRow:
    """Per-parameter outcome.  growth_exponent and mu_constant are only
    present for candidate rows whose orbit diagnostics succeeded; failures
    are recorded in flags, never raised."""

    c: complex
    kind: str  # "escaping" | "attracting" | "candidate"
    period: int | None
    summability: str | None
    growth_exponent: float | None
    mu_constant: complex | None
    flags: tuple[str, ...]


def _scan_point(task: tuple) -> ScanRow:
    c, d, orbit_length, field, escape_radius = task
    radius = default_escape_radius(d, c) if escape_radius is None else escape_radius
    cls = classify_parameter(c, d, n_max=orbit_length, escape_radius=radius)
    if cls.kind in ("escaping", "attracting"):
        return ScanRow(c, cls.kind, cls.period, None, None, None, ())

    flags: list[str] = []
    try:
        map = MapSpec.unicritical(d, c)
        orbit = iterate_orbit(map, 0j, n_max=orbit_length, escape_radius=radius)
    except CriticalRelationError as err:
        return ScanRow(
            c, "candidate", None, None, None, None, (f"critical-relation@{err.index}",)
        )
    except RatpertError as err:
        return ScanRow(c, "candidate", None, None, None, None, (f"orbit-error:{err}",))

    summability = None
    try:
        report = summability_report(
            orbit, default_summability_window(len(orbit.points))
        )
        summability = report.classification
    except (RatpertError, ValueError) as err:
        flags.append(f"summability-error:{err}")

    growth = None
    try:
        series = obstruction_sequence(orbit, field, orbit.truncated_at + 1)
        growth = series.growth_exponent
        flags.append(f"obstruction={series.bounded_evidence}")
    except RatpertError as err:
        flags.append(f"obstruction-error:{err}")

    mu_value = None
    if summability == "summable-evidence":
        try:
            result = mu_functional(orbit, CONSTANT_ONE)
            mu_value = result.value
            if not result.converged:
                flags.append("mu-not-converged")
        except RatpertError as err:
            flags.append(f"mu-error:{err}")

    return ScanRow(c, "candidate", None, summability, growth, mu_value, tuple(flags))


def scan_parameters(config: ScanConfig) -> tuple[ScanRow, ...]:
    """Run the sweep; rows come back in grid/path order regardless of
    worker_count, so repeated runs are byte-identical."""
    points = config.points()
    tasks = [
        (c, config.d, config.orbit_length, config.field, config.escape_radius)
        for c in points
    ]
    if config.worker_count == 1 or len(tasks) < 2:
        return tuple(_scan_point(t) for t in tasks)
    chunk = max(1, len(tasks) // (4 * config.worker_count))
    with ProcessPoolExecutor(max_workers=config.worker_count) as pool:
        rows = list(pool.map(_scan_point, tasks, chunksize=chunk))
    return tuple(rows)


@dataclass(frozen=True)
class HeatmapGrid:
    """Growth-exponent image with a parallel per-cell kind channel.

    kinds: 0 candidate (value = fitted exponent), 1 attracting (value 0
    sentinel), 2 escaping (value -1 sentinel), 3 candidate whose exponent
    is missing (value nan).
    """

    values: np.ndarray
    kinds: np.ndarray


def growth_heatmap(rows: tuple[ScanRow, ...], config: ScanConfig) -> HeatmapGrid:
    """Arrange scan rows into the (ny, nx) exponent grid of the config."""
    if config.region is None or config.resolution is None:
        raise ShapeError("growth_heatmap needs a rectangular scan config")
    nx, ny = config.resolution
    if len(rows) != nx * ny:
        raise ShapeError(f"{len(rows)} rows do not fill a {nx}x{ny} grid")
    values = np.zeros((ny, nx), dtype=float)
    kinds = np.zeros((ny, nx), dtype=np.uint8)
    for index, row in enumerate(rows):
        iy, ix = divmod(index, nx)
        if row.kind == "attracting":
            values[iy, ix] = 0.0
            kinds[iy, ix] = 1
        elif row.kind == "escaping":
            values[iy, ix] = -1.0
            kinds[iy, ix] = 2
        elif row.growth_exponent is None or not math.isfinite(row.growth_exponent):
            values[iy, ix] = math.nan
            kinds[iy, ix] = 3
        else:
            values[iy, ix] = row.growth_exponent
            kinds[iy, ix] = 0
    return HeatmapGrid(values, kinds)


def render_escape(
    config: ScanConfig,
    max_iter: int,
    julia_c: complex | None = None,
) -> np.ndarray:
    """Escape-time counts per pixel (int32, shape (ny, nx)).

    Parameter-plane mode iterates the critical orbit of z**d + c for each
    pixel c; with julia_c given, the pixel is the starting z and the map is
    fixed.  A pixel that never leaves the escape radius reports max_iter;
    otherwise the count is the first iterate index outside the radius.
    """
    if config.region is None or config.resolution is None:
        raise ValueError("render_escape needs region and resolution")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    nx, ny = config.resolution
    r = config.region
    dx = (r.re_max - r.re_min) / nx
    dy = (r.im_max - r.im_min) / ny
    xs = r.re_min + (np.arange(nx) + 0.5) * dx
    ys = r.im_min + (np.arange(ny) + 0.5) * dy
    pixels = xs[None, :] + 1j * ys[:, None]

    if julia_c is None:
        c = pixels
        z = np.zeros_like(pixels)
        corner_scale = max(abs(r.re_min), abs(r.re_max)) + max(
            abs(r.im_min), abs(r.im_max)
        )
        radius = (
            config.escape_radius
            if config.escape_radius is not None
            else max(2.0, corner_scale ** (1.0 / (config.d - 1))) + 1.0
        )
    else:
        c = np.full_like(pixels, complex(julia_c))
        z = pixels.copy()
        radius = (
            config.escape_radius
            if config.escape_radius is not None
            else default_escape_radius(config.d, julia_c)
        )

    counts = np.full(pixels.shape, max_iter, dtype=np.int32)
    alive = np.ones(pixels.shape, dtype=bool)
    for k in range(1, max_iter + 1):
        z_alive = z[alive]
        w = z_alive.copy()
        for _ in range(config.d - 1):
            w = w * z_alive
        z[alive] = w + c[alive]
        escaped = alive & (np.abs(z) > radius)
        counts[escaped] = k
        alive &= ~escaped
        if not alive.any():
            break
    return counts
