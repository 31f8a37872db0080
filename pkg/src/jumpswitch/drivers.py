"""Random drivers for one trajectory: seeded streams, jump times, marks,
Brownian increments, and the regime path, bundled so that the Euler path
and any exact-solution oracle consume identical noise.
"""

from dataclasses import dataclass

import numpy as np

from .ctmc import GeneratorMatrix, sample_regime_path
from .grid import TimeGrid, build_grid


@dataclass(frozen=True)
class DegenerateMarks:
    """Point mass: every jump carries the same mark value."""

    value: float


@dataclass(frozen=True)
class ExponentialMarks:
    """Exponential marks with the given mean."""

    mean: float

    def __post_init__(self):
        if not self.mean > 0.0:
            raise ValueError(f"exponential mark mean {self.mean!r} must be positive")


@dataclass(frozen=True)
class EmpiricalMarks:
    """Discrete marks drawn from ``values`` with the given weights."""

    values: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.weights) or not self.values:
            raise ValueError("values and weights must be equal-length and nonempty")
        w = np.asarray(self.weights, dtype=float)
        if w.min() < 0.0 or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")


MarkDistribution = DegenerateMarks | ExponentialMarks | EmpiricalMarks


@dataclass(frozen=True)
class JumpSpec:
    """Finite-activity compound-Poisson jump specification."""

    intensity: float
    marks: MarkDistribution

    def __post_init__(self):
        if not self.intensity > 0.0:
            raise ValueError(f"jump intensity {self.intensity!r} must be positive")


@dataclass(frozen=True)
class Stream:
    """A reproducible random stream plus the key that created it.

    One stream is owned by exactly one in-flight trajectory; the key is
    recorded on the realization it produces.
    """

    key: tuple[int, ...]
    rng: np.random.Generator


def make_stream(master_seed: int, *indices: int) -> Stream:
    """Deterministic, statistically independent stream per key.

    The same ``(master_seed, *indices)`` always reproduces the identical
    stream; distinct keys give independent streams.  Study harnesses key
    streams by (row index, trial index) so extending a sweep never
    perturbs existing rows.
    """
    key = (int(master_seed),) + tuple(int(i) for i in indices)
    if any(k < 0 for k in key):
        raise ValueError(f"stream key {key!r} must be nonnegative integers")
    return Stream(key, np.random.default_rng(np.random.SeedSequence(list(key))))


@dataclass(frozen=True, eq=False)
class DriverRealization:
    """All randomness consumed by one trajectory on its jump-adapted grid.

    ``brownian_increments`` has one row per grid gap with per-component
    variance equal to the gap length.  ``jump_times`` are flagged points
    of ``grid`` and ``jump_marks`` aligns with them in arrival order.
    Immutable once built; share freely across threads.
    """

    grid: TimeGrid
    brownian_increments: np.ndarray
    jump_times: np.ndarray
    jump_marks: np.ndarray
    regime_path: np.ndarray
    seed_record: tuple[int, ...]

    def __post_init__(self):
        n_gaps = len(self.grid) - 1
        if self.brownian_increments.shape[0] != n_gaps:
            raise ValueError("one Brownian increment row per grid gap required")
        if len(self.jump_times) != len(self.jump_marks):
            raise ValueError("jump_marks must align with jump_times")
        if len(self.regime_path) != len(self.grid):
            raise ValueError("regime_path must cover every grid point")
        flagged = self.grid.points[self.grid.jump_flags]
        if len(flagged) != len(self.jump_times) or not np.array_equal(
            flagged, np.asarray(self.jump_times)
        ):
            raise ValueError("flagged grid points must equal the jump times exactly")

    @property
    def dimension(self) -> int:
        return self.brownian_increments.shape[1]


def sample_jump_times(spec: JumpSpec, horizon: float, stream: Stream) -> np.ndarray:
    """Poisson arrival times in (0, horizon], truncated at the horizon.

    Gaps are cumulative exponentials at the spec intensity; arrivals
    strictly beyond the horizon are dropped so a jump never lands past
    the final grid point.
    """
    if not horizon > 0.0:
        raise ValueError(f"horizon {horizon!r} must be positive")
    scale = 1.0 / spec.intensity
    rng = stream.rng
    out = []
    t = rng.exponential(scale)
    while t <= horizon:
        out.append(t)
        t += rng.exponential(scale)
    return np.array(out)


def sample_marks(spec: JumpSpec, count: int, stream: Stream) -> np.ndarray:
    """``count`` i.i.d. marks from the spec's mark distribution."""
    if count < 0:
        raise ValueError(f"count {count!r} must be nonnegative")
    marks = spec.marks
    if isinstance(marks, DegenerateMarks):
        return np.full(count, marks.value)
    if isinstance(marks, ExponentialMarks):
        return stream.rng.exponential(marks.mean, size=count)
    idx = stream.rng.choice(len(marks.values), size=count, p=np.asarray(marks.weights))
    return np.asarray(marks.values)[idx]


def sample_brownian_increments(grid: TimeGrid, dimension: int, stream: Stream) -> np.ndarray:
    """Independent Normal(0, gap) increments, one row per gap."""
    if len(grid) < 2:
        raise ValueError("grid needs at least two points")
    scales = np.sqrt(grid.gaps)[:, None]
    return stream.rng.normal(0.0, scales, size=(len(grid) - 1, dimension))


def realize_drivers(
    generator: GeneratorMatrix,
    spec: JumpSpec,
    horizon: float,
    delta: float,
    dimension: int,
    initial_regime: int,
    stream: Stream,
) -> DriverRealization:
    """Draw every driver for one trajectory in a fixed order.

    Consumption order is part of the contract: jump times, then the
    regime path, then Brownian increments, then marks.  Re-running with
    the same stream key therefore reproduces the realization bitwise,
    and every consumer of the realization sees identical noise.
    """
    jump_times = sample_jump_times(spec, horizon, stream)
    grid = build_grid(horizon, delta, jump_times)
    regime_path = sample_regime_path(generator, grid, initial_regime, stream)
    increments = sample_brownian_increments(grid, dimension, stream)
    marks = sample_marks(spec, len(jump_times), stream)
    return DriverRealization(
        grid=grid,
        brownian_increments=increments,
        jump_times=grid.points[grid.jump_flags],
        jump_marks=marks,
        regime_path=regime_path,
        seed_record=stream.key,
    )
