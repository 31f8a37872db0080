"""Jump-adapted time grids: equidistant mesh merged with jump times."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import InvalidStep, UnsortedJumps

GAP_SLACK = 1e-12
MERGE_REL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing times from 0 to the horizon, each flagged as a
    jump arrival or not, with every gap at most the nominal step."""

    points: np.ndarray
    jump_flags: np.ndarray
    delta: float
    horizon: float

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        flags = np.asarray(self.jump_flags, dtype=bool)
        if points.ndim != 1 or points.shape != flags.shape or len(points) < 2:
            raise ValueError("points and jump_flags must be equal-length 1-d arrays")
        if points[0] != 0.0 or points[-1] != self.horizon:
            raise ValueError("grid must start at 0 and end exactly at the horizon")
        gaps = np.diff(points)
        if gaps.min() <= 0.0:
            raise ValueError("grid points must be strictly increasing")
        if gaps.max() > self.delta + GAP_SLACK:
            raise ValueError(
                f"largest gap {gaps.max()!r} exceeds step {self.delta!r}"
            )
        points.setflags(write=False)
        flags.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "jump_flags", flags)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.points)


def build_grid(horizon: float, delta: float, jump_times) -> TimeGrid:
    """Merge the equidistant mesh over [0, horizon] with the jump times.

    Mesh points are k * delta as absolute times (no accumulated drift),
    with the final mesh point snapped to the horizon.  Points closer than
    1e-12 * horizon are merged; on a collision the jump flag and the jump
    time win, except at the horizon itself which stays exact.
    """
    if not horizon > 0.0:
        raise InvalidStep(f"horizon {horizon!r} must be positive")
    if not 0.0 < delta <= horizon:
        raise InvalidStep(f"step {delta!r} outside (0, {horizon!r}]")
    jumps = [float(t) for t in jump_times]
    tol = MERGE_REL_TOL * horizon
    for idx in range(len(jumps)):
        if not tol < jumps[idx] <= horizon:
            raise UnsortedJumps(
                f"jump time {jumps[idx]!r} outside (0, {horizon!r}]"
            )
        if idx and jumps[idx] - jumps[idx - 1] <= tol:
            raise UnsortedJumps(
                f"jump times {jumps[idx - 1]!r} and {jumps[idx]!r} are not "
                f"strictly increasing (separation below {tol!r})"
            )

    n_mesh = int(math.ceil(horizon / delta - 1e-9))
    mesh = [k * delta for k in range(n_mesh)]
    if horizon - mesh[-1] > delta * (1.0 + 1e-12):
        # ratio horizon/delta sits marginally above an integer; keep gaps <= delta
        mesh.append(n_mesh * delta)
    mesh.append(horizon)

    points: list[float] = []
    flags: list[bool] = []
    mi = ji = 0
    while mi < len(mesh) or ji < len(jumps):
        if ji < len(jumps) and (mi == len(mesh) or jumps[ji] <= mesh[mi]):
            t, is_jump = jumps[ji], True
            ji += 1
        else:
            t, is_jump = mesh[mi], False
            mi += 1
        if points and t - points[-1] <= tol:
            flags[-1] = flags[-1] or is_jump
            if is_jump:
                points[-1] = t
        else:
            points.append(t)
            flags.append(is_jump)
    points[-1] = horizon  # a jump within tolerance of the horizon snaps onto it

    return TimeGrid(np.array(points), np.array(flags, dtype=bool), float(delta), float(horizon))
