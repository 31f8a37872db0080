"""Jump-adapted Euler scheme for jump diffusions with regime switching.

One step from state x over a gap with Brownian increment dW in regime i:

    pre  = x + b(x, i) * gap + sigma(x, i) * dW
    post = pre + g(x, i, mark)        (only when the step ends on a jump)

The jump increment is evaluated at the step's left endpoint (state x and
regime i), matching the discrete recursion the grid is built for.  Each
jump time is its own grid point, so a step carries at most one mark.
"""

from dataclasses import dataclass
import math
from typing import Callable

import numpy as np

from .drivers import DriverRealization
from .errors import NonFinite
from .grid import TimeGrid


@dataclass(frozen=True)
class CoefficientSet:
    """Drift, diffusion, and jump coefficients of the state equation.

    For ``dimension == 1`` the callables take and return plain floats
    (diffusion returns the scalar volatility).  For higher dimensions,
    ``drift(x, i)`` returns a length-d vector, ``diffusion(x, i)`` a
    d-by-d matrix, and ``jump(x, i, v)`` a length-d vector.

    The callables must be pure and defined for every regime; global
    Lipschitz and linear-growth behaviour is the caller's contract and is
    not verified at runtime.
    """

    dimension: int
    drift: Callable
    diffusion: Callable
    jump: Callable


@dataclass(frozen=True, eq=False)
class SimulatedPath:
    """State and regime at every grid point.

    ``states`` holds the right limit (post-jump value at flagged points);
    ``pre_jump_states`` holds the left limit, which coincides with
    ``states`` everywhere except at flagged points.
    """

    grid: TimeGrid
    states: np.ndarray
    regimes: np.ndarray
    pre_jump_states: np.ndarray


def euler_step(x, regime: int, gap: float, dw, coeffs: CoefficientSet, mark=None):
    """One Euler step; returns ``(pre_jump, post_jump)`` states.

    ``mark`` is the jump mark when the step ends on a jump arrival, else
    None.  Raises :class:`~jumpswitch.errors.NonFinite` if either output
    stops being finite.
    """
    if coeffs.dimension == 1:
        pre = x + coeffs.drift(x, regime) * gap + coeffs.diffusion(x, regime) * dw
        post = pre if mark is None else pre + coeffs.jump(x, regime, mark)
        if not math.isfinite(post):
            raise NonFinite(f"state {post!r} after step from x={x!r}")
        return pre, post
    b = np.asarray(coeffs.drift(x, regime), dtype=float)
    s = np.asarray(coeffs.diffusion(x, regime), dtype=float)
    pre = x + b * gap + s @ dw
    post = pre if mark is None else pre + np.asarray(coeffs.jump(x, regime, mark), dtype=float)
    if not np.isfinite(post).all():
        raise NonFinite(f"state {post!r} after step from x={x!r}")
    return pre, post


def simulate_path(coeffs: CoefficientSet, realization: DriverRealization, y0) -> SimulatedPath:
    """Fold the Euler recursion across the realization's grid.

    Regimes follow the left-endpoint convention: the coefficients of the
    step over [t_k, t_{k+1}) are evaluated at the regime of t_k.  Marks
    are applied at flagged points in arrival order.  The result is a pure
    function of ``(coeffs, realization, y0)``.
    """
    if realization.dimension != coeffs.dimension:
        raise ValueError(
            f"realization dimension {realization.dimension} != "
            f"coefficients dimension {coeffs.dimension}"
        )
    grid = realization.grid
    flags = grid.jump_flags.tolist()
    regimes = realization.regime_path.tolist()
    n_steps = len(grid) - 1
    marks = realization.jump_marks.tolist()

    if coeffs.dimension == 1:
        drift = coeffs.drift
        diffusion = coeffs.diffusion
        jump = coeffs.jump
        gaps = grid.gaps.tolist()
        dws = realization.brownian_increments[:, 0].tolist()
        x = float(y0)
        states = [x]
        pre_states = [x]
        isfinite = math.isfinite
        cursor = 0
        for k in range(n_steps):
            i = regimes[k]
            pre = x + drift(x, i) * gaps[k] + diffusion(x, i) * dws[k]
            if flags[k + 1]:
                post = pre + jump(x, i, marks[cursor])
                cursor += 1
            else:
                post = pre
            if not isfinite(post):
                raise NonFinite(
                    f"state {post!r} at grid index {k + 1} "
                    f"(t={grid.points[k + 1]!r})",
                    step_index=k + 1,
                )
            pre_states.append(pre)
            states.append(post)
            x = post
        return SimulatedPath(
            grid=grid,
            states=np.array(states),
            regimes=realization.regime_path,
            pre_jump_states=np.array(pre_states),
        )

    x = np.array(y0, dtype=float)
    states_v = [x]
    pre_states_v = [x]
    cursor = 0
    for k in range(n_steps):
        mark = None
        if flags[k + 1]:
            mark = marks[cursor]
            cursor += 1
        try:
            pre, post = euler_step(
                x, regimes[k], grid.points[k + 1] - grid.points[k],
                realization.brownian_increments[k], coeffs, mark,
            )
        except NonFinite as exc:
            raise NonFinite(str(exc), step_index=k + 1) from None
        pre_states_v.append(pre)
        states_v.append(post)
        x = post
    return SimulatedPath(
        grid=grid,
        states=np.vstack(states_v),
        regimes=realization.regime_path,
        pre_jump_states=np.vstack(pre_states_v),
    )
