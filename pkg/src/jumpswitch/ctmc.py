"""Continuous-time Markov chain machinery for the regime process.

The environment regime follows a CTMC with generator matrix Q whose
off-diagonal entries are nonnegative transition rates and whose rows sum
to zero.  Over a time gap ``dt`` the one-step transition probabilities
are ``exp(dt * Q)``, which is what the simulation uses to advance the
regime from one grid point to the next.  Regimes are indexed from 0.
"""

from bisect import bisect_right
from dataclasses import dataclass
import math

import numpy as np

from .errors import NegativeOffDiagonal, Reducible, RowSumViolation

ROW_SUM_TOL = 1e-12
CLIP_TOL = 1e-12
PROB_ROW_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Validated CTMC generator: nonnegative off-diagonals, zero row sums.

    The rate matrix is copied and frozen on construction; instances are
    immutable and safe to share across threads.
    """

    n_regimes: int
    rates: np.ndarray

    def __post_init__(self):
        rates = np.array(self.rates, dtype=float)
        if rates.ndim != 2 or rates.shape[0] != rates.shape[1]:
            raise ValueError(f"generator must be square, got shape {rates.shape}")
        if self.n_regimes < 1 or rates.shape[0] != self.n_regimes:
            raise ValueError(
                f"n_regimes={self.n_regimes} inconsistent with shape {rates.shape}"
            )
        off = rates.copy()
        np.fill_diagonal(off, 0.0)
        if off.min() < 0.0:
            i, j = divmod(int(np.argmin(off)), self.n_regimes)
            raise NegativeOffDiagonal(
                f"rate q[{i},{j}]={rates[i, j]!r} is negative"
            )
        sums = rates.sum(axis=1)
        worst = int(np.argmax(np.abs(sums)))
        if abs(sums[worst]) > ROW_SUM_TOL:
            raise RowSumViolation(
                f"row {worst} sums to {sums[worst]!r}, expected 0 within {ROW_SUM_TOL}"
            )
        rates.setflags(write=False)
        object.__setattr__(self, "rates", rates)


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Row-stochastic one-step transition probabilities over a span ``dt``."""

    n_regimes: int
    probs: np.ndarray
    dt: float

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if self.dt < 0.0:
            raise ValueError(f"dt={self.dt!r} must be nonnegative")
        if probs.min() < 0.0 or probs.max() > 1.0:
            raise ValueError("transition probabilities must lie in [0, 1]")
        sums = probs.sum(axis=1)
        if np.abs(sums - 1.0).max() > PROB_ROW_TOL:
            raise ValueError(
                f"rows must sum to 1 within {PROB_ROW_TOL}, worst {sums!r}"
            )
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)


def validate_generator(rates) -> GeneratorMatrix:
    """Validate a raw rate matrix and wrap it as a :class:`GeneratorMatrix`.

    The input is copied, never modified.  Raises
    :class:`~jumpswitch.errors.NegativeOffDiagonal` or
    :class:`~jumpswitch.errors.RowSumViolation` on contract failures.
    """
    arr = np.asarray(rates, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ValueError(f"generator must be a square matrix, got shape {arr.shape}")
    return GeneratorMatrix(arr.shape[0], arr)


def _expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring over a truncated series.

    The argument is halved until its infinity norm is at most 0.5, the
    series is summed until terms fall below 1e-17, and the result is
    squared back up.  Adequate for the small dense generators used here.
    """
    norm = float(np.abs(a).sum(axis=1).max())
    squarings = 0
    if norm > 0.5:
        squarings = int(math.ceil(math.log2(norm / 0.5)))
        a = a / (2.0 ** squarings)
    n = a.shape[0]
    result = np.eye(n)
    term = np.eye(n)
    for j in range(1, 40):
        term = term @ a / j
        result = result + term
        if float(np.abs(term).max()) <= 1e-17:
            break
    for _ in range(squarings):
        result = result @ result
    return result


def transition_matrix(generator: GeneratorMatrix, dt: float) -> TransitionMatrix:
    """One-step transition matrix ``exp(dt * Q)`` for a nonnegative span.

    Tiny negative entries produced by roundoff (above -1e-12) are clipped
    to zero and rows are renormalized to sum to one; anything more
    negative signals a kernel defect and raises.
    """
    if dt < 0.0:
        raise ValueError(f"dt={dt!r} must be nonnegative")
    probs = _expm(dt * generator.rates)
    low = float(probs.min())
    if low < -CLIP_TOL:
        raise RuntimeError(
            f"matrix exponential produced entry {low!r} below -{CLIP_TOL}"
        )
    np.clip(probs, 0.0, None, out=probs)
    probs /= probs.sum(axis=1, keepdims=True)
    np.clip(probs, 0.0, 1.0, out=probs)
    return TransitionMatrix(generator.n_regimes, probs, float(dt))


def stationary_distribution(generator: GeneratorMatrix) -> np.ndarray:
    """Stationary law pi with ``pi @ Q = 0`` and ``sum(pi) = 1``.

    One balance equation is replaced by the normalization constraint and
    the system is solved with a pivoted factorization.  Raises
    :class:`~jumpswitch.errors.Reducible` when the chain has no unique
    strictly positive stationary law.
    """
    n = generator.n_regimes
    if n == 1:
        return np.array([1.0])
    a = generator.rates.T.copy()
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise Reducible(f"generator is reducible: {exc}") from exc
    scale = max(1.0, float(np.abs(generator.rates).max()))
    residual = float(np.abs(pi @ generator.rates).max())
    if residual > 1e-9 * scale or pi.min() <= 0.0:
        raise Reducible(
            f"generator is reducible: no strictly positive stationary law "
            f"(residual {residual!r}, min component {float(pi.min())!r})"
        )
    return pi


def sample_next_regime(transition: TransitionMatrix, current: int, u: float) -> int:
    """Advance one step using a uniform variate ``u`` in [0, 1).

    Returns the state whose cumulative probability interval contains
    ``u``; whatever tail mass remains past the second-to-last cumulative
    sum falls to the last state.
    """
    cum = np.cumsum(transition.probs[current])
    return int(np.searchsorted(cum[:-1], u, side="right"))


def sample_regime_path(generator: GeneratorMatrix, grid, initial: int, stream) -> np.ndarray:
    """Sample the regime at every grid point, starting from ``initial``.

    Each step advances with the transition matrix of that step's gap.
    One-step matrices are cached per distinct gap length (rounded to 15
    significant digits); near-equidistant grids have only a handful of
    distinct gaps, so the cache removes almost all exponential work.
    Consumes exactly one uniform from ``stream`` per step.
    """
    points = grid.points
    n_steps = len(points) - 1
    if n_steps < 0:
        raise ValueError("grid must contain at least one point")
    if not 0 <= initial < generator.n_regimes:
        raise ValueError(f"initial regime {initial} outside 0..{generator.n_regimes - 1}")
    seq = np.empty(len(points), dtype=np.int64)
    seq[0] = initial
    if n_steps == 0:
        return seq

    gaps = np.diff(points)
    uniq, inverse = np.unique(gaps, return_inverse=True)
    tables = []
    slot_by_key: dict[str, int] = {}
    slot_of_uniq = np.empty(len(uniq), dtype=np.int64)
    for j, gap in enumerate(uniq):
        key = f"{gap:.15g}"
        slot = slot_by_key.get(key)
        if slot is None:
            slot = len(tables)
            slot_by_key[key] = slot
            probs = transition_matrix(generator, float(gap)).probs
            tables.append([tuple(np.cumsum(row)) for row in probs])
        slot_of_uniq[j] = slot
    slots = slot_of_uniq[inverse].tolist()

    us = stream.rng.random(n_steps).tolist()
    last = generator.n_regimes - 1
    current = int(initial)
    out = seq  # local alias for the hot loop
    for k in range(n_steps):
        cumrow = tables[slots[k]][current]
        current = bisect_right(cumrow, us[k], 0, last)
        out[k + 1] = current
    return seq
