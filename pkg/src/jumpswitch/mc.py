"""Monte Carlo harness: strong-error convergence studies, ruin-time
estimation, an exact event-driven ruin oracle, and aggregation.

Trials are embarrassingly parallel.  Every trial owns the stream keyed
by (row index, trial index), results are reassembled in trial order, and
aggregation uses compensated summation in fixed index order, so tables
are bitwise identical for any worker count.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
import math

import numpy as np

from .analytic import (
    RuinModelInputs,
    expected_ruin_time,
    expected_ruin_time_reference,
    make_analytics,
    matches_reference,
)
from .ctmc import GeneratorMatrix
from .drivers import Stream, make_stream
from .errors import Empty, InvalidStep
from .models import (
    GeometricLevyParams,
    SurplusParams,
    detect_ruin,
    gl_coefficients,
    gl_exact_path,
    realize_gl_drivers,
    realize_surplus_drivers,
    surplus_coefficients,
)
from .scheme import simulate_path

ORACLE_CHUNK = 4096


@dataclass(frozen=True)
class StudyConfig:
    """A simulation study: model, step sizes, replication count, seeding."""

    generator: GeneratorMatrix
    params: GeometricLevyParams | SurplusParams
    deltas: tuple[float, ...]
    replications: int
    horizon: float
    master_seed: int
    workers: int = 1

    def __post_init__(self):
        if not self.horizon > 0.0:
            raise InvalidStep(f"horizon {self.horizon!r} must be positive")
        for delta in self.deltas:
            if not 0.0 < delta <= self.horizon:
                raise InvalidStep(f"step {delta!r} outside (0, {self.horizon!r}]")
        if self.replications < 1:
            raise ValueError(f"replications {self.replications!r} must be >= 1")
        if self.workers < 1:
            raise ValueError(f"workers {self.workers!r} must be >= 1")


@dataclass(frozen=True)
class ErrorRow:
    delta: float
    mean_sup_sq_error: float
    stderr: float
    replications: int


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    slope_stderr: float
    intercept: float
    intercept_stderr: float


@dataclass(frozen=True)
class ErrorTable:
    """Per-step strong-error summary plus the fitted log-log line."""

    rows: tuple[ErrorRow, ...]
    fit: LogLogFit


@dataclass(frozen=True)
class RuinRow:
    reserve: float
    exact_reference: float
    exact_solver: float
    simulated_mean: float
    stderr: float


@dataclass(frozen=True)
class RuinTable:
    """Per-reserve simulated ruin times next to both exact evaluators."""

    rows: tuple[RuinRow, ...]
    analytics: object


def aggregate(values) -> tuple[float, float]:
    """Sample mean and standard error, compensated and order-fixed.

    The standard error is the sample standard deviation over sqrt(n);
    a single value yields standard error 0.  Raises
    :class:`~jumpswitch.errors.Empty` on an empty sample.
    """
    vals = [float(v) for v in values]
    n = len(vals)
    if n == 0:
        raise Empty("aggregate requires at least one value")
    mean = math.fsum(vals) / n
    if n == 1:
        return mean, 0.0
    variance = math.fsum((v - mean) ** 2 for v in vals) / (n - 1)
    return mean, math.sqrt(variance / n)


def fit_loglog(deltas, means) -> LogLogFit:
    """Ordinary least squares of log(mean) on log(delta).

    Standard errors follow the usual n-2 degrees of freedom formula and
    are NaN when fewer than three points are supplied.
    """
    x = np.log(np.asarray(deltas, dtype=float))
    y = np.log(np.asarray(means, dtype=float))
    n = len(x)
    if n < 2 or len(y) != n:
        raise ValueError("log-log fit needs at least two (delta, mean) pairs")
    xm = x.mean()
    ym = y.mean()
    sxx = float(((x - xm) ** 2).sum())
    slope = float(((x - xm) * (y - ym)).sum()) / sxx
    intercept = ym - slope * xm
    if n > 2:
        resid = y - intercept - slope * x
        s2 = float((resid ** 2).sum()) / (n - 2)
        slope_stderr = math.sqrt(s2 / sxx)
        intercept_stderr = math.sqrt(s2 * (1.0 / n + xm * xm / sxx))
    else:
        slope_stderr = float("nan")
        intercept_stderr = float("nan")
    return LogLogFit(slope, slope_stderr, float(intercept), intercept_stderr)


def strong_error_trial(
    generator: GeneratorMatrix,
    params: GeometricLevyParams,
    delta: float,
    horizon: float,
    stream: Stream,
) -> float:
    """One coupled trial: sup over grid points of the squared gap between
    the Euler path and the exact path on shared noise.

    Both pre-jump and post-jump values enter the sup at flagged points,
    since both one-sided limits belong to the paths being compared.
    """
    realization = realize_gl_drivers(generator, params, horizon, delta, stream)
    euler = simulate_path(gl_coefficients(params), realization, params.y0)
    exact = gl_exact_path(params, realization)
    worst_post = float(np.abs(euler.states - exact.states).max())
    worst_pre = float(np.abs(euler.pre_jump_states - exact.pre_jump_states).max())
    return max(worst_post, worst_pre) ** 2


def ruin_trial(
    generator: GeneratorMatrix,
    params: SurplusParams,
    delta: float,
    horizon: float,
    stream: Stream,
) -> float:
    """One surplus trajectory's ruin time, truncated at the horizon."""
    realization = realize_surplus_drivers(generator, params, horizon, delta, stream)
    path = simulate_path(surplus_coefficients(params), realization, params.initial_reserve)
    return detect_ruin(path, horizon)


def _strong_error_chunk(payload):
    generator, params, delta, horizon, master_seed, row_index, start, stop = payload
    return [
        strong_error_trial(
            generator, params, delta, horizon, make_stream(master_seed, row_index, t)
        )
        for t in range(start, stop)
    ]


def _ruin_chunk(payload):
    generator, params, delta, horizon, master_seed, row_index, start, stop = payload
    return [
        ruin_trial(
            generator, params, delta, horizon, make_stream(master_seed, row_index, t)
        )
        for t in range(start, stop)
    ]


def _map_chunks(func, payloads, workers: int) -> list:
    if workers <= 1 or len(payloads) <= 1:
        return [func(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, payloads))


def _trial_payloads(common, n_trials: int, workers: int):
    chunk = max(1, -(-n_trials // max(1, workers * 4)))
    return [
        common + (start, min(start + chunk, n_trials))
        for start in range(0, n_trials, chunk)
    ]


def convergence_study(cfg: StudyConfig) -> ErrorTable:
    """Strong-error table across the configured step sizes.

    Streams are keyed by (position of the step in the configured list,
    trial index), so appending another step never perturbs existing
    rows.  Rows are reported sorted by step size; the log-log line is
    fitted to the per-step means.
    """
    if not isinstance(cfg.params, GeometricLevyParams):
        raise ValueError("convergence studies require the geometric Levy model")
    if not cfg.deltas:
        raise ValueError("at least one step size is required")
    rows = []
    for row_index, delta in enumerate(cfg.deltas):
        common = (cfg.generator, cfg.params, delta, cfg.horizon, cfg.master_seed, row_index)
        chunks = _map_chunks(
            _strong_error_chunk, _trial_payloads(common, cfg.replications, cfg.workers), cfg.workers
        )
        values = [v for chunk in chunks for v in chunk]
        mean, stderr = aggregate(values)
        rows.append(ErrorRow(float(delta), mean, stderr, cfg.replications))
    rows.sort(key=lambda r: r.delta)
    if len(rows) >= 2 and all(r.mean_sup_sq_error > 0.0 for r in rows):
        fit = fit_loglog(
            [r.delta for r in rows], [r.mean_sup_sq_error for r in rows]
        )
    else:
        nan = float("nan")
        fit = LogLogFit(nan, nan, nan, nan)
    return ErrorTable(rows=tuple(rows), fit=fit)


def ruin_study(cfg: StudyConfig, reserves) -> RuinTable:
    """Simulated expected ruin times next to both closed-form columns.

    Uses the single configured step size.  Streams are keyed by
    (position of the reserve in the given list, trial index).  The
    frozen-reference column is only defined for the demo configuration
    started in state 1 and is NaN otherwise.
    """
    if not isinstance(cfg.params, SurplusParams):
        raise ValueError("ruin studies require the surplus model")
    if len(cfg.deltas) != 1:
        raise ValueError("ruin studies use exactly one step size")
    if cfg.params.n_regimes != 2 or cfg.generator.n_regimes != 2:
        raise ValueError("closed-form ruin columns require exactly two regimes")
    reserves = [float(u) for u in reserves]
    if not reserves:
        raise ValueError("at least one reserve is required")
    for u in reserves:
        if u < 0.0:
            raise ValueError(f"reserve {u!r} must be nonnegative")

    rates = cfg.generator.rates
    inputs = RuinModelInputs(
        switch_rates=(float(rates[0, 1]), float(rates[1, 0])),
        claim_intensities=tuple(float(v) for v in cfg.params.claim_intensity),
        claim_mean=cfg.params.claim_mean,
    )
    analytics = make_analytics(inputs)
    state = cfg.params.initial_regime + 1
    use_reference = matches_reference(inputs) and state == 1

    delta = cfg.deltas[0]
    rows = []
    for row_index, u in enumerate(reserves):
        params_u = replace(cfg.params, initial_reserve=u)
        common = (cfg.generator, params_u, delta, cfg.horizon, cfg.master_seed, row_index)
        chunks = _map_chunks(
            _ruin_chunk, _trial_payloads(common, cfg.replications, cfg.workers), cfg.workers
        )
        values = [v for chunk in chunks for v in chunk]
        mean, stderr = aggregate(values)
        reference = expected_ruin_time_reference(u) if use_reference else float("nan")
        solver = expected_ruin_time(analytics, u, state)
        rows.append(RuinRow(u, reference, solver, mean, stderr))
    rows.sort(key=lambda r: r.reserve)
    return RuinTable(rows=tuple(rows), analytics=analytics)


def _exact_ruin_time(u, t_trunc, switch_rates, intensities, claim_mean, state, rng):
    """Event-driven surplus simulation with no time discretization.

    Regime sojourns are exact exponential holding times; claims arrive at
    the regime's exact rate within each sojourn (memorylessness makes the
    restart at a switch exact); ruin is checked at claim instants, the
    only times the surplus can fall.
    """
    exponential = rng.exponential
    t = 0.0
    claims = 0.0
    while True:
        sojourn_end = t + exponential(1.0 / switch_rates[state])
        boundary = sojourn_end if sojourn_end < t_trunc else t_trunc
        claim_scale = 1.0 / intensities[state]
        s = t
        while True:
            s += exponential(claim_scale)
            if s > boundary:
                break
            claims += exponential(claim_mean)
            if u + s - claims < 0.0:
                return s
        if sojourn_end >= t_trunc:
            return t_trunc
        t = sojourn_end
        state = 1 - state


def _oracle_chunk(payload):
    inputs, u, t_trunc, master_seed, chunk_index, count, state0 = payload
    stream = make_stream(master_seed, chunk_index)
    out = np.empty(count)
    for j in range(count):
        out[j] = _exact_ruin_time(
            u,
            t_trunc,
            inputs.switch_rates,
            inputs.claim_intensities,
            inputs.claim_mean,
            state0,
            stream.rng,
        )
    return out


def event_driven_ruin_oracle(
    inputs: RuinModelInputs,
    u: float,
    t_trunc: float,
    replications: int,
    master_seed: int,
    workers: int = 1,
    initial_state: int = 1,
) -> tuple[float, float]:
    """Mean and standard error of the ruin time by exact event-driven
    simulation, independent of every grid-based code path.

    Replications are processed in fixed-size chunks with one stream per
    chunk, so the result depends only on the seed, never on the worker
    count.
    """
    if replications < 1:
        raise ValueError(f"replications {replications!r} must be >= 1")
    if initial_state not in (1, 2):
        raise ValueError(f"initial_state must be 1 or 2, got {initial_state!r}")
    state0 = initial_state - 1
    payloads = []
    start = 0
    chunk_index = 0
    while start < replications:
        count = min(ORACLE_CHUNK, replications - start)
        payloads.append((inputs, u, t_trunc, master_seed, chunk_index, count, state0))
        start += count
        chunk_index += 1
    chunks = _map_chunks(_oracle_chunk, payloads, workers)
    values = np.concatenate(chunks)
    return aggregate(values)
