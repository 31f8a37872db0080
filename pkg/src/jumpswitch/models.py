"""Built-in concrete models.

Two models ship with the library:

* a one-dimensional regime-switching geometric Levy process, whose
  multiplicative structure admits a closed-form solution usable as an
  exact oracle on shared noise, and
* a regime-modulated insurance surplus process (unit premium rate,
  exponential claim sizes, claim intensity driven by the regime), the
  applied example the ruin analytics are written for.
"""

from dataclasses import dataclass, replace
import math

import numpy as np

from .ctmc import GeneratorMatrix
from .drivers import (
    DegenerateMarks,
    DriverRealization,
    ExponentialMarks,
    JumpSpec,
    Stream,
    realize_drivers,
)
from .scheme import CoefficientSet, SimulatedPath


@dataclass(frozen=True)
class GeometricLevyParams:
    """Per-regime drift, volatility and relative jump size of the state.

    dX = X * drift dt + X * volatility dW + X * jump_factor dN with all
    three read off the current regime.  ``jump_factor > -1`` keeps the
    closed-form solution strictly positive.
    """

    drift: tuple[float, ...]
    volatility: tuple[float, ...]
    jump_factor: tuple[float, ...]
    jump_intensity: float
    y0: float
    initial_regime: int

    def __post_init__(self):
        n = len(self.drift)
        if not (len(self.volatility) == len(self.jump_factor) == n and n >= 1):
            raise ValueError("per-regime parameter arrays must have equal length")
        if min(self.jump_factor) <= -1.0:
            raise ValueError("jump factors must stay above -1")
        if not self.jump_intensity > 0.0:
            raise ValueError("jump intensity must be positive")
        if not self.y0 > 0.0:
            raise ValueError("y0 must be positive")
        if not 0 <= self.initial_regime < n:
            raise ValueError(f"initial regime {self.initial_regime} outside 0..{n - 1}")

    @property
    def n_regimes(self) -> int:
        return len(self.drift)


@dataclass(frozen=True)
class SurplusParams:
    """Regime-modulated surplus: premium rate 1, exponential claims.

    ``claim_intensity[i]`` is the claim arrival rate while the regime is
    ``i``; claim sizes are exponential with mean ``claim_mean`` and the
    reserve starts at ``initial_reserve``.
    """

    claim_intensity: tuple[float, ...]
    claim_mean: float
    initial_reserve: float
    initial_regime: int

    def __post_init__(self):
        if not self.claim_intensity or min(self.claim_intensity) <= 0.0:
            raise ValueError("claim intensities must be positive")
        if not self.claim_mean > 0.0:
            raise ValueError("claim mean must be positive")
        if self.initial_reserve < 0.0:
            raise ValueError("initial reserve must be nonnegative")
        n = len(self.claim_intensity)
        if not 0 <= self.initial_regime < n:
            raise ValueError(f"initial regime {self.initial_regime} outside 0..{n - 1}")

    @property
    def n_regimes(self) -> int:
        return len(self.claim_intensity)


def gl_coefficients(params: GeometricLevyParams) -> CoefficientSet:
    """Coefficient set of the geometric Levy model (marks are ignored)."""
    mu = params.drift
    sig = params.volatility
    fac = params.jump_factor
    return CoefficientSet(
        dimension=1,
        drift=lambda x, i: x * mu[i],
        diffusion=lambda x, i: x * sig[i],
        jump=lambda x, i, v: x * fac[i],
    )


def gl_jump_spec(params: GeometricLevyParams) -> JumpSpec:
    """Jump driver of the geometric Levy model: mark values are unused."""
    return JumpSpec(params.jump_intensity, DegenerateMarks(1.0))


def realize_gl_drivers(
    generator: GeneratorMatrix,
    params: GeometricLevyParams,
    horizon: float,
    delta: float,
    stream: Stream,
) -> DriverRealization:
    return realize_drivers(
        generator, gl_jump_spec(params), horizon, delta, 1, params.initial_regime, stream
    )


def gl_exact_path(params: GeometricLevyParams, realization: DriverRealization) -> SimulatedPath:
    """Closed-form solution evaluated on the same drivers as the Euler path.

    Per grid cell with left regime i, gap h and Brownian increment w:

        y_pre  = y * exp(h * drift_i + w * vol_i - 0.5 * h * vol_i**2)
        y_post = y_pre * (1 + jump_factor_i)   at flagged points, else y_pre

    The regime is frozen at the cell's left endpoint, including for the
    jump factor, mirroring the discrete scheme; switches inside a cell
    are invisible at this resolution, a bias that vanishes with the step.
    Consumes nothing from any stream: it is a pure function of the
    realization, so Euler and exact paths share identical noise.
    """
    mu = params.drift
    sig = params.volatility
    fac = params.jump_factor
    grid = realization.grid
    flags = grid.jump_flags.tolist()
    regimes = realization.regime_path.tolist()
    gaps = grid.gaps.tolist()
    dws = realization.brownian_increments[:, 0].tolist()
    exp = math.exp

    y = float(params.y0)
    states = [y]
    pre_states = [y]
    for k in range(len(gaps)):
        i = regimes[k]
        s = sig[i]
        pre = y * exp(gaps[k] * mu[i] + dws[k] * s - 0.5 * gaps[k] * s * s)
        post = pre * (1.0 + fac[i]) if flags[k + 1] else pre
        pre_states.append(pre)
        states.append(post)
        y = post
    return SimulatedPath(
        grid=grid,
        states=np.array(states),
        regimes=realization.regime_path,
        pre_jump_states=np.array(pre_states),
    )


def surplus_coefficients(params: SurplusParams) -> CoefficientSet:
    """Surplus dynamics: unit drift, no diffusion, claims subtract marks."""
    return CoefficientSet(
        dimension=1,
        drift=lambda x, i: 1.0,
        diffusion=lambda x, i: 0.0,
        jump=lambda x, i, v: -v,
    )


def thin_claim_arrivals(
    realization: DriverRealization,
    intensities: tuple[float, ...],
    stream: Stream,
) -> np.ndarray:
    """Acceptance mask for regime-modulated thinning of candidate claims.

    Candidates were generated at the maximal intensity; each survives
    with probability intensity[r] / max_intensity where r is the regime
    at the candidate's left grid neighbour.  Consumes one uniform per
    candidate regardless of the outcome.
    """
    lam_max = max(intensities)
    flagged = np.flatnonzero(realization.grid.jump_flags)
    us = stream.rng.random(len(flagged))
    accept = np.empty(len(flagged), dtype=bool)
    regimes = realization.regime_path
    for j, idx in enumerate(flagged):
        left_regime = regimes[idx - 1]
        accept[j] = us[j] < intensities[left_regime] / lam_max
    return accept


def realize_surplus_drivers(
    generator: GeneratorMatrix,
    params: SurplusParams,
    horizon: float,
    delta: float,
    stream: Stream,
) -> DriverRealization:
    """Drivers for the surplus model with regime-modulated claim arrivals.

    Candidate claims arrive at the maximal per-regime intensity and each
    is kept, or not, by thinning against the regime at its left grid
    neighbour.  Rejected candidates remain grid points but carry no jump.
    Stream order extends the base contract: candidate times, regimes,
    Brownian increments, marks, then the thinning uniforms.
    """
    lam_max = max(params.claim_intensity)
    spec = JumpSpec(lam_max, ExponentialMarks(params.claim_mean))
    raw = realize_drivers(
        generator, spec, horizon, delta, 1, params.initial_regime, stream
    )
    accept = thin_claim_arrivals(raw, params.claim_intensity, stream)
    flags = raw.grid.jump_flags.copy()
    flagged = np.flatnonzero(flags)
    flags[flagged[~accept]] = False
    thinned_grid = replace(raw.grid, points=raw.grid.points, jump_flags=flags)
    return DriverRealization(
        grid=thinned_grid,
        brownian_increments=raw.brownian_increments,
        jump_times=raw.jump_times[accept],
        jump_marks=raw.jump_marks[accept],
        regime_path=raw.regime_path,
        seed_record=raw.seed_record,
    )


def detect_ruin(path: SimulatedPath, horizon: float) -> float:
    """First grid time with negative post-jump state, or the horizon.

    The surplus drifts upward between claims, so the reserve can only
    turn negative at a claim instant; checking grid points is therefore
    exact given the path.
    """
    if path.states.ndim != 1:
        raise ValueError("ruin detection requires a one-dimensional path")
    below = np.flatnonzero(path.states < 0.0)
    if len(below) == 0:
        return float(horizon)
    return float(path.grid.points[below[0]])
