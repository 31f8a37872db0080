"""Closed-form expected ruin times for the two-regime surplus model.

With two environment states, exponential claim sizes and unit premium
rate, the expected time to ruin from reserve u starting in state i is

    xi_1(u) = A1 + u / (eta - 1) + B * exp(k * u)
    xi_2(u) = A2 + u / (eta - 1) + B * D * exp(k * u)

where eta is the stationary expected claim load per unit time, k is the
unique negative root of a characteristic cubic, D is a fixed ratio, and
(A1, B, A2) solve a 3x3 linear system.  The formulas require the
net-profit condition to fail (rho = 1/eta - 1 < 0), which makes ruin
certain and the expected ruin time finite.

A historical reference tabulation of the two-state demo configuration
(switch rates (1, 1), claim intensities (1, 2), claim mean 1) reported
B = 1.481194, which equals -1/k to all printed digits and does not
satisfy the defining linear system; the system's solution is
B = -0.2315480, and large-sample event-driven simulation supports the
solved value.  Both evaluators are kept so either column of that
tabulation can be reproduced: the solver-backed one is the contract,
the frozen one exists for regression comparison only.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import (
    DenominatorZero,
    NotRuinCertain,
    RootCountViolation,
    SingularSystem,
)

RESIDUAL_TOL = 1e-10

#: Demo configuration the frozen reference constants belong to.
REFERENCE_INPUTS_KEY = ((1.0, 1.0), (1.0, 2.0), 1.0)
#: Constants of the reference tabulation, kept verbatim.
REFERENCE_CONSTANTS = {"k": -0.6751309, "A1": 2.712742, "B": 1.481194}


@dataclass(frozen=True)
class RuinModelInputs:
    """Two-state ruin model: switch rates, claim intensities, claim mean."""

    switch_rates: tuple[float, float]
    claim_intensities: tuple[float, float]
    claim_mean: float

    def __post_init__(self):
        if len(self.switch_rates) != 2 or len(self.claim_intensities) != 2:
            raise ValueError("the closed forms cover exactly two environment states")
        vals = (*self.switch_rates, *self.claim_intensities, self.claim_mean)
        if min(vals) <= 0.0:
            raise ValueError(f"all model inputs must be positive, got {vals!r}")


@dataclass(frozen=True)
class RuinAnalytics:
    """Everything needed to evaluate the expected-ruin-time closed forms.

    ``claim_load`` is eta, ``premium_margin`` is rho = 1/eta - 1 (negative
    in scope), ``exponent`` is the negative cubic root k, ``exp_ratio``
    is D, and (``const_state1``, ``exp_coeff``, ``const_state2``) is the
    solved coefficient triple (A1, B, A2).
    """

    stationary: tuple[float, float]
    claim_load: float
    premium_margin: float
    exponent: float
    exp_ratio: float
    const_state1: float
    exp_coeff: float
    const_state2: float
    cubic_residual: float
    system_residual: float

    def __post_init__(self):
        if not self.premium_margin < 0.0:
            raise ValueError("analytics only exist under a negative premium margin")
        if not self.exponent < 0.0:
            raise ValueError("the cubic root must be negative")
        if self.system_residual > RESIDUAL_TOL:
            raise ValueError(
                f"coefficient system residual {self.system_residual!r} "
                f"exceeds {RESIDUAL_TOL}"
            )


def eta_rho(pi, claim_intensities, claim_mean: float) -> tuple[float, float]:
    """Stationary claim load eta and premium margin rho = 1/eta - 1.

    Raises :class:`~jumpswitch.errors.NotRuinCertain` when rho >= 0, in
    which case the closed forms do not apply.
    """
    eta = float(sum(p * lam * claim_mean for p, lam in zip(pi, claim_intensities)))
    rho = 1.0 / eta - 1.0
    if rho >= 0.0:
        raise NotRuinCertain(eta, rho)
    return eta, rho


def _cbrt(v: float) -> float:
    return math.copysign(abs(v) ** (1.0 / 3.0), v)


def _real_cubic_roots(c2: float, c1: float, c0: float) -> list[float]:
    """Real roots of x**3 + c2 x**2 + c1 x + c0 by discriminant cases."""
    shift = -c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2 ** 3 / 27.0 - c2 * c1 / 3.0 + c0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0.0:
        root = math.sqrt(disc)
        return [shift + _cbrt(-q / 2.0 + root) + _cbrt(-q / 2.0 - root)]
    if disc == 0.0:
        if p == 0.0:
            return [shift]
        u = _cbrt(-q / 2.0)
        return sorted({shift + 2.0 * u, shift - u})
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m)
    arg = min(1.0, max(-1.0, arg))
    theta = math.acos(arg) / 3.0
    return sorted(shift + m * math.cos(theta - 2.0 * math.pi * j / 3.0) for j in range(3))


def _cubic_coefficients(inputs: RuinModelInputs) -> tuple[float, float, float]:
    q1, q2 = inputs.switch_rates
    lam1, lam2 = inputs.claim_intensities
    mu = inputs.claim_mean
    r1 = 1.0 / mu - lam1
    r2 = 1.0 / mu - lam2
    c2 = r1 + r2 - q1 - q2
    c1 = r1 * r2 - r1 * q2 - r2 * q1 - q1 / mu - q2 / mu
    c0 = -r1 * q2 / mu - r2 * q1 / mu
    return c2, c1, c0


def solve_negative_root(inputs: RuinModelInputs) -> float:
    """Unique negative real root k of the characteristic cubic.

    Solved in closed form with discriminant classification, then polished
    with Newton steps; if the residual still exceeds 1e-10, a bisection
    fallback on [-cauchy_bound, 0] is used.  Raises
    :class:`~jumpswitch.errors.RootCountViolation` when the negative real
    root is not unique (inputs outside the formulas' regime) or cannot be
    located to tolerance.
    """
    c2, c1, c0 = _cubic_coefficients(inputs)

    def poly(x: float) -> float:
        return ((x + c2) * x + c1) * x + c0

    def dpoly(x: float) -> float:
        return (3.0 * x + 2.0 * c2) * x + c1

    negative = [r for r in _real_cubic_roots(c2, c1, c0) if r < 0.0]
    if len(negative) != 1:
        raise RootCountViolation(
            f"expected exactly one negative real root, found {len(negative)} "
            f"for cubic coefficients ({c2!r}, {c1!r}, {c0!r})"
        )
    k = negative[0]
    for _ in range(3):
        slope = dpoly(k)
        if slope == 0.0:
            break
        k -= poly(k) / slope

    if abs(poly(k)) > RESIDUAL_TOL:
        # closed form lost precision; fall back to bisection on [-bound, 0]
        bound = 1.0 + max(abs(c2), abs(c1), abs(c0))
        lo, hi = -bound, 0.0
        flo, fhi = poly(lo), poly(hi)
        if flo == 0.0:
            k = lo
        elif not flo * fhi < 0.0:
            raise RootCountViolation(
                f"no sign change on [{lo!r}, 0]; cannot bracket the negative root"
            )
        else:
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                fmid = poly(mid)
                if fmid == 0.0:
                    lo = hi = mid
                    break
                if flo * fmid < 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fmid
            k = 0.5 * (lo + hi)
    if abs(poly(k)) > RESIDUAL_TOL or not k < 0.0:
        raise RootCountViolation(
            f"root solver failed: k={k!r}, residual={poly(k)!r}"
        )
    return k


def compute_D(inputs: RuinModelInputs, k: float) -> float:
    """Ratio D linking the exponential terms of the two initial states."""
    q1 = inputs.switch_rates[0]
    lam1 = inputs.claim_intensities[0]
    mu = inputs.claim_mean
    denominator = q1 + k * mu * q1
    scale = q1 * (1.0 + abs(k * mu))
    if abs(denominator) <= 1e-13 * scale:
        raise DenominatorZero(
            f"q1 * (1 + k * mu) = {denominator!r} vanishes for k={k!r}"
        )
    numerator = q1 + k * (mu * q1 + mu * lam1 - 1.0) - k * k * mu
    return numerator / denominator


def solve_coefficients(
    inputs: RuinModelInputs, k: float, exp_ratio: float, eta: float
) -> tuple[float, float, float]:
    """Coefficient triple (A1, B, A2) from the defining 3x3 linear system.

    Solved by pivoted elimination; the returned triple satisfies the
    system with max residual at most 1e-10 or the call raises
    :class:`~jumpswitch.errors.SingularSystem`.
    """
    q1 = inputs.switch_rates[0]
    lam1 = inputs.claim_intensities[0]
    mu = inputs.claim_mean
    kmu1 = k * mu + 1.0
    if abs(kmu1) <= 1e-13 * (1.0 + abs(k * mu)):
        raise SingularSystem(f"k * mu + 1 = {kmu1!r} vanishes")
    matrix = np.array(
        [
            [q1, 0.0, -q1],
            [1.0, 1.0 / kmu1, 0.0],
            [0.0, exp_ratio / kmu1, 1.0],
        ]
    )
    rhs = np.array([eta - lam1 * mu, mu, mu]) / (eta - 1.0)
    try:
        solution = np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"coefficient system is singular: {exc}") from exc
    residual = float(np.abs(matrix @ solution - rhs).max())
    if residual > RESIDUAL_TOL:
        raise SingularSystem(
            f"coefficient system residual {residual!r} exceeds {RESIDUAL_TOL}"
        )
    a1, b, a2 = (float(v) for v in solution)
    return a1, b, a2


def stationary_pair(inputs: RuinModelInputs) -> tuple[float, float]:
    """Stationary law of the two-state switch: (q2, q1) / (q1 + q2)."""
    q1, q2 = inputs.switch_rates
    total = q1 + q2
    return q2 / total, q1 / total


def make_analytics(inputs: RuinModelInputs) -> RuinAnalytics:
    """Run the full closed-form pipeline for a two-state model."""
    pi = stationary_pair(inputs)
    eta, rho = eta_rho(pi, inputs.claim_intensities, inputs.claim_mean)
    k = solve_negative_root(inputs)
    c2, c1, c0 = _cubic_coefficients(inputs)
    cubic_residual = abs(((k + c2) * k + c1) * k + c0)
    exp_ratio = compute_D(inputs, k)
    a1, b, a2 = solve_coefficients(inputs, k, exp_ratio, eta)
    q1 = inputs.switch_rates[0]
    lam1 = inputs.claim_intensities[0]
    mu = inputs.claim_mean
    kmu1 = k * mu + 1.0
    rhs = np.array([eta - lam1 * mu, mu, mu]) / (eta - 1.0)
    fitted = np.array(
        [
            q1 * a1 - q1 * a2,
            a1 + b / kmu1,
            b * exp_ratio / kmu1 + a2,
        ]
    )
    system_residual = float(np.abs(fitted - rhs).max())
    return RuinAnalytics(
        stationary=pi,
        claim_load=eta,
        premium_margin=rho,
        exponent=k,
        exp_ratio=exp_ratio,
        const_state1=a1,
        exp_coeff=b,
        const_state2=a2,
        cubic_residual=cubic_residual,
        system_residual=system_residual,
    )


def expected_ruin_time(analytics: RuinAnalytics, u: float, state: int) -> float:
    """Expected ruin time from reserve u with the environment in ``state``.

    ``state`` is 1 or 2, matching the two closed-form evaluators.
    """
    if u < 0.0:
        raise ValueError(f"reserve u={u!r} must be nonnegative")
    linear = u / (analytics.claim_load - 1.0)
    decay = analytics.exp_coeff * math.exp(analytics.exponent * u)
    if state == 1:
        return analytics.const_state1 + linear + decay
    if state == 2:
        return analytics.const_state2 + linear + decay * analytics.exp_ratio
    raise ValueError(f"state must be 1 or 2, got {state!r}")


def matches_reference(inputs: RuinModelInputs, tol: float = 1e-12) -> bool:
    """True when the inputs match the demo configuration the frozen
    reference constants were tabulated for."""
    ref_q, ref_lam, ref_mu = REFERENCE_INPUTS_KEY
    return (
        all(abs(a - b) <= tol for a, b in zip(inputs.switch_rates, ref_q))
        and all(abs(a - b) <= tol for a, b in zip(inputs.claim_intensities, ref_lam))
        and abs(inputs.claim_mean - ref_mu) <= tol
    )


def expected_ruin_time_reference(u: float) -> float:
    """State-1 evaluator frozen to the reference tabulation's constants.

    Only meaningful for the demo configuration; see the module docstring
    for why this differs from the solver-backed evaluator at small u.
    """
    if u < 0.0:
        raise ValueError(f"reserve u={u!r} must be nonnegative")
    c = REFERENCE_CONSTANTS
    return c["A1"] + 2.0 * u + c["B"] * math.exp(c["k"] * u)
