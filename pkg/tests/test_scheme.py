import math

import numpy as np
import pytest

from jumpswitch import (
    CoefficientSet,
    DegenerateMarks,
    DriverRealization,
    GeometricLevyParams,
    JumpSpec,
    build_grid,
    euler_step,
    gl_coefficients,
    make_stream,
    realize_drivers,
    realize_gl_drivers,
    simulate_path,
    validate_generator,
)
from jumpswitch.errors import NonFinite

TWO_STATE = validate_generator([[-0.5, 0.5], [0.5, -0.5]])
DEMO = GeometricLevyParams(
    drift=(0.15, 0.05),
    volatility=(0.1, 0.1),
    jump_factor=(-0.2, -0.1),
    jump_intensity=1.0,
    y0=10.0,
    initial_regime=0,
)

ZERO = CoefficientSet(1, lambda x, i: 0.0, lambda x, i: 0.0, lambda x, i, v: 0.0)


def manual_realization(points, flags, dws, marks, regimes, delta, horizon):
    """Hand-built driver realization for fixed-noise tests."""
    grid = build_grid(horizon, delta, np.asarray(points)[np.asarray(flags, dtype=bool)])
    assert np.array_equal(grid.points, points)
    return DriverRealization(
        grid=grid,
        brownian_increments=np.asarray(dws, dtype=float)[:, None],
        jump_times=grid.points[grid.jump_flags],
        jump_marks=np.asarray(marks, dtype=float),
        regime_path=np.asarray(regimes, dtype=np.int64),
        seed_record=(0,),
    )


class TestEulerStep:
    def test_zero_coefficients_identity(self):
        assert euler_step(3.5, 0, 0.1, 0.7, ZERO) == (3.5, 3.5)

    def test_demo_drift_step(self):
        coeffs = gl_coefficients(DEMO)
        pre, post = euler_step(10.0, 0, 0.01, 0.0, coeffs)
        expected = 10.0 + (10.0 * 0.15) * 0.01
        assert pre == expected == post
        assert abs(pre - 10.015) < 1e-12

    def test_pure_jump_step(self):
        coeffs = gl_coefficients(DEMO)
        pre, post = euler_step(10.0, 0, 0.0, 0.0, coeffs, mark=1.0)
        assert pre == 10.0
        assert post == 8.0

    def test_jump_evaluated_at_left_state(self):
        # the jump increment uses the state at the step's left endpoint,
        # not the evolved pre-jump value
        coeffs = gl_coefficients(DEMO)
        pre, post = euler_step(10.0, 0, 0.01, 0.0, coeffs, mark=1.0)
        assert post == pre + 10.0 * (-0.2)

    def test_non_finite_raises(self):
        bad = CoefficientSet(1, lambda x, i: 1e308, lambda x, i: 0.0, lambda x, i, v: 0.0)
        with pytest.raises(NonFinite):
            euler_step(1e308, 0, 1.0, 0.0, bad)

    def test_multidimensional_step(self):
        coeffs = CoefficientSet(
            2,
            drift=lambda x, i: np.array([1.0, -1.0]),
            diffusion=lambda x, i: np.eye(2),
            jump=lambda x, i, v: np.array([v, 0.0]),
        )
        x = np.array([0.0, 0.0])
        pre, post = euler_step(x, 0, 0.5, np.array([0.1, 0.2]), coeffs, mark=3.0)
        assert np.allclose(pre, [0.6, -0.3])
        assert np.allclose(post, [3.6, -0.3])


class TestSimulatePath:
    def test_zero_coefficients_constant_path(self):
        real = realize_gl_drivers(TWO_STATE, DEMO, 1.0, 0.1, make_stream(1, 0))
        path = simulate_path(ZERO, real, 4.2)
        assert (path.states == 4.2).all()
        assert (path.pre_jump_states == 4.2).all()

    def test_exponential_ode_error(self):
        # b(x) = x, no noise, no jumps: explicit Euler error for dx = x dt
        gen = validate_generator([[0.0]])
        spec = JumpSpec(1e-12, DegenerateMarks(1.0))
        real = realize_drivers(gen, spec, 1.0, 1e-4, 1, 0, make_stream(2, 0))
        coeffs = CoefficientSet(1, lambda x, i: x, lambda x, i: 0.0, lambda x, i, v: 0.0)
        path = simulate_path(coeffs, real, 1.0)
        assert abs(path.states[-1] - math.e) / math.e < 2e-4

    def test_bitwise_determinism(self):
        real = realize_gl_drivers(TWO_STATE, DEMO, 5.0, 0.01, make_stream(3, 1))
        coeffs = gl_coefficients(DEMO)
        a = simulate_path(coeffs, real, DEMO.y0)
        b = simulate_path(coeffs, real, DEMO.y0)
        assert np.array_equal(a.states, b.states)
        assert np.array_equal(a.pre_jump_states, b.pre_jump_states)

    def test_replay_recursion_exactly(self):
        real = realize_gl_drivers(TWO_STATE, DEMO, 5.0, 0.05, make_stream(4, 2))
        coeffs = gl_coefficients(DEMO)
        path = simulate_path(coeffs, real, DEMO.y0)
        x = DEMO.y0
        cursor = 0
        gaps = real.grid.gaps
        for k in range(len(real.grid) - 1):
            mark = None
            if real.grid.jump_flags[k + 1]:
                mark = real.jump_marks[cursor]
                cursor += 1
            pre, post = euler_step(
                x,
                int(real.regime_path[k]),
                gaps[k],
                real.brownian_increments[k, 0],
                coeffs,
                mark,
            )
            assert path.pre_jump_states[k + 1] == pre
            assert path.states[k + 1] == post
            x = post

    def test_no_jump_between_flagged_points(self):
        real = realize_gl_drivers(TWO_STATE, DEMO, 5.0, 0.05, make_stream(5, 0))
        path = simulate_path(gl_coefficients(DEMO), real, DEMO.y0)
        unflagged = ~real.grid.jump_flags
        assert np.array_equal(path.states[unflagged], path.pre_jump_states[unflagged])
        if real.grid.jump_flags.any():
            flagged = real.grid.jump_flags
            assert (path.states[flagged] != path.pre_jump_states[flagged]).all()

    def test_reduces_to_classical_euler_maruyama(self):
        # no jumps, single regime: must agree exactly with a plain loop
        gen = validate_generator([[0.0]])
        spec = JumpSpec(1e-12, DegenerateMarks(1.0))
        real = realize_drivers(gen, spec, 2.0, 0.01, 1, 0, make_stream(6, 0))
        mu, sigma = 0.1, 0.3
        coeffs = CoefficientSet(
            1, lambda x, i: x * mu, lambda x, i: x * sigma, lambda x, i, v: 0.0
        )
        path = simulate_path(coeffs, real, 1.0)
        x = 1.0
        dws = real.brownian_increments[:, 0]
        for k, gap in enumerate(real.grid.gaps):
            x = x + (x * mu) * gap + (x * sigma) * dws[k]
            assert path.states[k + 1] == x

    def test_left_endpoint_regime_convention(self):
        # changing the regime at a step's right endpoint never changes the step
        coeffs = gl_coefficients(DEMO)
        base = dict(
            points=[0.0, 1.0], flags=[False, False], dws=[0.3], marks=[],
            delta=1.0, horizon=1.0,
        )
        a = manual_realization(regimes=[0, 0], **base)
        b = manual_realization(regimes=[0, 1], **base)
        pa = simulate_path(coeffs, a, 10.0)
        pb = simulate_path(coeffs, b, 10.0)
        assert pa.states[-1] == pb.states[-1]

    def test_marks_applied_in_arrival_order(self):
        real = manual_realization(
            points=[0.0, 0.4, 0.5, 1.0],
            flags=[False, True, False, True],
            dws=[0.0, 0.0, 0.0],
            marks=[2.0, 5.0],
            regimes=[0, 0, 0, 0],
            delta=0.5,
            horizon=1.0,
        )
        coeffs = CoefficientSet(1, lambda x, i: 0.0, lambda x, i: 0.0, lambda x, i, v: v)
        path = simulate_path(coeffs, real, 0.0)
        assert np.array_equal(path.states, [0.0, 2.0, 2.0, 7.0])

    def test_non_finite_reports_step_index(self):
        real = manual_realization(
            points=[0.0, 0.5, 1.0], flags=[False, False, False], dws=[0.0, 0.0],
            marks=[], regimes=[0, 0, 0], delta=0.5, horizon=1.0,
        )
        coeffs = CoefficientSet(
            1, lambda x, i: float("nan"), lambda x, i: 0.0, lambda x, i, v: 0.0
        )
        with pytest.raises(NonFinite) as info:
            simulate_path(coeffs, real, 1.0)
        assert info.value.step_index == 1

    def test_dimension_mismatch_rejected(self):
        real = realize_gl_drivers(TWO_STATE, DEMO, 1.0, 0.1, make_stream(7, 0))
        coeffs = CoefficientSet(
            2, lambda x, i: np.zeros(2), lambda x, i: np.zeros((2, 2)),
            lambda x, i, v: np.zeros(2),
        )
        with pytest.raises(ValueError):
            simulate_path(coeffs, real, np.zeros(2))
