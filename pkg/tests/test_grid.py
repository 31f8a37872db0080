import numpy as np
import pytest

from jumpswitch import JumpSpec, build_grid, make_stream, sample_jump_times
from jumpswitch.drivers import DegenerateMarks
from jumpswitch.errors import InvalidStep, UnsortedJumps


def test_pure_mesh():
    grid = build_grid(1.0, 0.25, [])
    assert np.array_equal(grid.points, [0.0, 0.25, 0.5, 0.75, 1.0])
    assert not grid.jump_flags.any()


def test_jump_inserted_and_flagged():
    grid = build_grid(1.0, 0.5, [0.3])
    assert np.array_equal(grid.points, [0.0, 0.3, 0.5, 1.0])
    assert np.array_equal(grid.jump_flags, [False, True, False, False])


def test_horizon_snap_on_non_divisible_step():
    grid = build_grid(1.0, 0.3, [])
    assert grid.points[0] == 0.0
    assert grid.points[-1] == 1.0
    assert grid.gaps.max() <= 0.3 + 1e-12


def test_step_equal_horizon_gives_two_points():
    grid = build_grid(2.5, 2.5, [])
    assert np.array_equal(grid.points, [0.0, 2.5])


@pytest.mark.parametrize("delta", [0.0, -0.1, 1.5])
def test_invalid_step(delta):
    with pytest.raises(InvalidStep):
        build_grid(1.0, delta, [])


def test_invalid_horizon():
    with pytest.raises(InvalidStep):
        build_grid(0.0, 0.1, [])


def test_unsorted_jumps():
    with pytest.raises(UnsortedJumps):
        build_grid(1.0, 0.1, [0.5, 0.4])
    with pytest.raises(UnsortedJumps):
        build_grid(1.0, 0.1, [0.5, 0.5])
    with pytest.raises(UnsortedJumps):
        build_grid(1.0, 0.1, [1.2])
    with pytest.raises(UnsortedJumps):
        build_grid(1.0, 0.1, [-0.3])


def test_expected_point_count_with_sampled_jumps():
    # equidistant part contributes 1001 points for T=10, delta=0.01;
    # each jump adds exactly one point (mesh collisions have probability 0)
    spec = JumpSpec(1.0, DegenerateMarks(1.0))
    for trial in range(20):
        times = sample_jump_times(spec, 10.0, make_stream(77, trial))
        grid = build_grid(10.0, 0.01, times)
        assert len(grid) == 1001 + len(times)
        assert np.array_equal(grid.points[grid.jump_flags], times)


def test_union_no_invented_points():
    times = [0.123, 0.456, 0.789]
    grid = build_grid(1.0, 0.25, times)
    mesh = {0.0, 0.25, 0.5, 0.75, 1.0}
    assert set(grid.points.tolist()) == mesh | set(times)


def test_removing_jumps_recovers_equidistant_mesh():
    times = [0.11, 0.37, 0.62]
    grid = build_grid(1.0, 0.25, times)
    kept = grid.points[~grid.jump_flags]
    base = build_grid(1.0, 0.25, []).points
    assert np.array_equal(kept, base)


def test_gaps_bounded_by_step():
    times = [0.001, 0.2499999, 0.99]
    grid = build_grid(1.0, 0.25, times)
    assert grid.gaps.max() <= 0.25 + 1e-12
    assert grid.gaps.min() > 0.0


def test_collision_dedup_keeps_flag():
    grid = build_grid(1.0, 0.5, [0.5])
    assert np.array_equal(grid.points, [0.0, 0.5, 1.0])
    assert np.array_equal(grid.jump_flags, [False, True, False])


def test_near_collision_merges_to_jump_value():
    t_jump = 0.5 + 4e-13  # inside the 1e-12 * horizon merge tolerance
    grid = build_grid(1.0, 0.5, [t_jump])
    assert len(grid) == 3
    assert grid.points[1] == t_jump
    assert grid.jump_flags[1]


def test_grid_immutable():
    grid = build_grid(1.0, 0.5, [])
    with pytest.raises(ValueError):
        grid.points[0] = 0.1
