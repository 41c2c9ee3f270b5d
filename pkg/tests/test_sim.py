import itertools
import math
import random

import pytest

from rsl import (
    GraspOutOfRange,
    HandFull,
    Number,
    Program,
    RobotState,
    SimError,
    Statement,
    UnknownObject,
    World,
    WorldError,
    check,
    load_world,
    run,
    step,
    trace_to_jsonl,
)
from rsl.sim import wrap_heading

from support import headings_close, oracle_execute, statement_as_tuple

WORLD = World({"box": (1.0, 0.5), "crate": (2.0, -1.0), "bin": (0.2, 0.2)})


def program(source):
    outcome = check(source)
    assert not outcome.diagnostics, source
    return outcome.program


def stmt(keyword, *args):
    built = []
    for a in args:
        built.append(Number(float(a), str(a)) if isinstance(a, (int, float)) else a)
    return Statement(keyword, tuple(built))


def test_forward_along_heading_zero():
    state = step(RobotState(), WORLD, stmt("forward", 2))
    assert (state.x, state.y, state.heading) == (2.0, 0.0, 0.0)


def test_turnleft_twice_accumulates():
    state = RobotState()
    for _ in range(2):
        state = step(state, WORLD, stmt("turnleft", 1.57))
    assert abs(state.heading - 3.14) < 1e-9


def test_goto_sets_position_keeps_heading():
    state = step(RobotState(heading=0.7), WORLD, stmt("goto", 3, 4))
    assert (state.x, state.y) == (3.0, 4.0)
    assert state.heading == 0.7


def test_grasp_out_of_range():
    world = World({"cup": (10.0, 0.0)})
    with pytest.raises(GraspOutOfRange):
        step(RobotState(), world, stmt("grasp", "cup"))


def test_grasp_unknown_object():
    with pytest.raises(UnknownObject):
        step(RobotState(), WORLD, stmt("grasp", "ghost"))
    with pytest.raises(UnknownObject):
        step(RobotState(), WORLD, stmt("approach", "ghost"))


def test_grasp_with_hand_full():
    world = World({"a": (0.1, 0.0), "b": (0.2, 0.0)})
    state = step(RobotState(), world, stmt("grasp", "a"))
    with pytest.raises(HandFull):
        step(state, world, stmt("grasp", "b"))


def test_camera_accumulates_without_clamping():
    state = RobotState()
    for _ in range(10):
        state = step(state, WORLD, stmt("lookup", 2))
    state = step(state, WORLD, stmt("lookleft", 1.5))
    state = step(state, WORLD, stmt("lookright", 0.25))
    assert state.cam_tilt == 20.0
    assert state.cam_pan == 1.25


def test_two_step_kinematics():
    result = run(program("forward 2; turnright 1.5707963; forward 2;"), WORLD)
    assert not isinstance(result, SimError)
    assert abs(result.x - 2.0) < 1e-6
    assert abs(result.y - (-2.0)) < 1e-6


def test_perceive_sets_flag_only():
    result = run(program("perceive;"), WORLD)
    assert result.perceived
    assert (result.x, result.y, result.heading) == (0.0, 0.0, 0.0)


def test_approach_parks_short_of_object_facing_it():
    world = World({"table": (3.0, 0.0)})
    state = step(RobotState(), world, stmt("approach", "table"))
    assert abs(state.x - 2.5) < 1e-12
    assert abs(state.y) < 1e-12
    assert headings_close(state.heading, 0.0)


def test_approach_then_grasp_composes_at_boundary():
    world = World({"bottle": (2.0, 2.0)})
    state = step(RobotState(), world, stmt("approach", "bottle"))
    state = step(state, world, stmt("grasp", "bottle"))
    assert state.held == "bottle"


def test_approach_then_grasp_far_object_fails():
    world = World({"table": (3.0, 0.0), "cup": (30.0, 0.0)})
    result = run(program("approach table; grasp cup;"), world)
    assert isinstance(result, GraspOutOfRange)
    assert len(result.state.trace) == 1


def test_run_returns_error_with_partial_trace():
    world = World({"box": (0.3, 0.0)})
    result = run(program("forward 1; grasp box; backward 1;"), world)
    assert isinstance(result, GraspOutOfRange)
    # forward executed, grasp failed at index 1.
    assert len(result.state.trace) == 1
    assert result.statement.keyword == "grasp"


def test_trace_length_equals_statement_count():
    result = run(program("forward 1; turnleft 1; perceive; goto 0, 0;"), WORLD)
    assert len(result.trace) == 4


def test_heading_wrap_convention():
    assert wrap_heading(math.pi) == pytest.approx(math.pi)
    assert wrap_heading(-math.pi) == pytest.approx(math.pi)
    assert wrap_heading(3 * math.pi) == pytest.approx(math.pi)
    assert wrap_heading(math.pi + 0.1) == pytest.approx(-math.pi + 0.1)
    assert wrap_heading(0.0) == 0.0


def test_inverse_motions_restore_state():
    rng = random.Random(5)
    for _ in range(200):
        start = RobotState(
            x=rng.uniform(-5, 5), y=rng.uniform(-5, 5), heading=rng.uniform(-3, 3)
        )
        d = rng.uniform(0.001, 10)
        there = step(start, WORLD, stmt("forward", d))
        back = step(there, WORLD, stmt("backward", d))
        assert abs(back.x - start.x) < 1e-9
        assert abs(back.y - start.y) < 1e-9
        a = rng.uniform(0.001, 6)
        left = step(start, WORLD, stmt("turnleft", a))
        right = step(left, WORLD, stmt("turnright", a))
        assert headings_close(right.heading, start.heading)


def test_translation_invariance_of_pose_relative_programs():
    rng = random.Random(6)
    relative = ["forward", "backward", "turnleft", "turnright",
                "lookup", "lookdown", "lookleft", "lookright", "perceive"]
    for _ in range(100):
        statements = []
        for _ in range(rng.randrange(1, 6)):
            kw = rng.choice(relative)
            statements.append(stmt(kw) if kw == "perceive" else stmt(kw, round(rng.uniform(0.1, 3), 3)))
        prog = Program(tuple(statements))
        dx, dy = rng.uniform(-10, 10), rng.uniform(-10, 10)
        base = run(prog, WORLD, RobotState(x=1.0, y=2.0, heading=0.4))
        moved = run(prog, WORLD, RobotState(x=1.0 + dx, y=2.0 + dy, heading=0.4))
        assert abs(moved.x - (base.x + dx)) < 1e-9
        assert abs(moved.y - (base.y + dy)) < 1e-9
        assert headings_close(moved.heading, base.heading)


def test_matches_independent_oracle_on_small_grid():
    atoms = [
        stmt("forward", 1.5),
        stmt("turnleft", 0.9),
        stmt("turnright", 1.2),
        stmt("goto", 2, 1),
        stmt("approach", "box"),
        stmt("grasp", "box"),
        stmt("perceive"),
    ]
    for length in range(3):
        for combo in itertools.product(atoms, repeat=length):
            _assert_matches_oracle(combo)


def _assert_matches_oracle(statements):
    result = run(Program(tuple(statements)), WORLD)
    expected = oracle_execute(
        [statement_as_tuple(s) for s in statements],
        WORLD.objects,
        WORLD.grasp_range,
        WORLD.reach_offset,
    )
    if isinstance(result, SimError):
        assert isinstance(expected, tuple), statements
        kind, executed = expected
        assert type(result).__name__ == kind
        assert len(result.state.trace) == executed
    else:
        assert isinstance(expected, dict), statements
        assert abs(result.x - expected["x"]) < 1e-9
        assert abs(result.y - expected["y"]) < 1e-9
        assert headings_close(result.heading, expected["heading"])
        assert abs(result.cam_pan - expected["cam_pan"]) < 1e-9
        assert abs(result.cam_tilt - expected["cam_tilt"]) < 1e-9
        assert result.held == expected["held"]
        assert result.perceived == expected["perceived"]


def test_world_loading_and_validation():
    world = load_world('{"objects": {"cup": [1, 2]}, "grasp_range": 0.4, "reach_offset": 0.3}')
    assert world.objects["cup"] == (1.0, 2.0)
    assert world.grasp_range == 0.4
    with pytest.raises(WorldError):
        load_world("not json")
    with pytest.raises(WorldError):
        load_world('{"objects": {"3bad": [0, 0]}}')
    with pytest.raises(WorldError):
        load_world('{"objects": {"cup": [0]}}')
    with pytest.raises(WorldError):
        load_world('{"objects": {}, "grasp_range": -1}')


def test_trace_export_is_line_delimited():
    result = run(program("forward 1; perceive;"), WORLD)
    lines = trace_to_jsonl(result).strip().splitlines()
    assert len(lines) == 2
    import json as json_mod

    first = json_mod.loads(lines[0])
    assert first["statement"] == "forward 1;"
    assert first["perceived"] is False
    second = json_mod.loads(lines[1])
    assert second["perceived"] is True
