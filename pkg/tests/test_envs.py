import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from beamplan.core import (
    AppleOnTable,
    DropAppleOnTable,
    EnvKind,
    MazeMove,
    MoveBlockToBlock,
    MoveBlockToPosition,
    MoveForward,
    PickUpApple,
    ReachGift,
    TargetConfig,
    Turn,
)
from beamplan.envs import get_env, goal_reached, legal_actions, random_instance
from beamplan.envs.fetch import FetchInstance, FetchObs, fetch_step, fetch_value_oracle, initial_obs as fetch_o0
from beamplan.envs.golden import (
    FETCH_INSTANCE,
    GOLDEN,
    MAZE_INSTANCE,
    TABLE_INITIAL,
    TABLE_INSTANCE,
    TABLE_TARGET,
    golden_plan,
)
from beamplan.envs.maze import MazeInstance, MazeObs, maze_step, maze_value_oracle, solvable
from beamplan.envs.table import (
    ANCHOR,
    OFFSETS,
    BlockPlacement,
    TableObs,
    table_outcomes,
    table_step,
    table_valid_next,
    table_value_oracle,
)
from beamplan.errors import (
    DestinationOccupied,
    GenerationExhausted,
    SelfMove,
    SteppingFromTerminal,
    WrongEnvironmentAction,
)

seeds = st.integers(0, 2**32 - 1)


# --- maze -------------------------------------------------------------------


def test_maze_step_example():
    nxt = maze_step(MAZE_INSTANCE, MazeObs((0, 0)), MazeMove("down"))
    assert nxt == MazeObs((1, 0), "alive")


def test_maze_trap_and_goal_status():
    assert maze_step(MAZE_INSTANCE, MazeObs((0, 2)), MazeMove("down")).status == "trapped"
    assert maze_step(MAZE_INSTANCE, MazeObs((2, 1)), MazeMove("right")).status == "at_goal"


def test_maze_edge_clamps():
    assert maze_step(MAZE_INSTANCE, MazeObs((0, 0)), MazeMove("up")).pos == (0, 0)


def test_maze_step_errors():
    with pytest.raises(WrongEnvironmentAction):
        maze_step(MAZE_INSTANCE, MazeObs((0, 0)), Turn("left"))
    with pytest.raises(SteppingFromTerminal):
        maze_step(MAZE_INSTANCE, MazeObs((1, 2), "trapped"), MazeMove("up"))


def test_maze_value_examples():
    assert maze_value_oracle(MAZE_INSTANCE, MazeObs((0, 0))).steps_remaining == 4
    assert maze_value_oracle(MAZE_INSTANCE, MazeObs((2, 2), "at_goal")).steps_remaining == 0
    assert maze_value_oracle(MAZE_INSTANCE, MazeObs((1, 2), "trapped")).steps_remaining == 100


def test_maze_unreachable_is_sentinel():
    walled = MazeInstance(3, 3, frozenset({(0, 1), (1, 1), (2, 1)}), (0, 0), (0, 2))
    assert not solvable(walled)
    assert maze_value_oracle(walled, MazeObs((0, 0))).steps_remaining == 100


def test_maze_2x2_with_4_traps_is_exhausted():
    with pytest.raises(GenerationExhausted):
        random_instance("maze", {"rows": 2, "cols": 2, "traps": 4}, np.random.default_rng(0), max_retries=50)


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_maze_generation_solvable_and_deterministic(seed):
    params = {"rows": 5, "cols": 5, "traps": 4}
    a = random_instance("maze", params, np.random.default_rng(seed))
    b = random_instance("maze", params, np.random.default_rng(seed))
    assert a == b
    assert solvable(a)
    assert len(a.traps) == 4


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_maze_bellman_consistency(seed):
    env = get_env("maze")
    inst = env.random_instance({"rows": [3, 6], "cols": [3, 6], "traps": [1, 6]}, np.random.default_rng(seed))
    goal = ReachGift()
    for r in range(inst.rows):
        for c in range(inst.cols):
            o = MazeObs((r, c), inst.status_at((r, c)))
            v = env.value(inst, o, goal).steps_remaining
            if env.is_terminal(inst, o) or v >= 100:
                continue
            best = min(env.value(inst, env.step(inst, o, a), goal).steps_remaining for a in env.legal_actions(inst, o))
            assert v == 1 + best


# --- fetch ------------------------------------------------------------------


def test_fetch_turn_left_example():
    o = FetchObs((1, 2), "left", apple_cell=(3, 3))
    assert fetch_step(FETCH_INSTANCE, o, Turn("left")).facing == "down"


def test_fetch_turn_cycles():
    o = FetchObs((1, 1), "up", apple_cell=(3, 3))
    seen = []
    for _ in range(4):
        o = fetch_step(FETCH_INSTANCE, o, Turn("left"))
        seen.append(o.facing)
    assert seen == ["left", "down", "right", "up"]
    for f in ("up", "left", "down", "right"):
        o = FetchObs((1, 1), f, apple_cell=(3, 3))
        assert fetch_step(FETCH_INSTANCE, fetch_step(FETCH_INSTANCE, o, Turn("left")), Turn("right")) == o


def test_fetch_pickup_example():
    o = FetchObs((2, 3), "down", apple_cell=(3, 3))
    nxt = fetch_step(FETCH_INSTANCE, o, PickUpApple())
    assert nxt.carrying and nxt.apple_cell is None


def test_fetch_blocked_by_table():
    o = FetchObs((1, 3), "up", carrying=True)
    assert fetch_step(FETCH_INSTANCE, o, MoveForward()) == o


def test_fetch_ineffective_actions_are_noops():
    o = FetchObs((1, 1), "up", apple_cell=(3, 3))
    assert fetch_step(FETCH_INSTANCE, o, PickUpApple()) == o
    assert fetch_step(FETCH_INSTANCE, o, DropAppleOnTable()) == o
    with pytest.raises(WrongEnvironmentAction):
        fetch_step(FETCH_INSTANCE, o, MazeMove("up"))


def test_fetch_value_examples():
    v = fetch_value_oracle(FETCH_INSTANCE, fetch_o0(FETCH_INSTANCE))
    assert (v.components["pickup"], v.components["drop"], v.steps_remaining) == (6, 4, 10)
    assert fetch_value_oracle(FETCH_INSTANCE, FetchObs((1, 3), "up", apple_on_table=True)).steps_remaining == 0
    assert fetch_value_oracle(FETCH_INSTANCE, FetchObs((1, 3), "up", carrying=True)).steps_remaining == 1


def test_fetch_obs_invariant():
    with pytest.raises(ValueError):
        FetchObs((0, 0), "up", carrying=True, apple_cell=(1, 1))


def test_fetch_goal_and_legality():
    inst = FETCH_INSTANCE
    assert not goal_reached("fetch", inst, FetchObs((1, 3), "up", carrying=True), AppleOnTable())
    assert len(legal_actions("fetch", inst, fetch_o0(inst))) == 5


def _reachable(inst, start, limit=5000):
    env = get_env("fetch")
    seen, stack = {start}, [start]
    while stack and len(seen) < limit:
        s = stack.pop()
        for a in env.alphabet():
            t = env.step(inst, s, a)
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_fetch_bellman_consistency(seed):
    env = get_env("fetch")
    inst = env.random_instance({"rows": [3, 4], "cols": [3, 4], "table_len": [1, 2]}, np.random.default_rng(seed))
    goal = AppleOnTable()
    for o in _reachable(inst, fetch_o0(inst)):
        v = env.value(inst, o, goal).steps_remaining
        if v == 0 or v >= 100:
            continue
        best = min(env.value(inst, env.step(inst, o, a), goal).steps_remaining for a in env.alphabet())
        assert v == 1 + best


@given(seeds)
@settings(max_examples=15, deadline=None)
def test_fetch_generation(seed):
    params = {"rows": [4, 6], "cols": [4, 6], "table_len": [1, 3]}
    a = random_instance("fetch", params, np.random.default_rng(seed))
    assert a == random_instance("fetch", params, np.random.default_rng(seed))
    assert fetch_value_oracle(a, fetch_o0(a)).steps_remaining < 100


# --- table ------------------------------------------------------------------


def test_table_move_to_position_example():
    nxt = table_step(TABLE_INITIAL, MoveBlockToPosition("blue_moon", "bottom_center"), np.random.default_rng(0))
    assert nxt.where("blue_moon") == BlockPlacement("blue_moon", "bottom_center", ANCHOR)


def test_table_occupied_destination():
    with pytest.raises(DestinationOccupied):
        table_step(TABLE_INITIAL, MoveBlockToPosition("blue_cube", "center_right"), np.random.default_rng(0))


def test_table_self_move():
    with pytest.raises(SelfMove):
        table_outcomes(TABLE_INITIAL, MoveBlockToBlock("blue_cube", "blue_cube"))


def test_table_block_to_block_offsets():
    a = MoveBlockToBlock("green_cube", "yellow_star")
    outs = table_outcomes(TABLE_INITIAL, a)
    assert len(outs) == 4
    assert {o.where("green_cube").offset for o in outs} == set(OFFSETS)
    assert {o.where("green_cube").slot for o in outs} == {"top_center"}
    assert all(table_valid_next(TABLE_INITIAL, a, o) for o in outs)


def test_table_valid_next_rejections():
    a = MoveBlockToBlock("green_cube", "yellow_star")
    good = table_outcomes(TABLE_INITIAL, a)[0]
    missing = TableObs(tuple(p for p in good.placement if p.block != "green_cube"))
    assert not table_valid_next(TABLE_INITIAL, a, missing)
    also_moved = good.relocated("red_pentagon", BlockPlacement("red_pentagon", "bottom_center"))
    assert not table_valid_next(TABLE_INITIAL, a, also_moved)


def test_table_value_examples():
    assert table_value_oracle(TABLE_INITIAL, TABLE_TARGET).steps_remaining == 2
    done = TableObs.from_mapping(TABLE_TARGET.as_dict())
    assert table_value_oracle(done, TABLE_TARGET).steps_remaining == 0
    want = TABLE_TARGET.as_dict()
    blocks = sorted(want)
    rotated = TargetConfig.from_mapping({b: want[nb] for b, nb in zip(blocks, blocks[1:] + blocks[:1])})
    assert table_value_oracle(done, rotated).steps_remaining == 8


def test_table_legal_positions_only_empty_slots():
    acts = legal_actions("table", TABLE_INSTANCE, TABLE_INITIAL)
    dsts = {a.dst for a in acts if isinstance(a, MoveBlockToPosition)}
    assert dsts == {"bottom_center"}
    assert len(acts) == 8 * 7 + 8


def test_table_golden_goal():
    inst, actions = golden_plan(EnvKind.TABLE)
    env = get_env("table")
    o = env.initial_obs(inst)
    rng = np.random.default_rng(0)
    for a in actions:
        o = env.step(inst, o, a, rng)
    assert goal_reached("table", inst, o, env.goal(inst))


def test_table_step_requires_rng():
    with pytest.raises(ValueError):
        get_env("table").step(TABLE_INSTANCE, TABLE_INITIAL, MoveBlockToBlock("green_cube", "yellow_star"))


def test_table_obs_invariants():
    with pytest.raises(ValueError):
        TableObs.from_mapping({"blue_moon": "top_left"})
    two_anchors = dict(TABLE_TARGET.as_dict())
    two_anchors["blue_moon"] = two_anchors["red_moon"]
    with pytest.raises(ValueError):
        TableObs.from_mapping(two_anchors)


table_instances = seeds.map(lambda s: random_instance("table", {"misplaced": [0, 8]}, np.random.default_rng(s)))


@given(table_instances, seeds, st.data())
@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_table_frame_preservation_and_validity(inst, seed, data):
    env = get_env("table")
    o = inst.initial
    a = data.draw(st.sampled_from(env.legal_actions(inst, o)))
    nxt = env.step(inst, o, a, np.random.default_rng(seed))
    changed = set(o.placement) ^ set(nxt.placement)
    assert {p.block for p in changed} <= {a.src}
    assert nxt.intact
    assert env.object_counts(nxt) == env.object_counts(o)
    assert table_valid_next(o, a, nxt)


@given(table_instances, st.data())
@settings(max_examples=60, deadline=None)
def test_table_value_changes_by_at_most_one(inst, data):
    env = get_env("table")
    o, goal = inst.initial, inst.goal
    a = data.draw(st.sampled_from(env.legal_actions(inst, o)))
    before = env.value(inst, o, goal).steps_remaining
    for nxt in env.outcomes(inst, o, a):
        after = env.value(inst, nxt, goal).steps_remaining
        assert abs(after - before) <= 1
        was_misplaced = o.where(a.src).slot != goal.slot_of(a.src)
        if was_misplaced and nxt.where(a.src).slot == goal.slot_of(a.src):
            assert after == before - 1


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_table_generation(seed):
    params = {"misplaced": [3, 6]}
    a = random_instance("table", params, np.random.default_rng(seed))
    assert a == random_instance("table", params, np.random.default_rng(seed))
    assert 3 <= table_value_oracle(a.initial, a.goal).steps_remaining <= 6


@pytest.mark.parametrize("kind", list(EnvKind))
def test_json_roundtrip(kind):
    env = get_env(kind)
    inst = GOLDEN[kind][0]
    assert env.instance_from_json(env.instance_to_json(inst)) == inst
    o = env.initial_obs(inst)
    assert env.obs_from_json(env.obs_to_json(o)) == o
