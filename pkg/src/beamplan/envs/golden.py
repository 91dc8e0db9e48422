"""Hand-checked reference instances and plans, one per environment, used as regression fixtures."""

from __future__ import annotations

from ..core import EnvKind, TargetConfig, parse_action
from .fetch import FetchInstance
from .maze import MazeInstance
from .table import TableInstance, TableObs

MAZE_INSTANCE = MazeInstance(3, 3, frozenset({(1, 2)}), (0, 0), (2, 2))
MAZE_PLAN_TEXT = ["go down", "go down", "go right", "go right"]

# The room size is not given; 4x4 is the smallest grid containing every listed cell.
FETCH_INSTANCE = FetchInstance(4, 4, frozenset({(0, 3)}), (3, 3), (1, 2), "left")
FETCH_PLAN_TEXT = [
    "turn left",
    "turn left",
    "move forward",
    "turn right",
    "move forward",
    "pickup",
    "turn left",
    "turn left",
    "move forward",
    "drop",
]

TABLE_INITIAL = TableObs.from_slot_lists(
    {
        "top_center": ["yellow_star", "blue_cube"],
        "top_left": ["red_moon"],
        "top_right": ["green_star"],
        "center_left": ["green_cube"],
        "center_right": ["blue_moon"],
        "bottom_center": [],
        "bottom_left": ["yellow_pentagon"],
        "bottom_right": ["red_pentagon"],
    }
)
TABLE_TARGET = TargetConfig.from_mapping(
    {
        "yellow_star": "top_center",
        "red_moon": "top_left",
        "green_star": "top_right",
        "green_cube": "center_left",
        "blue_cube": "center_right",
        "blue_moon": "bottom_center",
        "yellow_pentagon": "bottom_left",
        "red_pentagon": "bottom_right",
    }
)
TABLE_INSTANCE = TableInstance(TABLE_INITIAL, TABLE_TARGET)
TABLE_PLAN_TEXT = ["move blue_moon to bottom_center", "move blue_cube to center_right"]

GOLDEN = {
    EnvKind.MAZE: (MAZE_INSTANCE, MAZE_PLAN_TEXT),
    EnvKind.FETCH: (FETCH_INSTANCE, FETCH_PLAN_TEXT),
    EnvKind.TABLE: (TABLE_INSTANCE, TABLE_PLAN_TEXT),
}


def golden_plan(kind: EnvKind):
    inst, text = GOLDEN[kind]
    return inst, [parse_action(t, kind) for t in text]
