"""5x5 walled grid with a fixed target at (3, 3)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .directions import Direction

SIZE = 5
TARGET = (3, 3)
SPAWN_CELLS = ((3, 2), (3, 4), (2, 3), (4, 3))


@dataclass(frozen=True)
class GridPosition:
    x: int
    y: int

    def __post_init__(self):
        if not (1 <= self.x <= SIZE and 1 <= self.y <= SIZE):
            raise ValueError(f"position ({self.x}, {self.y}) is off the grid")

    def astuple(self) -> tuple[int, int]:
        return (self.x, self.y)


@dataclass(frozen=True)
class GridState:
    robot: GridPosition
    target: GridPosition = GridPosition(*TARGET)


def manhattan(a: GridPosition, b: GridPosition) -> int:
    return abs(a.x - b.x) + abs(a.y - b.y)


def sense(state: GridState) -> Optional[Direction]:
    """Direction from the robot toward an adjacent target, else None."""
    if manhattan(state.robot, state.target) != 1:
        return None
    delta = (state.target.x - state.robot.x, state.target.y - state.robot.y)
    return next(d for d in Direction if d.delta == delta)


def apply_move(state: GridState, action: Direction):
    """Move one cell; moves into the wall leave the robot in place."""
    dx, dy = Direction(action).delta
    x, y = state.robot.x + dx, state.robot.y + dy
    if not (1 <= x <= SIZE and 1 <= y <= SIZE):
        x, y = state.robot.x, state.robot.y
    robot = GridPosition(x, y)
    return GridState(robot, state.target), robot == state.target


def respawn(state: GridState, rng: np.random.Generator) -> GridState:
    """Place the robot on a uniformly chosen cell next to the target."""
    x, y = SPAWN_CELLS[int(rng.integers(len(SPAWN_CELLS)))]
    return GridState(GridPosition(x, y), state.target)
