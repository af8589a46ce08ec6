from __future__ import annotations

import enum


class Direction(enum.IntEnum):
    """Move / population direction. Up = +y, Right = +x."""

    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3

    @property
    def opposite(self) -> "Direction":
        return Direction(self ^ 1)

    @property
    def delta(self) -> tuple[int, int]:
        return _DELTAS[self]

    @property
    def letter(self) -> str:
        return "UDLR"[self]

    def same_axis(self, other: "Direction") -> bool:
        return (self >> 1) == (other >> 1)


_DELTAS = {
    Direction.UP: (0, 1),
    Direction.DOWN: (0, -1),
    Direction.LEFT: (-1, 0),
    Direction.RIGHT: (1, 0),
}
