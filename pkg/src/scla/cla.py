"""Cellular learning automata: one 4-action automaton per grid cell.

Each automaton keeps a probability vector over (Up, Down, Left, Right) and
learns with the linear reward-penalty scheme. The lattice adds a von Neumann
neighbourhood and an optional diffusion rule that mixes a cell's vector with
the mean of its neighbours (mu = 0 disables it).
"""
from __future__ import annotations

import enum

import numpy as np

from .directions import Direction

SIZE = 5
N_ACTIONS = 4
SIMPLEX_TOL = 1e-9


class Feedback(enum.Enum):
    FAVORABLE = "Favorable"
    UNFAVORABLE = "Unfavorable"


def check_distribution(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (N_ACTIONS,) or np.any(p < 0) or abs(p.sum() - 1.0) > SIMPLEX_TOL:
        raise ValueError(f"not a probability vector over 4 actions: {p}")
    return p


def select_action(p, rng: np.random.Generator) -> Direction:
    """Sample a direction from ``p`` using exactly one uniform draw."""
    p = check_distribution(p)
    r = rng.random()
    i = int(np.searchsorted(np.cumsum(p), r, side="right"))
    # guard against r landing past a cumulative sum that rounds below 1
    i = min(i, N_ACTIONS - 1)
    while p[i] == 0.0:
        i -= 1
    return Direction(i)


def update(p, taken: Direction, beta: Feedback, lambda_r: float, lambda_p: float) -> np.ndarray:
    """Linear reward-penalty update; returns a new vector."""
    if not (0.0 <= lambda_r <= 1.0 and 0.0 <= lambda_p <= 1.0):
        raise ValueError("learning rates must lie in [0, 1]")
    p = np.array(p, dtype=float)
    i = int(taken)
    others = np.arange(N_ACTIONS) != i
    if Feedback(beta) is Feedback.FAVORABLE:
        p[i] += lambda_r * (1.0 - p[i])
        p[others] *= 1.0 - lambda_r
    else:
        p[i] *= 1.0 - lambda_p
        p[others] = lambda_p / (N_ACTIONS - 1) + (1.0 - lambda_p) * p[others]
    return p


def on_lattice(cell) -> bool:
    x, y = cell
    return 1 <= x <= SIZE and 1 <= y <= SIZE


def neighborhood(cell) -> list[tuple[int, int]]:
    """von Neumann neighbours of ``cell`` that lie on the lattice."""
    if not on_lattice(cell):
        raise ValueError(f"cell {cell} is off the {SIZE}x{SIZE} lattice")
    x, y = cell
    out = []
    for d in Direction:
        dx, dy = d.delta
        if on_lattice((x + dx, y + dy)):
            out.append((x + dx, y + dy))
    return out


class CLAGrid:
    """25 automata indexed by 1-based (x, y)."""

    dimension = 2

    def __init__(self, probs=None):
        if probs is None:
            probs = np.full((SIZE, SIZE, N_ACTIONS), 1.0 / N_ACTIONS)
        self.p = np.array(probs, dtype=float)
        if self.p.shape != (SIZE, SIZE, N_ACTIONS):
            raise ValueError("CLA grid must hold 5x5 probability vectors")

    def __getitem__(self, cell) -> np.ndarray:
        if not on_lattice(cell):
            raise ValueError(f"cell {cell} is off the lattice")
        return self.p[cell[0] - 1, cell[1] - 1]

    def __setitem__(self, cell, value) -> None:
        self[cell][:] = check_distribution(value)

    def cells(self):
        return [(x, y) for x in range(1, SIZE + 1) for y in range(1, SIZE + 1)]

    def copy(self) -> "CLAGrid":
        return CLAGrid(self.p.copy())

    def select(self, cell, rng) -> Direction:
        return select_action(self[cell], rng)

    def reinforce(self, cell, taken, beta, lambda_r, lambda_p) -> None:
        self[cell] = update(self[cell], taken, beta, lambda_r, lambda_p)


def apply_local_rule(grid: CLAGrid, cell, mu: float) -> CLAGrid:
    """Diffuse ``cell`` toward its neighbours' mean; returns a new grid."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must lie in [0, 1]")
    out = grid.copy()
    if mu == 0.0:
        return out
    mean = np.mean([grid[n] for n in neighborhood(cell)], axis=0)
    p = (1.0 - mu) * grid[cell] + mu * mean
    out[cell] = p / p.sum()
    return out
