"""The SCLA step loop: network readout -> move -> feedback -> reward dispatch.

In ``scla`` mode each environment step simulates one decision window of the
spiking network, takes the motor population with the most spikes as the
move (the current cell's automaton breaks ties), and dispatches dopamine to
the sensed direction's two connection groups. Automata only learn on steps
where the target was sensed. ``cla-only`` mode skips the network and lets the
automaton pick and learn on every step.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import gridworld
from .cla import CLAGrid, Feedback, apply_local_rule, select_action
from .config import ExperimentConfig
from .directions import Direction
from .gridworld import GridPosition, GridState
from .network import GROUPS, Network, build_topology, group_index, simulate_window


@dataclass
class StepOutcome:
    sensed: Optional[Direction]
    action: Direction
    beta: Feedback
    reached: bool
    motor_counts: np.ndarray
    cell: tuple[int, int]  # cell the move was taken from
    dopamine_before: Optional[np.ndarray] = None  # group levels just before dispatch
    dopamine_after: Optional[np.ndarray] = None


@dataclass
class EpochStats:
    epoch: int
    successes: int
    group_weights: np.ndarray  # 8 means at epoch end, GROUPS order
    weight_samples: np.ndarray  # (steps, 8) means after every step
    automata: np.ndarray  # (5, 5, 4) probability vectors at epoch end
    steps: int = 0


@dataclass
class EngineState:
    config: ExperimentConfig
    network: Optional[Network]
    cla: CLAGrid
    grid: GridState
    action_rng: np.random.Generator
    spawn_rng: np.random.Generator
    clock: int = 0
    epochs_run: int = 0
    outcomes: list = field(default_factory=list)
    keep_outcomes: bool = False


def make_engine(config: ExperimentConfig, seed: Optional[int] = None,
                keep_outcomes: bool = False) -> EngineState:
    seed = config.seed if seed is None else seed
    net_seed, action_seed, spawn_seed = np.random.SeedSequence(seed).spawn(3)
    network = build_topology(net_seed, config) if config.mode == "scla" else None
    spawn_rng = np.random.default_rng(spawn_seed)
    grid = gridworld.respawn(GridState(GridPosition(*gridworld.TARGET)), spawn_rng)
    return EngineState(config, network, CLAGrid(), grid,
                       np.random.default_rng(action_seed), spawn_rng,
                       keep_outcomes=keep_outcomes)


def feedback(before: GridState, after: GridState, reached: bool) -> Feedback:
    closer = (gridworld.manhattan(after.robot, after.target)
              < gridworld.manhattan(before.robot, before.target))
    return Feedback.FAVORABLE if reached or closer else Feedback.UNFAVORABLE


def _reinforce(engine: EngineState, cell, action, beta) -> None:
    cfg = engine.config
    engine.cla.reinforce(cell, action, beta, cfg.lambda_r, cfg.lambda_p)
    if cfg.mu > 0:
        engine.cla = apply_local_rule(engine.cla, cell, cfg.mu)


def dispatch_reward(engine: EngineState, sensed: Optional[Direction], action: Direction,
                    beta: Feedback, reached: bool, cell=None) -> EngineState:
    """Route the step's outcome to the connection groups and the automaton.

    ``cell`` is the cell the move was taken from (defaults to the robot's
    current cell, i.e. before the move has been applied).
    """
    if sensed is None:
        return engine  # no network signal: nothing learns
    cfg = engine.config
    cell = engine.grid.robot.astuple() if cell is None else cell
    sensed, action = Direction(sensed), Direction(action)
    da = engine.network.dopamine if engine.network is not None else None
    toward = group_index((sensed, sensed))
    away = group_index((sensed, sensed.opposite))
    if action in (sensed, sensed.opposite):
        if da is not None:
            da[toward] += cfg.d_amp
            da[away] -= cfg.d_amp
        beta = Feedback.FAVORABLE if action == sensed else Feedback.UNFAVORABLE
    _reinforce(engine, cell, action, beta)
    if reached and da is not None:
        da[group_index((sensed, action))] += cfg.d_reach
    return engine


def choose_action(counts, automaton, rng: np.random.Generator) -> Direction:
    """Argmax of motor counts; ties (and all-zero counts) go to the automaton."""
    counts = np.asarray(counts)
    tied = np.flatnonzero(counts == counts.max())
    if tied.size == 1:
        return Direction(int(tied[0]))
    if tied.size == len(counts):
        return select_action(automaton, rng)
    p = np.asarray(automaton, dtype=float)[tied]
    total = p.sum()
    p = p / total if total > 0 else np.full(tied.size, 1.0 / tied.size)
    r = rng.random()
    i = min(int(np.searchsorted(np.cumsum(p), r, side="right")), tied.size - 1)
    return Direction(int(tied[i]))


def step_env(engine: EngineState):
    cfg = engine.config
    before = engine.grid
    cell = before.robot.astuple()
    sensed = gridworld.sense(before)

    if cfg.mode == "scla":
        _, counts = simulate_window(engine.network, cfg.t_window, sensed)
        action = choose_action(counts, engine.cla[cell], engine.action_rng)
    else:
        counts = np.zeros(4, dtype=np.int64)
        action = engine.cla.select(cell, engine.action_rng)

    after, reached = gridworld.apply_move(before, action)
    beta = feedback(before, after, reached)
    da_before = engine.network.dopamine.copy() if engine.network is not None else None
    if cfg.mode == "scla":
        dispatch_reward(engine, sensed, action, beta, reached, cell)
    else:
        _reinforce(engine, cell, action, beta)
    da_after = engine.network.dopamine.copy() if engine.network is not None else None

    engine.grid = gridworld.respawn(after, engine.spawn_rng) if reached else after
    engine.clock += 1
    outcome = StepOutcome(sensed, action, beta, reached, counts, cell, da_before, da_after)
    if engine.keep_outcomes:
        engine.outcomes.append(outcome)
    return engine, outcome


def group_weights(engine: EngineState) -> np.ndarray:
    if engine.network is None:
        return np.full(len(GROUPS), np.nan)
    return engine.network.group_mean_weights()


def run_epoch(engine: EngineState, steps: int):
    if steps < 0:
        raise ValueError("steps must be >= 0")
    successes = 0
    samples = np.empty((steps, len(GROUPS)))
    for k in range(steps):
        _, outcome = step_env(engine)
        successes += outcome.reached
        samples[k] = group_weights(engine)
    stats = EpochStats(engine.epochs_run, successes, group_weights(engine), samples,
                       engine.cla.p.copy(), steps)
    engine.epochs_run += 1
    return engine, stats
