"""Problem data types and the load-dependent energy objective.

A robot of weight W carries its accumulated load, so the cost of an arc is
distance * (W + load carried on that arc). A solution is a giant tour over
all task ids with 0-markers separating depot-to-depot trips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class RepresentationError(ValueError):
    """Raised for malformed solutions (duplicate or unknown task ids)."""


class ConfigurationError(ValueError):
    """Raised for invalid problem data."""


def build_distance_matrix(coords: Sequence[tuple[float, float]]) -> np.ndarray:
    """Full-precision Euclidean distance matrix (no rounding), index 0 = depot."""
    if len(coords) < 1:
        raise ConfigurationError("need at least the depot coordinate")
    pts = np.asarray(coords, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    np.fill_diagonal(dist, 0.0)
    dist.flags.writeable = False
    return dist


@dataclass(frozen=True)
class Instance:
    """An orchard routing problem.

    coords[0] is the depot; coords[i] and yields[i] for i >= 1 describe task i.
    yields[0] is a placeholder and must be 0. fleet_size and energy_bound are
    only needed once trips get assigned to robots.
    """

    coords: tuple[tuple[float, float], ...]
    yields: tuple[float, ...]
    capacity: float
    robot_weight: float
    fleet_size: int | None = None
    energy_bound: float | None = None
    name: str = "instance"
    provenance: str | None = None
    dist: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.coords) != len(self.yields):
            raise ConfigurationError("coords and yields length mismatch")
        if len(self.coords) < 1:
            raise ConfigurationError("need at least the depot coordinate")
        if self.yields[0] != 0:
            raise ConfigurationError("depot yield slot must be 0")
        for i, q in enumerate(self.yields[1:], start=1):
            if not 0 < q <= self.capacity:
                raise ConfigurationError(
                    f"yield of task {i} must be in (0, capacity], got {q}"
                )
        if self.robot_weight <= 0:
            raise ConfigurationError("robot weight must be positive")
        if self.fleet_size is not None and self.fleet_size < 1:
            raise ConfigurationError("fleet size must be >= 1")
        object.__setattr__(self, "dist", build_distance_matrix(self.coords))

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    @property
    def task_ids(self) -> range:
        return range(1, self.n + 1)


@dataclass(frozen=True)
class GiantSolution:
    """A permutation of task ids with 0-markers between trips.

    Stored in canonical form: no leading/trailing zeros and no adjacent
    zeros, so trips are exactly the maximal 0-free runs. An empty token
    tuple is allowed only for the degenerate zero-task instance.
    """

    tokens: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", _canonical(self.tokens))
        tasks = [t for t in self.tokens if t != 0]
        if len(set(tasks)) != len(tasks):
            raise RepresentationError("duplicate task id in solution")

    def trips(self) -> list[tuple[int, ...]]:
        return decode_trips(self)

    def task_sequence(self) -> tuple[int, ...]:
        """Task ids in visit order, separators stripped."""
        return tuple(t for t in self.tokens if t != 0)

    @staticmethod
    def from_trips(trips: Iterable[Sequence[int]]) -> "GiantSolution":
        tokens: list[int] = []
        for trip in trips:
            if tokens:
                tokens.append(0)
            tokens.extend(trip)
        return GiantSolution(tuple(tokens))


def _canonical(tokens: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for t in tokens:
        if t == 0 and (not out or out[-1] == 0):
            continue
        out.append(int(t))
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def decode_trips(sol: GiantSolution) -> list[tuple[int, ...]]:
    """Split the giant tour into its depot-to-depot trips."""
    trips: list[tuple[int, ...]] = []
    current: list[int] = []
    seen: set[int] = set()
    for t in sol.tokens:
        if t == 0:
            if current:
                trips.append(tuple(current))
                current = []
        else:
            if t in seen:
                raise RepresentationError(f"task {t} appears more than once")
            seen.add(t)
            current.append(t)
    if current:
        trips.append(tuple(current))
    return trips


@dataclass(frozen=True)
class Trip:
    """One depot-to-depot run with its load profile and energy."""

    tasks: tuple[int, ...]
    loads: tuple[float, ...]
    energy: float

    @property
    def load(self) -> float:
        return self.loads[-1] if self.loads else 0.0


def trip_energy(trip_tasks: Sequence[int], inst: Instance) -> float:
    """Energy of one trip: the robot leaves empty and its load grows at
    every task, so each arc costs distance * (weight + load carried)."""
    if not trip_tasks:
        raise RepresentationError("empty trip")
    d = inst.dist
    w = inst.robot_weight
    n = inst.n
    for t in trip_tasks:
        if not 1 <= t <= n:
            raise RepresentationError(f"unknown task id {t}")
    energy = d[0, trip_tasks[0]] * w
    load = inst.yields[trip_tasks[0]]
    for prev, nxt in zip(trip_tasks, trip_tasks[1:]):
        energy += d[prev, nxt] * (w + load)
        load += inst.yields[nxt]
    energy += d[trip_tasks[-1], 0] * (w + load)
    return float(energy)


def build_trip(trip_tasks: Sequence[int], inst: Instance) -> Trip:
    loads: list[float] = []
    total = 0.0
    for t in trip_tasks:
        total += inst.yields[t]
        loads.append(total)
    return Trip(tuple(trip_tasks), tuple(loads), trip_energy(trip_tasks, inst))


@dataclass(frozen=True)
class Evaluation:
    """Scored solution. trips holds the trips actually charged, which may be
    finer than the decoded ones when overload forced extra depot visits."""

    energy: float
    trips: tuple[Trip, ...]
    capacity_feasible: bool
    penalized: bool


def expand_overloads(
    trips: Iterable[Sequence[int]], inst: Instance
) -> tuple[list[tuple[int, ...]], bool]:
    """Insert a depot visit before any task whose pickup would overflow the
    capacity (the robot unloads and travels back out empty). Returns the
    expanded trip list and whether any insertion happened."""
    expanded: list[tuple[int, ...]] = []
    inserted = False
    for trip in trips:
        current: list[int] = []
        load = 0.0
        for t in trip:
            if current and load + inst.yields[t] > inst.capacity:
                expanded.append(tuple(current))
                current = []
                load = 0.0
                inserted = True
            current.append(t)
            load += inst.yields[t]
        if current:
            expanded.append(tuple(current))
    return expanded, inserted


def evaluate(sol: GiantSolution, inst: Instance) -> Evaluation:
    """Total energy of a solution, applying the overload penalty expansion
    when a trip exceeds capacity. Requires every task to appear exactly once."""
    raw = decode_trips(sol)
    covered = {t for trip in raw for t in trip}
    expected = set(inst.task_ids)
    if covered != expected:
        missing = sorted(expected - covered)
        extra = sorted(covered - expected)
        raise RepresentationError(
            f"solution does not cover the task set (missing={missing}, unknown={extra})"
        )
    scored_tasks, penalized = expand_overloads(raw, inst)
    trips = tuple(build_trip(t, inst) for t in scored_tasks)
    total = math.fsum(t.energy for t in trips)
    return Evaluation(
        energy=total,
        trips=trips,
        capacity_feasible=not penalized,
        penalized=penalized,
    )
