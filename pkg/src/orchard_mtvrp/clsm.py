"""Clustering-guided local search on trip structure.

Each round: find the most geometrically stretched trip (largest separation
between its two k-means centroids), pool its tasks with the trip whose
centroid sits closest to the stretched trip's far cluster, re-split the pool
by a load-balancing angular sweep, and re-optimize both new tours with an
ant colony scored by the load-dependent trip energy.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from .core import GiantSolution, Instance, decode_trips, evaluate, trip_energy


@dataclass(frozen=True)
class ClusterSplit:
    members_a: tuple[int, ...]
    members_b: tuple[int, ...]
    centroid_a: tuple[float, float]
    centroid_b: tuple[float, float]
    separation: float


def _centroid(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    return (
        sum(p[0] for p in points) / len(points),
        sum(p[1] for p in points) / len(points),
    )


def _dist(p: tuple[float, float], q: tuple[float, float]) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def kmeans_two(points: Sequence[tuple[float, float]]) -> ClusterSplit:
    """Lloyd's algorithm with k=2, seeded at the two mutually farthest points
    (deterministic). Members are indices into `points`."""
    if len(points) < 2:
        raise ValueError("need at least 2 points")
    n = len(points)
    seed_a, seed_b, best_d = 0, 1, -1.0
    for i in range(n):
        for j in range(i + 1, n):
            d = _dist(points[i], points[j])
            if d > best_d:
                seed_a, seed_b, best_d = i, j, d
    c_a, c_b = points[seed_a], points[seed_b]
    assign = [-1] * n
    for _ in range(100):
        new_assign = [0 if _dist(p, c_a) <= _dist(p, c_b) else 1 for p in points]
        for cluster in (0, 1):
            if cluster not in new_assign:
                other = [i for i in range(n) if new_assign[i] == 1 - cluster]
                anchor = c_a if cluster == 1 else c_b
                stray = max(other, key=lambda i: (_dist(points[i], anchor), i))
                new_assign[stray] = cluster
        if new_assign == assign:
            break
        assign = new_assign
        c_a = _centroid([points[i] for i in range(n) if assign[i] == 0])
        c_b = _centroid([points[i] for i in range(n) if assign[i] == 1])
    members_a = tuple(i for i in range(n) if assign[i] == 0)
    members_b = tuple(i for i in range(n) if assign[i] == 1)
    return ClusterSplit(members_a, members_b, c_a, c_b, _dist(c_a, c_b))


def choose_target_trip(
    sol: GiantSolution, inst: Instance
) -> tuple[int, ClusterSplit] | None:
    """The multi-task trip with the widest centroid separation, with the
    split remapped onto task ids. None when every trip is a singleton."""
    best: tuple[int, ClusterSplit] | None = None
    for index, trip in enumerate(decode_trips(sol)):
        if len(trip) < 2:
            continue
        split = kmeans_two([inst.coords[t] for t in trip])
        remapped = ClusterSplit(
            tuple(trip[i] for i in split.members_a),
            tuple(trip[i] for i in split.members_b),
            split.centroid_a,
            split.centroid_b,
            split.separation,
        )
        if best is None or remapped.separation > best[1].separation:
            best = (index, remapped)
    return best


def far_cluster(split: ClusterSplit, depot: tuple[float, float]) -> tuple[tuple[int, ...], tuple[float, float]]:
    """The cluster whose centroid lies farther from the depot; exact ties go
    to the cluster with the larger member-id sum."""
    d_a = _dist(split.centroid_a, depot)
    d_b = _dist(split.centroid_b, depot)
    if d_a > d_b:
        return split.members_a, split.centroid_a
    if d_b > d_a:
        return split.members_b, split.centroid_b
    if sum(split.members_a) > sum(split.members_b):
        return split.members_a, split.centroid_a
    return split.members_b, split.centroid_b


def choose_candidate_trip(
    sol: GiantSolution,
    target_index: int,
    far_centroid: tuple[float, float],
    inst: Instance,
) -> int | None:
    """Index of the non-target trip whose task centroid is nearest to the far
    cluster's centroid; None for single-trip solutions."""
    best_index: int | None = None
    best_d = math.inf
    for index, trip in enumerate(decode_trips(sol)):
        if index == target_index:
            continue
        d = _dist(_centroid([inst.coords[t] for t in trip]), far_centroid)
        if d < best_d:
            best_index, best_d = index, d
    return best_index


def recombine(
    target_trip: Sequence[int], candidate_trip: Sequence[int], inst: Instance
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Re-split the pooled tasks of two trips by an angular sweep around the
    pool centroid, cutting at the boundary that balances the two loads.
    Boundaries where both parts fit the capacity are preferred; a pool too
    heavy for two trips is returned unchanged."""
    pool = list(target_trip) + list(candidate_trip)
    if not target_trip or not candidate_trip:
        raise ValueError("both trips must be non-empty")
    total = sum(inst.yields[t] for t in pool)
    if total > 2 * inst.capacity:
        return tuple(target_trip), tuple(candidate_trip)
    center = _centroid([inst.coords[t] for t in pool])
    swept = sorted(
        pool,
        key=lambda t: (
            math.atan2(inst.coords[t][1] - center[1], inst.coords[t][0] - center[0]),
            t,
        ),
    )
    prefix = 0.0
    feasible: list[tuple[float, int]] = []
    fallback: list[tuple[float, int]] = []
    for cut in range(1, len(swept)):
        prefix += inst.yields[swept[cut - 1]]
        first, second = prefix, total - prefix
        entry = (abs(first - second), cut)
        fallback.append(entry)
        if first <= inst.capacity and second <= inst.capacity:
            feasible.append(entry)
    _, cut = min(feasible or fallback)
    return tuple(swept[:cut]), tuple(swept[cut:])


@dataclass(frozen=True)
class AcoParams:
    colony_size: int = 10
    iterations: int = 50
    pheromone_weight: float = 1.0
    heuristic_weight: float = 2.0
    evaporation: float = 0.1
    pheromone_floor: float = 0.01
    pheromone_ceiling: float = 10.0


def aco_tour(
    trip_tasks: Sequence[int],
    inst: Instance,
    params: AcoParams,
    rng: random.Random,
) -> tuple[int, ...]:
    """Ant-colony reordering of one trip, scored by load-dependent energy.

    The incoming order seeds the incumbent, so the result is never worse
    than the input. Every constructed tour is scored in both directions:
    the travelled cycle is the same but the load profile is not, and good
    orders front-load the far tasks while the robot runs empty.
    """
    k = len(trip_tasks)
    if k == 0:
        raise ValueError("empty trip")
    if k == 1:
        return tuple(trip_tasks)
    best_order = tuple(trip_tasks)
    best_energy = trip_energy(best_order, inst)
    if k == 2:
        flipped = (trip_tasks[1], trip_tasks[0])
        flipped_energy = trip_energy(flipped, inst)
        return flipped if flipped_energy < best_energy else best_order

    nodes = [0] + list(trip_tasks)  # local index 0 = depot
    eta = [
        [
            0.0 if i == j else 1.0 / max(inst.dist[nodes[i], nodes[j]], 1e-12)
            for j in range(k + 1)
        ]
        for i in range(k + 1)
    ]
    tau = [[1.0] * (k + 1) for _ in range(k + 1)]
    alpha, beta = params.pheromone_weight, params.heuristic_weight

    for _ in range(params.iterations):
        for _ in range(params.colony_size):
            current = 0
            remaining = list(range(1, k + 1))
            order: list[int] = []
            while remaining:
                weights = [
                    (tau[current][j] ** alpha) * (eta[current][j] ** beta)
                    for j in remaining
                ]
                pick = _roulette(remaining, weights, rng)
                order.append(pick)
                remaining.remove(pick)
                current = pick
            constructed = tuple(nodes[i] for i in order)
            for candidate in (constructed, constructed[::-1]):
                energy = trip_energy(candidate, inst)
                if energy < best_energy:
                    best_energy = energy
                    best_order = candidate
        decay = 1.0 - params.evaporation
        for i in range(k + 1):
            for j in range(k + 1):
                tau[i][j] = max(params.pheromone_floor, tau[i][j] * decay)
        index_of = {t: i + 1 for i, t in enumerate(trip_tasks)}
        path = [0] + [index_of[t] for t in best_order]
        for a, b in zip(path, path[1:]):
            tau[a][b] = min(params.pheromone_ceiling, tau[a][b] + params.evaporation)
    return best_order


def _roulette(items: list[int], weights: list[float], rng: random.Random) -> int:
    total = sum(weights)
    if total <= 0:
        return items[rng.randrange(len(items))]
    spin = rng.random() * total
    acc = 0.0
    for item, w in zip(items, weights):
        acc += w
        if spin <= acc:
            return item
    return items[-1]


def clsm_step(
    sol: GiantSolution,
    inst: Instance,
    intensity: float,
    population: int,
    rng: random.Random,
) -> GiantSolution:
    """Run ceil(trips * intensity) recombination rounds and return the best
    solution seen (the input included), so energy never increases."""
    trips = decode_trips(sol)
    rounds = max(1, math.ceil(len(trips) * intensity))
    best_sol = sol
    best_energy = evaluate(sol, inst).energy
    work = sol
    for _ in range(rounds):
        target = choose_target_trip(work, inst)
        if target is None:
            break
        target_index, split = target
        depot = inst.coords[0]
        _, far_c = far_cluster(split, depot)
        candidate_index = choose_candidate_trip(work, target_index, far_c, inst)
        if candidate_index is None:
            break
        current = decode_trips(work)
        new_a, new_b = recombine(current[target_index], current[candidate_index], inst)

        def tour_params(tasks: Sequence[int]) -> AcoParams:
            return AcoParams(
                colony_size=population,
                iterations=max(1, math.ceil(len(tasks) * intensity)),
            )

        new_a = aco_tour(new_a, inst, tour_params(new_a), rng)
        new_b = aco_tour(new_b, inst, tour_params(new_b), rng)
        rebuilt = list(current)
        rebuilt[target_index] = new_a
        rebuilt[candidate_index] = new_b
        work = GiantSolution.from_trips(rebuilt)
        energy = evaluate(work, inst).energy
        if energy < best_energy:
            best_energy = energy
            best_sol = work
    return best_sol
