"""Population initialization balancing depot distance against task yield.

Each individual blends two static orderings (far-from-depot first, light
tasks first) with its own weight, then builds trips greedily: the next task
is chosen by a weighted rank of proximity and remaining-capacity share, and
the trip closes when the depot is nearer than the chosen task or nothing
fits.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ConfigurationError, GiantSolution, Instance


@dataclass(frozen=True)
class CompositeRanking:
    """Task ids sorted by ascending blended rank."""

    order: tuple[int, ...]


def composite_ranking(inst: Instance, distance_weight: float) -> CompositeRanking:
    """Blend the rank positions from the two sort orders.

    distance_weight = 1 reproduces the distance-descending order, 0 the
    yield-ascending order. Rank positions are 1-based; ties everywhere break
    toward the lower task id.
    """
    tasks = list(inst.task_ids)
    by_distance = sorted(tasks, key=lambda t: (-inst.dist[0, t], t))
    by_yield = sorted(tasks, key=lambda t: (inst.yields[t], t))
    pos_d = {t: i for i, t in enumerate(by_distance, start=1)}
    pos_y = {t: i for i, t in enumerate(by_yield, start=1)}
    w = distance_weight
    blended = sorted(tasks, key=lambda t: (w * pos_d[t] + (1 - w) * pos_y[t], t))
    return CompositeRanking(tuple(blended))


def construct_solution(
    ranking: CompositeRanking, distance_weight: float, inst: Instance
) -> GiantSolution:
    """Greedy trip construction over the ranked task list.

    Seeds each trip with the best remaining task, then repeatedly picks the
    feasible task minimizing a weighted rank of (distance to the current
    task) and (share of the remaining capacity, larger shares first). The
    trip closes when the depot is strictly nearer than the pick or nothing
    fits the remaining capacity.
    """
    remaining = list(ranking.order)
    w = distance_weight
    trips: list[list[int]] = []
    while remaining:
        current = remaining.pop(0)
        trip = [current]
        load = inst.yields[current]
        while remaining:
            headroom = inst.capacity - load
            feasible = [t for t in remaining if inst.yields[t] <= headroom]
            if not feasible:
                break
            by_proximity = sorted(feasible, key=lambda t: (inst.dist[current, t], t))
            by_share = sorted(feasible, key=lambda t: (-inst.yields[t] / headroom, t))
            pos_p = {t: i for i, t in enumerate(by_proximity, start=1)}
            pos_s = {t: i for i, t in enumerate(by_share, start=1)}
            pick = min(feasible, key=lambda t: (w * pos_p[t] + (1 - w) * pos_s[t], t))
            if inst.dist[current, 0] < inst.dist[current, pick]:
                break
            trip.append(pick)
            load += inst.yields[pick]
            remaining.remove(pick)
            current = pick
        trips.append(trip)
    return GiantSolution.from_trips(trips)


def init_population(inst: Instance, population: int) -> list[GiantSolution]:
    """One individual per weight on the arithmetic ladder 0, 1/(P-1), ..., 1.

    Deterministic: no randomness anywhere in the construction.
    """
    if population < 1:
        raise ConfigurationError("population must be >= 1")
    if population == 1:
        weights = [0.5]
    else:
        weights = [j / (population - 1) for j in range(population)]
    out = []
    for w in weights:
        ranking = composite_ranking(inst, w)
        out.append(construct_solution(ranking, w, inst))
    return out
