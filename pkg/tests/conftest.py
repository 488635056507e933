import random

import pytest

from orchard_mtvrp.core import Instance


@pytest.fixture
def line_instance() -> Instance:
    """Depot at the origin, two tasks on the x-axis at 10 and 20, yield 5
    each, robot weight 20. Small enough to check energies by hand."""
    return Instance(
        coords=((0.0, 0.0), (10.0, 0.0), (20.0, 0.0)),
        yields=(0.0, 5.0, 5.0),
        capacity=100.0,
        robot_weight=20.0,
    )


def random_instance(
    rng: random.Random,
    n: int,
    side: float = 50.0,
    yield_range: tuple[float, float] = (1.0, 10.0),
    capacity: float | None = None,
) -> Instance:
    coords = [(rng.uniform(0, side), rng.uniform(0, side)) for _ in range(n + 1)]
    yields = [0.0] + [rng.uniform(*yield_range) for _ in range(n)]
    if capacity is None:
        capacity = yield_range[1] * max(2, n // 2)
    return Instance(
        coords=tuple(coords),
        yields=tuple(yields),
        capacity=capacity,
        robot_weight=capacity / 3,
    )
