import math
import random

import pytest

from orchard_mtvrp.core import GiantSolution, Instance, decode_trips, evaluate, trip_energy
from orchard_mtvrp.oracle import exact_schedule
from orchard_mtvrp.scheduler import (
    Framework,
    RepairStatus,
    Schedule,
    makespan_assign,
    repair,
    score_with_framework,
    thresholds,
)

from conftest import random_instance


def _validate(schedule: Schedule, energies, m, e_max):
    assert len(schedule.assignment) == len(energies)
    assert all(0 <= r < m for r in schedule.assignment)
    loads = [0.0] * m
    for i, r in enumerate(schedule.assignment):
        loads[r] += energies[i]
    for expected, reported in zip(loads, schedule.robot_energies):
        assert reported == pytest.approx(expected)
        assert reported <= e_max + 1e-9


class TestMakespanAssign:
    def test_perfect_fit(self):
        s = makespan_assign([5.0, 5.0, 5.0], 3, 5.0)
        assert s is not None
        assert sorted(s.assignment) == [0, 1, 2]
        _validate(s, [5.0, 5.0, 5.0], 3, 5.0)

    def test_sum_bound_infeasible(self):
        assert makespan_assign([6.0, 5.0], 1, 10.0) is None

    def test_hand_case(self):
        s = makespan_assign([4.0, 3.0, 3.0, 2.0, 2.0], 2, 7.0)
        assert s is not None
        _validate(s, [4.0, 3.0, 3.0, 2.0, 2.0], 2, 7.0)

    def test_single_energy_above_bound(self):
        assert makespan_assign([11.0, 1.0], 4, 10.0) is None

    def test_ffd_miss_exact_hit(self):
        # FFD packs 6,4 | 5 and strands 3+3; the exact search finds 6,3 | 5,4  wait
        energies = [6.0, 5.0, 4.0, 3.0, 3.0]
        s = makespan_assign(energies, 2, 11.0)
        assert s is not None
        _validate(s, energies, 2, 11.0)

    def test_agrees_with_exhaustive_oracle(self):
        rng = random.Random(55)
        for _ in range(1000):
            t = rng.randint(1, 10)
            m = rng.randint(1, 4)
            energies = [rng.uniform(0.5, 10.0) for _ in range(t)]
            e_max = rng.uniform(5.0, 20.0)
            witness = makespan_assign(energies, m, e_max)
            feasible = exact_schedule(energies, m, e_max)
            assert (witness is not None) == feasible
            if witness is not None:
                _validate(witness, energies, m, e_max)

    def test_empty_trip_list(self):
        s = makespan_assign([], 2, 1.0)
        assert s is not None
        assert s.assignment == ()


class TestRepair:
    def _line(self, capacity=100.0):
        return Instance(
            coords=((0.0, 0.0), (10.0, 0.0), (20.0, 0.0)),
            yields=(0.0, 5.0, 5.0),
            capacity=capacity,
            robot_weight=20.0,
        )

    def test_feasible_input_unchanged(self):
        inst = self._line()
        sol = GiantSolution((1, 0, 2))
        out, status = repair(sol, inst, 2, 1e6)
        assert status is RepairStatus.REPAIRED
        assert out == sol

    def test_long_trip_split_to_meet_bound(self):
        inst = self._line()
        sol = GiantSolution((1, 2))  # single trip, energy 1050
        # two robots, bound below 1050 but above each singleton trip energy
        out, status = repair(sol, inst, 2, 1000.0)
        assert status is RepairStatus.REPAIRED
        trips = decode_trips(out)
        assert sorted(t for trip in trips for t in trip) == [1, 2]
        energies = [trip_energy(t, inst) for t in trips]
        assert makespan_assign(energies, 2, 1000.0) is not None

    def test_unsatisfiable_bound_reports_infeasible(self):
        inst = self._line()
        sol = GiantSolution((1, 2))
        out, status = repair(sol, inst, 2, 100.0)
        assert status is RepairStatus.INFEASIBLE
        assert sorted(t for trip in decode_trips(out) for t in trip) == [1, 2]

    def test_contracts_on_constructed_infeasible_fixtures(self):
        rng = random.Random(7)
        checked = 0
        while checked < 200:
            inst = random_instance(rng, rng.randint(3, 9))
            perm = list(inst.task_ids)
            rng.shuffle(perm)
            tokens: list[int] = []
            for t in perm:
                if tokens and rng.random() < 0.25:
                    tokens.append(0)
                tokens.append(t)
            sol = GiantSolution(tuple(tokens))
            ev = evaluate(sol, inst)
            energies = [t.energy for t in ev.trips]
            m = rng.randint(1, 3)
            # bound between the best possible single-trip maximum and the
            # current makespan so the input is infeasible but repair has room
            e_max = max(energies) * rng.uniform(0.55, 0.95)
            if makespan_assign(energies, m, e_max) is not None:
                continue
            checked += 1
            trace: list[tuple[float, float]] = []
            out, status = repair(sol, inst, m, e_max, _move_trace=trace)
            out_trips = decode_trips(out)
            assert sorted(t for trip in out_trips for t in trip) == sorted(perm)
            for trip in out_trips:
                assert sum(inst.yields[t] for t in trip) <= inst.capacity + 1e-9
            for previous, new in trace:
                assert new <= previous + 1e-9
            out_energies = [trip_energy(t, inst) for t in out_trips]
            if status is RepairStatus.REPAIRED:
                assert makespan_assign(out_energies, m, e_max) is not None
            else:
                assert makespan_assign(out_energies, m, e_max) is None

    def test_capacity_overflow_expanded_before_split(self):
        inst = self._line(capacity=8.0)
        sol = GiantSolution((1, 2))  # load 10 > 8, expansion forced
        out, status = repair(sol, inst, 2, 1e6)
        assert status is RepairStatus.REPAIRED
        assert decode_trips(out) == [(1,), (2,)]


class TestThresholds:
    def test_arithmetic(self):
        assert thresholds(300.0, 2) == (225.0, 255.0)
        assert thresholds(300.0, 5) == (90.0, 102.0)

    def test_six_scenarios_shape(self):
        scenarios = [
            (m, bound)
            for m in (2, 5, 8)
            for bound in thresholds(300.0, m)
        ]
        assert len(scenarios) == 6

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            thresholds(0.0, 2)
        with pytest.raises(ValueError):
            thresholds(10.0, 0)


class TestFrameworkScoring:
    def test_unbounded_emax_matches_plain_evaluation(self):
        rng = random.Random(3)
        inst = random_instance(rng, 6)
        sol = GiantSolution.from_trips([(t,) for t in inst.task_ids])
        plain = evaluate(sol, inst).energy
        for fw in Framework:
            scored = score_with_framework(sol, inst, 2, math.inf, fw)
            assert scored.energy == pytest.approx(plain)
            assert scored.solution == sol

    def test_fr1_repairs_in_place(self):
        inst = Instance(
            coords=((0.0, 0.0), (10.0, 0.0), (20.0, 0.0)),
            yields=(0.0, 5.0, 5.0),
            capacity=100.0,
            robot_weight=20.0,
        )
        sol = GiantSolution((1, 2))
        scored = score_with_framework(sol, inst, 2, 1000.0, Framework.FR1)
        assert scored.schedule is not None
        assert scored.energy < math.inf
        assert len(decode_trips(scored.solution)) == 2

    def test_fr1_marks_unrepairable_infinite(self):
        inst = Instance(
            coords=((0.0, 0.0), (10.0, 0.0), (20.0, 0.0)),
            yields=(0.0, 5.0, 5.0),
            capacity=100.0,
            robot_weight=20.0,
        )
        sol = GiantSolution((1, 2))
        scored = score_with_framework(sol, inst, 2, 100.0, Framework.FR1)
        assert scored.energy == math.inf
        assert scored.schedule is None

    def test_fr2_marks_infeasible_without_repair(self):
        inst = Instance(
            coords=((0.0, 0.0), (10.0, 0.0), (20.0, 0.0)),
            yields=(0.0, 5.0, 5.0),
            capacity=100.0,
            robot_weight=20.0,
        )
        sol = GiantSolution((1, 2))
        scored = score_with_framework(sol, inst, 2, 1000.0, Framework.FR2)
        assert scored.energy == math.inf
        assert scored.solution == sol

    def test_fr3_ignores_bound_during_run(self):
        inst = Instance(
            coords=((0.0, 0.0), (10.0, 0.0), (20.0, 0.0)),
            yields=(0.0, 5.0, 5.0),
            capacity=100.0,
            robot_weight=20.0,
        )
        sol = GiantSolution((1, 2))
        scored = score_with_framework(sol, inst, 2, 100.0, Framework.FR3)
        assert scored.energy == pytest.approx(1050.0)
        assert scored.schedule is None


class TestLargeTripFallback:
    def test_witness_found_beyond_exact_limit(self):
        rng = random.Random(2)
        energies = [rng.uniform(1.0, 3.0) for _ in range(25)]
        s = makespan_assign(energies, 5, 16.0)
        assert s is not None
        _validate(s, energies, 5, 16.0)

    def test_sum_bound_still_exact_beyond_limit(self):
        energies = [2.0] * 25
        assert makespan_assign(energies, 2, 20.0) is None
