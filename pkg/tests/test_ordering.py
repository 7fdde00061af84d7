"""Tests for the total-order formulation: model build, export, validation,
and the order/schedule conversions."""

import random
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavsched.errors import DimensionMismatch, EmptyInstance, InvalidOrder, InvalidSchedule
from uavsched.model import Schedule, compute_energy, instance_from_parts
from uavsched.ordering import (
    CombinedIndex,
    DependencyRelation,
    TotalOrderMatrix,
    build_ilp,
    dependency_from_instance,
    export_lp,
    ilp_objective,
    lp_text,
    order_to_schedule,
    schedule_to_canonical_order,
    validate_total_order,
)
from uavsched.sched import exact_schedule_dp

from helpers import feasible_sequences, reference_instance, random_instance

# the reference optimal hierarchy: F4, U5, F1, U2, F3, U3, F2, U4, U1
OPTIMAL_HIERARCHY = (4, 9, 1, 6, 3, 7, 2, 8, 5)


def singleton_instance():
    return instance_from_parts((0.020,), ({0},), (100.0,))


class TestCombinedIndex:
    def test_mapping(self):
        idx = CombinedIndex(n=4, m=5)
        assert idx.size == 9
        assert idx.flow(0) == 1
        assert idx.uav(0) == 5
        assert idx.is_flow(4) and not idx.is_flow(5)


class TestDependency:
    def test_reference_instance_has_nine_pairs(self):
        dep = dependency_from_instance(reference_instance())
        assert len(dep.pairs) == 9
        assert {(1, 5), (1, 6), (1, 7)} <= dep.pairs

    def test_singleton(self):
        dep = dependency_from_instance(singleton_instance())
        assert dep.pairs == frozenset({(1, 2)})

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10**6))
    def test_pair_count_equals_total_pinning(self, seed):
        inst = random_instance(random.Random(seed))
        dep = dependency_from_instance(inst)
        assert len(dep.pairs) == sum(len(f.retired_set) for f in inst.flows)
        assert len(dep.pairs) == sum(len(u.flow_set) for u in inst.uavs)

    def test_non_bipartite_pairs_rejected(self):
        with pytest.raises(ValueError):
            DependencyRelation(n=2, m=2, pairs=frozenset({(3, 4)}))


class TestBuildIlp:
    def test_reference_model_counts(self):
        ilp = build_ilp(reference_instance())
        assert ilp.variable_count == 72
        assert len(ilp.objective) == 4 * 5
        assert len(ilp.fixed) == 9
        assert ilp.pair_count == 36
        assert ilp.triple_count == 504
        assert sum(1 for _ in ilp.pair_equalities()) == 36
        assert sum(1 for _ in ilp.triple_inequalities()) == 504

    def test_singleton_objective_is_one_product(self):
        ilp = build_ilp(singleton_instance())
        assert ilp.fixed == ((1, 2),)
        assert ilp.objective == (((1, 2), 0.020 * 100.0),)

    def test_scaling_powers_scales_coefficients(self):
        inst = reference_instance()
        scaled = instance_from_parts(
            inst.times, tuple(f.retired_set for f in inst.flows), tuple(p * 4.0 for p in inst.powers)
        )
        base = dict(build_ilp(inst).objective)
        bumped = dict(build_ilp(scaled).objective)
        for key, coeff in base.items():
            assert bumped[key] == coeff * 4.0
        assert build_ilp(inst).fixed == build_ilp(scaled).fixed

    def test_empty_instance_rejected(self):
        with pytest.raises(EmptyInstance):
            build_ilp(instance_from_parts((), (), ()))


class TestExportLp:
    def test_singleton_file_content(self, tmp_path):
        path = tmp_path / "tiny.lp"
        text = export_lp(build_ilp(singleton_instance()), path)
        assert path.read_text() == text
        binaries = re.findall(r"^ (x_\d+_\d+)$", text, flags=re.M)
        assert binaries == ["x_1_2", "x_2_1"]
        assert " dep_1_2: x_1_2 = 1" in text
        assert " pair_1_2: x_1_2 + x_2_1 = 1" in text

    def test_reference_model_counts_round_trip(self, tmp_path):
        path = tmp_path / "ref.lp"
        text = export_lp(build_ilp(reference_instance()), path)
        assert len(re.findall(r"^ x_\d+_\d+$", text, flags=re.M)) == 72
        assert len(re.findall(r"^ dep_", text, flags=re.M)) == 9
        assert len(re.findall(r"^ pair_", text, flags=re.M)) == 36
        assert len(re.findall(r"^ tri_", text, flags=re.M)) == 504

    def test_byte_identical_across_exports(self, tmp_path):
        ilp = build_ilp(reference_instance())
        a, b = tmp_path / "a.lp", tmp_path / "b.lp"
        export_lp(ilp, a)
        export_lp(ilp, b)
        assert a.read_bytes() == b.read_bytes()


class TestValidateTotalOrder:
    def test_reference_optimal_order_is_clean(self):
        inst = reference_instance()
        x = TotalOrderMatrix.from_sequence(4, 5, OPTIMAL_HIERARCHY)
        assert validate_total_order(x, dependency_from_instance(inst)) == []

    def test_symmetric_pair_flagged(self):
        x = TotalOrderMatrix.from_sequence(1, 1, (1, 2))
        rows = [list(r) for r in x.rows]
        rows[1][0] = 1  # now x_12 = x_21 = 1
        bad = TotalOrderMatrix(n=1, m=1, rows=tuple(tuple(r) for r in rows))
        families = {v.family for v in validate_total_order(bad, dependency_from_instance(singleton_instance()))}
        assert "totality" in families

    def test_three_cycle_flagged_as_intransitive(self):
        # a<b, b<c, c<a: comparability holds pairwise but transitivity fails
        rows = ((0, 1, 0), (0, 0, 1), (1, 0, 0))
        bad = TotalOrderMatrix(n=3, m=0, rows=rows)
        dep = DependencyRelation(n=3, m=0, pairs=frozenset())
        families = {v.family for v in validate_total_order(bad, dep)}
        assert families == {"transitivity"}

    def test_missing_dependency_flagged(self):
        inst = singleton_instance()
        x = TotalOrderMatrix.from_sequence(1, 1, (2, 1))  # UAV before its flow
        violations = validate_total_order(x, dependency_from_instance(inst))
        assert [v.family for v in violations] == ["dependency"]
        assert violations[0].indices == (1, 2)

    def test_reflexive_entry_flagged(self):
        rows = ((1, 1), (0, 0))
        bad = TotalOrderMatrix(n=1, m=1, rows=rows)
        families = {v.family for v in validate_total_order(bad, dependency_from_instance(singleton_instance()))}
        assert "irreflexive" in families

    def test_dimension_mismatch(self):
        x = TotalOrderMatrix.from_sequence(1, 1, (1, 2))
        with pytest.raises(DimensionMismatch):
            validate_total_order(x, dependency_from_instance(reference_instance()))


class TestOrderToSchedule:
    def test_reference_hierarchy(self):
        x = TotalOrderMatrix.from_sequence(4, 5, OPTIMAL_HIERARCHY)
        schedule, uav_positions = order_to_schedule(x)
        assert schedule.order == (3, 0, 2, 1)
        assert uav_positions == (8, 3, 5, 7, 1)

    def test_two_elements(self):
        x = TotalOrderMatrix.from_sequence(1, 1, (1, 2))
        schedule, uav_positions = order_to_schedule(x)
        assert schedule.order == (0,)
        assert uav_positions == (1,)

    def test_invalid_order_rejected(self):
        rows = ((0, 1, 0), (0, 0, 1), (1, 0, 0))
        with pytest.raises(InvalidOrder):
            order_to_schedule(TotalOrderMatrix(n=3, m=0, rows=rows))

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10**6))
    def test_successor_counts_of_any_sequence_are_a_permutation(self, seed):
        rng = random.Random(seed)
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        seq = list(range(1, n + m + 1))
        rng.shuffle(seq)
        x = TotalOrderMatrix.from_sequence(n, m, seq)
        succ = sorted(sum(row) for row in x.rows)
        assert succ == list(range(n + m))


class TestCanonicalOrder:
    def test_reference_schedule_reaches_the_optimum_objective(self):
        inst = reference_instance()
        x = schedule_to_canonical_order(inst, Schedule((3, 0, 2, 1)))
        assert validate_total_order(x, dependency_from_instance(inst)) == []
        assert ilp_objective(build_ilp(inst), x) == pytest.approx(46.0, rel=1e-9)

    def test_singleton_objective(self):
        inst = singleton_instance()
        x = schedule_to_canonical_order(inst, Schedule((0,)))
        assert ilp_objective(build_ilp(inst), x) == pytest.approx(2.0, rel=1e-12)

    def test_invalid_schedule_rejected(self):
        with pytest.raises(InvalidSchedule):
            schedule_to_canonical_order(reference_instance(), Schedule((0, 1)))

    def test_unpinned_uavs_go_first(self):
        inst = instance_from_parts((0.02,), ({1},), (50.0, 60.0))
        x = schedule_to_canonical_order(inst, Schedule((0,)))
        # UAV 0 carries no flows: it precedes the flow, so no objective term fires for it
        assert x.value(2, 1) == 1
        assert ilp_objective(build_ilp(inst), x) == pytest.approx(0.02 * 60.0, rel=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 10**6))
    def test_objective_equals_energy_exactly(self, seed):
        rng = random.Random(seed)
        inst = random_instance(rng, max_n=6, max_m=5)
        order = tuple(rng.sample(range(inst.n), inst.n))
        x = schedule_to_canonical_order(inst, Schedule(order))
        energy = compute_energy(inst, Schedule(order)).total_energy
        assert ilp_objective(build_ilp(inst), x) == energy

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 10**6))
    def test_linearization_inverts_canonical_completion(self, seed):
        rng = random.Random(seed)
        inst = random_instance(rng, max_n=6, max_m=5)
        order = tuple(rng.sample(range(inst.n), inst.n))
        x = schedule_to_canonical_order(inst, Schedule(order))
        schedule, _ = order_to_schedule(x)
        assert schedule.order == order


class TestIlpObjective:
    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ilp_objective(build_ilp(reference_instance()), TotalOrderMatrix.from_sequence(1, 1, (1, 2)))

    def test_feasible_orders_never_beat_their_induced_schedule(self):
        rng = random.Random(4)
        for _ in range(8):
            inst = random_instance(rng, max_n=3, max_m=3)
            if inst.n + inst.m > 6:
                continue
            ilp = build_ilp(inst)
            for seq in feasible_sequences(inst):
                x = TotalOrderMatrix.from_sequence(inst.n, inst.m, seq)
                schedule, _ = order_to_schedule(x)
                assert ilp_objective(ilp, x) >= compute_energy(inst, schedule).total_energy - 1e-12

    def test_optimum_over_feasible_orders_matches_exact_dp(self):
        rng = random.Random(5)
        for _ in range(8):
            inst = random_instance(rng, max_n=3, max_m=3)
            if inst.n + inst.m > 6:
                continue
            ilp = build_ilp(inst)
            best = min(
                ilp_objective(ilp, TotalOrderMatrix.from_sequence(inst.n, inst.m, seq))
                for seq in feasible_sequences(inst)
            )
            assert best == exact_schedule_dp(inst).energy

    def test_lp_text_has_deterministic_objective_order(self):
        text = lp_text(build_ilp(reference_instance()))
        terms = re.findall(r"x_(\d+)_(\d+)", text.split("Subject To")[0])
        assert terms == [(str(i), str(j)) for i in range(1, 5) for j in range(5, 10)]
