"""Protocol automata: exact totals, outputs, sampler distribution."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import pulsering as pr
from pulsering.protocols import pulse_bound

distinct_ids = st.lists(
    st.integers(1, 60), min_size=1, max_size=6, unique=True
)


class TestStabilizingElection:
    def test_single_node_swallows_after_id_pulses(self):
        trace = pr.run([3], protocol="a1", seed=0)
        assert trace.outcome == "quiescent"
        assert trace.final["counters"][0] == {"recv": [3, 0], "sent": [0, 3]}
        assert trace.final["outputs"] == [pr.LEADER]

    def test_duplicate_ids_elect_all_max_holders(self):
        trace = pr.run([2, 1, 2], protocol="a1", seed=5)
        assert trace.outcome == "quiescent"
        assert trace.final["outputs"] == [pr.LEADER, pr.NONLEADER, pr.LEADER]

    def test_reverse_pulse_rejected(self):
        node = pr.StabilizingElectionNode(2)
        with pytest.raises(pr.ValidationError):
            node.on_deliver(1)

    @given(distinct_ids, st.integers(0, 999))
    @settings(max_examples=40, deadline=None)
    def test_total_is_n_times_idmax(self, ids, seed):
        trace = pr.run(ids, protocol="a1", seed=seed)
        assert trace.outcome == "quiescent"
        assert trace.final["total_sent"] == len(ids) * max(ids)


class TestTerminatingElection:
    def test_single_node_totals(self):
        t1 = pr.run([1], protocol="a2", seed=0)
        assert t1.outcome == "terminated"
        assert t1.final["total_sent"] == 3
        t5 = pr.run([5], protocol="a2", seed=0)
        assert t5.final["total_sent"] == 11

    def test_three_node_total_21(self):
        trace = pr.run([1, 2, 3], protocol="a2", seed=7)
        assert trace.outcome == "terminated"
        assert trace.final["total_sent"] == 21

    def test_duplicate_ids_rejected(self):
        with pytest.raises(pr.ValidationError):
            pr.build_ring([2, 2], protocol="a2")

    def test_nonoriented_ring_rejected(self):
        asg = pr.PortAssignment.from_swaps([1, 0])
        with pytest.raises(pr.ValidationError):
            pr.build_ring([1, 2], protocol="a2", assignment=asg)

    @given(distinct_ids, st.integers(0, 999))
    @settings(max_examples=40, deadline=None)
    def test_terminates_with_exact_total(self, ids, seed):
        trace = pr.run(ids, protocol="a2", seed=seed)
        assert trace.outcome == "terminated"
        assert trace.final["total_sent"] == len(ids) * (2 * max(ids) + 1)
        leader = ids.index(max(ids))
        assert trace.final["outputs"][leader] == pr.LEADER


class TestOrientingElection:
    def test_wide_variant_total(self):
        asg = pr.PortAssignment.from_swaps([0, 1])
        trace = pr.run([1, 2], protocol="a3a", assignment=asg, seed=0)
        assert trace.final["total_sent"] == 2 * (4 * 2 - 1)

    def test_compact_variant_total(self):
        trace = pr.run([1, 2], protocol="a3b", seed=0)
        assert trace.final["total_sent"] == 2 * (2 * 2 + 1)

    def test_virtual_ids(self):
        wide = pr.OrientingElectionNode(3, wide_ids=True)
        assert (wide.virtual_id(0), wide.virtual_id(1)) == (5, 6)
        compact = pr.OrientingElectionNode(3, wide_ids=False)
        assert (compact.virtual_id(0), compact.virtual_id(1)) == (3, 4)

    @given(
        st.lists(st.integers(1, 30), min_size=2, max_size=5, unique=True),
        st.integers(0, 499),
    )
    @settings(max_examples=40, deadline=None)
    def test_random_wiring_elects_max_and_orients(self, ids, seed):
        rng = random.Random(seed)
        asg = pr.PortAssignment.from_swaps([rng.randint(0, 1) for _ in ids])
        trace = pr.run(ids, protocol="a3b", assignment=asg, seed=seed)
        assert trace.outcome == "quiescent"
        report = pr.check_a3_outcome(trace)
        assert report.all_passed, report.failures()

    def test_resampling_keeps_pulse_behavior(self):
        # identical schedules, identical event streams: resampling only
        # rewrites the stored ID, never the pulse decisions
        ids = [1, 1, 3]
        asg = pr.PortAssignment.from_swaps([0, 1, 0])
        sched = pr.PriorityScheduler()
        plain = pr.run(ids, protocol="a3b", assignment=asg, scheduler=sched, seed=2)
        resampled = pr.run(
            ids,
            protocol="a3b+resample",
            assignment=asg,
            scheduler=pr.PriorityScheduler(),
            seed=2,
        )
        assert plain.delivery_schedule() == resampled.delivery_schedule()
        assert plain.final["total_sent"] == resampled.final["total_sent"]
        assert plain.final["counters"] == resampled.final["counters"]

    def test_resampled_ids_stay_below_counter_minimum(self):
        trace = pr.run(
            [1, 1, 2, 3],
            protocol="a3b+resample",
            assignment=pr.PortAssignment.from_swaps([0, 0, 1, 0]),
            seed=11,
        )
        for counters, pid in zip(trace.final["counters"], trace.final["ids"]):
            assert pid <= min(counters["recv"]) or min(counters["recv"]) <= 1


class TestIdSampler:
    def test_bit_length_success_probability(self):
        sampler = pr.IdSampler(c=2.0)
        assert sampler.p == pytest.approx(2 ** (-1 / 4))

    def test_values_positive_and_within_bits(self):
        sampler = pr.IdSampler(c=2.0, bit_cap=12)
        rng = random.Random(0)
        for _ in range(2000):
            value, bits = sampler.sample_with_bits(rng)
            assert 1 <= bits <= 12
            assert 1 <= value < 2**bits or value == 1

    def test_geometric_mean_bits(self):
        # E[bits] = 1/(1-p); for c=2, p=2^-0.25 so mean ~ 6.3
        sampler = pr.IdSampler(c=2.0)
        rng = random.Random(1)
        mean = sum(sampler.sample_with_bits(rng)[1] for _ in range(20000)) / 20000
        assert mean == pytest.approx(1 / (1 - sampler.p), rel=0.05)

    def test_rejects_bad_parameters(self):
        with pytest.raises(pr.ValidationError):
            pr.IdSampler(c=0)
        with pytest.raises(pr.ValidationError):
            pr.IdSampler(c=2.0, bit_cap=0)

    def test_sampled_ring_runs(self):
        trace = pr.run(protocol="a4+a3b", n=4, c=2.0, seed=3, bit_cap=10)
        assert trace.outcome == "quiescent"
        ids = trace.config["ids"]
        assert trace.final["total_sent"] == len(ids) * (2 * max(ids) + 1)


class TestConstruction:
    def test_bounds_by_protocol(self):
        assert pulse_bound("a1", [4, 2]) == 8
        assert pulse_bound("a2", [4, 2]) == 18
        assert pulse_bound("a3a", [4, 2]) == 30
        assert pulse_bound("a3b", [4, 2]) == 18

    def test_ids_must_be_positive(self):
        with pytest.raises(pr.ValidationError):
            pr.build_ring([0, 1], protocol="a1")

    def test_unknown_protocol(self):
        with pytest.raises(pr.ValidationError):
            pr.build_ring([1], protocol="a9")
