"""Oracle checkers: positive on valid traces, negative on mutated ones."""

import dataclasses
import random

import pytest

import pulsering as pr
from pulsering import oracle
from pulsering.ring import DeliverEvent


def _mutate_delivery(trace, index_from_end=1, bump=("sent", 1)):
    """Return a copy of the trace with one delivery snapshot corrupted."""
    events = list(trace.events)
    hits = [i for i, e in enumerate(events) if isinstance(e, DeliverEvent)]
    i = hits[-index_from_end]
    e = events[i]
    field, port = bump
    counters = {"recv": list(e.recv), "sent": list(e.sent)}
    counters[field][port] += 1
    events[i] = dataclasses.replace(
        e, recv=tuple(counters["recv"]), sent=tuple(counters["sent"])
    )
    return dataclasses.replace(trace, events=events)


class TestDirectChecker:
    def test_valid_trace_passes(self):
        trace = pr.run([2, 5, 3], protocol="a1", seed=3)
        report = pr.check_a1_invariants(trace)
        assert report.all_passed, report.failures()
        assert report.reproducer["schedule"]

    def test_mutated_trace_fails(self):
        trace = pr.run([2, 5, 3], protocol="a1", seed=3)
        bad = _mutate_delivery(trace, bump=("sent", 1))
        report = pr.check_a1_invariants(bad)
        assert not report.all_passed
        names = {c.name for c in report.failures()}
        assert "relay_send_balance" in names

    def test_wrong_protocol_rejected(self):
        trace = pr.run([1, 2], protocol="a2", seed=0)
        with pytest.raises(pr.ValidationError):
            pr.check_a1_invariants(trace)


class TestTerminatingChecker:
    def test_valid_trace_passes(self):
        trace = pr.run([1, 2, 3], protocol="a2", seed=8)
        report = pr.check_a2_invariants(trace)
        assert report.all_passed, report.failures()

    def test_truncated_trace_flagged_partial(self):
        trace = pr.run([1, 2, 3], protocol="a2", seed=8)
        cut = dataclasses.replace(
            trace, events=trace.events[: len(trace.events) // 2], outcome="partial"
        )
        report = pr.check_a2_invariants(cut)
        failed = {c.name for c in report.failures()}
        assert "all_nodes_terminated" in failed

    def test_forged_reverse_counter_fails_lag_check(self):
        trace = pr.run([1, 2, 3], protocol="a2", seed=8)
        # inflate a reverse counter early in the run, while forward pulses fly
        bad = _mutate_delivery(trace, index_from_end=len(trace.delivery_schedule()) - 1,
                               bump=("recv", 1))
        report = pr.check_a2_invariants(bad)
        assert not report.all_passed

    def test_single_node_trigger_conditions(self):
        trace = pr.run([4], protocol="a2", seed=0)
        report = pr.check_a2_invariants(trace)
        assert report.all_passed, report.failures()
        assert trace.final["total_sent"] == 9


class TestOrientingChecker:
    def test_all_swap_patterns_three_nodes(self):
        for mask in range(8):
            swaps = [(mask >> v) & 1 for v in range(3)]
            asg = pr.PortAssignment.from_swaps(swaps)
            for seed in range(5):
                trace = pr.run([1, 2, 3], protocol="a3b", assignment=asg, seed=seed)
                report = pr.check_a3_outcome(trace)
                assert report.all_passed, (swaps, seed, report.failures())
                leader = trace.final["outputs"].index(pr.LEADER)
                assert leader == 2

    def test_direction_projection_accepted_by_relay_checker(self):
        asg = pr.PortAssignment.from_swaps([1, 0, 1])
        trace = pr.run([2, 3, 1], protocol="a3a", assignment=asg, seed=4)
        for direction in ("cw", "ccw"):
            vids, entries, quiescent = pr.project_a3_direction(trace, direction)
            report = oracle.InvariantReport(protocol="projection")
            oracle._check_relay_stream(report, vids, entries, quiescent)
            assert report.all_passed, (direction, report.failures())

    def test_non_quiescent_trace_rejected(self):
        trace = pr.run([1, 2], protocol="a3b", seed=0)
        cut = dataclasses.replace(trace, outcome="partial")
        with pytest.raises(pr.ValidationError):
            pr.check_a3_outcome(cut)

    def test_wrong_total_detected(self):
        trace = pr.run([1, 2], protocol="a3b", seed=0)
        forged = dataclasses.replace(
            trace, final={**trace.final, "total_sent": trace.final["total_sent"] + 1}
        )
        report = pr.check_a3_outcome(forged)
        assert "exact_total_pulses" in {c.name for c in report.failures()}


class TestSolitudePatterns:
    def test_direct_protocol_patterns_are_unary(self):
        for i in (1, 2, 3, 7):
            assert pr.solitude_pattern("a1", i).bits == "0" * i

    def test_terminating_patterns_shape(self):
        p1 = pr.solitude_pattern("a2", 1)
        assert p1.complete and len(p1) == 3
        assert p1.bits.count("0") == 1 and p1.bits.count("1") == 2
        for i in (1, 2, 5):
            p = pr.solitude_pattern("a2", i)
            assert p.bits == "0" * i + "1" * (i + 1)

    def test_budget_exhaustion_flagged(self):
        p = pr.solitude_pattern("a2", 5, pulse_budget=4)
        assert not p.complete

    def test_uniqueness_pass_and_forced_collision(self):
        patterns = {i: pr.solitude_pattern("a2", i) for i in range(1, 33)}
        assert pr.assert_patterns_unique(patterns).all_passed
        forged = {
            1: oracle.SolitudePattern("0", True),
            2: oracle.SolitudePattern("0", True),
        }
        report = pr.assert_patterns_unique(forged)
        assert not report.all_passed
        assert "(1, 2)" in report.failures()[0].detail


class TestPrefixWitness:
    def test_degenerate_k_equals_n(self):
        patterns = {i: pr.solitude_pattern("a2", i) for i in range(1, 5)}
        witness = pr.build_prefix_witness(patterns, 4)
        assert witness.prefix_length == 0
        assert witness.pulse_lower_bound == 0

    def test_k_64_n_2(self):
        patterns = {i: pr.solitude_pattern("a2", i) for i in range(1, 65)}
        witness = pr.build_prefix_witness(patterns, 2)
        assert witness.prefix_length >= 5
        measured = pr.measure_witness("a2", witness, patterns)
        assert measured["deliveries_before_divergence"] >= witness.pulse_lower_bound

    def test_k_below_n_rejected(self):
        patterns = {1: oracle.SolitudePattern("0", True)}
        with pytest.raises(pr.ValidationError):
            pr.build_prefix_witness(patterns, 2)


class TestExploration:
    def test_two_nodes_single_outcome(self):
        outcomes = pr.explore_outcomes([2, 3], protocol="a2")
        assert len(outcomes) == 1
        outputs, counters, total, terminated, quiescent = next(iter(outcomes))
        assert total == 2 * (2 * 3 + 1)
        assert terminated and quiescent
        assert outputs == (pr.NONLEADER, pr.LEADER)

    def test_direct_protocol_single_outcome(self):
        outcomes = pr.explore_outcomes([1, 3], protocol="a1")
        assert len(outcomes) == 1
        outputs, counters, total, terminated, quiescent = next(iter(outcomes))
        assert total == 2 * 3 and quiescent and not terminated


class TestMonteCarlo:
    def test_single_node_unique_max_is_certain(self):
        stats = pr.estimate_unique_max(1, 2.0, 200, seed=0)
        assert stats.unique_max_freq == 1.0

    def test_reproducible_across_calls(self):
        a = pr.estimate_unique_max(8, 2.0, 500, seed=42)
        b = pr.estimate_unique_max(8, 2.0, 500, seed=42)
        assert a == b

    def test_resampling_pipeline_small(self):
        res = pr.resampling_distinct_frequency(4, 3.0, 50, seed=1, bit_cap=12)
        assert res["trials"] == 50
        assert 0.0 <= res["distinct_freq"] <= 1.0
        assert res["totals_exact_freq"] >= 0.9


class TestReplay:
    def test_replay_identical(self):
        trace = pr.run([3, 1, 2], protocol="a2", seed=6)
        identical, index = pr.replay_trace(trace)
        assert identical and index is None

    def test_edited_event_diverges(self):
        trace = pr.run([3, 1, 2], protocol="a2", seed=6)
        bad = _mutate_delivery(trace, bump=("recv", 0))
        identical, index = pr.replay_trace(bad)
        assert not identical
        assert index is not None
