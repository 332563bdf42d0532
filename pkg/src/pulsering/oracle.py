"""Trace verification, solitude patterns, and experiment tooling.

Every proven property of the protocols is implemented here as an
assertable predicate over an execution trace (or as an online statistic
for the Monte-Carlo experiments).  Checkers reconstruct per-node counters
from the event log, so a forged or corrupted trace fails the same way a
buggy protocol would.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from .ring import (
    DeliverEvent,
    ExecutionTrace,
    FifoScheduler,
    PortAssignment,
    PriorityScheduler,
    SendEvent,
    TerminateEvent,
    ValidationError,
)
from .protocols import (
    LEADER,
    IdSampler,
    build_ring,
    pulse_bound,
)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    first_violation: int | None = None  # event index


@dataclass
class InvariantReport:
    protocol: str
    checks: list[Check] = field(default_factory=list)
    reproducer: dict | None = None

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, passed: bool, detail: str = "", index: int | None = None):
        self.checks.append(Check(name, passed, detail, index if not passed else None))

    def to_jsonable(self) -> dict:
        return {
            "protocol": self.protocol,
            "all_passed": self.all_passed,
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "detail": c.detail,
                    "first_violation": c.first_violation,
                }
                for c in self.checks
            ],
            "reproducer": self.reproducer,
        }


# ---------------------------------------------------------------------------
# Counter reconstruction


class _CounterState:
    """Per-node counters replayed from the event log.

    Delivery events carry the authoritative post-handler counters of the
    receiving node; initialization sends are applied directly.
    """

    def __init__(self, n: int):
        self.n = n
        self.recv = [[0, 0] for _ in range(n)]
        self.sent = [[0, 0] for _ in range(n)]

    def apply(self, event) -> int | None:
        """Apply one event; returns the affected node for delivery events."""
        if isinstance(event, SendEvent) and event.step == 0:
            self.sent[event.node][event.port] += 1
            return None
        if isinstance(event, DeliverEvent):
            self.recv[event.node] = list(event.recv)
            self.sent[event.node] = list(event.sent)
            return event.node
        return None

    def transit(self, out_port: int, in_port: int) -> int:
        sent = sum(s[out_port] for s in self.sent)
        recv = sum(r[in_port] for r in self.recv)
        return sent - recv


def _final_counters(trace: ExecutionTrace) -> tuple[list[list[int]], list[list[int]]]:
    recv = [list(c["recv"]) for c in trace.final["counters"]]
    sent = [list(c["sent"]) for c in trace.final["counters"]]
    return recv, sent


# ---------------------------------------------------------------------------
# One-directional relay invariants (shared by the direct protocol and the
# per-direction projection of the orienting one)


def _check_relay_stream(
    report: InvariantReport,
    ids: Sequence[int],
    entries: Sequence[tuple[int, int, int, int]],
    final_quiescent: bool,
    label: str = "",
) -> None:
    """Verify the relay bookkeeping over a stream of per-event snapshots.

    ``entries`` holds (event_index, node, received, sent) after each event
    touching that node; all nodes start at (received=0, sent=1) after the
    initial emission.  Checks, per event: a node below its ID has sent
    exactly one pulse more than it received, and a node at-or-above has
    sent exactly as many; and the channel is drained exactly when no node
    is below its ID.  At the end of a quiescent trace every counter must
    equal the largest ID and the leaders must be exactly the maximum
    holders.
    """
    n = len(ids)
    id_max = max(ids)
    pfx = f"{label}:" if label else ""
    rho = [0] * n
    sigma = [1] * n
    below = n  # nodes with received < own ID
    transit = n
    step_ok = True
    equiv_ok = True
    bad_index = None
    equiv_index = None
    for index, node, r, s in entries:
        if r < ids[node]:
            expect = r + 1
        else:
            expect = r
        if s != expect and step_ok:
            step_ok = False
            bad_index = index
        was_below = rho[node] < ids[node]
        transit += (s - sigma[node]) - (r - rho[node])
        rho[node], sigma[node] = r, s
        now_below = r < ids[node]
        if was_below and not now_below:
            below -= 1
        elif now_below and not was_below:
            below += 1
        if ((transit == 0) != (below == 0)) and equiv_ok:
            equiv_ok = False
            equiv_index = index
    report.add(
        f"{pfx}relay_send_balance",
        step_ok,
        "sent count must track received count (+1 while below own ID)",
        bad_index,
    )
    report.add(
        f"{pfx}drained_iff_all_reached_id",
        equiv_ok,
        "channel empty exactly when every node received at least its ID",
        equiv_index,
    )
    if final_quiescent:
        exact = all(rho[v] == sigma[v] == id_max for v in range(n))
        report.add(
            f"{pfx}final_counters_equal_max_id",
            exact,
            f"every node must end with recv=sent={id_max}",
        )


def check_a1_invariants(trace: ExecutionTrace) -> InvariantReport:
    """Verify a one-directional election trace end to end."""
    if trace.config.get("protocol") not in ("a1",):
        raise ValidationError("expected a one-directional election trace")
    ids = list(trace.config["ids"])
    report = InvariantReport(protocol="a1", reproducer=_reproducer(trace))
    state = _CounterState(len(ids))
    entries = []
    for index, event in enumerate(trace.events):
        node = state.apply(event)
        if node is not None:
            entries.append((index, node, state.recv[node][0], state.sent[node][1]))
    _check_relay_stream(report, ids, entries, trace.outcome == "quiescent")
    if trace.outcome == "quiescent":
        id_max = max(ids)
        vmax = {v for v, i in enumerate(ids) if i == id_max}
        leaders = {v for v, o in enumerate(trace.final["outputs"]) if o == LEADER}
        report.add(
            "leaders_are_max_id_holders",
            leaders == vmax,
            f"expected leaders {sorted(vmax)}, got {sorted(leaders)}",
        )
    else:
        report.add("reached_quiescence", False, f"outcome was {trace.outcome}")
    report.add("no_fabric_violations", not trace.violations, "; ".join(trace.violations))
    return report


def check_a2_invariants(trace: ExecutionTrace) -> InvariantReport:
    """Verify a terminating election trace end to end."""
    if trace.config.get("protocol") != "a2":
        raise ValidationError("expected a terminating election trace")
    ids = list(trace.config["ids"])
    n = len(ids)
    id_max = max(ids)
    leader = ids.index(id_max)
    report = InvariantReport(protocol="a2", reproducer=_reproducer(trace))
    state = _CounterState(n)

    lag_ok, lag_index = True, None
    trigger_nodes: list[int] = []
    trigger_ok, trigger_detail = True, ""
    triggered = [False] * n
    terminated_at: dict[int, int] = {}
    term_order: list[int] = []
    post_term_ok, post_index = True, None

    for index, event in enumerate(trace.events):
        if isinstance(event, TerminateEvent):
            terminated_at[event.node] = index
            term_order.append(event.node)
            continue
        node = state.apply(event)
        if node is None:
            continue
        if node in terminated_at and post_term_ok:
            post_term_ok, post_index = False, index
        cw_transit = state.transit(out_port=1, in_port=0)
        r_cw, r_ccw = state.recv[node][0], state.recv[node][1]
        if cw_transit > 0 and lag_ok:
            if r_ccw > r_cw or (r_ccw == r_cw and r_cw != 0):
                lag_ok, lag_index = False, index
        if not triggered[node] and r_cw == ids[node] == r_ccw:
            triggered[node] = True
            trigger_nodes.append(node)
            conds = {
                "forward channel drained": cw_transit == 0,
                "one reverse pulse in flight (the fresh termination pulse)": (
                    state.transit(out_port=0, in_port=1) == 1
                ),
                "trigger node holds the maximum ID": ids[node] == id_max,
                "all counters at the maximum ID": all(
                    state.recv[v] == [id_max, id_max] for v in range(n)
                ),
                "no node terminated yet": not terminated_at,
            }
            for name, ok in conds.items():
                if not ok and trigger_ok:
                    trigger_ok, trigger_detail = False, f"at event {index}: {name}"

    report.add(
        "reverse_lags_forward",
        lag_ok,
        "reverse count must stay below forward count until the forward "
        "channel drains (equality only at zero)",
        lag_index,
    )
    report.add(
        "unique_termination_trigger",
        len(trigger_nodes) == 1 and trigger_nodes[:1] == [leader],
        f"trigger nodes: {trigger_nodes}, expected [{leader}]",
    )
    report.add("termination_trigger_conditions", trigger_ok, trigger_detail)
    if trace.outcome == "terminated":
        report.add(
            "all_nodes_terminated", len(term_order) == n, f"{len(term_order)}/{n}"
        )
        report.add(
            "leader_terminates_last",
            bool(term_order) and term_order[-1] == leader,
            f"termination order {term_order}",
        )
        recv, sent = _final_counters(trace)
        report.add(
            "final_snapshot_matches_events",
            recv == state.recv and sent == state.sent,
            "final counters must equal the counters replayed from the log",
        )
        in_flight = sum(map(sum, sent)) - sum(map(sum, recv))
        report.add(
            "quiescent_at_last_termination", in_flight == 0, f"{in_flight} in flight"
        )
        total = trace.final["total_sent"]
        expected = n * (2 * id_max + 1)
        report.add(
            "exact_total_pulses", total == expected, f"total {total} != {expected}"
        )
    else:
        report.add("all_nodes_terminated", False, f"outcome was {trace.outcome}")
    report.add("no_post_termination_deliveries", post_term_ok, "", post_index)
    report.add("no_fabric_violations", not trace.violations, "; ".join(trace.violations))
    return report


def _direction_maps(assignment: PortAssignment):
    out_ports, in_ports = assignment.cw_ports()
    return out_ports, in_ports


def project_a3_direction(
    trace: ExecutionTrace, direction: str
) -> tuple[list[int], list[tuple[int, int, int, int]], bool]:
    """Restrict an orienting-election trace to one rotational direction.

    Returns (virtual ids, relay-stream entries, direction quiescent) in the
    shape consumed by the one-directional relay checker: the events of one
    direction form a legal run of the one-directional election under the
    corresponding virtual IDs.
    """
    protocol = trace.config["protocol"]
    if protocol not in ("a3a", "a3b"):
        raise ValidationError("projection applies to the orienting protocols")
    assignment = PortAssignment.from_jsonable(trace.config["wiring"])
    out_ports, in_ports = _direction_maps(assignment)
    if direction == "ccw":
        out_ports = [1 - p for p in out_ports]
        in_ports = [1 - p for p in in_ports]
    elif direction != "cw":
        raise ValidationError("direction must be 'cw' or 'ccw'")
    ids = list(trace.config["ids"])
    wide = protocol == "a3a"
    vids = [
        (2 * ids[v] - 1 + out_ports[v]) if wide else (ids[v] + out_ports[v])
        for v in range(assignment.n)
    ]
    state = _CounterState(assignment.n)
    entries = []
    for index, event in enumerate(trace.events):
        node = state.apply(event)
        if node is not None and event.port == in_ports[node]:
            entries.append(
                (
                    index,
                    node,
                    state.recv[node][in_ports[node]],
                    state.sent[node][out_ports[node]],
                )
            )
    quiescent = (
        sum(state.sent[v][out_ports[v]] for v in range(assignment.n))
        == sum(state.recv[v][in_ports[v]] for v in range(assignment.n))
    ) and trace.outcome == "quiescent"
    return vids, entries, quiescent


def check_a3_outcome(trace: ExecutionTrace) -> InvariantReport:
    """Verify leader, orientation, counters, and totals of an orienting run."""
    protocol = trace.config["protocol"]
    if protocol not in ("a3a", "a3b", "a3b+resample", "a4+a3b"):
        raise ValidationError("expected an orienting-election trace")
    report = InvariantReport(protocol=protocol, reproducer=_reproducer(trace))
    if trace.outcome != "quiescent":
        raise ValidationError(f"trace did not reach quiescence ({trace.outcome})")
    ids = list(trace.config["ids"])
    n = len(ids)
    id_max = max(ids)
    assignment = PortAssignment.from_jsonable(trace.config["wiring"])
    out_ports, in_ports = _direction_maps(assignment)
    wide = protocol == "a3a"

    leaders = {v for v, o in enumerate(trace.final["outputs"]) if o == LEADER}
    vmax = {v for v, i in enumerate(ids) if i == id_max}
    report.add(
        "unique_leader_is_max_id",
        len(leaders) == 1 and leaders <= vmax,
        f"leaders {sorted(leaders)}, maximum holders {sorted(vmax)}",
    )

    orientations = trace.final["orientations"]
    report.add(
        "orientation_labels_set", all(o in (0, 1) for o in orientations), ""
    )
    # The busier direction is the one carrying the larger virtual maximum;
    # every node must name its out-port of that direction as clockwise.
    def vid(v: int, port: int) -> int:
        return (2 * ids[v] - 1 + port) if wide else (ids[v] + port)

    max_fwd = max(vid(v, out_ports[v]) for v in range(n))
    max_bwd = max(vid(v, 1 - out_ports[v]) for v in range(n))
    busy_out = out_ports if max_fwd > max_bwd else [1 - p for p in out_ports]
    report.add(
        "orientation_matches_busier_direction",
        all(orientations[v] == busy_out[v] for v in range(n))
        if all(o in (0, 1) for o in orientations)
        else False,
        "",
    )
    # Walking each node's clockwise port must traverse the whole ring.
    consistent = True
    if all(o in (0, 1) for o in orientations):
        node = 0
        seen = set()
        for _ in range(n):
            seen.add(node)
            node, _ = assignment.peer(node, orientations[node])
        consistent = node == 0 and len(seen) == n
    report.add("orientation_walk_covers_ring", consistent, "")

    recv, sent = _final_counters(trace)
    counters_ok = all(
        recv[v][in_ports[v]] == max_fwd
        and recv[v][1 - in_ports[v]] == max_bwd
        and sent[v][out_ports[v]] == max_fwd
        and sent[v][1 - out_ports[v]] == max_bwd
        for v in range(n)
    )
    report.add(
        "final_counters_equal_direction_maxima",
        counters_ok,
        f"expected per-direction counts {max_fwd}/{max_bwd}",
    )
    total = trace.final["total_sent"]
    expected = n * (4 * id_max - 1) if wide else n * (2 * id_max + 1)
    report.add("exact_total_pulses", total == expected, f"{total} != {expected}")

    if protocol in ("a3a", "a3b"):
        for direction in ("cw", "ccw"):
            vids, entries, quiescent = project_a3_direction(trace, direction)
            _check_relay_stream(report, vids, entries, quiescent, label=direction)
    report.add("no_fabric_violations", not trace.violations, "; ".join(trace.violations))
    return report


def _reproducer(trace: ExecutionTrace) -> dict:
    return {
        "config": dict(trace.config),
        "schedule": trace.delivery_schedule(),
    }


# ---------------------------------------------------------------------------
# Solitude patterns and the pulse lower bound


@dataclass(frozen=True)
class SolitudePattern:
    """Arrival directions seen by a lone node under the canonical
    sent-order scheduler: '0' per clockwise arrival, '1' per
    counterclockwise arrival."""

    bits: str
    complete: bool

    def __len__(self) -> int:
        return len(self.bits)


def solitude_pattern(
    protocol: str, pid: int, pulse_budget: int | None = None
) -> SolitudePattern:
    """Run a single-node ring to quiescence and record arrival directions."""
    if pulse_budget is None:
        pulse_budget = 4 * pid + 4  # double the terminating protocol's worst case
    net = build_ring([pid], protocol=protocol)
    net.record_events = False
    sched = FifoScheduler()
    net.initialize(sched)
    bits = []
    while len(bits) < pulse_budget:
        if net.all_terminated():
            return SolitudePattern("".join(bits), complete=True)
        out = net.deliver_next(sched)
        if not out.delivered:
            return SolitudePattern("".join(bits), complete=net.is_quiescent())
        bits.append("0" if out.event.port == 0 else "1")
    done = net.is_quiescent() or net.all_terminated()
    return SolitudePattern("".join(bits), complete=done)


def assert_patterns_unique(patterns: dict[int, SolitudePattern]) -> InvariantReport:
    """Pairwise distinctness; a collision would witness a broken election."""
    report = InvariantReport(protocol="solitude")
    seen: dict[str, int] = {}
    collision = None
    for pid in sorted(patterns):
        bits = patterns[pid].bits
        if bits in seen and collision is None:
            collision = (seen[bits], pid)
        seen.setdefault(bits, pid)
    report.add(
        "patterns_pairwise_distinct",
        collision is None,
        f"ids {collision} share a pattern" if collision else "",
    )
    return report


@dataclass(frozen=True)
class PrefixWitness:
    ids: tuple[int, ...]
    prefix: str
    prefix_length: int
    pulse_lower_bound: int  # n * prefix_length


def build_prefix_witness(
    patterns: dict[int, SolitudePattern], n: int
) -> PrefixWitness:
    """Pigeonhole n distinct patterns onto a shared prefix of length
    floor(log2(k/n)), yielding an n*length pulse floor for the ring built
    from those IDs."""
    k = len(patterns)
    if k < n or n < 1:
        raise ValidationError("need at least n distinct patterns")
    length = math.floor(math.log2(k / n))
    buckets: dict[str, list[int]] = {}
    for pid in sorted(patterns):
        bits = patterns[pid].bits
        if len(bits) >= length:
            buckets.setdefault(bits[:length], []).append(pid)
    candidates = sorted(p for p, ids in buckets.items() if len(ids) >= n)
    if not candidates:
        raise ValidationError("pigeonhole failed: patterns are not distinct")
    prefix = candidates[0]
    chosen = tuple(buckets[prefix][:n])
    for pid in chosen:  # soundness re-check, character by character
        assert patterns[pid].bits[:length] == prefix
    return PrefixWitness(chosen, prefix, length, n * length)


def measure_witness(
    protocol: str,
    witness: PrefixWitness,
    patterns: dict[int, SolitudePattern],
    step_mult: float = 4.0,
) -> dict:
    """Replay the witness IDs on an n-node ring under the synchronized
    sent-order scheduler and count deliveries before any node departs from
    its solitude behavior."""
    ids = list(witness.ids)
    n = len(ids)
    net = build_ring(ids, protocol=protocol)
    net.record_events = False
    sched = FifoScheduler()
    net.initialize(sched)
    observed = [0] * n  # matched arrivals per node
    deliveries = 0
    diverged = False
    limit = int(step_mult * pulse_bound(protocol, ids))
    while deliveries < limit:
        if net.all_terminated():
            break
        out = net.deliver_next(sched)
        if not out.delivered:
            break
        node, port = out.event.node, out.event.port
        bit = "0" if port == 0 else "1"
        pattern = patterns[ids[node]].bits
        pos = observed[node]
        if pos >= len(pattern) or pattern[pos] != bit:
            diverged = True
            break
        observed[node] += 1
        deliveries += 1
    return {
        "ids": ids,
        "prefix_length": witness.prefix_length,
        "pulse_lower_bound": witness.pulse_lower_bound,
        "deliveries_before_divergence": deliveries,
        "diverged": diverged,
        "total_sent": net.total_sent(),
    }


def lower_bound_experiment(protocol: str, k: int, n: int) -> dict:
    """Full lower-bound pipeline: extract k patterns, assert uniqueness,
    build the witness, and measure its replay."""
    patterns = {i: solitude_pattern(protocol, i) for i in range(1, k + 1)}
    incomplete = [i for i, p in patterns.items() if not p.complete]
    if incomplete:
        raise ValidationError(f"patterns incomplete for ids {incomplete[:5]}")
    uniqueness = assert_patterns_unique(patterns)
    if not uniqueness.all_passed:
        raise ValidationError("solitude pattern collision: protocol is broken")
    witness = build_prefix_witness(patterns, n)
    measured = measure_witness(protocol, witness, patterns)
    measured["bound_met"] = (
        measured["deliveries_before_divergence"] >= witness.pulse_lower_bound
    )
    return measured


# ---------------------------------------------------------------------------
# Exhaustive schedule exploration


def explore_outcomes(
    ids: Sequence[int],
    protocol: str = "a2",
    assignment: PortAssignment | None = None,
    max_states: int = 2_000_000,
) -> set[tuple]:
    """Enumerate every reachable interleaving (deduplicated by state) and
    collect the distinct terminal outcomes."""
    base = build_ring(list(ids), assignment=assignment, protocol=protocol)
    base.record_events = False
    base.initialize(PriorityScheduler())
    seen: set[tuple] = set()
    outcomes: set[tuple] = set()
    stack = [base]
    while stack:
        net = stack.pop()
        key = net.state_key()
        if key in seen:
            continue
        seen.add(key)
        if len(seen) > max_states:
            raise ValidationError("state space exceeds exploration budget")
        nonempty = [c for c, cnt in net.channels.items() if cnt > 0]
        if net.all_terminated() or not nonempty:
            outcomes.add(
                (
                    tuple(net.outputs()),
                    tuple((tuple(a.recv), tuple(a.sent)) for a in net.automata),
                    net.total_sent(),
                    net.all_terminated(),
                    net.is_quiescent(),
                )
            )
            continue
        for channel in nonempty:
            child = net.fork()
            child.deliver_channel(channel)
            stack.append(child)
    return outcomes


# ---------------------------------------------------------------------------
# Monte-Carlo statistics for random ID sampling


@dataclass(frozen=True)
class UniqueMaxStats:
    n: int
    c: float
    trials: int
    unique_max_freq: float
    max_len_within_bound_freq: float
    mean_bits: float
    length_bound: float


def estimate_unique_max(
    n: int, c: float, trials: int, seed: int = 0, bit_cap: int | None = None
) -> UniqueMaxStats:
    """Sample n IDs per trial and report how often the maximum is unique
    and how often the longest ID stays within the proven length bound."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    sampler = IdSampler(c=c, bit_cap=bit_cap)
    bound = sampler.length_bound(n)
    unique = 0
    within = 0
    bit_total = 0
    for t in range(trials):
        rng = random.Random(f"{seed}:{t}")
        draws = [sampler.sample_with_bits(rng) for _ in range(n)]
        values = [v for v, _ in draws]
        lengths = [b for _, b in draws]
        if values.count(max(values)) == 1:
            unique += 1
        if max(lengths) <= bound:
            within += 1
        bit_total += sum(lengths)
    return UniqueMaxStats(
        n=n,
        c=c,
        trials=trials,
        unique_max_freq=unique / trials,
        max_len_within_bound_freq=within / trials,
        mean_bits=bit_total / (trials * n),
        length_bound=bound,
    )


def resampling_distinct_frequency(
    n: int,
    c: float,
    trials: int,
    seed: int = 0,
    bit_cap: int | None = None,
    use_fast_kernel: bool = True,
) -> dict:
    """Run full orienting-election-with-resampling simulations on sampled
    IDs and report how often all final IDs are distinct."""
    sampler = IdSampler(c=c, bit_cap=bit_cap)
    distinct = 0
    totals_ok = 0
    for t in range(trials):
        rng = random.Random(f"{seed}:{t}")
        ids = [sampler.sample(rng) for _ in range(n)]
        swaps = [rng.randint(0, 1) for _ in range(n)]
        if use_fast_kernel:
            from . import fastsim

            final_ids, total = fastsim.run_a3b_resample(ids, swaps, seed=t ^ seed)
        else:
            assignment = PortAssignment.from_swaps(swaps)
            trace = _run_resample(ids, assignment, seed=t ^ seed)
            final_ids = trace.final["ids"]
            total = trace.final["total_sent"]
        if len(set(final_ids)) == n:
            distinct += 1
        if total == n * (2 * max(ids) + 1):
            totals_ok += 1
    return {
        "n": n,
        "c": c,
        "trials": trials,
        "distinct_freq": distinct / trials,
        "totals_exact_freq": totals_ok / trials,
    }


def _run_resample(ids, assignment, seed):
    from .protocols import run
    from .ring import PriorityScheduler as _PS

    return run(
        ids,
        protocol="a3b+resample",
        assignment=assignment,
        scheduler=_PS(),
        seed=seed,
        record_events=False,
    )


# ---------------------------------------------------------------------------
# Replay


def replay_trace(trace: ExecutionTrace) -> tuple[bool, int | None]:
    """Re-execute a trace via its embedded delivery schedule and compare
    event streams; returns (identical, index of first divergence)."""
    config = trace.config
    assignment = PortAssignment.from_jsonable(config["wiring"])
    net = build_ring(
        list(config["ids"]),
        assignment=assignment,
        protocol=config["protocol"],
        seed=config.get("seed", 0),
    )
    from .ring import ScriptScheduler

    sched = ScriptScheduler(trace.delivery_schedule())
    net.config = dict(config)
    limit = config.get("step_limit", 4 * pulse_bound(config["protocol"], config["ids"]))
    replayed = net.run_to_quiescence(sched, limit)
    for i, (a, b) in enumerate(zip(trace.events, replayed.events)):
        if a != b:
            return False, i
    if len(trace.events) != len(replayed.events):
        return False, min(len(trace.events), len(replayed.events))
    if trace.final != replayed.final or trace.outcome != replayed.outcome:
        return False, len(trace.events)
    return True, None
