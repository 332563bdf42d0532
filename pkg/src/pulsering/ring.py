"""Asynchronous ring fabric for content-free (pulse) messages.

The fabric owns the mutable simulation state: the port wiring, the
per-channel in-flight pulse counts, and the per-node automata.  A channel
carries no content, so a nonnegative counter per directed channel is an
exact model of the channel's queue.  All nondeterminism comes from a
pluggable scheduler that picks which nonempty channel delivers next; a
fixed (network, scheduler) pair replays bit-for-bit.
"""

from __future__ import annotations

import copy
import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

Channel = tuple[int, int]  # receiving endpoint: (node index, arrival port)


class RingError(Exception):
    """Base class for fabric errors."""


class ValidationError(RingError):
    """Rejected configuration: malformed wiring or illegal IDs."""


class SchedulerContractError(RingError):
    """A scheduler selected an empty channel."""


class LivenessError(RingError):
    """The step limit was exceeded before quiescence/termination.

    Carries the partial trace so the failing schedule can be inspected.
    """

    def __init__(self, message: str, trace: "ExecutionTrace"):
        super().__init__(message)
        self.trace = trace


# ---------------------------------------------------------------------------
# Port wiring


@dataclass(frozen=True)
class PortAssignment:
    """Wiring of every (node, port) endpoint to its peer endpoint.

    The wiring is an involution without fixed points (for n >= 2) whose
    induced graph is a single cycle.  For n == 1 the node's two ports are
    wired to each other.
    """

    n: int
    wiring: dict[Channel, Channel]
    oriented: bool = False

    @classmethod
    def oriented_ring(cls, n: int) -> "PortAssignment":
        """Every node's port 1 leads to the next node's port 0."""
        return cls.from_swaps([0] * n)

    @classmethod
    def from_swaps(cls, swaps: Sequence[int]) -> "PortAssignment":
        """Build a ring where node i's ports are optionally swapped.

        ``swaps[i] == 0`` leaves node i aligned with the underlying cycle
        (port 1 points to node i+1); ``swaps[i] == 1`` exchanges its two
        port labels.
        """
        n = len(swaps)
        if n < 1:
            raise ValidationError("ring needs at least one node")
        if any(s not in (0, 1) for s in swaps):
            raise ValidationError("swap flags must be 0 or 1")
        wiring: dict[Channel, Channel] = {}
        for i in range(n):
            j = (i + 1) % n
            a = (i, 1 ^ swaps[i])
            b = (j, 0 ^ swaps[j])
            wiring[a] = b
            wiring[b] = a
        return cls(n=n, wiring=wiring, oriented=not any(swaps))

    @classmethod
    def from_wiring(cls, pairs: dict[Channel, Channel]) -> "PortAssignment":
        """Validate an explicit wiring and infer whether it is oriented."""
        endpoints = set(pairs)
        nodes = {v for v, _ in endpoints}
        n = len(nodes)
        if nodes != set(range(n)):
            raise ValidationError("node indices must be contiguous from 0")
        if endpoints != {(v, p) for v in range(n) for p in (0, 1)}:
            raise ValidationError("every node needs exactly ports 0 and 1")
        for a, b in pairs.items():
            if pairs.get(b) != a:
                raise ValidationError(f"wiring is not an involution at {a}<->{b}")
            if a == b:
                raise ValidationError(f"fixed point in wiring at {a}")
        if n == 1 and pairs[(0, 0)] != (0, 1):
            raise ValidationError("single node must wire its two ports together")
        assignment = cls(n=n, wiring=dict(pairs), oriented=False)
        if not assignment._is_single_cycle():
            raise ValidationError("wiring does not induce a single cycle")
        oriented = all(pairs[(i, 1)][1] == 0 for i in range(n))
        return cls(n=n, wiring=dict(pairs), oriented=oriented)

    def __post_init__(self) -> None:
        if self.n >= 2 and not self._is_single_cycle():
            raise ValidationError("wiring does not induce a single cycle")

    def _is_single_cycle(self) -> bool:
        # Walk: enter a node at one port, leave through the other.
        node, port = self.wiring[(0, 1)]
        seen = {0}
        for _ in range(self.n - 1):
            if node in seen:
                return False
            seen.add(node)
            node, port = self.wiring[(node, 1 - port)]
        return node == 0 and len(seen) == self.n

    def peer(self, node: int, port: int) -> Channel:
        return self.wiring[(node, port)]

    def cw_ports(self) -> tuple[list[int], list[int]]:
        """Ground-truth (out_port, in_port) per node for one rotational direction.

        The direction is the one a pulse travels when node 0 emits from its
        port 1 and every node forwards out of the port opposite to the one
        it arrived at.  On an oriented ring this is the clockwise direction.
        """
        out_ports = [-1] * self.n
        in_ports = [-1] * self.n
        node, out = 0, 1
        for _ in range(self.n):
            out_ports[node] = out
            nxt, in_port = self.wiring[(node, out)]
            in_ports[nxt] = in_port
            node, out = nxt, 1 - in_port
        return out_ports, in_ports

    def to_jsonable(self) -> list[list[int]]:
        return sorted([*a, *b] for a, b in self.wiring.items() if a <= b)

    @classmethod
    def from_jsonable(cls, data: Sequence[Sequence[int]]) -> "PortAssignment":
        pairs: dict[Channel, Channel] = {}
        for v, p, u, q in data:
            pairs[(v, p)] = (u, q)
            pairs[(u, q)] = (v, p)
        return cls.from_wiring(pairs)


# ---------------------------------------------------------------------------
# Trace events


@dataclass(frozen=True)
class SendEvent:
    step: int
    node: int
    port: int  # out port


@dataclass(frozen=True)
class DeliverEvent:
    step: int
    node: int
    port: int  # arrival port
    recv: tuple[int, int]  # node counters after the handler pass
    sent: tuple[int, int]


@dataclass(frozen=True)
class StateChangeEvent:
    step: int
    node: int
    old: str
    new: str


@dataclass(frozen=True)
class TerminateEvent:
    step: int
    node: int


Event = SendEvent | DeliverEvent | StateChangeEvent | TerminateEvent


@dataclass
class ExecutionTrace:
    """Ordered event log plus the data needed to replay it."""

    config: dict
    events: list[Event] = field(default_factory=list)
    outcome: str = "partial"  # quiescent | terminated | partial
    violations: list[str] = field(default_factory=list)
    final: dict = field(default_factory=dict)

    def deliveries(self) -> Iterator[DeliverEvent]:
        return (e for e in self.events if isinstance(e, DeliverEvent))

    def delivery_schedule(self) -> list[Channel]:
        return [(e.node, e.port) for e in self.deliveries()]

    def total_sends(self) -> int:
        return sum(1 for e in self.events if isinstance(e, SendEvent))

    # --- JSON-lines export / import -------------------------------------

    def to_jsonl(self) -> str:
        lines = [json.dumps({"type": "config", **self.config}, sort_keys=True)]
        for e in self.events:
            lines.append(json.dumps(_event_to_dict(e), sort_keys=True))
        tail = {
            "type": "final",
            "outcome": self.outcome,
            "violations": self.violations,
            **self.final,
        }
        lines.append(json.dumps(tail, sort_keys=True))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "ExecutionTrace":
        lines = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not lines or lines[0].get("type") != "config":
            raise ValidationError("trace file must start with a config line")
        config = {k: v for k, v in lines[0].items() if k != "type"}
        tail = lines[-1]
        if tail.get("type") != "final":
            raise ValidationError("trace file must end with a final snapshot")
        events = [_event_from_dict(d) for d in lines[1:-1]]
        final = {
            k: v for k, v in tail.items() if k not in ("type", "outcome", "violations")
        }
        return cls(
            config=config,
            events=events,
            outcome=tail["outcome"],
            violations=list(tail.get("violations", [])),
            final=final,
        )


def _event_to_dict(e: Event) -> dict:
    if isinstance(e, SendEvent):
        return {"type": "send", "step": e.step, "node": e.node, "port": e.port}
    if isinstance(e, DeliverEvent):
        return {
            "type": "deliver",
            "step": e.step,
            "node": e.node,
            "port": e.port,
            "recv": list(e.recv),
            "sent": list(e.sent),
        }
    if isinstance(e, StateChangeEvent):
        return {
            "type": "state",
            "step": e.step,
            "node": e.node,
            "old": e.old,
            "new": e.new,
        }
    return {"type": "terminate", "step": e.step, "node": e.node}


def _event_from_dict(d: dict) -> Event:
    t = d["type"]
    if t == "send":
        return SendEvent(d["step"], d["node"], d["port"])
    if t == "deliver":
        return DeliverEvent(
            d["step"], d["node"], d["port"], tuple(d["recv"]), tuple(d["sent"])
        )
    if t == "state":
        return StateChangeEvent(d["step"], d["node"], d["old"], d["new"])
    if t == "terminate":
        return TerminateEvent(d["step"], d["node"])
    raise ValidationError(f"unknown event type {t!r}")


# ---------------------------------------------------------------------------
# Schedulers


class Scheduler:
    """Policy choosing the next nonempty channel to deliver from.

    ``choose`` must return a channel with at least one pulse in flight
    whenever one exists.  ``note_sends`` is called once per event with the
    channels the event's emissions entered, in emission order.
    """

    def choose(self, nonempty: list[Channel]) -> Channel:
        raise NotImplementedError

    def note_sends(self, channels: list[Channel]) -> None:
        pass

    def descriptor(self) -> dict:
        return {"policy": type(self).__name__}


class RandomScheduler(Scheduler):
    def __init__(self, seed: int):
        self.seed = seed
        self._rng = random.Random(seed)

    def choose(self, nonempty: list[Channel]) -> Channel:
        return self._rng.choice(nonempty)

    def descriptor(self) -> dict:
        return {"policy": "random", "seed": self.seed}


class RoundRobinScheduler(Scheduler):
    def __init__(self) -> None:
        self._cursor = 0

    def choose(self, nonempty: list[Channel]) -> Channel:
        # Rotate over the sorted channel universe; pick the first nonempty
        # at or after the cursor.
        pool = sorted(nonempty)
        for ch in pool:
            key = ch[0] * 2 + ch[1]
            if key >= self._cursor:
                self._cursor = key + 1
                return ch
        ch = pool[0]
        self._cursor = ch[0] * 2 + ch[1] + 1
        return ch

    def descriptor(self) -> dict:
        return {"policy": "roundrobin"}


class PriorityScheduler(Scheduler):
    def __init__(self, order: Sequence[Channel] | None = None):
        self.order = [tuple(c) for c in order] if order else None

    def choose(self, nonempty: list[Channel]) -> Channel:
        if self.order is None:
            return min(nonempty)
        ranks = {c: i for i, c in enumerate(self.order)}
        return min(nonempty, key=lambda c: ranks.get(c, len(ranks)))

    def descriptor(self) -> dict:
        d: dict = {"policy": "priority"}
        if self.order is not None:
            d["order"] = [list(c) for c in self.order]
        return d


class ScriptScheduler(Scheduler):
    """Deliver exactly the scripted sequence of (node, port) channels."""

    def __init__(self, script: Sequence[Channel]):
        self.script = [tuple(c) for c in script]
        self._pos = 0

    def choose(self, nonempty: list[Channel]) -> Channel:
        if self._pos >= len(self.script):
            raise SchedulerContractError("script exhausted with pulses in flight")
        ch = self.script[self._pos]
        self._pos += 1
        return ch

    def descriptor(self) -> dict:
        return {"policy": "script", "script": [list(c) for c in self.script]}


class FifoScheduler(Scheduler):
    """Global first-sent-first-delivered order with uniform delays.

    Emissions of a single event are enqueued with arrivals at port 0 ahead
    of arrivals at port 1, which on an oriented ring prioritizes clockwise
    pulses among simultaneous sends.  On a one-node ring this is the
    canonical scheduler used to define solitude patterns.
    """

    def __init__(self) -> None:
        self._queue: deque[Channel] = deque()

    def note_sends(self, channels: list[Channel]) -> None:
        self._queue.extend(sorted(channels, key=lambda c: (c[1], c[0])))

    def choose(self, nonempty: list[Channel]) -> Channel:
        if not self._queue:
            raise SchedulerContractError("fifo queue empty with pulses in flight")
        return self._queue.popleft()

    def descriptor(self) -> dict:
        return {"policy": "fifo"}


def make_scheduler(policy: str, seed: int = 0, **kwargs) -> Scheduler:
    if policy == "random":
        return RandomScheduler(seed)
    if policy == "roundrobin":
        return RoundRobinScheduler()
    if policy == "priority":
        return PriorityScheduler(kwargs.get("order"))
    if policy == "script":
        return ScriptScheduler(kwargs["script"])
    if policy == "fifo":
        return FifoScheduler()
    raise ValidationError(f"unknown scheduler policy {policy!r}")


# ---------------------------------------------------------------------------
# The network


@dataclass
class DeliveryOutcome:
    delivered: bool
    event: DeliverEvent | None = None


class RingNetwork:
    """Mutable simulation state: wiring, channels, automata.

    Single-threaded by contract; distinct networks are independent values.
    """

    def __init__(self, assignment: PortAssignment, automata: Sequence, config: dict):
        if len(automata) != assignment.n:
            raise ValidationError("one automaton per node required")
        self.assignment = assignment
        self.automata = list(automata)
        self.channels: dict[Channel, int] = {
            (v, p): 0 for v in range(assignment.n) for p in (0, 1)
        }
        self.step = 0
        self.initialized = False
        self.config = config
        self.violations: list[str] = []
        self.record_events = True
        self.events: list[Event] = []

    @property
    def n(self) -> int:
        return self.assignment.n

    def in_flight(self) -> int:
        return sum(self.channels.values())

    def buffered(self) -> int:
        return sum(getattr(a, "buffered", 0) for a in self.automata)

    def is_quiescent(self) -> bool:
        """True iff no pulse is in transit, including node-side buffers."""
        return self.in_flight() == 0 and self.buffered() == 0

    def all_terminated(self) -> bool:
        return all(a.terminated for a in self.automata)

    def outputs(self) -> list[str]:
        return [a.output for a in self.automata]

    def total_sent(self) -> int:
        return sum(a.sent[0] + a.sent[1] for a in self.automata)

    def total_consumed(self) -> int:
        return sum(a.recv[0] + a.recv[1] for a in self.automata)

    def counters(self, node: int) -> tuple[tuple[int, int], tuple[int, int]]:
        a = self.automata[node]
        return (tuple(a.recv), tuple(a.sent))

    def check_conservation(self) -> None:
        in_transit = self.in_flight() + self.buffered()
        if self.total_sent() - self.total_consumed() != in_transit:
            raise RingError("pulse conservation violated")

    # --- event loop -----------------------------------------------------

    def initialize(self, sched: Scheduler) -> None:
        """Run each automaton's initial action; emits the first pulses."""
        if self.initialized:
            raise RingError("network already initialized")
        self.initialized = True
        for v, auto in enumerate(self.automata):
            dests = []
            for out_port in auto.start():
                dest = self.assignment.peer(v, out_port)
                self.channels[dest] += 1
                dests.append(dest)
                if self.record_events:
                    self.events.append(SendEvent(self.step, v, out_port))
            sched.note_sends(dests)

    def deliver_next(self, sched: Scheduler) -> DeliveryOutcome:
        nonempty = [c for c, k in self.channels.items() if k > 0]
        if not nonempty:
            return DeliveryOutcome(delivered=False)
        channel = tuple(sched.choose(nonempty))
        return self.deliver_channel(channel, sched)

    def deliver_channel(
        self, channel: Channel, sched: Scheduler | None = None
    ) -> DeliveryOutcome:
        """Deliver one pulse from an explicitly chosen nonempty channel."""
        if sched is None:
            sched = Scheduler.__new__(Scheduler)  # note_sends is a no-op
        if self.channels.get(channel, 0) <= 0:
            raise SchedulerContractError(f"scheduler chose empty channel {channel}")
        self.channels[channel] -= 1
        self.step += 1
        node, port = channel
        auto = self.automata[node]

        if auto.terminated:
            # Quiescent termination forbids this; consume without effect.
            self.violations.append(
                f"step {self.step}: pulse delivered to terminated node {node}"
            )
            event = DeliverEvent(self.step, node, port, *self.counters(node))
            if self.record_events:
                self.events.append(event)
            return DeliveryOutcome(delivered=True, event=event)

        old_output = auto.output
        was_terminated = auto.terminated
        out_ports = auto.on_deliver(port)

        event = DeliverEvent(self.step, node, port, *self.counters(node))
        if self.record_events:
            self.events.append(event)
        dests = []
        for out_port in out_ports:
            dest = self.assignment.peer(node, out_port)
            self.channels[dest] += 1
            dests.append(dest)
            if self.record_events:
                self.events.append(SendEvent(self.step, node, out_port))
        sched.note_sends(dests)
        if self.record_events and auto.output != old_output:
            self.events.append(StateChangeEvent(self.step, node, old_output, auto.output))
        if auto.terminated and not was_terminated and self.record_events:
            self.events.append(TerminateEvent(self.step, node))
        if auto.violations:
            self.violations.extend(f"step {self.step}: {m}" for m in auto.violations)
            auto.violations.clear()
        return DeliveryOutcome(delivered=True, event=event)

    def run_to_quiescence(
        self, sched: Scheduler, step_limit: int, check_conservation: bool = False
    ) -> ExecutionTrace:
        """Drive deliveries until quiescence or all nodes have terminated."""
        if not self.initialized:
            self.initialize(sched)
        while True:
            if self.all_terminated():
                outcome = "terminated"
                break
            out = self.deliver_next(sched)
            if not out.delivered:
                outcome = "quiescent" if self.is_quiescent() else "partial"
                if outcome == "partial":
                    self.violations.append("channels empty but node buffers nonempty")
                break
            if check_conservation:
                self.check_conservation()
            if self.step > step_limit:
                raise LivenessError(
                    f"step limit {step_limit} exceeded", self.build_trace("partial")
                )
        return self.build_trace(outcome)

    def build_trace(self, outcome: str) -> ExecutionTrace:
        final = {
            "counters": [
                {"recv": list(a.recv), "sent": list(a.sent)} for a in self.automata
            ],
            "outputs": self.outputs(),
            "orientations": [getattr(a, "orientation", None) for a in self.automata],
            "ids": [a.id for a in self.automata],
            "total_sent": self.total_sent(),
        }
        return ExecutionTrace(
            config=dict(self.config),
            events=list(self.events),
            outcome=outcome,
            violations=list(self.violations),
            final=final,
        )

    # --- state-space exploration support --------------------------------

    def state_key(self) -> tuple:
        chans = tuple(sorted(self.channels.items()))
        autos = tuple(a.snapshot() for a in self.automata)
        return (chans, autos)

    def fork(self) -> "RingNetwork":
        """Independent deep copy; used by exhaustive schedule exploration."""
        clone = copy.deepcopy(self)
        clone.record_events = False
        clone.events = []
        return clone
