"""Node automata for the pulse-only ring protocols.

Each automaton is an event-driven translation of a polling loop: an
initial action plus one handler pass per delivered pulse.  Automata are
pure state transformers from the fabric's point of view; counters are
owned by the automaton and count consumed/sent pulses.

Port conventions on an oriented ring: a node sends clockwise out of
port 1 and receives clockwise pulses at port 0; counterclockwise is the
mirror image.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from .ring import PortAssignment, RingNetwork, ValidationError

UNDECIDED = "undecided"
LEADER = "leader"
NONLEADER = "nonleader"

CW_OUT, CCW_OUT = 1, 0  # out ports on an oriented ring
CW_IN, CCW_IN = 0, 1  # arrival ports


class _NodeBase:
    """Common bookkeeping: counters, output, violation log."""

    def __init__(self, pid: int):
        if pid < 1:
            raise ValidationError(f"protocol IDs must be >= 1, got {pid}")
        self.id = pid
        self.output = UNDECIDED
        self.recv = [0, 0]
        self.sent = [0, 0]
        self.violations: list[str] = []

    terminated = False
    buffered = 0
    orientation: int | None = None

    def _emit(self, port: int) -> int:
        self.sent[port] += 1
        return port

    def snapshot(self) -> tuple:
        return (self.id, self.output, tuple(self.recv), tuple(self.sent))


class StabilizingElectionNode(_NodeBase):
    """One-directional election: relay every clockwise pulse except the
    one that makes the received count hit the node's own ID.

    Never terminates; the output merely stabilizes once the ring goes
    quiet.  Duplicate IDs are legal: every holder of the maximum ends up
    a leader.
    """

    def start(self) -> list[int]:
        return [self._emit(CW_OUT)]

    def on_deliver(self, port: int) -> list[int]:
        if port != CW_IN:
            raise ValidationError("one-directional automaton got a reverse pulse")
        self.recv[CW_IN] += 1
        if self.recv[CW_IN] == self.id:
            self.output = LEADER
            return []
        self.output = NONLEADER
        return [self._emit(CW_OUT)]


_RUNNING, _AWAITING_ECHO, _TERMINATED = 0, 1, 2


class TerminatingElectionNode(_NodeBase):
    """Two-directional election with quiescent termination.

    Runs the one-directional election clockwise; once the clockwise count
    reaches the node's ID it joins a second, lagging instance running
    counterclockwise.  The unique node observing both counts equal to its
    own ID emits one extra counterclockwise pulse; seeing more
    counterclockwise than clockwise pulses is the termination signal.

    A counterclockwise pulse arriving before the node participates in the
    reverse instance stays buffered (it was delivered, but not consumed).
    """

    def __init__(self, pid: int):
        super().__init__(pid)
        self.phase = _RUNNING
        self.pending_cw = 0
        self.pending_ccw = 0

    @property
    def terminated(self) -> bool:  # type: ignore[override]
        return self.phase == _TERMINATED

    @property
    def buffered(self) -> int:  # type: ignore[override]
        return self.pending_cw + self.pending_ccw

    def start(self) -> list[int]:
        out = [self._emit(CW_OUT)]
        out += self._drain()
        return out

    def on_deliver(self, port: int) -> list[int]:
        if port == CW_IN:
            if self.phase == _AWAITING_ECHO:
                # Provably unreachable while echoing; surface it loudly.
                self.violations.append(
                    f"node id={self.id}: forward pulse while awaiting echo"
                )
                self.recv[CW_IN] += 1
                return []
            self.pending_cw += 1
        else:
            self.pending_ccw += 1
        return self._drain()

    def _drain(self) -> list[int]:
        """One loop pass per available trigger, mirroring the polling loop's
        top-to-bottom guard order, iterated to a fixed point."""
        out: list[int] = []
        while self.phase != _TERMINATED:
            progress = False
            # Forward (clockwise) instance.
            if self.pending_cw:
                self.pending_cw -= 1
                self.recv[CW_IN] += 1
                progress = True
                if self.recv[CW_IN] == self.id:
                    self.output = LEADER
                else:
                    self.output = NONLEADER
                    out.append(self._emit(CW_OUT))
            # Reverse (counterclockwise) instance, gated on the forward one.
            if self.recv[CW_IN] >= self.id:
                if self.sent[CCW_OUT] == 0:
                    out.append(self._emit(CCW_OUT))
                    progress = True
                if self.phase == _RUNNING and self.pending_ccw:
                    self.pending_ccw -= 1
                    self.recv[CCW_IN] += 1
                    progress = True
                    if self.recv[CCW_IN] != self.id:
                        out.append(self._emit(CCW_OUT))
            # Termination trigger: both counts equal the node's own ID.
            if (
                self.phase == _RUNNING
                and self.recv[CW_IN] == self.id == self.recv[CCW_IN]
            ):
                out.append(self._emit(CCW_OUT))
                self.phase = _AWAITING_ECHO
                progress = True
            # Waiting for the termination pulse to come back around.
            if self.phase == _AWAITING_ECHO and self.pending_ccw:
                self.pending_ccw -= 1
                self.recv[CCW_IN] += 1
                progress = True
            if self.recv[CCW_IN] > self.recv[CW_IN]:
                self.phase = _TERMINATED
                break
            if not progress:
                break
        return out

    def snapshot(self) -> tuple:
        return super().snapshot() + (self.phase, self.pending_cw, self.pending_ccw)


class OrientingElectionNode(_NodeBase):
    """Leader election plus orientation on a non-oriented ring.

    Two parallel one-directional elections, one per rotational direction,
    distinguished by two per-node virtual IDs.  A pulse arriving at one
    port is forwarded out of the other unless the arrival count matches
    the virtual ID governing the forwarding port.  The direction that ends
    up carrying strictly more pulses is named clockwise.

    ``wide_ids=True`` spreads virtual IDs as (2*id-1, 2*id); the compact
    variant uses (id, id+1), which halves the traffic but assigns
    duplicate virtual IDs across nodes (legal: only the maximum must be
    unique).
    """

    def __init__(self, pid: int, wide_ids: bool):
        super().__init__(pid)
        self.base_id = pid
        self.wide_ids = wide_ids

    def virtual_id(self, port: int) -> int:
        if self.wide_ids:
            return 2 * self.base_id - 1 + port
        return self.base_id + port

    def start(self) -> list[int]:
        return [self._emit(0), self._emit(1)]

    def on_deliver(self, port: int) -> list[int]:
        self.recv[port] += 1
        out = []
        if self.recv[port] != self.virtual_id(1 - port):
            out.append(self._emit(1 - port))
        self._after_pulse()
        self._compute_output()
        return out

    def _after_pulse(self) -> None:
        pass

    def _compute_output(self) -> None:
        r0, r1 = self.recv
        top = self.virtual_id(1)
        if max(r0, r1) >= top:
            if r0 == top and r1 < top:
                self.output = LEADER
            else:
                self.output = NONLEADER
            # Name as clockwise the port that sends into the busier direction.
            self.orientation = 1 if r0 > r1 else 0

    def snapshot(self) -> tuple:
        return super().snapshot() + (self.base_id, self.orientation)


class ResamplingOrientingNode(OrientingElectionNode):
    """Orienting election that re-draws its ID whenever both arrival
    counts exceed it, keeping the new ID below their minimum.

    Pulse behavior is identical to the non-resampling automaton; only the
    stored ID changes.  At quiescence all IDs are distinct with high
    probability.
    """

    def __init__(self, pid: int, wide_ids: bool, rng: random.Random):
        super().__init__(pid, wide_ids)
        self.rng = rng

    def _after_pulse(self) -> None:
        low = min(self.recv)
        if low > self.base_id:
            self.base_id = self.rng.randint(1, low - 1)
            self.id = self.base_id

    def snapshot(self) -> tuple:
        # rng state excluded: exploration is not used with resampling.
        return super().snapshot()


# ---------------------------------------------------------------------------
# Random ID sampling (communication-free)


@dataclass(frozen=True)
class IdSampler:
    """Sample an ID whose bit-length is geometric with success probability
    1 - 2^(-1/(c+2)), then draw the bits uniformly.

    The all-zero draw maps to 1 so IDs stay positive; ``bit_cap``
    optionally truncates the geometric tail (the raw distribution has
    unbounded mean, which desk-scale experiments cannot afford).
    """

    c: float
    bit_cap: int | None = None

    def __post_init__(self) -> None:
        if self.c <= 0:
            raise ValidationError("tail constant c must be positive")
        if self.bit_cap is not None and self.bit_cap < 1:
            raise ValidationError("bit_cap must be >= 1")

    @property
    def p(self) -> float:
        return 2.0 ** (-1.0 / (self.c + 2.0))

    def sample_with_bits(self, rng: random.Random) -> tuple[int, int]:
        bits = 1
        p = self.p
        while rng.random() < p and (self.bit_cap is None or bits < self.bit_cap):
            bits += 1
        value = rng.getrandbits(bits)
        return max(value, 1), bits

    def sample(self, rng: random.Random) -> int:
        return self.sample_with_bits(rng)[0]

    def length_bound(self, n: int) -> float:
        """Bit-length threshold exceeded with probability at most n^-c."""
        return (self.c + 1) * (self.c + 2) * math.log2(n)


# ---------------------------------------------------------------------------
# Network construction

PROTOCOLS = ("a1", "a2", "a3a", "a3b", "a3b+resample", "a4+a3b")

_ORIENTED_ONLY = ("a1", "a2")


def make_automaton(protocol: str, pid: int, rng: random.Random | None = None):
    if protocol == "a1":
        return StabilizingElectionNode(pid)
    if protocol == "a2":
        return TerminatingElectionNode(pid)
    if protocol == "a3a":
        return OrientingElectionNode(pid, wide_ids=True)
    if protocol == "a3b":
        return OrientingElectionNode(pid, wide_ids=False)
    if protocol in ("a3b+resample", "a4+a3b"):
        if rng is None:
            raise ValidationError(f"protocol {protocol} needs a seeded rng")
        return ResamplingOrientingNode(pid, wide_ids=False, rng=rng)
    raise ValidationError(f"unknown protocol {protocol!r}")


def pulse_bound(protocol: str, ids: Sequence[int]) -> int:
    """Proven total-pulse count for a full run with the given IDs."""
    n = len(ids)
    id_max = max(ids)
    if protocol == "a1":
        return n * id_max
    if protocol in ("a2", "a3b", "a3b+resample", "a4+a3b"):
        return n * (2 * id_max + 1)
    if protocol == "a3a":
        return n * (4 * id_max - 1)
    raise ValidationError(f"unknown protocol {protocol!r}")


def build_ring(
    ids: Sequence[int] | None = None,
    assignment: PortAssignment | None = None,
    protocol: str = "a1",
    seed: int = 0,
    c: float | None = None,
    n: int | None = None,
    bit_cap: int | None = None,
) -> RingNetwork:
    """Construct an initial network (no pulses in flight, no actions run).

    For ``a4+a3b`` the IDs are sampled locally per node from ``seed`` and
    ``c``; all other protocols take an explicit ID list.  Duplicate IDs
    are rejected for the terminating protocol, whose analysis needs full
    uniqueness; the stabilizing protocols accept them.
    """
    if protocol not in PROTOCOLS:
        raise ValidationError(f"unknown protocol {protocol!r}")
    if protocol == "a4+a3b":
        if c is None or n is None:
            raise ValidationError("a4+a3b needs n and c")
        sampler = IdSampler(c=c, bit_cap=bit_cap)
        ids = [sampler.sample(random.Random(f"{seed}:id:{v}")) for v in range(n)]
    if not ids:
        raise ValidationError("ids must be nonempty")
    ids = list(ids)
    if assignment is None:
        assignment = PortAssignment.oriented_ring(len(ids))
    if assignment.n != len(ids):
        raise ValidationError("assignment size does not match ids")
    if protocol in _ORIENTED_ONLY and not assignment.oriented:
        raise ValidationError(f"protocol {protocol} requires an oriented ring")
    if protocol == "a2" and len(set(ids)) != len(ids):
        raise ValidationError("terminating election requires distinct IDs")

    automata = []
    for v, pid in enumerate(ids):
        rng = random.Random(f"{seed}:node:{v}")
        automata.append(make_automaton(protocol, pid, rng=rng))
    config = {
        "protocol": protocol,
        "ids": ids,
        "wiring": assignment.to_jsonable(),
        "seed": seed,
    }
    return RingNetwork(assignment, automata, config)


def run(
    ids: Sequence[int] | None = None,
    protocol: str = "a1",
    assignment: PortAssignment | None = None,
    scheduler=None,
    seed: int = 0,
    step_mult: float = 2.0,
    record_events: bool = True,
    **kwargs,
):
    """Build, initialize, and run to quiescence/termination in one call."""
    from .ring import RandomScheduler

    net = build_ring(ids, assignment=assignment, protocol=protocol, seed=seed, **kwargs)
    net.record_events = record_events
    sched = scheduler if scheduler is not None else RandomScheduler(seed)
    limit = max(16, int(step_mult * pulse_bound(protocol, net.config["ids"])))
    net.config["scheduler"] = sched.descriptor()
    net.config["step_limit"] = limit
    return net.run_to_quiescence(sched, limit)
