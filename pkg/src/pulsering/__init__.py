"""Deterministic simulator and verification suite for pulse-only leader
election and orientation on asynchronous rings."""

from .ring import (
    DeliverEvent,
    ExecutionTrace,
    FifoScheduler,
    LivenessError,
    PortAssignment,
    PriorityScheduler,
    RandomScheduler,
    RingError,
    RingNetwork,
    RoundRobinScheduler,
    SchedulerContractError,
    Scheduler,
    ScriptScheduler,
    SendEvent,
    StateChangeEvent,
    TerminateEvent,
    ValidationError,
    make_scheduler,
)
from .protocols import (
    LEADER,
    NONLEADER,
    PROTOCOLS,
    UNDECIDED,
    IdSampler,
    OrientingElectionNode,
    ResamplingOrientingNode,
    StabilizingElectionNode,
    TerminatingElectionNode,
    build_ring,
    make_automaton,
    pulse_bound,
    run,
)
from .oracle import (
    Check,
    InvariantReport,
    PrefixWitness,
    SolitudePattern,
    assert_patterns_unique,
    build_prefix_witness,
    check_a1_invariants,
    check_a2_invariants,
    check_a3_outcome,
    estimate_unique_max,
    explore_outcomes,
    lower_bound_experiment,
    measure_witness,
    project_a3_direction,
    replay_trace,
    resampling_distinct_frequency,
    solitude_pattern,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
