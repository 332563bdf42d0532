"""Leader election on an oriented ring, with and without termination.

Walks through the two direct protocols: the quiescently stabilizing one
(nodes never learn the election is over; the ring just goes quiet) and
the quiescently terminating one (every node halts, leader last), then
verifies both runs with the trace checkers.
"""

import pulsering as pr

ids = [4, 9, 2, 7]
print(f"ring of {len(ids)} nodes, IDs {ids}, oriented wiring\n")

# --- stabilizing variant -------------------------------------------------
trace = pr.run(ids, protocol="a1", seed=42)
print("stabilizing election:")
print(f"  outcome: {trace.outcome}")
print(f"  total pulses: {trace.final['total_sent']}  (= n * IDmax = {len(ids) * max(ids)})")
print(f"  outputs: {trace.final['outputs']}")
report = pr.check_a1_invariants(trace)
print(f"  invariants: {'all pass' if report.all_passed else report.failures()}")

# Every node ends having received and sent exactly IDmax pulses.
for v, counters in enumerate(trace.final["counters"]):
    print(f"  node {v} (id {ids[v]}): recv={counters['recv']} sent={counters['sent']}")

# --- terminating variant -------------------------------------------------
trace = pr.run(ids, protocol="a2", seed=42)
print("\nterminating election:")
print(f"  outcome: {trace.outcome}")
expected = len(ids) * (2 * max(ids) + 1)
print(f"  total pulses: {trace.final['total_sent']}  (= n * (2*IDmax+1) = {expected})")

order = [e.node for e in trace.events if type(e).__name__ == "TerminateEvent"]
print(f"  termination order: {order}  (leader, node {ids.index(max(ids))}, is last)")
report = pr.check_a2_invariants(trace)
print(f"  invariants: {'all pass' if report.all_passed else report.failures()}")

# Duplicate IDs are legal for the stabilizing variant: every holder of
# the maximum becomes a leader.
dup = pr.run([5, 3, 5], protocol="a1", seed=0)
print(f"\nduplicate maximum [5, 3, 5]: outputs {dup.final['outputs']}")
