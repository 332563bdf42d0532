"""Why pulse-only election cannot be cheap: the solitude-pattern floor.

A node alone on a one-node ring sees a characteristic string of arrival
directions (its solitude pattern).  Correct election forces these
patterns to be pairwise distinct across IDs, so among k IDs some n of
them must share a long common prefix; a scheduler can then keep an
n-node ring indistinguishable from n solitude runs for n * prefix
deliveries.  That many pulses are unavoidable.
"""

import pulsering as pr
from pulsering import oracle

# Solitude patterns for the terminating election: '0' marks a clockwise
# arrival, '1' a counterclockwise one.
for i in (1, 2, 3, 4):
    p = pr.solitude_pattern("a2", i)
    print(f"id {i}: pattern {p.bits!r} (length {len(p)})")

patterns = {i: pr.solitude_pattern("a2", i) for i in range(1, 257)}
print(f"\npatterns for ids 1..256 pairwise distinct: "
      f"{pr.assert_patterns_unique(patterns).all_passed}")

# Pigeonhole k=1024 patterns into a shared prefix for an n=4 ring.
result = oracle.lower_bound_experiment("a2", k=1024, n=4)
print(f"\nwitness IDs: {result['ids']}")
print(f"shared prefix length: {result['prefix_length']}")
print(f"implied pulse floor: n * prefix = {result['pulse_lower_bound']}")
print(f"measured deliveries before any node diverged from its solitude "
      f"behavior: {result['deliveries_before_divergence']}")
print(f"floor met: {result['bound_met']}")
