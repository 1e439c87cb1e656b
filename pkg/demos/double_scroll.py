"""
Double scroll without equilibria
================================

Build the 12-branch double-scroll system, check that no branch has an
equilibrium inside its own region, and follow the itinerary between the
two scrolls.
"""
import numpy as np

from scrollforge import (
    IntegrationConfig,
    build_example1_double,
    equilibrium_report,
    integrate,
    occupancy,
    symbol_sequence,
)

sys = build_example1_double()
print(sys.name, "-", len(sys.pieces), "branches")

# A is singular (eta = 0), so each branch either has no equilibrium at all
# or a line of them that misses its guard.
for row in equilibrium_report(sys):
    print(row.piece_index, row.kind, "inside guard:", row.inside_guard)

traj = integrate(sys, IntegrationConfig(np.zeros(3), 200.0, step=0.01))
print("max |x| over 200 s:", round(traj.max_abs, 3))

s = symbol_sequence(traj)
print("itinerary:", s[:50], "...")
print("occupancy:", occupancy(traj))
