"""
A system of your own
====================

Assemble a double scroll with slower rotation from the cell pattern,
round-trip it through JSON, check it for equilibria and run it. Then break it by
swapping two W vectors.
"""
import json
from dataclasses import replace

import numpy as np

from scrollforge import (
    Divergence,
    IntegrationConfig,
    build_scroll_system,
    integrate,
    is_equilibrium_free,
    load_system,
    save_system,
    symbol_sequence,
)
from scrollforge.systems import example_spec

spec = replace(example_spec(2), n=4.0)
sys = build_scroll_system(spec, name="slow-double")

doc = save_system(sys)
print(json.dumps(doc["pieces"][0]))
sys = load_system(json.dumps(doc))
print(sys.name, "equilibrium-free:", is_equilibrium_free(sys))

# having no equilibria does not make orbits bounded: with n = 4 the spiral
# overshoots the next scroll and the orbit escapes
try:
    integrate(sys, IntegrationConfig(np.zeros(3), 200.0))
except Divergence as exc:
    print("n = 4:", exc)

traj = integrate(build_scroll_system(example_spec(2)), IntegrationConfig(np.zeros(3), 200.0))
print("n = 10 itinerary:", symbol_sequence(traj)[:40], "...")

# on x3 = 0 the field is A x + W with focus (-k1, 0, 0); swapping the two W
# vectors puts each focus on its own side of x1 = 0
w = spec.w_specs
bad = build_scroll_system(replace(spec, w_specs=(w[1], w[0]) + w[2:]), name="swapped")
print(bad.name, "equilibrium-free:", is_equilibrium_free(bad))
