"""
Perturbing the axial eigenvalue
===============================

With A = [[m, -n, 0], [n, m, 0], [0, 0, eta]] the axial coordinate obeys
x3' = eta x3 + v. For eta < 0 an orbit heading toward x3 = 0 still gets
there. For eta > 0 an orbit beyond |v| / eta never turns back. The triple
scroll with eta = 0.1 keeps its chaos because orbits never get that far.
"""
import math

import numpy as np

from scrollforge import (
    IntegrationConfig,
    SubsystemParams,
    build_example2_triple,
    chaos01_K,
    integrate,
    subsystem_solution,
    virtual_equilibria,
)
from scrollforge.analysis import Chaos01Config

p = SubsystemParams(m=0.5, n=10.0, eta=-0.01, v=-5.0)
t_hit = math.log(501 / 500) / 0.01
print(f"eta = -0.01, x3(0) = 1: reaches x3 = 0 at t = {t_hit:.5f}")
print("closed form there:", subsystem_solution(p, (0, 0, 1), t_hit).round(12))

p = SubsystemParams(m=0.5, n=10.0, eta=0.1, v=-5.0)
print("eta = 0.1, x3(0) = 60:", subsystem_solution(p, (0, 0, 60), np.array([0, 20, 40]))[:, 2].round(1))

sys = build_example2_triple()
outside = sum(not e.inside_guard for e in virtual_equilibria(sys))
print(f"{sys.name}: {outside} of {len(sys.pieces)} virtual equilibria lie outside their regions")

traj = integrate(sys, IntegrationConfig((0.1, 0.1, 0.1), 500.0, step=0.01, sample_every=25))
k, _ = chaos01_K(traj, Chaos01Config.seeded(42))
print(f"K = {k:.4f}, max |x| = {traj.max_abs:.2f}")
