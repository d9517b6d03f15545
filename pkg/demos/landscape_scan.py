"""Scan the three-state free-energy surface over its feasible triangle.

The order-parameter plane for three states is the pair (m1, m2) with
m2 between m1 bounds set by the simplex; outside that triangle there is
no weight vector and the surface is undefined. Below the transition the
surface develops three symmetry-related wells; above it only the
uniform state survives.
"""

import numpy as np

from curieweiss import (
    ModelParams,
    MomentVector,
    SpinQuantum,
    free_energy,
    free_energy_batch,
    minimize,
)

L = SpinQuantum(2)          # three states: -1, 0, +1
J4 = 1.0
RESOLUTION = 121
TEMPS = (0.2, 0.5)          # ordered side, uniform side


def grid_summary(temp):
    pr = ModelParams(L, temperature=temp, j4=J4)
    m1 = np.linspace(-1.0, 1.0, RESOLUTION)
    m2 = np.linspace(0.0, 1.0, RESOLUTION)
    g1, g2 = np.meshgrid(m1, m2, indexing="ij")
    pts = np.column_stack([g1.ravel(), g2.ravel()])
    fvals, feas = free_energy_batch(pr, pts)
    k = np.nanargmin(np.where(feas, fvals, np.nan))
    print(f"T = {temp}: {feas.sum()} of {pts.shape[0]} grid points feasible")
    print(f"  grid minimum F = {fvals[k]:+.6f} at "
          f"(m1, m2) = ({pts[k, 0]:+.3f}, {pts[k, 1]:.3f})")
    return pr


def stationary_points(pr):
    found = minimize(pr)
    for r in found:
        m = r.m_star.values
        print(f"  {r.classification:>6}: F = {r.f_value:+.9f} at "
              f"({m[0]:+.6f}, {m[1]:.6f})")


def barrier_slice(temp, g):
    # F along the symmetric line m1 = 0, with and without detector coupling
    from fractions import Fraction

    plain = ModelParams(L, temperature=temp, j4=J4)
    tied = ModelParams(L, temperature=temp, j4=J4, g=g, sector=Fraction(0))
    print(f"\nm1 = 0 slice at T = {temp}, g = {g}:")
    print(f"  {'m2':>6} {'F(g=0)':>12} {'F(g)':>12}")
    for m2 in (0.01, 0.05, 0.2, 0.4, 0.6, 2.0 / 3.0):
        mv = MomentVector(L, (0.0, m2))
        fa = free_energy(plain, mv).free_energy
        fb = free_energy(tied, mv).free_energy
        print(f"  {m2:6.3f} {fa:12.6f} {fb:12.6f}")


# --- ordered phase: three degenerate wells plus a metastable uniform state ---

for t in TEMPS:
    pr = grid_summary(t)
    stationary_points(pr)
    print()

# --- the coupling tilts the slice and erodes the barrier near m2 = 0 ---

barrier_slice(0.4, 0.0)
barrier_slice(0.4, 0.2)
