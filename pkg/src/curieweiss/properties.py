"""Randomized verification of the cyclic-symmetry properties.

The checks quantify, over a seeded sample of interior weight vectors,
how well the implementation realizes the exact statements: the moment
map conjugates the weight shift, its order is 2l+1, the paramagnet is
its fixed point, the moment chart inverts, and shifting the sector
tracks shifting the state.  All deviations are exact zeros in real
arithmetic, so the reported numbers measure accumulated roundoff.
"""

from __future__ import annotations

import numpy as np

from .order_params import (
    moments_to_weights_array,
    paramagnet_moments,
    permutation_map_m,
    random_weights,
    weights_to_moments_array,
)
from .spectrum import SpinQuantum, spectrum
from .thermo import ModelParams, free_energy_batch

TOLERANCES = {
    "conjugacy": 1e-9,
    "map_order": 1e-9,
    "paramagnet_fixed": 1e-10,
    "roundtrip": 1e-9,
    "sector_shift": 1e-9,
}

# fixed interaction used for the sector-shift check: strong enough that
# every term of F contributes, weak enough to stay well conditioned
_SHIFT_PARAMS = {"temperature": 0.35, "j2": 0.3, "j4": 1.0, "g": 0.1}


def run_symmetry_suite(
    l: SpinQuantum, samples: int = 1000, seed: int = 0
) -> dict[str, float]:
    """Max deviation per property over a seeded random sample.

    Keys match TOLERANCES.  The sector-shift check compares the coupled
    free energy in sector s at m against sector s+1 at the cycled image,
    for every sector, under a fixed interaction set.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    x = random_weights(l, rng, samples)
    m = weights_to_moments_array(l, x)
    cyc = permutation_map_m(l)
    d = l.n_states

    m_cycled = cyc.apply(m)
    m_rolled = weights_to_moments_array(l, np.roll(x, 1, axis=1))
    conjugacy = float(np.max(np.abs(m_cycled - m_rolled)))

    m_iter = m
    for _ in range(d):
        m_iter = cyc.apply(m_iter)
    map_order = float(np.max(np.abs(m_iter - m)))

    pm = paramagnet_moments(l)
    paramagnet_fixed = float(np.max(np.abs(cyc.apply(pm).values - pm.values)))

    roundtrip = float(np.max(np.abs(moments_to_weights_array(l, m) - x)))

    sectors = spectrum(l)
    shift = 0.0
    for i, s in enumerate(sectors):
        s_next = sectors[(i + 1) % d]
        f_here, ok_here = free_energy_batch(
            ModelParams(l=l, sector=s, **_SHIFT_PARAMS), m
        )
        f_there, ok_there = free_energy_batch(
            ModelParams(l=l, sector=s_next, **_SHIFT_PARAMS), m_cycled
        )
        if not (ok_here.all() and ok_there.all()):
            shift = float("inf")
            break
        shift = max(shift, float(np.max(np.abs(f_here - f_there))))

    return {
        "conjugacy": conjugacy,
        "map_order": map_order,
        "paramagnet_fixed": paramagnet_fixed,
        "roundtrip": roundtrip,
        "sector_shift": shift,
    }
