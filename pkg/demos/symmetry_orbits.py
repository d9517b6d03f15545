"""Walk the cyclic symmetry orbit of a random state.

Relabeling the n = 2l + 1 outcomes by a cyclic step acts on the moment
vector as an affine map of order n. The free energy is invariant when
the detector sector index is shifted along with the labels, so every
minimum comes in an n-fold orbit.
"""

import numpy as np

from curieweiss import (
    ModelParams,
    MomentVector,
    SpinQuantum,
    TOLERANCES,
    free_energy,
    moments_to_weights,
    permutation_map_m,
    random_weights,
    run_symmetry_suite,
    spectrum,
    weights_to_moments_array,
)

SEED = 7
TWICE_L = 4    # five states


def walk_orbit():
    l = SpinQuantum(TWICE_L)
    rng = np.random.default_rng(SEED)
    x = 0.8 * random_weights(l, rng, n=1)[0] + 0.2 / l.n_states
    m = weights_to_moments_array(l, x[None, :])[0]
    amap = permutation_map_m(l)

    print(f"orbit of a random five-state moment vector (seed {SEED}):")
    cur = m
    for step in range(l.n_states + 1):
        w = moments_to_weights(MomentVector(l, cur))
        tag = "start" if step == 0 else f"step {step}"
        print(f"  {tag:>6}: m = [" + " ".join(f"{v:+.5f}" for v in cur) + "]"
              + "   x = [" + " ".join(f"{v:.4f}" for v in w.weights) + "]")
        cur = amap.apply(cur)
    print("  after n steps the walk returns to the start (affine map order n)")


def invariance_under_sector_shift():
    # shifting state labels and the sector together leaves F unchanged
    l = SpinQuantum(TWICE_L)
    rng = np.random.default_rng(SEED + 1)
    x = 0.8 * random_weights(l, rng, n=1)[0] + 0.2 / l.n_states
    m = weights_to_moments_array(l, x[None, :])[0]
    amap = permutation_map_m(l)
    sigmas = spectrum(l)

    print("\nfree energy along the orbit, sector shifted in lockstep:")
    cur = m
    for k in range(l.n_states):
        s = sigmas[(2 + k) % l.n_states]
        pr = ModelParams(l, temperature=0.37, j2=0.1, j4=0.9, g=0.2, sector=s)
        f = free_energy(pr, MomentVector(l, cur)).free_energy
        print(f"  sector {str(s):>4}: F = {f:+.12f}")
        cur = amap.apply(cur)


def suite_across_spins():
    print("\nrandomized invariance suite, 1000 samples per spin:")
    for twice_l in (1, 2, 3, 4, 5):
        dev = run_symmetry_suite(SpinQuantum(twice_l), samples=1000, seed=SEED)
        worst = max(dev.values())
        print(f"  2l = {twice_l}: worst deviation = {worst:.3e}")
    print("tolerances: " + ", ".join(f"{k} < {v:g}" for k, v in sorted(TOLERANCES.items())))


# --- run all three stages ---

walk_orbit()
invariance_under_sector_shift()
suite_across_spins()
