"""
Shielding on a qubit chain
==========================

A brickwork circuit spreads an operator by at most two sites per step. A
mark at one end of the chain stays invisible to an observable at the other
end until their light cones meet.
"""

import numpy as np
import matplotlib.pyplot as plt

from causalmark import LatticeRegion, LatticeSystem, local_mark_profile
from causalmark.localnet import embed_local, evolve_steps, lightcone, support
from causalmark.scenario import random_observable, random_projection, random_state

# %%
n_sites = 8
chain = LatticeSystem(n_sites, "random", seed=7)
rng = np.random.default_rng(0)
w = random_state(chain.dim, rng)
mark_at, watch_at = LatticeRegion(0, 0), LatticeRegion(7, 7)
p_local = random_projection(2, rng)
q_local = random_observable(2, rng)

# %%
# Support of the observable after each step, next to the light cone bound.
q = embed_local(chain, q_local, watch_at)
for k in range(4):
    cone = lightcone(watch_at, k, n_sites)
    print(k, support(evolve_steps(chain, q, k), n_sites), f"cone [{cone.lo}, {cone.hi}]")

# %%
prof = local_mark_profile(chain, w, mark_at, p_local, watch_at, q_local, 8)
print("first contact at step", prof.first_contact)
print(np.abs(prof.deltas))

# %%
plt.semilogy(prof.steps, np.abs(prof.deltas) + 1e-18, "o-")
plt.axvline(prof.first_contact, ls="--")
plt.xlabel("step")
plt.ylabel("|delta|")
plt.savefig("lattice_shielding.png")
