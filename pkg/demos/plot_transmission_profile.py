"""
Where a mark disappears
=======================

A profile samples ``delta(t)`` on a grid, refines every zero and decides
whether the mark is carried continuously, up to isolated stages, or not at
all.
"""

import numpy as np
import matplotlib.pyplot as plt

from causalmark import ProcessInstance, profile, prop11_witness, random_instance

# %%
# A random four-level system with a nondegenerate spectrum. The observable
# is the marking projection itself, so the profile starts at zero.
sys, w, p, _ = random_instance(4, seed=3, nondegenerate_spectrum=True)
inst = ProcessInstance(sys, w, p.op)
prof = profile(inst, p, 8.0, n_grid=4096)
print(prof.classification)
for z in prof.zeros:
    print(f"  zero at t = {z.location:.10f} ({z.kind})")

# %%
# Apart from those isolated stages the mark is visible almost everywhere.
witness = prop11_witness(prof, 1e-6)
print(witness.status, f"{witness.fraction:.4f}")

# %%
plt.plot(prof.grid, prof.values)
plt.plot([z.location for z in prof.zeros], [0] * len(prof.zeros), "o")
plt.axhline(0, color="k", lw=0.5)
plt.xlabel("t")
plt.ylabel("delta")
plt.savefig("transmission_profile.png")
