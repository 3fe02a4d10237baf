"""
Gaussian smearing in time
=========================

Averaging an operator over its orbit with a Gaussian of width ``1/sqrt(n)``
damps every transition frequency ``w`` by ``exp(-w^2 / (4n))``. Rounding the
result back to a projection gives a mark that no experiment at resolution
``delta`` can tell from the original.
"""

import numpy as np
import matplotlib.pyplot as plt

from causalmark import (
    DynamicalSystem, delta_indistinguishable, gaussian_smear, ket_projection,
    smear_convergence, smeared_projection,
)
from causalmark.operators import SIGMA_X

# %%
# Two levels one unit apart: sigma_x shrinks by exp(-1/(4n)).
sys = DynamicalSystem(np.diag([0.0, 1.0]))
ns = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000]
table = smear_convergence(sys, SIGMA_X, ns)
for n, err in table[:3]:
    print(n, err, 1 - np.exp(-1 / (4 * n)))

# %%
# The closed form and the direct quadrature agree.
a = gaussian_smear(sys, SIGMA_X, 10)
b = gaussian_smear(sys, SIGMA_X, 10, method="quadrature")
print(np.max(np.abs(a.smeared - b.smeared)), b.quad_panels, "panels")

# %%
plus = ket_projection([1, 1])
r = delta_indistinguishable(plus, smeared_projection(sys, plus, 100), 0.01)
print(r)

# %%
plt.loglog(ns, [e for _, e in table], "o-")
plt.xlabel("n")
plt.ylabel("||A_n - A||")
plt.savefig("gaussian_smearing.png")
