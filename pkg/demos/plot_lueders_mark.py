"""
Marking a qubit with a projective measurement
=============================================

A non-selective measurement of ``P = |0><0|`` on the state ``|+><+|``
dephases it. Under ``H = sigma_y`` the observable ``Q = P`` rotates, and the
difference between marked and unmarked expectations oscillates as
``sin(2t) / 2``.
"""

import numpy as np
import matplotlib.pyplot as plt

from causalmark import (
    DynamicalSystem, ProcessInstance, Projection, ket_projection, luders_update,
    mark_delta, pure_state,
)
from causalmark.operators import SIGMA_Y, double_commutator, expectation

# %%
# The measurement leaves the diagonal alone and wipes the coherences.
w = pure_state([1, 1])
p = Projection(ket_projection([1, 0]))
print(luders_update(w, p).op.real)

# %%
# The shift in any expectation is the double commutator of the observable
# with the mark, averaged over the unmarked state.
sys = DynamicalSystem(SIGMA_Y)
inst = ProcessInstance(sys, w, p.op)
t = np.pi / 4
q_t = sys.evolve(p.op, t)
print(mark_delta(inst, p, t), expectation(w, double_commutator(p, q_t)).real)

# %%
ts = np.linspace(0, 5 * np.pi / 4, 400)
deltas = [mark_delta(inst, p, s) for s in ts]
plt.plot(ts, deltas, label="delta(t)")
plt.plot(ts, 0.5 * np.sin(2 * ts), "--", label="sin(2t)/2")
plt.xlabel("t")
plt.legend()
plt.savefig("lueders_mark.png")
