"""Mark transmission in finite-dimensional C*-dynamical systems.

Lueders marks on process instances, their manifestation along Hamiltonian
dynamics, classification of how a mark is transmitted, Gaussian smearing of
operators into analytic elements, and a qubit-chain model of light-cone
shielding.
"""

from .operators import (
    TOL_STRUCT, DensityState, Projection, ValidationError, commutator,
    double_commutator, expectation, ket_projection, maximally_mixed, op_norm,
    pure_state, validate,
)
from .dynamics import DynamicalSystem, ProcessInstance, ground_energy, heisenberg, make_unitary
from .marking import (
    ClassicalChannel, MarkSpec, classical_channel_update, invariance_criterion_operator,
    invariance_criterion_state, luders_update, manifested, mark_delta,
)
from .transmission import (
    Classification, TransmissionProfile, classify, find_zeros, lemma10_falsifier,
    profile, prop11_witness,
)
from .analytic import (
    delta_indistinguishable, gaussian_smear, nearest_projection, smear_convergence,
    smeared_projection,
)
from .localnet import (
    LatticeRegion, LatticeSystem, brickwork_step, embed_local, lightcone,
    local_mark_profile, shielding_check,
)
from .scenario import ScenarioConfig, emit_outputs, parse_config, random_instance

__version__ = "0.1.0"
