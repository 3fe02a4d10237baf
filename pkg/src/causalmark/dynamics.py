"""Hamiltonian dynamics: ``tau_t(X) = U_t X U_t^{-1}`` with ``U_t = exp(-iHt)``."""

from dataclasses import dataclass

import numpy as np

from .operators import (
    TOL_STRUCT, DensityState, ValidationError, as_matrix, hermitian_residual,
    op_norm, validate,
)


class DynamicalSystem:
    """One-parameter automorphism group generated by a Hermitian ``H``.

    The spectral decomposition ``H = V diag(E) V^dagger`` is computed once;
    every later call only forms phases, so there is no drift at large ``t``.

    Parameters
    ----------
    hamiltonian : array_like
        Self-adjoint matrix.
    tol : float
        Structural tolerance for self-adjointness and reconstruction.
    """

    def __init__(self, hamiltonian, tol=TOL_STRUCT):
        h = validate(hamiltonian, "selfadjoint", tol)
        evals, evecs = np.linalg.eigh(h)
        recon = op_norm(evecs @ np.diag(evals) @ evecs.conj().T - h)
        if recon > tol:
            raise ValidationError("hamiltonian", "spectral reconstruction", recon, tol)
        for arr in (h, evals, evecs):
            arr.setflags(write=False)
        self._h = h
        self._evals = evals
        self._evecs = evecs

    @property
    def dim(self):
        return self._h.shape[0]

    @property
    def hamiltonian(self):
        return self._h

    @property
    def eigenvalues(self):
        return self._evals

    @property
    def eigenvectors(self):
        return self._evecs

    def to_eigenbasis(self, a):
        v = self._evecs
        return v.conj().T @ as_matrix(a) @ v

    def from_eigenbasis(self, a):
        v = self._evecs
        return v @ a @ v.conj().T

    def unitary(self, t):
        return make_unitary(self, t)

    def evolve(self, a, t):
        return heisenberg(self, a, t)

    def evolve_many(self, a, times):
        """Stack of ``tau_t(a)`` for every ``t`` in ``times``, shape ``(n, d, d)``."""
        times = np.asarray(times, dtype=float)
        a_eig = self.to_eigenbasis(a)
        ph = np.exp(-1j * np.multiply.outer(times, self._evals))
        # (U_t A U_t^dagger)_jk in the eigenbasis = e^{-iE_j t} A_jk e^{iE_k t}
        rot = ph[:, :, None] * a_eig[None, :, :] * ph.conj()[:, None, :]
        v = self._evecs
        return v[None] @ rot @ v.conj().T[None]

    def __repr__(self):
        return f"DynamicalSystem(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class ProcessInstance:
    """A process together with a state and an observable."""

    system: DynamicalSystem
    state: DensityState
    observable: np.ndarray

    def __post_init__(self):
        q = validate(self.observable, "selfadjoint")
        q.setflags(write=False)
        object.__setattr__(self, "observable", q)
        if not isinstance(self.state, DensityState):
            object.__setattr__(self, "state", validate(self.state, "density"))
        if not (self.system.dim == self.state.dim == q.shape[0]):
            raise ValueError(
                f"dimension mismatch: system {self.system.dim}, "
                f"state {self.state.dim}, observable {q.shape[0]}")

    @property
    def dim(self):
        return self.system.dim


def make_unitary(sys, t):
    """``U_t = exp(-iHt)`` from the cached eigendecomposition."""
    v = sys.eigenvectors
    return (v * np.exp(-1j * sys.eigenvalues * t)) @ v.conj().T


def heisenberg(sys, a, t):
    """``tau_t(A) = U_t A U_t^dagger``."""
    a = as_matrix(a)
    if a.shape[0] != sys.dim:
        raise ValueError(f"dimension mismatch: system {sys.dim}, operator {a.shape[0]}")
    u = make_unitary(sys, t)
    return u @ a @ u.conj().T


def ground_energy(sys):
    """Lowest eigenvalue of ``H``.

    At finite dimension the generator is bounded, so the spectrum is always
    bounded from below; the value is kept for reports.
    """
    return float(sys.eigenvalues[0])


def is_selfadjoint(a, tol=TOL_STRUCT):
    return hermitian_residual(a) <= tol
