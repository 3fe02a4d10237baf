"""
Dense operator primitives.

Operators are plain square complex ``numpy`` arrays. Projections and density
states are thin validated wrappers around such arrays; every function that
takes an operator also accepts the wrappers.
"""

from dataclasses import dataclass

import numpy as np

TOL_STRUCT = 1e-9


class ValidationError(ValueError):
    """An operator failed a structural check.

    ``invariant`` names the failed property and ``residual`` is how far off
    it was.
    """

    def __init__(self, kind, invariant, residual, tol):
        self.kind = kind
        self.invariant = invariant
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(
            f"not a valid {kind}: {invariant} violated by {self.residual:.3g} "
            f"(tol {self.tol:.1e})")


def as_matrix(a):
    """Return the underlying square complex array of ``a``."""
    if isinstance(a, (Projection, DensityState)):
        return a.op
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"operator must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("operator has non-finite entries")
    return m


def _frozen(m):
    m = np.array(m, dtype=complex, copy=True)
    m.setflags(write=False)
    return m


def _check_dims(*ops):
    dims = {o.shape[0] for o in ops}
    if len(dims) != 1:
        raise ValueError(f"dimension mismatch: {sorted(dims)}")


@dataclass(frozen=True, eq=False)
class Projection:
    """Orthogonal projection, ``P = P^dagger = P^2``."""

    op: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "op", _frozen(self.op))

    @property
    def dim(self):
        return self.op.shape[0]

    def complement(self):
        return Projection(np.eye(self.dim) - self.op)

    def __array__(self, dtype=None, copy=None):
        return self.op if dtype is None else self.op.astype(dtype)


@dataclass(frozen=True, eq=False)
class DensityState:
    """Density operator ``W``; the state it defines is ``X -> tr(W X)``."""

    op: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "op", _frozen(self.op))

    @property
    def dim(self):
        return self.op.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.op if dtype is None else self.op.astype(dtype)


def adjoint(a):
    return as_matrix(a).conj().T


def expectation(w, a):
    """Trace pairing ``tr(W A)``.

    Returns a complex number; the imaginary part vanishes (up to rounding)
    for self-adjoint ``a``.
    """
    w, a = as_matrix(w), as_matrix(a)
    _check_dims(w, a)
    # tr(WA) = sum_ij W_ij A_ji
    return complex(np.einsum("ij,ji->", w, a))


def commutator(a, b):
    a, b = as_matrix(a), as_matrix(b)
    _check_dims(a, b)
    return a @ b - b @ a


def double_commutator(p, q):
    """``[P, [P, Q]]`` for a projection ``P``.

    Uses ``P Q + Q P - 2 P Q P``, which equals the nested commutator
    because ``P^2 = P``.
    """
    p, q = as_matrix(p), as_matrix(q)
    _check_dims(p, q)
    pq = p @ q
    return pq + q @ p - 2.0 * pq @ p


def op_norm(a):
    """Spectral norm, from the largest eigenvalue of ``A^dagger A``."""
    a = as_matrix(a)
    top = np.linalg.eigvalsh(a.conj().T @ a)[-1]
    return float(np.sqrt(max(top, 0.0)))


def op_norms(stack):
    """Spectral norms of a stack of matrices with shape ``(n, d, d)``."""
    stack = np.asarray(stack, dtype=complex)
    top = np.linalg.eigvalsh(np.swapaxes(stack.conj(), -1, -2) @ stack)[..., -1]
    return np.sqrt(np.clip(top, 0.0, None))


def hermitian_residual(a):
    a = as_matrix(a)
    return op_norm(a - a.conj().T)


def validate(a, kind, tol=TOL_STRUCT):
    """Check ``a`` against the invariants of ``kind`` and wrap it.

    Parameters
    ----------
    a : array_like
        Square matrix.
    kind : {"projection", "density", "selfadjoint"}
    tol : float
        Absolute tolerance on norms.

    Returns
    -------
    Projection, DensityState or ndarray
        ``selfadjoint`` returns the (symmetrized) array itself.

    Raises
    ------
    ValidationError
        With the name of the failed invariant and its residual.
    """
    m = as_matrix(a)
    herm = hermitian_residual(m)
    if herm > tol:
        raise ValidationError(kind, "self-adjointness", herm, tol)
    m = 0.5 * (m + m.conj().T)
    if kind == "selfadjoint":
        return m
    if kind == "projection":
        idem = op_norm(m @ m - m)
        if idem > tol:
            raise ValidationError(kind, "idempotence", idem, tol)
        return Projection(m)
    if kind == "density":
        lo = np.linalg.eigvalsh(m)[0]
        if lo < -tol:
            raise ValidationError(kind, "positivity", -lo, tol)
        tr_err = abs(np.trace(m).real - 1.0)
        if tr_err > tol:
            raise ValidationError(kind, "unit trace", tr_err, tol)
        return DensityState(m)
    raise ValueError(f"unknown kind {kind!r}")


def ket_projection(psi):
    """Rank-one projection onto the (normalized) vector ``psi``."""
    psi = np.asarray(psi, dtype=complex).ravel()
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ValueError("zero vector")
    psi = psi / nrm
    return np.outer(psi, psi.conj())


def pure_state(psi):
    return DensityState(ket_projection(psi))


def maximally_mixed(dim):
    return DensityState(np.eye(dim) / dim)


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.setflags(write=False)
del _m
