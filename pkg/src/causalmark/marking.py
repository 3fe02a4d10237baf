"""
Marking interactions.

A mark is the non-selective Lueders update ``W -> P W P + (1-P) W (1-P)``.
Its manifestation at stage ``t`` is the shift it causes in the expectation
of the evolved observable,

    delta(t) = tr(W tau_t(Q)) - tr(W_P tau_t(Q)) = tr(W [P, [P, tau_t(Q)]]).

The second form follows from trace cyclicity and is used as an independent
cross-check of the first.
"""

from dataclasses import dataclass

import numpy as np

from .dynamics import heisenberg
from .operators import (
    TOL_STRUCT, Projection, as_matrix, commutator,
    double_commutator, expectation, op_norm, validate,
)

DEFAULT_DETECT_DELTA = 1e-6
IDENTITY_TOL = 1e-8


class IdentityMismatch(AssertionError):
    """The two routes to ``delta(t)`` disagree."""


@dataclass(frozen=True)
class MarkSpec:
    """A marking projection with the smallest expectation shift that counts."""

    projection: Projection
    detect_delta: float = DEFAULT_DETECT_DELTA

    def __post_init__(self):
        if not self.detect_delta > 0:
            raise ValueError(f"detect_delta must be positive, got {self.detect_delta}")
        if not isinstance(self.projection, Projection):
            object.__setattr__(self, "projection", validate(self.projection, "projection"))


@dataclass(frozen=True, eq=False)
class ClassicalChannel:
    """Column-stochastic transition matrix acting on probability vectors."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"channel matrix must be square, got shape {m.shape}")
        if np.any(m < 0):
            raise ValueError("channel matrix has negative entries")
        col_err = np.max(np.abs(m.sum(axis=0) - 1.0))
        if col_err > TOL_STRUCT:
            raise ValueError(f"channel columns do not sum to 1 (off by {col_err:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_states(self):
        return self.matrix.shape[0]

    @classmethod
    def bit_flip(cls, p):
        return cls([[1 - p, p], [p, 1 - p]])


def luders_update(w, p):
    """Non-selective Lueders update of a density state."""
    wm, pm = as_matrix(w), as_matrix(p)
    if wm.shape != pm.shape:
        raise ValueError(f"dimension mismatch: state {wm.shape[0]}, projection {pm.shape[0]}")
    perp = np.eye(pm.shape[0]) - pm
    return validate(pm @ wm @ pm + perp @ wm @ perp, "density")


def classical_channel_update(prob, channel):
    """Push a probability vector through a classical channel."""
    prob = np.asarray(prob, dtype=float)
    if prob.shape != (channel.n_states,):
        raise ValueError(
            f"dimension mismatch: distribution {prob.shape}, channel {channel.n_states}")
    if np.any(prob < -TOL_STRUCT) or abs(prob.sum() - 1.0) > TOL_STRUCT:
        raise ValueError("input is not a probability vector")
    return channel.matrix @ prob


def _delta_direct(w, w_p, q_t):
    return (expectation(w, q_t) - expectation(w_p, q_t)).real


def mark_delta(inst, p, t, verify=False):
    """Manifestation ``delta(t)`` of the mark ``p`` on ``inst``.

    Computed as the difference of the two expectations. With ``verify`` the
    double-commutator form is evaluated too and the two must agree to
    ``IDENTITY_TOL``.
    """
    w = inst.state
    q_t = heisenberg(inst.system, inst.observable, t)
    w_p = luders_update(w, p)
    delta = _delta_direct(w, w_p, q_t)
    if verify:
        alt = expectation(w, double_commutator(p, q_t)).real
        if abs(alt - delta) > IDENTITY_TOL:
            raise IdentityMismatch(f"delta({t}) = {delta!r} but tr(W[P,[P,Q_t]]) = {alt!r}")
    return delta


def manifested(inst, mark, t):
    """True iff ``|delta(t)|`` reaches the mark's detection threshold."""
    if not mark.detect_delta > 0:
        raise ValueError("detect_delta must be positive")
    return abs(mark_delta(inst, mark.projection, t)) >= mark.detect_delta


def invariance_criterion_operator(p, q, tol=TOL_STRUCT):
    """Whether every state leaves ``<Q>`` unchanged under the mark ``p``.

    For a Lueders mark this holds exactly when ``[P, Q] = 0``. A single
    state can be blind to a non-commuting pair (the maximally mixed one
    always is), so this is a statement about all states at once.
    """
    return op_norm(commutator(p, q)) <= tol


def invariance_criterion_state(w, p, q, tol=TOL_STRUCT):
    """Whether the given state sees no shift in ``<Q>`` under the mark ``p``."""
    return abs(expectation(w, double_commutator(p, q))) <= tol


def lueders_shift(w, p, q):
    """``tr(W Q) - tr(W_P Q)`` for a fixed operator ``Q`` (no dynamics)."""
    w_p = luders_update(w, p)
    return _delta_direct(w, w_p, as_matrix(q))

