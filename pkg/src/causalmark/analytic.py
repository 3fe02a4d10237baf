"""
Analytic elements by Gaussian smearing.

For a dynamical system with generator ``H``,

    A_n = sqrt(n / pi) * integral exp(-n t^2) tau_t(A) dt

is entire analytic for ``tau`` and tends to ``A`` as ``n`` grows. In the
eigenbasis of ``H`` the integral is exact: entry ``(j, k)`` is damped by
``exp(-(E_j - E_k)^2 / (4 n))``. A quadrature route is kept alongside as an
independent check.

Note that at finite dimension *every* operator is entire analytic for
``tau``, local or not. The obstruction to localizing analytic elements in
relativistic field theory relies on infinite-dimensional structure (a cyclic
vacuum, Reeh-Schlieder) and has no analogue here.
"""

from dataclasses import dataclass

import numpy as np

from .operators import (
    TOL_STRUCT, Projection, as_matrix, hermitian_residual, op_norm,
)

QUAD_TOL = 1e-10
AMBIGUITY_TOL = 1e-9
TRUNCATION = 8.0


class AmbiguousRounding(ValueError):
    """An eigenvalue sits at 1/2, so rounding to a projection is ill-defined."""


@dataclass(frozen=True, eq=False)
class SmearingResult:
    n: int
    smeared: np.ndarray
    error_norm: float
    quad_panels: int
    quad_tol: float
    method: str


def _smear_spectral(sys, a, n):
    e = sys.eigenvalues
    damp = np.exp(-np.subtract.outer(e, e) ** 2 / (4.0 * n))
    return sys.from_eigenbasis(sys.to_eigenbasis(a) * damp)


def _simpson(fa, fm, fb, a, b):
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _smear_quadrature(sys, a, n, quad_tol):
    """Adaptive composite Simpson over ``|t| <= 8 / sqrt(n)``.

    Panels are bisected until the Richardson error estimate of every entry
    is below the panel's share of ``quad_tol``. Returns ``(A_n, panels)``.
    """
    a_eig = sys.to_eigenbasis(a)
    e = sys.eigenvalues
    freq = np.subtract.outer(e, e)
    norm = np.sqrt(n / np.pi)
    cache = {}

    def f(t):
        val = cache.get(t)
        if val is None:
            # tau_t(A) in the eigenbasis: A_jk exp(-i (E_j - E_k) t)
            val = norm * np.exp(-n * t * t) * a_eig * np.exp(-1j * freq * t)
            cache[t] = val
        return val

    half = TRUNCATION / np.sqrt(n)
    lo, hi = -half, half
    budget = quad_tol / 4.0
    width = hi - lo
    total = np.zeros_like(a_eig)
    panels = 0
    m0 = 0.5 * (lo + hi)
    stack = [(lo, hi, f(lo), f(m0), f(hi))]
    while stack:
        a0, b0, fa, fm, fb = stack.pop()
        m = 0.5 * (a0 + b0)
        lm, rm = 0.5 * (a0 + m), 0.5 * (m + b0)
        flm, frm = f(lm), f(rm)
        coarse = _simpson(fa, fm, fb, a0, b0)
        fine = _simpson(fa, flm, fm, a0, m) + _simpson(fm, frm, fb, m, b0)
        err = np.max(np.abs(fine - coarse)) / 15.0
        if err <= budget * (b0 - a0) / width or (b0 - a0) < 1e-12 * width:
            total += fine + (fine - coarse) / 15.0
            panels += 2
        else:
            # right half pushed first so panels are summed left to right
            stack.append((m, b0, fm, frm, fb))
            stack.append((a0, m, fa, flm, fm))
    return sys.from_eigenbasis(total), panels


def gaussian_smear(sys, a, n, method="spectral", verify=False, quad_tol=QUAD_TOL):
    """Gaussian time-average ``A_n`` of ``a``.

    Parameters
    ----------
    sys : DynamicalSystem
    a : array_like
    n : int
        Smearing parameter, ``n >= 1``; larger means narrower in time.
    method : {"spectral", "quadrature"}
        Closed form in the eigenbasis, or adaptive Simpson.
    verify : bool
        Run both routes and require entrywise agreement within ``quad_tol``.

    Returns
    -------
    SmearingResult
    """
    if not n >= 1:
        raise ValueError(f"smearing parameter must be >= 1, got {n}")
    a = as_matrix(a)
    if a.shape[0] != sys.dim:
        raise ValueError(f"dimension mismatch: system {sys.dim}, operator {a.shape[0]}")
    panels = 0
    if method == "spectral":
        smeared = _smear_spectral(sys, a, n)
    elif method == "quadrature":
        smeared, panels = _smear_quadrature(sys, a, n, quad_tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    if verify:
        if method == "spectral":
            other, panels = _smear_quadrature(sys, a, n, quad_tol)
        else:
            other = _smear_spectral(sys, a, n)
        gap = float(np.max(np.abs(other - smeared)))
        if gap > quad_tol:
            raise AssertionError(
                f"spectral and quadrature smearing disagree by {gap:.3g} > {quad_tol:.1e}")
    smeared.setflags(write=False)
    return SmearingResult(n=n, smeared=smeared, error_norm=op_norm(smeared - a),
                          quad_panels=panels, quad_tol=quad_tol, method=method)


def smear_convergence(sys, a, n_list, method="spectral"):
    """``[(n, ||A_n - A||), ...]`` for increasing smearing parameters."""
    n_list = list(n_list)
    if not n_list:
        raise ValueError("n_list is empty")
    if any(b <= a_ for a_, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    return [(n, gaussian_smear(sys, a, n, method=method).error_norm) for n in n_list]


def nearest_projection(a, tol=TOL_STRUCT):
    """Round a self-adjoint operator to a projection.

    Eigenvalues ``>= 1/2`` go to 1, the rest to 0; eigenvectors are kept.

    Raises
    ------
    AmbiguousRounding
        If an eigenvalue lies within ``1e-9`` of ``1/2``.
    """
    a = as_matrix(a)
    if hermitian_residual(a) > tol:
        raise ValueError("operator is not self-adjoint")
    vals, vecs = np.linalg.eigh(0.5 * (a + a.conj().T))
    if np.any(np.abs(vals - 0.5) <= AMBIGUITY_TOL):
        raise AmbiguousRounding("eigenvalue at 1/2; perturb the operator before rounding")
    keep = vecs[:, vals >= 0.5]
    return Projection(keep @ keep.conj().T)


def smeared_projection(sys, p, n):
    """Smear a projection and round it back: an almost-local analytic mark."""
    return nearest_projection(gaussian_smear(sys, p, n).smeared)


@dataclass(frozen=True)
class Indistinguishability:
    close: bool
    norm: float
    expectation_gap_bound: float


def delta_indistinguishable(p, p2, delta):
    """Compare two projections at experimental resolution ``delta``.

    ``norm`` bounds ``|w(P) - w(P2)|`` uniformly over states, so ``close``
    means no state can tell them apart to within ``delta``.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    p, p2 = as_matrix(p), as_matrix(p2)
    if p.shape != p2.shape:
        raise ValueError(f"dimension mismatch: {p.shape[0]} vs {p2.shape[0]}")
    norm = op_norm(p - p2)
    return Indistinguishability(close=norm < delta, norm=norm, expectation_gap_bound=norm)
