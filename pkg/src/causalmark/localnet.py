"""
A qubit chain as a toy local net.

Each interval of sites carries the algebra of operators acting on those
sites only. Time runs in discrete brickwork steps: one layer of two-qubit
gates on pairs ``(0,1), (2,3), ...`` followed by one on ``(1,2), (3,4), ...``.
This gives an exact light cone of two sites per step, so operators supported
outside each other's cones commute to machine precision and a mark made in
one region cannot show up in an observable that stays causally separated
from it. The continuum picture (Minkowski regions, Poincare covariance,
vacuum vector) is not modelled.

Tensor order is site-major: site 0 is the most significant Kronecker factor.
"""

from dataclasses import dataclass

import numpy as np

from .marking import lueders_shift, luders_update
from .operators import TOL_STRUCT, as_matrix, op_norm

MAX_SITES = 12
GATE_KINDS = ("cnot", "random", "identity")

CNOT = np.array([[1, 0, 0, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0]], dtype=complex)


@dataclass(frozen=True)
class LatticeRegion:
    """Inclusive site interval ``[lo, hi]``."""

    lo: int
    hi: int

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi:
            raise ValueError(f"invalid region [{self.lo}, {self.hi}]")

    @property
    def size(self):
        return self.hi - self.lo + 1

    def sites(self):
        return range(self.lo, self.hi + 1)

    def intersects(self, other):
        return self.lo <= other.hi and other.lo <= self.hi

    def check(self, n_sites):
        if self.hi >= n_sites:
            raise ValueError(f"region [{self.lo}, {self.hi}] outside a chain of {n_sites} sites")


def _haar_unitary(d, rng):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class LatticeSystem:
    """Brickwork circuit on ``n_sites`` qubits.

    Parameters
    ----------
    n_sites : int
        Chain length, 2 to 12.
    gate_kind : {"cnot", "random", "identity"}
        ``random`` draws an independent Haar unitary per bond from ``seed``;
        the same gates are reused at every step.
    seed : int
    """

    def __init__(self, n_sites, gate_kind="random", seed=0):
        if not 2 <= n_sites <= MAX_SITES:
            raise ValueError(f"n_sites must be in [2, {MAX_SITES}], got {n_sites}")
        if gate_kind not in GATE_KINDS:
            raise ValueError(f"gate_kind must be one of {GATE_KINDS}, got {gate_kind!r}")
        self.n_sites = n_sites
        self.gate_kind = gate_kind
        self.seed = seed
        rng = np.random.default_rng(seed)
        layers = []
        for start in (0, 1):
            layer = []
            for i in range(start, n_sites - 1, 2):
                if gate_kind == "cnot":
                    g = CNOT.copy()
                elif gate_kind == "identity":
                    g = np.eye(4, dtype=complex)
                else:
                    g = _haar_unitary(4, rng)
                if op_norm(g.conj().T @ g - np.eye(4)) > TOL_STRUCT:
                    raise ValueError("gate is not unitary")
                g.setflags(write=False)
                layer.append((i, g))
            layers.append(tuple(layer))
        self.layers = tuple(layers)

    @property
    def dim(self):
        return 2 ** self.n_sites

    def __repr__(self):
        return f"LatticeSystem(n_sites={self.n_sites}, gate_kind={self.gate_kind!r}, seed={self.seed})"


def embed_local(sys, a, region):
    """``a`` on ``region`` tensored with the identity elsewhere."""
    region.check(sys.n_sites)
    a = as_matrix(a)
    if a.shape[0] != 2 ** region.size:
        raise ValueError(
            f"operator of dim {a.shape[0]} does not fit region of {region.size} sites")
    left = np.eye(2 ** region.lo)
    right = np.eye(2 ** (sys.n_sites - region.hi - 1))
    return np.kron(np.kron(left, a), right)


def _conjugate(x, gate, site, n):
    """``G x G^dagger`` with ``G`` acting on sites ``site, site+1``."""
    t = x.reshape((2,) * (2 * n))
    g = gate.reshape(2, 2, 2, 2)
    # rows: G_{ab,cd} x_{..cd..}
    t = np.tensordot(g, t, axes=([2, 3], [site, site + 1]))
    t = np.moveaxis(t, [0, 1], [site, site + 1])
    # columns: x_{..,cd..} conj(G)_{ab,cd}
    t = np.tensordot(t, g.conj(), axes=([n + site, n + site + 1], [2, 3]))
    t = np.moveaxis(t, [-2, -1], [n + site, n + site + 1])
    return t.reshape(2 ** n, 2 ** n)


def brickwork_step(sys, x, direction="heisenberg"):
    """Advance ``x`` by one brickwork step.

    With step unitary ``U = U_odd U_even``, the Schroedinger direction
    returns ``U x U^dagger`` and the Heisenberg direction ``U^dagger x U``.
    """
    x = as_matrix(x)
    if x.shape[0] != sys.dim:
        raise ValueError(f"operator dim {x.shape[0]} does not match chain dim {sys.dim}")
    even, odd = sys.layers
    if direction == "schrodinger":
        order = [(i, g) for i, g in even] + [(i, g) for i, g in odd]
    elif direction == "heisenberg":
        order = [(i, g.conj().T) for i, g in odd] + [(i, g.conj().T) for i, g in even]
    else:
        raise ValueError(f"unknown direction {direction!r}")
    for site, g in order:
        x = _conjugate(x, g, site, sys.n_sites)
    return x


def evolve_steps(sys, x, steps, direction="heisenberg"):
    for _ in range(steps):
        x = brickwork_step(sys, x, direction)
    return as_matrix(x)


def lightcone(region, steps, n_sites):
    """Sites an operator on ``region`` can reach in ``steps`` steps."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    region.check(n_sites)
    return LatticeRegion(max(0, region.lo - 2 * steps), min(n_sites - 1, region.hi + 2 * steps))


def partial_trace_site(x, site, n_sites):
    """Normalized partial trace over one site, ``tr_s(x) / 2``."""
    t = as_matrix(x).reshape((2,) * (2 * n_sites))
    red = np.trace(t, axis1=site, axis2=n_sites + site) / 2.0
    m = 2 ** (n_sites - 1)
    return red.reshape(m, m)


def reinsert_identity(x, site, n_sites):
    """Inverse of the partial trace shape-wise: put ``I`` back on ``site``."""
    m = n_sites - 1
    t = as_matrix(x).reshape((2,) * (2 * m))
    full = np.multiply.outer(t, np.eye(2))
    # full axes: rows(0..m-1), cols(m..2m-1), new row, new col
    full = np.moveaxis(full, [2 * m, 2 * m + 1], [site, n_sites + site])
    return full.reshape(2 ** n_sites, 2 ** n_sites)


def support(x, n_sites, tol=1e-10):
    """Sites on which ``x`` acts non-trivially.

    Site ``s`` is outside the support when tracing it out and putting the
    identity back reproduces ``x`` within ``tol``.
    """
    x = as_matrix(x)
    out = []
    for s in range(n_sites):
        back = reinsert_identity(partial_trace_site(x, s, n_sites), s, n_sites)
        if op_norm(back - x) > tol:
            out.append(s)
    return out


@dataclass(frozen=True)
class ShieldingResult:
    delta: float
    spacelike: bool


def shielding_check(sys, w, p_region, p_local, q_region, q_local, steps):
    """Mark on ``p_region``, observable on ``q_region`` evolved ``steps`` steps.

    ``spacelike`` means the observable's light cone never reaches the mark's
    region; in that case ``delta`` vanishes to rounding.
    """
    p = embed_local(sys, p_local, p_region)
    q = evolve_steps(sys, embed_local(sys, q_local, q_region), steps)
    delta = lueders_shift(w, p, q)
    spacelike = not lightcone(q_region, steps, sys.n_sites).intersects(p_region)
    return ShieldingResult(delta=delta, spacelike=spacelike)


@dataclass(frozen=True, eq=False)
class LocalMarkProfile:
    steps: np.ndarray
    omega_q: np.ndarray
    omega_p_q: np.ndarray
    deltas: np.ndarray
    spacelike: np.ndarray

    @property
    def first_contact(self):
        """First step at which the light cones meet, or ``None``."""
        hits = np.flatnonzero(~self.spacelike)
        return int(self.steps[hits[0]]) if len(hits) else None


def local_mark_profile(sys, w, p_region, p_local, q_region, q_local, max_steps):
    """``delta`` at each step ``0 .. max_steps`` of the brickwork evolution."""
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    p = embed_local(sys, p_local, p_region)
    q = embed_local(sys, q_local, q_region)
    w = as_matrix(w)
    w_p = luders_update(w, p).op
    rows, flags = [], []
    for k in range(max_steps + 1):
        if k:
            q = brickwork_step(sys, q)
        om = np.einsum("ij,ji->", w, q).real
        om_p = np.einsum("ij,ji->", w_p, q).real
        rows.append((om, om_p, om - om_p))
        flags.append(not lightcone(q_region, k, sys.n_sites).intersects(p_region))
    om, om_p, deltas = (np.array(c) for c in zip(*rows))
    return LocalMarkProfile(np.arange(max_steps + 1), om, om_p, deltas, np.array(flags))
