"""
Mark-transmission profiles.

A profile samples ``delta(t)`` on ``[0, t_end]``, locates the stages where the
mark disappears and classifies the transmission:

* ``Continuous`` -- manifested at every ``t`` in ``(0, t_end]``;
* ``CSIP`` -- manifested except at isolated points;
* ``NeverManifested`` -- ``delta`` vanishes on the whole grid;
* ``NotManifestAtEnd`` -- ``|delta(t_end)|`` is below the detection threshold;
* ``Indeterminate`` -- two zeros with no grid sample separating them.

At finite dimension ``delta`` is a trigonometric polynomial whose frequencies
are differences of energy levels, so its zeros on a bounded interval are
either finitely many or everything.
"""

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .dynamics import ground_energy
from .marking import DEFAULT_DETECT_DELTA, luders_update
from .operators import as_matrix, double_commutator, op_norms

DEFAULT_N_GRID = 4096
DEFAULT_TOL_ZERO = 1e-9
DEFAULT_REFINE_TOL = 1e-10
MIN_N_GRID = 16

IDENTICALLY_ZERO = "identically-zero-on-grid"


class Classification(str, enum.Enum):
    CONTINUOUS = "Continuous"
    CSIP = "CSIP"
    NEVER_MANIFESTED = "NeverManifested"
    NOT_MANIFEST_AT_END = "NotManifestAtEnd"
    INDETERMINATE = "Indeterminate"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Zero:
    location: float
    kind: str  # "sign-change" or "tangential"


@dataclass(frozen=True, eq=False)
class TransmissionProfile:
    instance: object
    projection: object
    t_end: float
    grid: np.ndarray
    omega_q: np.ndarray
    omega_p_q: np.ndarray
    values: np.ndarray
    tol_zero: float
    refine_tol: float
    detect_delta: float
    zeros: tuple
    classification: Classification
    identically_zero: bool = False

    @property
    def n_grid(self):
        return len(self.grid)

    @property
    def gap_min(self):
        return 2.0 * self.t_end / self.n_grid

    def lemma_residual(self):
        """Largest gap between ``values`` and ``tr(W [P, [P, tau_t(Q)]])`` on the grid."""
        inst = self.instance
        q_ts = inst.system.evolve_many(inst.observable, self.grid)
        p = as_matrix(self.projection)
        dc = np.stack([double_commutator(p, q) for q in q_ts])
        alt = np.einsum("ij,nji->n", inst.state.op, dc).real
        return float(np.max(np.abs(alt - self.values)))


def delta_function(inst, p):
    """Scalar ``t -> delta(t)`` with the Lueders update precomputed."""
    sys = inst.system
    w = inst.state.op
    w_p = luders_update(inst.state, p).op
    q_eig = sys.to_eigenbasis(inst.observable)
    w_eig = sys.to_eigenbasis(w)
    wp_eig = sys.to_eigenbasis(w_p)
    evals = sys.eigenvalues

    def f(t):
        ph = np.exp(-1j * evals * t)
        q_t = ph[:, None] * q_eig * ph.conj()[None, :]
        return float(np.einsum("ij,ji->", w_eig, q_t).real
                     - np.einsum("ij,ji->", wp_eig, q_t).real)

    return f


def sample_delta(inst, p, grid):
    """``(omega_Q, omegaP_Q, delta)`` arrays over ``grid``."""
    w = inst.state.op
    w_p = luders_update(inst.state, p).op
    q_ts = inst.system.evolve_many(inst.observable, grid)
    omega_q = np.einsum("ij,nji->n", w, q_ts).real
    omega_p_q = np.einsum("ij,nji->n", w_p, q_ts).real
    return omega_q, omega_p_q, omega_q - omega_p_q


def _runs(mask):
    """Maximal runs ``(lo, hi)`` of True entries in a boolean array."""
    out = []
    i, n = 0, len(mask)
    while i < n:
        if mask[i]:
            j = i
            while j + 1 < n and mask[j + 1]:
                j += 1
            out.append((i, j))
            i = j + 1
        else:
            i += 1
    return out


def _min_abs(func, a, b, refine_tol):
    res = optimize.minimize_scalar(
        lambda t: abs(func(t)), bounds=(a, b), method="bounded",
        options={"xatol": refine_tol})
    return float(res.x), abs(func(res.x))


def find_zeros(grid, values, tol_zero=DEFAULT_TOL_ZERO, refine_tol=DEFAULT_REFINE_TOL,
               func=None):
    """Locate the zeros of a sampled function.

    Sign changes between neighbouring samples are refined by bisection to
    ``refine_tol``. Local minima of ``|values|`` with no sign change are
    refined by bounded scalar minimization and kept as tangential zeros when
    the refined value is within ``tol_zero``.

    Parameters
    ----------
    grid, values : array_like
        Sample locations (strictly increasing) and function values.
    tol_zero : float
        Values with ``|v| <= tol_zero`` count as zero.
    refine_tol : float
        Target bracket width for refinement.
    func : callable, optional
        The sampled function, evaluated during refinement. Without it,
        sign changes are located by linear interpolation and tangential zeros
        at the best grid point.

    Returns
    -------
    list of Zero or str
        Sorted zeros, or ``IDENTICALLY_ZERO`` if every sample is within
        ``tol_zero``.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.shape != values.shape:
        raise ValueError("grid and values must have the same length")
    small = np.abs(values) <= tol_zero
    if np.all(small):
        return IDENTICALLY_ZERO
    n = len(grid)
    h = (grid[-1] - grid[0]) / max(n - 1, 1)
    lo_t, hi_t = grid[0], grid[-1]
    found = []

    def bracket(a, b, fa, fb):
        if func is None:
            return a - fa * (b - a) / (fb - fa)
        return optimize.bisect(func, a, b, xtol=refine_tol)

    for lo, hi in _runs(small):
        if func is None:
            k = lo + int(np.argmin(np.abs(values[lo:hi + 1])))
            left_sign = np.sign(values[lo - 1]) if lo > 0 else 0
            right_sign = np.sign(values[hi + 1]) if hi < n - 1 else 0
            kind = "sign-change" if left_sign * right_sign < 0 else "tangential"
            found.append(Zero(float(grid[k]), kind))
            continue
        a = grid[lo - 1] if lo > 0 else grid[0] - h
        b = grid[hi + 1] if hi < n - 1 else grid[-1] + h
        fa = values[lo - 1] if lo > 0 else func(a)
        fb = values[hi + 1] if hi < n - 1 else func(b)
        if fa * fb < 0:
            loc, kind = bracket(a, b, fa, fb), "sign-change"
        else:
            loc, _ = _min_abs(func, a, b, refine_tol)
            kind = "tangential"
        found.append(Zero(float(np.clip(loc, lo_t, hi_t)), kind))

    for i in range(n - 1):
        if small[i] or small[i + 1]:
            continue
        if values[i] * values[i + 1] < 0:
            found.append(Zero(float(bracket(grid[i], grid[i + 1], values[i], values[i + 1])),
                              "sign-change"))

    av = np.abs(values)
    for i in range(1, n - 1):
        if small[i - 1] or small[i] or small[i + 1]:
            continue
        if not (av[i] <= av[i - 1] and av[i] <= av[i + 1]):
            continue
        if not (values[i - 1] * values[i] > 0 and values[i] * values[i + 1] > 0):
            continue
        if func is None:
            continue
        loc, val = _min_abs(func, grid[i - 1], grid[i + 1], refine_tol)
        if val <= tol_zero:
            found.append(Zero(loc, "tangential"))

    found.sort(key=lambda z: z.location)
    merged = []
    for z in found:
        if merged and z.location - merged[-1].location <= 2 * refine_tol:
            if merged[-1].kind == "tangential" and z.kind == "sign-change":
                merged[-1] = z
            continue
        merged.append(z)
    return merged


def classify(grid, values, zeros, detect_delta=DEFAULT_DETECT_DELTA,
             tol_zero=DEFAULT_TOL_ZERO, refine_tol=DEFAULT_REFINE_TOL):
    """Assign a :class:`Classification` to a sampled profile.

    ``zeros`` is the output of :func:`find_zeros`. Consecutive zeros count as
    isolated when they are more than two grid spacings apart, or when a grid
    sample strictly between them is non-zero. The zero that every profile
    with ``P = Q`` has at ``t = 0`` takes part in that check but does not by
    itself break continuity on ``(0, t_end]``.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    t_end = grid[-1]
    positive = grid > 0
    if isinstance(zeros, str) or np.max(np.abs(values[positive]), initial=0.0) <= tol_zero:
        return Classification.NEVER_MANIFESTED
    if abs(values[-1]) < detect_delta:
        return Classification.NOT_MANIFEST_AT_END
    interior = [z for z in zeros if z.location > grid[0] + 2 * refine_tol]
    if not interior:
        return Classification.CONTINUOUS
    gap_min = 2.0 * (t_end - grid[0]) / len(grid)
    locs = [z.location for z in zeros]
    for a, b in zip(locs, locs[1:]):
        if b - a > gap_min:
            continue
        # closer than the grid resolves, but a non-vanishing sample in between
        # still separates them
        between = (grid > a) & (grid < b)
        if not np.any(np.abs(values[between]) > tol_zero):
            return Classification.INDETERMINATE
    return Classification.CSIP


def profile(inst, p, t_end, n_grid=DEFAULT_N_GRID, tol_zero=DEFAULT_TOL_ZERO,
            refine_tol=DEFAULT_REFINE_TOL, detect_delta=DEFAULT_DETECT_DELTA, grid=None):
    """Sample, locate zeros and classify the manifestation of mark ``p``.

    Parameters
    ----------
    inst : ProcessInstance
    p : Projection
    t_end : float
        Right end of the interval ``[0, t_end]``.
    n_grid : int
        Number of uniform grid points (at least 16).
    grid : array_like, optional
        Explicit grid; must start at 0, end at ``t_end`` and increase
        strictly. Overrides ``n_grid``.

    Returns
    -------
    TransmissionProfile
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if grid is None:
        if int(n_grid) != n_grid or n_grid < MIN_N_GRID:
            raise ValueError(f"n_grid must be an integer >= {MIN_N_GRID}, got {n_grid}")
        grid = np.linspace(0.0, t_end, int(n_grid))
    else:
        grid = np.array(grid, dtype=float)
        if (grid.ndim != 1 or len(grid) < 2 or grid[0] != 0.0 or grid[-1] != t_end
                or np.any(np.diff(grid) <= 0)):
            raise ValueError("grid must increase strictly from 0 to t_end")
    if p.dim != inst.dim:
        raise ValueError(f"dimension mismatch: instance {inst.dim}, projection {p.dim}")
    omega_q, omega_p_q, values = sample_delta(inst, p, grid)
    zeros = find_zeros(grid, values, tol_zero, refine_tol, func=delta_function(inst, p))
    cls = classify(grid, values, zeros, detect_delta, tol_zero, refine_tol)
    flat = isinstance(zeros, str)
    for arr in (grid, omega_q, omega_p_q, values):
        arr.setflags(write=False)
    return TransmissionProfile(
        instance=inst, projection=p, t_end=float(t_end), grid=grid,
        omega_q=omega_q, omega_p_q=omega_p_q, values=values,
        tol_zero=tol_zero, refine_tol=refine_tol, detect_delta=detect_delta,
        zeros=() if flat else tuple(zeros), classification=cls, identically_zero=flat)


@dataclass(frozen=True)
class Prop11Witness:
    """Grid-count stand-in for "manifested at infinitely many stages"."""

    applicable: bool
    count: int = 0
    fraction: float = 0.0
    passed: bool = False
    reason: str = ""

    @property
    def status(self):
        if not self.applicable:
            return "NotApplicable"
        return "pass" if self.passed else "fail"


def prop11_witness(prof, detect_delta):
    """Count grid stages in ``(0, t_end]`` where the mark is detectable.

    The witness passes when the count reaches ``max(10, n_grid / 10)``.
    Profiles that never manifest, or are not manifest at ``t_end``, are
    reported as not applicable.
    """
    if prof.classification == Classification.NEVER_MANIFESTED:
        return Prop11Witness(False, reason="mark never manifested")
    if abs(prof.values[-1]) < detect_delta:
        return Prop11Witness(False, reason="mark not manifested at t_end")
    positive = prof.grid > 0
    hits = np.abs(prof.values[positive]) >= detect_delta
    count = int(np.count_nonzero(hits))
    fraction = count / int(np.count_nonzero(positive))
    return Prop11Witness(True, count, fraction, count >= max(10, prof.n_grid / 10))


@dataclass
class Lemma10Report:
    trials: int
    nonvacuous: int = 0
    vacuous: int = 0
    counterexamples: list = field(default_factory=list)
    by_construction: dict = field(default_factory=dict)
    ground_energy: float = 0.0

    @property
    def passed(self):
        return not self.counterexamples


LEMMA10_CONSTRUCTIONS = ("random", "eigen", "eigen-complement")


def _split_projections(vecs, rng):
    d = vecs.shape[1]
    order = rng.permutation(d)
    k = int(rng.integers(1, d))          # E gets k vectors, F at least one of the rest
    m = int(rng.integers(1, d - k + 1))
    e_cols, f_cols = order[:k], order[k:k + m]
    e = vecs[:, e_cols] @ vecs[:, e_cols].conj().T
    f = vecs[:, f_cols] @ vecs[:, f_cols].conj().T
    return e, f


def _random_unitary(d, rng):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def lemma10_falsifier(sys, trials, eps=0.1, seed=0, premise_points=31,
                      conclusion_points=801, horizon=20.0,
                      premise_tol=1e-9, conclusion_tol=1e-8):
    """Search for orthogonal projections that break the commutation lemma.

    Each trial draws projections ``E, F`` with ``E F = 0``. If
    ``[tau_t(E), F]`` vanishes on ``[-eps, eps]`` (the premise), the trial
    checks that ``tau_t(E) F`` vanishes on ``[-horizon, horizon]``.

    Trials cycle through three constructions: spans of disjoint eigenvectors
    of a random Hermitian matrix (premise almost never holds), spans of
    disjoint eigenvectors of ``H`` itself, and an ``H``-invariant ``E`` with
    a random ``F`` inside its complement (premise always holds).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if sys.dim < 2:
        raise ValueError("need dim >= 2 for a pair of nonzero orthogonal projections")
    rng = np.random.default_rng(seed)
    d = sys.dim
    t_prem = np.linspace(-eps, eps, premise_points)
    t_conc = np.linspace(-horizon, horizon, conclusion_points)
    report = Lemma10Report(trials=trials, ground_energy=ground_energy(sys))
    for k in range(trials):
        kind = LEMMA10_CONSTRUCTIONS[k % len(LEMMA10_CONSTRUCTIONS)]
        if kind == "random":
            g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            _, vecs = np.linalg.eigh(g + g.conj().T)
            e, f = _split_projections(vecs, rng)
        elif kind == "eigen":
            e, f = _split_projections(sys.eigenvectors, rng)
        else:
            e, _ = _split_projections(sys.eigenvectors, rng)
            vals, basis = np.linalg.eigh(np.eye(d) - e)
            comp_basis = basis[:, vals > 0.5]
            r = comp_basis.shape[1]
            u = _random_unitary(r, rng)
            m = int(rng.integers(1, r + 1))
            cols = comp_basis @ u[:, :m]
            f = cols @ cols.conj().T
        tally = report.by_construction.setdefault(kind, {"nonvacuous": 0, "vacuous": 0})
        e_prem = sys.evolve_many(e, t_prem)
        if np.max(op_norms(e_prem @ f - f @ e_prem)) > premise_tol:
            report.vacuous += 1
            tally["vacuous"] += 1
            continue
        report.nonvacuous += 1
        tally["nonvacuous"] += 1
        worst = float(np.max(op_norms(sys.evolve_many(e, t_conc) @ f)))
        if worst > conclusion_tol:
            report.counterexamples.append({"trial": k, "construction": kind, "residual": worst})
    return report
