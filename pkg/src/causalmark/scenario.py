"""
Scenario configuration, seeded random instances and output files.

Scenarios are JSON documents validated against ``schema/scenario.schema.json``
(shipped with the package, see :data:`SCHEMA_PATH`). Complex numbers are
``[re, im]`` pairs and matrices are lists of rows.
"""

import csv
import json
from dataclasses import asdict, dataclass, fields
from importlib import resources

import jsonschema
import numpy as np

from .dynamics import DynamicalSystem, ProcessInstance
from .localnet import LatticeRegion, LatticeSystem
from .operators import (
    DensityState, Projection, ValidationError, ket_projection, maximally_mixed,
    validate,
)
from .transmission import (
    DEFAULT_N_GRID, DEFAULT_TOL_ZERO, MIN_N_GRID,
)
from .marking import DEFAULT_DETECT_DELTA

SCHEMA_PATH = resources.files("causalmark") / "schema" / "scenario.schema.json"
DEFAULT_N_LIST = (1, 10, 100)
MIN_EIGEN_GAP = 1e-3
RESAMPLE_BUDGET = 1000


class ConfigError(ValueError):
    """A scenario failed to parse; ``field`` is the offending path."""

    def __init__(self, field, message):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class OutputError(OSError):
    def __init__(self, path, reason):
        self.path = str(path)
        super().__init__(f"cannot write {self.path}: {reason}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Parsed scenario. Values are kept in their JSON form; see ``build_*``."""

    kind: str
    dim: int = None
    n_sites: int = None
    hamiltonian: object = None
    gates: dict = None
    state: dict = None
    projection: dict = None
    observable: dict = None
    interval: list = None
    n_grid: int = None
    tol_zero: float = None
    detect_delta: float = None
    max_steps: int = None
    n_list: list = None
    trials: int = None
    seed: int = None

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)
                if getattr(self, f.name) is not None}

    @property
    def t_end(self):
        return None if self.interval is None else float(self.interval[1])

    @property
    def rng_seed(self):
        return 0 if self.seed is None else self.seed


def load_schema():
    return json.loads(SCHEMA_PATH.read_text())


def dump_config(cfg):
    return json.dumps(cfg.to_dict(), indent=2) + "\n"


# -- random instances ---------------------------------------------------------

def random_hamiltonian(dim, rng, nondegenerate=False):
    for _ in range(RESAMPLE_BUDGET):
        g = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
        h = 0.5 * (g + g.conj().T)
        if not nondegenerate or np.min(np.diff(np.linalg.eigvalsh(h))) >= MIN_EIGEN_GAP:
            return h
    raise RuntimeError(f"no Hamiltonian with eigenvalue gaps >= {MIN_EIGEN_GAP} "
                       f"after {RESAMPLE_BUDGET} draws")


def random_state(dim, rng, mixed=False):
    if mixed:
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        w = g @ g.conj().T
        return DensityState(w / np.trace(w).real)
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return DensityState(ket_projection(psi))


def random_projection(dim, rng, rank=None):
    if rank is None:
        rank = int(rng.integers(1, dim)) if dim > 1 else 1
    if not 1 <= rank <= dim:
        raise ValueError(f"rank {rank} out of range for dim {dim}")
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    q, _ = np.linalg.qr(g)
    return Projection(q @ q.conj().T)


def random_observable(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = 0.5 * (g + g.conj().T)
    return h / np.linalg.norm(h, 2)


def random_instance(dim, seed, nondegenerate_spectrum=False, mixed=None, rank=None,
                    observable="random"):
    """Seeded ``(system, state, projection, observable)``.

    Parameters
    ----------
    dim : int
        2 to 16.
    seed : int or numpy.random.SeedSequence
    nondegenerate_spectrum : bool
        Resample ``H`` until neighbouring eigenvalues are at least ``1e-3``
        apart.
    mixed : bool, optional
        Mixed rather than pure state; drawn at random when ``None``.
    rank : int, optional
        Rank of the projection; drawn from ``1 .. dim-1`` when ``None``.
    observable : {"random", "projection"}
        Random Hermitian observable of unit norm, or the projection itself.
    """
    if not 2 <= dim <= 16:
        raise ValueError(f"dim must be in [2, 16], got {dim}")
    rng = np.random.default_rng(seed)
    sys = DynamicalSystem(random_hamiltonian(dim, rng, nondegenerate_spectrum))
    if mixed is None:
        mixed = bool(rng.integers(2))
    w = random_state(dim, rng, mixed)
    p = random_projection(dim, rng, rank)
    if observable == "projection":
        q = p.op
    elif observable == "random":
        q = random_observable(dim, rng)
    else:
        raise ValueError(f"unknown observable mode {observable!r}")
    return sys, w, p, q


# -- parsing ------------------------------------------------------------------

def _complex_matrix(rows, field):
    try:
        arr = np.array(rows, dtype=float)
    except ValueError:
        raise ConfigError(field, "ragged matrix") from None
    if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != 2:
        raise ConfigError(field, f"expected a square matrix of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _complex_vector(items, field):
    arr = np.array(items, dtype=float)
    return arr[:, 0] + 1j * arr[:, 1]


def _check_dim(m, dim, field):
    if m.shape[0] != dim:
        raise ConfigError(field, f"dimension {m.shape[0]} does not match {dim}")


def _hamiltonian(cfg, rng):
    spec = cfg.hamiltonian
    if isinstance(spec, dict):
        return random_hamiltonian(cfg.dim, rng, spec["random"].get("nondegenerate", False))
    h = _complex_matrix(spec, "hamiltonian")
    _check_dim(h, cfg.dim, "hamiltonian")
    try:
        return validate(h, "selfadjoint")
    except ValidationError:
        raise ConfigError("hamiltonian", "not self-adjoint") from None


def _state(spec, dim, rng):
    try:
        if "pure" in spec:
            psi = _complex_vector(spec["pure"], "state.pure")
            if psi.shape[0] != dim:
                raise ConfigError("state.pure", f"dimension {psi.shape[0]} does not match {dim}")
            if np.linalg.norm(psi) == 0:
                raise ConfigError("state.pure", "zero vector")
            return DensityState(ket_projection(psi))
        if "density" in spec:
            w = _complex_matrix(spec["density"], "state.density")
            _check_dim(w, dim, "state.density")
            return validate(w, "density")
        if "maximally_mixed" in spec:
            return maximally_mixed(dim)
        return random_state(dim, rng, spec["random"] == "mixed")
    except ValidationError as exc:
        raise ConfigError("state", str(exc)) from None


def _operator(spec, dim, rng, field, kind):
    if "random_rank" in spec:
        if spec["random_rank"] > dim:
            raise ConfigError(f"{field}.random_rank", f"rank exceeds dimension {dim}")
        p = random_projection(dim, rng, spec["random_rank"])
        return p if kind == "projection" else p.op
    if "rank_one" in spec:
        psi = _complex_vector(spec["rank_one"], f"{field}.rank_one")
        if psi.shape[0] != dim:
            raise ConfigError(f"{field}.rank_one", f"dimension {psi.shape[0]} does not match {dim}")
        if np.linalg.norm(psi) == 0:
            raise ConfigError(f"{field}.rank_one", "zero vector")
        m = ket_projection(psi)
    else:
        m = _complex_matrix(spec["matrix"], f"{field}.matrix")
        _check_dim(m, dim, f"{field}.matrix")
    if kind is None:
        return m
    try:
        return validate(m, kind)
    except ValidationError as exc:
        raise ConfigError(field, f"not a valid {kind}: {exc.invariant} violated") from None


@dataclass(frozen=True, eq=False)
class ContinuumScenario:
    system: DynamicalSystem
    instance: ProcessInstance
    projection: Projection
    t_end: float
    n_grid: int
    tol_zero: float
    detect_delta: float


@dataclass(frozen=True, eq=False)
class LatticeScenario:
    system: LatticeSystem
    state: DensityState
    p_region: LatticeRegion
    p_local: Projection
    q_region: LatticeRegion
    q_local: np.ndarray
    max_steps: int


@dataclass(frozen=True, eq=False)
class SmearScenario:
    system: DynamicalSystem
    operator: np.ndarray
    n_list: tuple


def build_continuum(cfg):
    rng = np.random.default_rng(cfg.rng_seed)
    if cfg.interval[0] != 0:
        raise ConfigError("interval", "interval must start at 0")
    if not cfg.t_end > 0:
        raise ConfigError("interval", "t_end must be positive")
    n_grid = DEFAULT_N_GRID if cfg.n_grid is None else cfg.n_grid
    if n_grid < MIN_N_GRID:
        raise ConfigError("n_grid", f"must be >= {MIN_N_GRID}")
    for name in ("projection", "observable"):
        if "region" in getattr(cfg, name):
            raise ConfigError(f"{name}.region", "regions only apply to lattice scenarios")
    h = _hamiltonian(cfg, rng)
    w = _state(cfg.state, cfg.dim, rng)
    p = _operator(cfg.projection, cfg.dim, rng, "projection", "projection")
    q = _operator(cfg.observable, cfg.dim, rng, "observable", "selfadjoint")
    sys = DynamicalSystem(h)
    return ContinuumScenario(
        system=sys, instance=ProcessInstance(sys, w, q), projection=p, t_end=cfg.t_end,
        n_grid=n_grid,
        tol_zero=DEFAULT_TOL_ZERO if cfg.tol_zero is None else cfg.tol_zero,
        detect_delta=DEFAULT_DETECT_DELTA if cfg.detect_delta is None else cfg.detect_delta)


def _region(spec, n_sites, field):
    lo, hi = spec["region"]
    if not lo <= hi < n_sites:
        raise ConfigError(f"{field}.region", f"[{lo}, {hi}] is not an interval of {n_sites} sites")
    return LatticeRegion(lo, hi)


def build_lattice(cfg):
    rng = np.random.default_rng(cfg.rng_seed)
    if cfg.max_steps < 1:
        raise ConfigError("max_steps", "must be >= 1")
    sys = LatticeSystem(cfg.n_sites, cfg.gates["kind"], cfg.rng_seed)
    w = _state(cfg.state, sys.dim, rng)
    p_region = _region(cfg.projection, cfg.n_sites, "projection")
    q_region = _region(cfg.observable, cfg.n_sites, "observable")
    p = _operator(cfg.projection, 2 ** p_region.size, rng, "projection", "projection")
    q = _operator(cfg.observable, 2 ** q_region.size, rng, "observable", "selfadjoint")
    return LatticeScenario(sys, w, p_region, p, q_region, q, cfg.max_steps)


def build_smear(cfg, n_list=None):
    rng = np.random.default_rng(cfg.rng_seed)
    if n_list is None:
        n_list = DEFAULT_N_LIST if cfg.n_list is None else cfg.n_list
    n_list = tuple(n_list)
    if not n_list:
        raise ConfigError("n_list", "empty")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigError("n_list", "must be strictly increasing")
    if "region" in cfg.observable:
        raise ConfigError("observable.region", "regions only apply to lattice scenarios")
    h = _hamiltonian(cfg, rng)
    a = _operator(cfg.observable, cfg.dim, rng, "observable", None)
    return SmearScenario(DynamicalSystem(h), a, n_list)


def _check_verify(cfg):
    if cfg.trials < 1:
        raise ConfigError("trials", "must be >= 1")


def build(cfg):
    if cfg.kind == "continuum":
        return build_continuum(cfg)
    if cfg.kind == "lattice":
        return build_lattice(cfg)
    if cfg.kind == "smear":
        return build_smear(cfg)
    _check_verify(cfg)
    return None


def parse_config(text):
    """Parse and fully validate a scenario.

    Raises
    ------
    ConfigError
        On a JSON syntax error (field ``<document>``), a schema violation or
        an operator that fails validation, naming the offending field.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<document>", f"syntax error: {exc}") from None
    validator = jsonschema.Draft202012Validator(load_schema())
    err = jsonschema.exceptions.best_match(validator.iter_errors(data))
    if err is not None:
        path = ".".join(str(p) for p in err.absolute_path) or "<document>"
        raise ConfigError(path, err.message)
    cfg = ScenarioConfig(**data)
    build(cfg)
    return cfg


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# -- outputs -------------------------------------------------------------------

CSV_HEADER = ("t", "omega_Q", "omegaP_Q", "delta")


def _fmt(x):
    return format(float(x), ".17g")


def _open_for_write(path):
    try:
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise OutputError(path, exc.strerror or str(exc)) from None


def write_profile_csv(prof, path):
    """Write a continuum or lattice profile as ``t,omega_Q,omegaP_Q,delta``."""
    if hasattr(prof, "grid"):
        cols = (prof.grid, prof.omega_q, prof.omega_p_q, prof.values)
    else:
        cols = (prof.steps, prof.omega_q, prof.omega_p_q, prof.deltas)
    with _open_for_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in zip(*cols):
            writer.writerow([_fmt(v) for v in row])


def write_convergence_csv(table, path):
    with _open_for_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("n", "error_norm"))
        for n, err in table:
            writer.writerow([str(n), _fmt(err)])


def write_report(report, path):
    """Write a report mapping as indented JSON."""
    with _open_for_write(path) as fh:
        fh.write(json.dumps(report, indent=2) + "\n")


def emit_outputs(obj, path):
    """Dispatch on the output type: profile, convergence table or report."""
    if isinstance(obj, dict):
        write_report(obj, path)
    elif isinstance(obj, list):
        write_convergence_csv(obj, path)
    else:
        write_profile_csv(obj, path)


def _zero_dict(z):
    return asdict(z)


def continuum_report(cfg, prof, witness, ground, residual):
    return {
        "config": cfg.to_dict(),
        "classification": str(prof.classification),
        "zeros": [_zero_dict(z) for z in prof.zeros],
        "identically_zero": prof.identically_zero,
        "prop11_witness": {
            "status": witness.status, "count": witness.count,
            "fraction": witness.fraction, "pass": witness.passed,
        },
        "ground_energy": ground,
        "lemma_identity_max_residual": residual,
    }


def lattice_report(cfg, lprof):
    spacelike = lprof.spacelike
    leak = float(np.max(np.abs(lprof.deltas[spacelike]), initial=0.0))
    return {
        "config": cfg.to_dict(),
        "classification": None,
        "first_contact_step": lprof.first_contact,
        "spacelike_steps": [int(s) for s in lprof.steps[spacelike]],
        "max_spacelike_delta": leak,
        "shielding_holds": leak <= 1e-12,
        "deltas": [float(d) for d in lprof.deltas],
    }
