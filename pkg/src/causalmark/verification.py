"""
Seeded property suites.

Every structural property of the package has an entry in :data:`SUITES`.
Each suite takes a ``numpy.random.Generator`` and a trial count and returns a
:class:`SuiteResult`; results depend only on the seed.
"""

import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from . import analytic, localnet, scenario, transmission
from .dynamics import DynamicalSystem, ProcessInstance, heisenberg
from .marking import (
    ClassicalChannel, classical_channel_update, luders_update, lueders_shift,
    mark_delta,
)
from .operators import (
    SIGMA_Y, Projection, commutator, double_commutator, expectation,
    ket_projection, op_norm, pure_state,
)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    trials: int
    max_residual: float
    detail: str = ""

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{flag} {self.name}: trials={self.trials} max_residual={self.max_residual:.3e}{extra}"


def _dims(rng, lo=2, hi=6):
    return int(rng.integers(lo, hi + 1))


def _instance(rng, dim=None, **kw):
    dim = _dims(rng) if dim is None else dim
    return scenario.random_instance(dim, rng.integers(2**63), **kw)


def _random_operator(rng, d):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def _commuting_pair(rng, d):
    """A projection and a self-adjoint operator with a shared eigenbasis."""
    _, v = np.linalg.eigh(scenario.random_hamiltonian(d, rng))
    mask = np.zeros(d)
    mask[rng.permutation(d)[: int(rng.integers(1, d))]] = 1
    p = (v * mask) @ v.conj().T
    q = (v * rng.normal(size=d)) @ v.conj().T
    return Projection(p), q


def expanded_lueders_expectation(w, p, q):
    """``tr(W_P Q)`` from ``W_P = W - P W - W P + 2 P W P``, term by term.

    Independent of the double-commutator code path: each term is an explicit
    index contraction.
    """
    w, p, q = (np.asarray(x, dtype=complex) for x in (w, p, q))
    t0 = np.einsum("ij,ji->", w, q)
    t1 = np.einsum("ij,jk,ki->", p, w, q)
    t2 = np.einsum("ij,jk,ki->", w, p, q)
    t3 = np.einsum("ij,jk,kl,li->", p, w, p, q)
    return complex(t0 - t1 - t2 + 2.0 * t3)


# -- operators -------------------------------------------------------------------

def suite_commutator_antisymmetry(rng, trials):
    worst = 0.0
    for _ in range(trials):
        d = _dims(rng)
        a, b = _random_operator(rng, d), _random_operator(rng, d)
        worst = max(worst, op_norm(commutator(a, b) + commutator(b, a)))
    return SuiteResult("operators.commutator_antisymmetry", worst <= 1e-9, trials, worst)


def suite_double_commutator_nested(rng, trials):
    worst = 0.0
    for _ in range(trials):
        d = _dims(rng)
        p = scenario.random_projection(d, rng)
        q = _random_operator(rng, d)
        nested = commutator(p, commutator(p, q))
        worst = max(worst, float(np.max(np.abs(double_commutator(p, q) - nested))))
    return SuiteResult("operators.double_commutator_nested", worst <= 1e-9, trials, worst)


def suite_expectation_real(rng, trials):
    worst = 0.0
    for _ in range(trials):
        d = _dims(rng)
        w = scenario.random_state(d, rng, mixed=bool(rng.integers(2)))
        a = scenario.random_observable(d, rng) * rng.uniform(0.1, 10)
        worst = max(worst, abs(expectation(w, a).imag))
    return SuiteResult("operators.expectation_real", worst <= 1e-9, trials, worst)


def suite_expectation_bounded(rng, trials):
    worst = -np.inf
    for _ in range(trials):
        d = _dims(rng)
        w = scenario.random_state(d, rng, mixed=bool(rng.integers(2)))
        a = _random_operator(rng, d)
        worst = max(worst, abs(expectation(w, a)) - op_norm(a))
    return SuiteResult("operators.expectation_bounded", worst <= 1e-9, trials, max(worst, 0.0),
                       f"max |tr(WA)| - ||A|| = {worst:.3e}")


def suite_double_commutator_iff_commutator(rng, trials, tol=1e-9):
    violations = 0
    worst = 0.0
    for k in range(trials):
        d = _dims(rng)
        if k % 3 == 0:
            p, q = _commuting_pair(rng, d)
        else:
            p = scenario.random_projection(d, rng)
            q = scenario.random_observable(d, rng)
            if k % 3 == 2:
                # near-commuting: a small perturbation of a commuting pair
                p0, q0 = _commuting_pair(rng, d)
                p, q = p0, q0 + 10.0 ** rng.uniform(-12, -4) * q
        c = op_norm(commutator(p, q))
        dc = op_norm(double_commutator(p, q))
        worst = max(worst, abs(c - dc))
        if (c <= tol) != (dc <= tol):
            violations += 1
    return SuiteResult("operators.double_commutator_iff_commutator", violations == 0, trials,
                       worst, f"violations={violations}")


# -- dynamics ---------------------------------------------------------------------

def _sys_and_op(rng):
    d = _dims(rng)
    return DynamicalSystem(scenario.random_hamiltonian(d, rng)), _random_operator(rng, d)


def suite_group_law(rng, trials):
    worst = 0.0
    for _ in range(trials):
        sys, a = _sys_and_op(rng)
        s, t = rng.uniform(-10, 10, size=2)
        lhs = heisenberg(sys, heisenberg(sys, a, t), s)
        worst = max(worst, op_norm(lhs - heisenberg(sys, a, s + t)))
    return SuiteResult("dynamics.group_law", worst <= 1e-8, trials, worst)


def suite_isometry(rng, trials):
    worst = 0.0
    for _ in range(trials):
        sys, a = _sys_and_op(rng)
        t = rng.uniform(-10, 10)
        worst = max(worst, abs(op_norm(heisenberg(sys, a, t)) - op_norm(a)))
    return SuiteResult("dynamics.isometry", worst <= 1e-8, trials, worst)


def suite_star_homomorphism(rng, trials):
    worst = 0.0
    for _ in range(trials):
        sys, a = _sys_and_op(rng)
        b = _random_operator(rng, sys.dim)
        t = rng.uniform(-10, 10)
        ta, tb = heisenberg(sys, a, t), heisenberg(sys, b, t)
        worst = max(worst,
                    op_norm(heisenberg(sys, a @ b, t) - ta @ tb),
                    op_norm(heisenberg(sys, a.conj().T, t) - ta.conj().T))
    return SuiteResult("dynamics.star_homomorphism", worst <= 1e-8, trials, worst)


def suite_norm_continuity(rng, trials):
    worst = -np.inf
    for _ in range(trials):
        sys, a = _sys_and_op(rng)
        t = rng.uniform(-10, 10)
        h = 10.0 ** rng.uniform(-6, 0)
        change = op_norm(heisenberg(sys, a, t + h) - heisenberg(sys, a, t))
        bound = 2 * op_norm(sys.hamiltonian) * op_norm(a) * h
        worst = max(worst, change - bound)
    return SuiteResult("dynamics.norm_continuity", worst <= 1e-8, trials, max(worst, 0.0))


# -- marking ----------------------------------------------------------------------

def suite_luders_idempotent(rng, trials):
    worst = 0.0
    for _ in range(trials):
        _, w, p, _ = _instance(rng)
        once = luders_update(w, p)
        worst = max(worst, op_norm(luders_update(once, p).op - once.op))
    return SuiteResult("marking.luders_idempotent", worst <= 1e-9, trials, worst)


def suite_lueders_identity(rng, trials):
    """``tr(W_P Q) = tr(W Q) - tr(W [P,[P,Q]])``, against the expanded oracle first."""
    oracle_worst = worst = 0.0
    for _ in range(trials):
        _, w, p, q = _instance(rng)
        wp = luders_update(w, p)
        direct = expectation(wp, q)
        oracle_worst = max(oracle_worst, abs(direct - expanded_lueders_expectation(w.op, p.op, q)))
        ident = expectation(w, q) - expectation(w, double_commutator(p, q))
        worst = max(worst, abs(direct - ident))
    top = max(worst, oracle_worst)
    return SuiteResult("marking.lueders_identity", top <= 1e-8, trials, top,
                       f"oracle residual {oracle_worst:.2e}")


def suite_invariance_quantified(rng, trials, n_states=64):
    violations = 0
    nonvacuous = 0
    worst = 0.0
    for k in range(trials):
        d = _dims(rng)
        if k % 2 == 0:
            p, q = _commuting_pair(rng, d)
        else:
            p = scenario.random_projection(d, rng)
            q = scenario.random_observable(d, rng)
        c = op_norm(commutator(p, q))
        shifts = [abs(lueders_shift(scenario.random_state(d, rng), p, q)) for _ in range(n_states)]
        if c <= 1e-12:
            nonvacuous += 1
            worst = max(worst, max(shifts))
            violations += max(shifts) > 1e-9
        elif c > 1e-6:
            nonvacuous += 1
            violations += max(shifts) <= 1e-9
    return SuiteResult("marking.invariance_quantified", violations == 0, trials, worst,
                       f"violations={violations}, decided={nonvacuous}")


def suite_delta_bound(rng, trials):
    worst = -np.inf
    for _ in range(trials):
        sys, w, p, q = _instance(rng)
        inst = ProcessInstance(sys, w, q)
        t = rng.uniform(-10, 10)
        delta = mark_delta(inst, p, t, verify=True)
        dc = op_norm(double_commutator(p, heisenberg(sys, q, t)))
        worst = max(worst, abs(delta) - dc, dc - 4 * op_norm(q))
    return SuiteResult("marking.delta_bound", worst <= 1e-9, trials, max(worst, 0.0))


def suite_channel_simplex(rng, trials):
    worst = 0.0
    for _ in range(trials):
        n = _dims(rng)
        t = rng.uniform(size=(n, n))
        ch = ClassicalChannel(t / t.sum(axis=0))
        prob = rng.dirichlet(np.ones(n))
        out = classical_channel_update(prob, ch)
        worst = max(worst, abs(out.sum() - 1.0), float(max(0.0, -out.min())))
    return SuiteResult("marking.channel_simplex", worst <= 1e-9, trials, worst)


# -- transmission -----------------------------------------------------------------

def _f1():
    sys = DynamicalSystem(SIGMA_Y)
    p0 = ket_projection([1, 0])
    return ProcessInstance(sys, pure_state([1, 1]), p0), Projection(p0)


def suite_profile_identity(rng, trials, n_grid=256):
    worst = 0.0
    for _ in range(trials):
        sys, w, p, q = _instance(rng, dim=_dims(rng, 2, 4))
        prof = transmission.profile(ProcessInstance(sys, w, q), p, rng.uniform(1, 10), n_grid)
        worst = max(worst, prof.lemma_residual())
    return SuiteResult("transmission.profile_identity", worst <= 1e-8, trials, worst)


def suite_no_indeterminate(rng, trials, n_grid=transmission.DEFAULT_N_GRID):
    counts = {}
    for _ in range(trials):
        sys, w, p, _ = _instance(rng, dim=_dims(rng, 2, 4), nondegenerate_spectrum=True,
                                 observable="projection")
        prof = transmission.profile(ProcessInstance(sys, w, p.op), p, rng.uniform(1, 10), n_grid)
        key = str(prof.classification)
        counts[key] = counts.get(key, 0) + 1
    bad = counts.get("Indeterminate", 0)
    detail = ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    return SuiteResult("transmission.no_indeterminate", bad == 0, trials, float(bad), detail)


def suite_zero_refinement(rng, trials):
    inst, p = _f1()
    prof = transmission.profile(inst, p, 5 * np.pi / 4)
    interior = [z.location for z in prof.zeros if z.location > 0]
    expected = [np.pi / 2, np.pi]
    if len(interior) != len(expected):
        return SuiteResult("transmission.zero_refinement", False, 1, np.inf,
                           f"found {interior}")
    worst = max(abs(a - b) for a, b in zip(interior, expected))
    return SuiteResult("transmission.zero_refinement", worst <= 1e-6, 1, worst)


def suite_profile_deterministic(rng, trials):
    same = True
    n = max(1, trials)
    for _ in range(n):
        seed = int(rng.integers(2**31))
        runs = []
        for _ in range(2):
            sys, w, p, q = scenario.random_instance(3, seed)
            prof = transmission.profile(ProcessInstance(sys, w, q), p, 5.0, 128)
            runs.append((prof.values.tobytes(), tuple(prof.zeros), prof.classification))
        same &= runs[0] == runs[1]
    return SuiteResult("transmission.profile_deterministic", bool(same), n, 0.0 if same else 1.0)


def suite_lemma10_falsifier(rng, trials, per_system=5):
    counter = vacuous = nonvac = 0
    for k in range(-(-trials // per_system)):
        d = 2 + k % 5
        sys = DynamicalSystem(scenario.random_hamiltonian(d, rng))
        rep = transmission.lemma10_falsifier(sys, per_system, seed=int(rng.integers(2**31)))
        counter += len(rep.counterexamples)
        vacuous += rep.vacuous
        nonvac += rep.nonvacuous
    ok = counter == 0 and nonvac > 0
    return SuiteResult("transmission.lemma10_falsifier", ok, trials, float(counter),
                       f"nonvacuous={nonvac}, vacuous={vacuous}")


# -- analytic ---------------------------------------------------------------------

def suite_smear_selfadjoint(rng, trials):
    worst = 0.0
    for _ in range(trials):
        d = _dims(rng, 2, 4)
        sys = DynamicalSystem(scenario.random_hamiltonian(d, rng))
        a = scenario.random_observable(d, rng)
        s = analytic.gaussian_smear(sys, a, int(rng.integers(1, 100))).smeared
        worst = max(worst, op_norm(s - s.conj().T))
    return SuiteResult("analytic.smear_selfadjoint", worst <= analytic.QUAD_TOL, trials, worst)


def suite_smear_contraction(rng, trials):
    worst = -np.inf
    for _ in range(trials):
        d = _dims(rng, 2, 4)
        sys = DynamicalSystem(scenario.random_hamiltonian(d, rng))
        a = _random_operator(rng, d)
        s = analytic.gaussian_smear(sys, a, int(rng.integers(1, 100))).smeared
        worst = max(worst, op_norm(s) - op_norm(a))
    return SuiteResult("analytic.smear_contraction", worst <= analytic.QUAD_TOL, trials,
                       max(worst, 0.0))


def suite_smear_routes_agree(rng, trials):
    worst = 0.0
    n = max(1, trials // 10)
    for _ in range(n):
        d = _dims(rng, 2, 4)
        sys = DynamicalSystem(scenario.random_hamiltonian(d, rng))
        a = _random_operator(rng, d)
        k = int(rng.integers(1, 100))
        quad = analytic.gaussian_smear(sys, a, k, method="quadrature").smeared
        spec = analytic.gaussian_smear(sys, a, k).smeared
        worst = max(worst, float(np.max(np.abs(quad - spec))))
    return SuiteResult("analytic.smear_routes_agree", worst <= analytic.QUAD_TOL, n, worst)


def suite_state_gap_bound(rng, trials, n_states=256):
    worst = -np.inf
    n = max(1, trials // 10)
    for _ in range(n):
        d = _dims(rng)
        p, p2 = scenario.random_projection(d, rng), scenario.random_projection(d, rng)
        bound = analytic.delta_indistinguishable(p, p2, 1.0).expectation_gap_bound
        for _ in range(n_states):
            w = scenario.random_state(d, rng, mixed=bool(rng.integers(2)))
            gap = abs(expectation(w, p) - expectation(w, p2))
            worst = max(worst, gap - bound)
    return SuiteResult("analytic.state_gap_bound", worst <= 1e-10, n, max(worst, 0.0))


def suite_mark_profile_stability(rng, trials, n_grid=512):
    worst = -np.inf
    n = max(1, trials // 10)
    for k in range(n):
        if k == 0:
            inst, p = _f1()
        else:
            sys, w, p, _ = _instance(rng, dim=_dims(rng, 2, 4), observable="projection")
            inst = ProcessInstance(sys, w, p.op)
        p2 = analytic.smeared_projection(inst.system, p, int(rng.integers(5, 200)))
        delta = op_norm(p.op - p2.op)
        a = transmission.profile(inst, p, 5.0, n_grid).values
        b = transmission.profile(inst, p2, 5.0, n_grid).values
        worst = max(worst, float(np.max(np.abs(a - b))) - 4 * delta)
    return SuiteResult("analytic.mark_profile_stability", worst <= 1e-8, n, max(worst, 0.0))


# -- lattice ----------------------------------------------------------------------

def _random_region(rng, n_sites, max_size=2):
    size = int(rng.integers(1, max_size + 1))
    lo = int(rng.integers(0, n_sites - size + 1))
    return localnet.LatticeRegion(lo, lo + size - 1)


def suite_disjoint_commutation(rng, trials):
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 7))
        sys = localnet.LatticeSystem(n, "identity")
        r1 = _random_region(rng, n)
        r2 = _random_region(rng, n)
        if r1.intersects(r2):
            continue
        a = localnet.embed_local(sys, _random_operator(rng, 2 ** r1.size), r1)
        b = localnet.embed_local(sys, _random_operator(rng, 2 ** r2.size), r2)
        worst = max(worst, op_norm(commutator(a, b)) / (op_norm(a) * op_norm(b)))
    return SuiteResult("localnet.disjoint_commutation", worst <= 1e-12, trials, worst)


def suite_support_growth(rng, trials):
    bad = 0
    n = max(1, trials // 10)
    for _ in range(n):
        n_sites = int(rng.integers(2, 7))
        sys = localnet.LatticeSystem(n_sites, "random", int(rng.integers(2**31)))
        region = _random_region(rng, n_sites)
        x = localnet.embed_local(sys, scenario.random_observable(2 ** region.size, rng), region)
        for k in range(1, 4):
            x = localnet.brickwork_step(sys, x)
            cone = localnet.lightcone(region, k, n_sites)
            bad += any(s not in cone.sites() for s in localnet.support(x, n_sites))
    return SuiteResult("localnet.support_growth", bad == 0, n, float(bad))


def _shielding_config(rng, n_sites_max=8):
    n_sites = int(rng.integers(4, n_sites_max + 1))
    sys = localnet.LatticeSystem(n_sites, "random", int(rng.integers(2**31)))
    p_region = localnet.LatticeRegion(0, int(rng.integers(0, 2)))
    q_size = int(rng.integers(1, 3))
    q_region = localnet.LatticeRegion(n_sites - q_size, n_sites - 1)
    gap = q_region.lo - p_region.hi - 1
    steps = int(rng.integers(0, gap // 2 + 1))  # largest step count keeping the cones apart
    w = scenario.random_state(sys.dim, rng, mixed=bool(rng.integers(2)))
    p_local = scenario.random_projection(2 ** p_region.size, rng)
    q_local = scenario.random_observable(2 ** q_region.size, rng)
    return sys, w, p_region, p_local, q_region, q_local, steps


def suite_shielding(rng, trials):
    worst = 0.0
    bad = 0
    n = max(1, trials // 5)
    for _ in range(n):
        sys, w, pr, pl, qr, ql, steps = _shielding_config(rng, 7)
        res = localnet.shielding_check(sys, w, pr, pl, qr, ql, steps)
        bad += not res.spacelike
        worst = max(worst, abs(res.delta))
    return SuiteResult("localnet.shielding", bad == 0 and worst <= 1e-12, n, worst)


def suite_step_unitarity(rng, trials):
    worst = 0.0
    n = max(1, trials // 10)
    for _ in range(n):
        n_sites = int(rng.integers(2, 7))
        sys = localnet.LatticeSystem(n_sites, "random", int(rng.integers(2**31)))
        x = _random_operator(rng, sys.dim)
        y = localnet.brickwork_step(sys, x)
        back = localnet.brickwork_step(sys, y, "schrodinger")
        worst = max(worst, abs(op_norm(y) - op_norm(x)), op_norm(back - x) / op_norm(x))
    return SuiteResult("localnet.step_unitarity", worst <= 1e-10, n, worst)


# -- scenario I/O -----------------------------------------------------------------

def _random_config(rng):
    d = _dims(rng, 2, 4)
    h = scenario.random_hamiltonian(d, rng)
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    to_pairs = lambda m: [[[float(z.real), float(z.imag)] for z in row] for row in m]
    data = {
        "kind": "continuum", "dim": d, "hamiltonian": to_pairs(h),
        "state": {"pure": [[float(z.real), float(z.imag)] for z in psi]},
        "projection": {"random_rank": 1}, "observable": {"random_rank": 1},
        "interval": [0, float(rng.uniform(1, 10))], "n_grid": 64,
        "seed": int(rng.integers(2**31)),
    }
    return scenario.parse_config(json.dumps(data))


def suite_config_round_trip(rng, trials):
    bad = 0
    n = max(1, trials // 10)
    for _ in range(n):
        cfg = _random_config(rng)
        bad += scenario.parse_config(scenario.dump_config(cfg)) != cfg
    return SuiteResult("scenario.config_round_trip", bad == 0, n, float(bad))


def suite_output_determinism(rng, trials):
    cfg = _random_config(rng)
    blobs = []
    with tempfile.TemporaryDirectory() as tmp:
        for k in range(2):
            sc = scenario.build_continuum(cfg)
            prof = transmission.profile(sc.instance, sc.projection, sc.t_end, sc.n_grid)
            path = os.path.join(tmp, f"p{k}.csv")
            scenario.write_profile_csv(prof, path)
            with open(path, "rb") as fh:
                blobs.append(fh.read())
    same = blobs[0] == blobs[1]
    return SuiteResult("scenario.output_determinism", same, 1, 0.0 if same else 1.0)


SUITES = {
    "operators.commutator_antisymmetry": suite_commutator_antisymmetry,
    "operators.double_commutator_nested": suite_double_commutator_nested,
    "operators.expectation_real": suite_expectation_real,
    "operators.expectation_bounded": suite_expectation_bounded,
    "operators.double_commutator_iff_commutator": suite_double_commutator_iff_commutator,
    "dynamics.group_law": suite_group_law,
    "dynamics.isometry": suite_isometry,
    "dynamics.star_homomorphism": suite_star_homomorphism,
    "dynamics.norm_continuity": suite_norm_continuity,
    "marking.luders_idempotent": suite_luders_idempotent,
    "marking.lueders_identity": suite_lueders_identity,
    "marking.invariance_quantified": suite_invariance_quantified,
    "marking.delta_bound": suite_delta_bound,
    "marking.channel_simplex": suite_channel_simplex,
    "transmission.profile_identity": suite_profile_identity,
    "transmission.no_indeterminate": suite_no_indeterminate,
    "transmission.zero_refinement": suite_zero_refinement,
    "transmission.profile_deterministic": suite_profile_deterministic,
    "transmission.lemma10_falsifier": suite_lemma10_falsifier,
    "analytic.smear_selfadjoint": suite_smear_selfadjoint,
    "analytic.smear_contraction": suite_smear_contraction,
    "analytic.smear_routes_agree": suite_smear_routes_agree,
    "analytic.state_gap_bound": suite_state_gap_bound,
    "analytic.mark_profile_stability": suite_mark_profile_stability,
    "localnet.disjoint_commutation": suite_disjoint_commutation,
    "localnet.support_growth": suite_support_growth,
    "localnet.shielding": suite_shielding,
    "localnet.step_unitarity": suite_step_unitarity,
    "scenario.config_round_trip": suite_config_round_trip,
    "scenario.output_determinism": suite_output_determinism,
}

# Trials per suite relative to the requested count; profile-heavy suites
# run fewer so a 1000-trial verification stays in the tens of seconds.
WEIGHTS = {
    "transmission.profile_identity": 0.05,
    "transmission.no_indeterminate": 0.2,
    "transmission.profile_deterministic": 0.01,
}


def run_all(seed, trials):
    """Run every suite with its own child seed; returns a list of results."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    children = np.random.SeedSequence(seed).spawn(len(SUITES))
    results = []
    for (name, fn), child in zip(SUITES.items(), children):
        n = max(1, int(round(trials * WEIGHTS.get(name, 1.0))))
        results.append(fn(np.random.default_rng(child), n))
    return results
