"""Acceptance criteria, one test per criterion.

Each test appends a PASS/FAIL line that is printed in the terminal summary.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from causalmark import analytic, cli, localnet, scenario, transmission
from causalmark.dynamics import DynamicalSystem, ProcessInstance
from causalmark.marking import luders_update, lueders_shift
from causalmark.operators import (
    SIGMA_X, Projection, commutator, double_commutator, expectation, ket_projection,
    op_norm,
)

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def record(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _commuting_pair(rng, d):
    _, v = np.linalg.eigh(scenario.random_hamiltonian(d, rng))
    k = int(rng.integers(1, d))
    cols = rng.permutation(d)[:k]
    p = v[:, cols] @ v[:, cols].conj().T
    q = (v * rng.normal(size=d)) @ v.conj().T
    return p, q


def test_1_lueders_identity():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(2, 7))
        w = scenario.random_state(d, rng, mixed=bool(rng.integers(2)))
        p = scenario.random_projection(d, rng)
        q = scenario.random_observable(d, rng)
        lhs = expectation(luders_update(w, p), q)
        rhs = expectation(w, q) - expectation(w, double_commutator(p, q))
        worst = max(worst, abs(lhs - rhs))
    elapsed = time.perf_counter() - start
    record(1, worst <= 1e-8 and elapsed < 10,
           f"max residual {worst:.2e} (tol 1e-8), {elapsed:.2f} s (limit 10 s)")


def test_2_state_quantified_invariance():
    rng = np.random.default_rng(102)
    violations = commuting = noncommuting = 0
    for k in range(1000):
        d = int(rng.integers(2, 7))
        if k % 2 == 0:
            p, q = _commuting_pair(rng, d)
        else:
            p = scenario.random_projection(d, rng).op
            q = scenario.random_observable(d, rng)
        c = op_norm(commutator(p, q))
        shifts = [abs(lueders_shift(scenario.random_state(d, rng, mixed=bool(j % 2)), p, q))
                  for j in range(32)]
        if c <= 1e-12:
            commuting += 1
            violations += max(shifts) > 1e-9
        elif c > 1e-6:
            noncommuting += 1
            violations += max(shifts) <= 1e-9
    record(2, violations == 0 and commuting > 0 and noncommuting > 0,
           f"{violations} violations over {commuting} commuting and {noncommuting} "
           f"non-commuting trials")


def test_3_double_commutator_equivalence():
    rng = np.random.default_rng(103)
    violations = 0
    for k in range(1000):
        d = int(rng.integers(2, 7))
        if k % 2 == 0:
            p, q = _commuting_pair(rng, d)
        else:
            p = scenario.random_projection(d, rng).op
            q = scenario.random_observable(d, rng)
        c, dc = op_norm(commutator(p, q)), op_norm(double_commutator(p, q))
        violations += (c <= 1e-9) != (dc <= 1e-9)
    record(3, violations == 0, f"{violations} violations in 1000 trials (tol 1e-9)")


def test_4_fixture_f1():
    start = time.perf_counter()
    sys = DynamicalSystem(np.array([[0, -1j], [1j, 0]]))
    p0 = ket_projection([1, 0])
    inst = ProcessInstance(sys, ket_projection([1, 1]), p0)
    p = Projection(p0)
    prof = transmission.profile(inst, p, 5 * np.pi / 4, 4096, detect_delta=1e-3)
    witness = transmission.prop11_witness(prof, 1e-3)
    elapsed = time.perf_counter() - start
    pointwise = float(np.max(np.abs(prof.values - 0.5 * np.sin(2 * prof.grid))))
    interior = sorted(z.location for z in prof.zeros if z.location > 1e-6)
    zeros_ok = len(interior) == 2 and np.allclose(interior, [np.pi / 2, np.pi], atol=1e-6)
    ok = (pointwise <= 1e-9 and zeros_ok and prof.classification == transmission.Classification.CSIP
          and witness.fraction >= 0.99 and witness.passed and elapsed < 5)
    record(4, ok, f"pointwise {pointwise:.1e}, zeros {[round(z, 9) for z in interior]}, "
                  f"{prof.classification}, witness fraction {witness.fraction:.4f}, {elapsed:.2f} s")


def test_5_no_indeterminate():
    counts = {}
    for k in range(200):
        dim = 2 + k % 3
        sys, w, p, q = scenario.random_instance(
            dim, 5000 + k, nondegenerate_spectrum=True,
            observable="projection" if k % 2 == 0 else "random")
        t_end = 1.0 + 9.0 * ((k * 0.6180339887) % 1.0)
        prof = transmission.profile(ProcessInstance(sys, w, q), p, t_end)
        key = str(prof.classification)
        counts[key] = counts.get(key, 0) + 1
    bad = counts.get("Indeterminate", 0)
    record(5, bad == 0, f"{bad} Indeterminate in 200 fixtures; "
                        + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))


def test_6_fixture_f2():
    start = time.perf_counter()
    sys = DynamicalSystem(np.diag([0.0, 1.0]))
    norm_err = route_gap = 0.0
    for n in (1, 10, 100):
        spec = analytic.gaussian_smear(sys, SIGMA_X, n)
        quad = analytic.gaussian_smear(sys, SIGMA_X, n, method="quadrature")
        norm_err = max(norm_err, abs(spec.error_norm - (1 - np.exp(-1 / (4 * n)))))
        route_gap = max(route_gap, float(np.max(np.abs(quad.smeared - spec.smeared))))
    elapsed = time.perf_counter() - start
    record(6, norm_err <= 1e-8 and route_gap <= 1e-10 and elapsed < 5,
           f"norm error {norm_err:.1e} (tol 1e-8), route gap {route_gap:.1e} (tol 1e-10), "
           f"{elapsed:.2f} s")


def test_7_indistinguishability():
    rng = np.random.default_rng(107)
    worst = -np.inf
    for _ in range(256):
        d = int(rng.integers(2, 7))
        p, p2 = scenario.random_projection(d, rng), scenario.random_projection(d, rng)
        w = scenario.random_state(d, rng, mixed=bool(rng.integers(2)))
        gap = abs(expectation(w, p) - expectation(w, p2))
        worst = max(worst, gap - analytic.delta_indistinguishable(p, p2, 1.0).norm)
    plus = ket_projection([1, 1])
    rounded = analytic.smeared_projection(DynamicalSystem(np.diag([0.0, 1.0])), plus, 100)
    res = analytic.delta_indistinguishable(plus, rounded, 0.01)
    record(7, worst <= 1e-10 and res.close,
           f"max excess {max(worst, 0.0):.1e} (tol 1e-10); smear-then-round norm {res.norm:.1e} < 0.01")


def _lattice_config(rng):
    n = int(rng.integers(4, 9))
    sys = localnet.LatticeSystem(n, "random", int(rng.integers(2**31)))
    size_a = int(rng.integers(1, 3))
    size_b = int(rng.integers(1, min(2, n - size_a - 1) + 1))
    # leave at least one site between the regions
    lo_a = int(rng.integers(0, n - size_a - size_b))
    a = localnet.LatticeRegion(lo_a, lo_a + size_a - 1)
    lo_b = int(rng.integers(a.hi + 2, n - size_b + 1))
    b = localnet.LatticeRegion(lo_b, lo_b + size_b - 1)
    if rng.integers(2):
        a, b = b, a
    gap = max(a.lo, b.lo) - min(a.hi, b.hi) - 1
    steps = int(rng.integers(0, gap // 2 + 1))
    return sys, a, b, steps


def test_8_lattice_shielding():
    rng = np.random.default_rng(108)
    start = time.perf_counter()
    worst = 0.0
    outside = not_spacelike = 0
    for _ in range(200):
        sys, pr, qr, steps = _lattice_config(rng)
        w = scenario.random_state(sys.dim, rng, mixed=bool(rng.integers(2)))
        pl = scenario.random_projection(2 ** pr.size, rng)
        ql = scenario.random_observable(2 ** qr.size, rng)
        res = localnet.shielding_check(sys, w, pr, pl, qr, ql, steps)
        not_spacelike += not res.spacelike
        worst = max(worst, abs(res.delta))
        q = localnet.evolve_steps(sys, localnet.embed_local(sys, ql, qr), steps)
        cone = localnet.lightcone(qr, steps, sys.n_sites)
        outside += any(s not in cone.sites() for s in localnet.support(q, sys.n_sites))
    elapsed = time.perf_counter() - start
    record(8, worst <= 1e-12 and outside == 0 and not_spacelike == 0 and elapsed < 60,
           f"max |delta| {worst:.1e} (tol 1e-12), {outside} supports outside the cone, "
           f"{elapsed:.1f} s (limit 60 s)")


def test_9_lemma10_falsifier():
    rng = np.random.default_rng(109)
    counter = vacuous = nonvacuous = trials = 0
    for k in range(200):
        sys = DynamicalSystem(scenario.random_hamiltonian(2 + k % 5, rng))
        rep = transmission.lemma10_falsifier(sys, 5, seed=int(rng.integers(2**31)))
        trials += rep.trials
        counter += len(rep.counterexamples)
        vacuous += rep.vacuous
        nonvacuous += rep.nonvacuous
    record(9, trials == 1000 and counter == 0 and vacuous < trials and nonvacuous > 0,
           f"{counter} counterexamples in {trials} trials; vacuous {vacuous} "
           f"({100 * vacuous / trials:.1f}%), non-vacuous {nonvacuous}")


def test_10_determinism(tmp_path, capsys):
    same_sim = True
    for cfg in ("f1_sigma_y.json", "random_dim4.json", "lattice_shielding.json"):
        blobs = []
        for tag in "ab":
            prof, rep = tmp_path / f"{tag}.csv", tmp_path / f"{tag}.json"
            code = cli.cmd_simulate(str(SCENARIOS / cfg), str(prof), str(rep))
            blobs.append((code, prof.read_bytes(), rep.read_bytes()))
        same_sim &= blobs[0] == blobs[1] and blobs[0][0] == 0
    capsys.readouterr()
    outs = []
    for _ in range(2):
        code = cli.cmd_verify(42, 1000)
        outs.append((code, capsys.readouterr().out))
    same_verify = outs[0] == outs[1] and outs[0][0] == 0
    record(10, same_sim and same_verify,
           f"simulate byte-identical: {same_sim}; verify(seed 42, 1000 trials) identical "
           f"and exit 0: {same_verify}")
