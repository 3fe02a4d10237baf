"""Command-line entry point: ``causalmark simulate | smear | verify``."""

import argparse
import sys
import time

from . import analytic, localnet, scenario, transmission, verification
from .dynamics import ground_energy
from .marking import IDENTITY_TOL

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _err(msg):
    print(f"causalmark: {msg}", file=sys.stderr)


def _load(path, kinds):
    try:
        cfg = scenario.load_config(path)
    except OSError as exc:
        _err(f"cannot read config {path}: {exc.strerror or exc}")
        return None, EXIT_IO
    except scenario.ConfigError as exc:
        _err(f"bad config {path}: {exc}")
        return None, EXIT_CONFIG
    if cfg.kind not in kinds:
        _err(f"bad config {path}: kind: expected one of {', '.join(kinds)}, got {cfg.kind!r}")
        return None, EXIT_CONFIG
    return cfg, EXIT_OK


def cmd_simulate(config, out_profile, out_report):
    cfg, code = _load(config, ("continuum", "lattice"))
    if cfg is None:
        return code
    start = time.perf_counter()
    if cfg.kind == "continuum":
        sc = scenario.build_continuum(cfg)
        prof = transmission.profile(sc.instance, sc.projection, sc.t_end, sc.n_grid,
                                    sc.tol_zero, detect_delta=sc.detect_delta)
        witness = transmission.prop11_witness(prof, sc.detect_delta)
        residual = prof.lemma_residual()
        report = scenario.continuum_report(cfg, prof, witness, ground_energy(sc.system), residual)
        ok = residual <= IDENTITY_TOL
    else:
        sc = scenario.build_lattice(cfg)
        prof = localnet.local_mark_profile(sc.system, sc.state, sc.p_region, sc.p_local,
                                           sc.q_region, sc.q_local, sc.max_steps)
        report = scenario.lattice_report(cfg, prof)
        ok = report["shielding_holds"]
    elapsed = time.perf_counter() - start
    try:
        scenario.write_profile_csv(prof, out_profile)
        scenario.write_report(report, out_report)
    except scenario.OutputError as exc:
        _err(str(exc))
        return EXIT_IO
    print(f"causalmark: {cfg.kind} scenario done in {elapsed:.3f} s", file=sys.stderr)
    if not ok:
        _err("internal consistency check failed; see report")
        return EXIT_FAILED
    return EXIT_OK


def _parse_n_list(text):
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise ValueError("n-list is empty")
    return [int(s) for s in items]


def cmd_smear(config, n_list, out):
    cfg, code = _load(config, ("smear",))
    if cfg is None:
        return code
    try:
        ns = None if n_list is None else _parse_n_list(n_list)
        sc = scenario.build_smear(cfg, ns)
    except (ValueError, scenario.ConfigError) as exc:
        _err(f"bad n-list: {exc}")
        return EXIT_CONFIG
    table = analytic.smear_convergence(sc.system, sc.operator, sc.n_list)
    try:
        scenario.write_convergence_csv(table, out)
    except scenario.OutputError as exc:
        _err(str(exc))
        return EXIT_IO
    return EXIT_OK


def cmd_verify(seed, trials):
    if trials < 1:
        _err("trials must be >= 1")
        return EXIT_CONFIG
    results = verification.run_all(seed, trials)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed (seed={seed}, trials={trials})")
    return EXIT_FAILED if failed else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="causalmark",
        description="Mark transmission in finite-dimensional dynamical systems.",
        epilog=f"Scenario files are JSON; schema: {scenario.SCHEMA_PATH}",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a continuum or lattice scenario",
                       epilog=f"schema: {scenario.SCHEMA_PATH}")
    p.add_argument("--config", required=True, help="scenario JSON file")
    p.add_argument("--out-profile", required=True,
                   help="CSV output with columns t,omega_Q,omegaP_Q,delta")
    p.add_argument("--out-report", required=True, help="JSON run report")

    p = sub.add_parser("smear", help="Gaussian smearing convergence table",
                       epilog=f"schema: {scenario.SCHEMA_PATH}")
    p.add_argument("--config", required=True, help="scenario JSON file of kind 'smear'")
    p.add_argument("--n-list", default=None,
                   help='comma-separated smearing parameters, e.g. "1,10,100"')
    p.add_argument("--out", required=True, help="CSV output with columns n,error_norm")

    p = sub.add_parser("verify", help="run every property suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "simulate":
        return cmd_simulate(args.config, args.out_profile, args.out_report)
    if args.command == "smear":
        return cmd_smear(args.config, args.n_list, args.out)
    return cmd_verify(args.seed, args.trials)


if __name__ == "__main__":
    sys.exit(main())
