"""Command line entry point: ``gowersap <subcommand> [options]``.

Exit codes: 0 success, 1 a check inside the run failed, 2 bad configuration
or a violated hypothesis.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .errors import ConfigError, GowersAPError, HypothesisError
from .harness import ExperimentConfig, load_config, run

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _ints(text):
    return tuple(int(float(t)) for t in text.split(",") if t.strip())


def _floats(text):
    return tuple(float(t) for t in text.split(",") if t.strip())


def _strs(text):
    return tuple(t.strip() for t in text.split(",") if t.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--config", help="key=value config file; flags override it")
    g.add_argument("--threads", type=int)
    g.add_argument("--cache-dir", dest="cache_dir")
    g.add_argument("--seed", type=int)
    g.add_argument("--out-dir", dest="out_dir")
    g.add_argument("--timings", action="store_true", default=None,
                   help="fill the seconds columns (makes CSVs run dependent)")

    p = argparse.ArgumentParser(prog="gowersap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="pipeline", required=True)

    s = sub.add_parser("sieve", parents=[common], help="tabulate functions (and fill the cache)")
    s.add_argument("--X", type=int)
    s.add_argument("--function", help="comma separated kinds, e.g. mobius,liouville")

    s = sub.add_parser("gowers", parents=[common], help="U^k norms of f(q . + a)")
    s.add_argument("--function")
    s.add_argument("--X", type=int)
    s.add_argument("--Q", type=int, help="moduli q in [Q, 2Q), every reduced residue")
    s.add_argument("--q", type=int, help="a single modulus (default 1)")
    s.add_argument("--a", type=int, help="a single residue; omitted means all reduced residues")
    s.add_argument("--all-residues", dest="all_residues", action="store_true", default=None)
    s.add_argument("--k", dest="k_grid", type=_ints, help="comma separated k values")
    s.add_argument("--strategy", choices=["auto", "naive", "recursive_fft", "u1_mean"])

    s = sub.add_parser("bv-scan", parents=[common], help="exceptional moduli in [Q, 2Q)")
    s.add_argument("--function")
    s.add_argument("--X", type=int)
    s.add_argument("--Q", type=int)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--phase-degree", dest="degree", type=int,
                   help="0 for the discrepancy, s >= 1 for sup over degree-s phases")
    s.add_argument("--restarts", type=int)
    s.add_argument("--full-range", dest="full_range", action="store_true", default=None)

    s = sub.add_parser("ramare-check", parents=[common], help="identity, partition, slices")
    s.add_argument("--function")
    s.add_argument("--X", type=int)
    s.add_argument("--window", type=_floats, help="Y,Z")
    s.add_argument("--eta", type=float, help="window Y = 1/eta, Z = (X/Q^2)^(1/20)")
    s.add_argument("--Q", type=int)
    s.add_argument("--fspec")

    s = sub.add_parser("type2", parents=[common], help="type-II bilinear sum")
    s.add_argument("--K", type=int)
    s.add_argument("--L", type=int)
    s.add_argument("--Q", type=int)
    s.add_argument("--delta", type=float)
    s.add_argument("--exponent", type=float)
    s.add_argument("--fspec")

    s = sub.add_parser("equidist", parents=[common], help="total equidistribution defect")
    s.add_argument("--alphas", "--phase", dest="phase", type=_strs,
                   help="alpha_1,...,alpha_s (decimals or p/q)")
    s.add_argument("--N", type=int)
    s.add_argument("--delta", type=float)
    s.add_argument("--m-max", dest="m_max", type=int)
    s.add_argument("--exponent", type=float)

    s = sub.add_parser("lcm-stats", parents=[common], help="lcm multiplicities")
    s.add_argument("--Q", type=int)
    s.add_argument("--R", type=int)
    s.add_argument("--m0-grid", dest="m0_grid", type=_ints)

    s = sub.add_parser("decay", parents=[common], help="decay table over an X grid")
    s.add_argument("--function")
    s.add_argument("--X-grid", dest="X_grid", type=_ints)
    s.add_argument("--k", dest="k_grid", type=_ints)
    s.add_argument("--Q-exponent", dest="Q_exponent", type=float)
    s.add_argument("--epsilon", type=float)

    s = sub.add_parser("accept", parents=[common], help="acceptance pipeline / criteria")
    s.add_argument("--criteria", type=_ints,
                   help="also run these acceptance criteria (e.g. 1,2,3) and print PASS/FAIL")
    return p


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(ns.config) if ns.config else ExperimentConfig()
    cfg.pipeline = ns.pipeline
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    for key, val in vars(ns).items():
        if key in names and key != "pipeline" and val is not None:
            setattr(cfg, key, val)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        manifest = run(cfg)
    except (ConfigError, HypothesisError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GowersAPError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for name, digest in sorted(manifest.digests.items()):
        print(f"{name} {digest}")
    code = EXIT_OK
    for msg in manifest.failures:
        print(f"check failed: {msg}", file=sys.stderr)
        code = EXIT_FAIL
    if ns.pipeline == "accept" and ns.criteria:
        from .acceptance import run_criteria

        results = run_criteria(ns.criteria, seed=cfg.seed)
        if not all(r.passed for r in results):
            code = EXIT_FAIL
    return code


if __name__ == "__main__":
    sys.exit(main())
