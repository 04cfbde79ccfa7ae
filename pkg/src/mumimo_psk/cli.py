"""Command-line entry point: ``mumimo-psk {rate-sweep,min-power,maxmin,validate}``.

Exit codes: 0 success, 1 configuration error, 2 infeasible request,
3 validation failure.
"""

import argparse
import logging
import sys

from .config import ConfigError, ExperimentConfig, load_config
from .experiments import rows_to_csv, run_maxmin, run_min_power, run_rate_sweep
from .power import InfeasibleError
from .validate import run_validate

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_VALIDATION = 0, 1, 2, 3

log = logging.getLogger("mumimo_psk")


def _scheme_list(text):
    return tuple(s.strip() for s in text.split(",") if s.strip())


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mumimo-psk",
        description="MU-MIMO downlink rates, minimum power and max-min fairness under PSK inputs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", metavar="PATH", help="JSON experiment configuration")
    shared.add_argument("--out", metavar="PATH", help="CSV output path (default: stdout)")
    shared.add_argument("--seed", type=int, help="override the configured seed")
    shared.add_argument("--trials", type=int, help="override the Monte Carlo trial count")
    shared.add_argument("--scheme", type=_scheme_list, metavar="LIST",
                        help="comma-separated subset of none,zf,ci")
    shared.add_argument("--workers", type=int, help="worker threads (default: MUMIMO_PSK_WORKERS or all cores)")
    shared.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")

    sub.add_parser("rate-sweep", parents=[shared], help="MC sum rate and closed-form bound versus SNR")
    mp = sub.add_parser("min-power", parents=[shared], help="minimum power versus user distance")
    mp.add_argument("--target-rate", type=float, help="per-user target rate in bits/s/Hz")
    sub.add_parser("maxmin", parents=[shared], help="max-min allocation versus total power")
    sub.add_parser("validate", parents=[shared], help="run the oracle cross-checks")
    return parser


def _load(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    return cfg.with_overrides(seed=args.seed, trials=args.trials, schemes=args.scheme)


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = _load(args)
        out = args.out or cfg.output
        if args.command == "validate":
            checks = run_validate(cfg.seed)
            lines = ["check,passed,deviation,tolerance,detail"]
            lines += [f"{c.name},{c.passed},{c.deviation!r},{c.tolerance!r},{c.detail}" for c in checks]
            _emit("\n".join(lines) + "\n", out)
            return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION
        if args.command == "rate-sweep":
            rows = run_rate_sweep(cfg, workers=args.workers)
        elif args.command == "min-power":
            rows = run_min_power(cfg, target_rate=args.target_rate)
        else:
            rows = run_maxmin(cfg)
        _emit(rows_to_csv(rows), out)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
