"""Command-line front end.

Three subcommands:

* ``run <scenario> [--out DIR] [--seed N] [--jobs K]`` executes every
  campaign in a scenario file (or shipped preset name) and writes one CSV
  plus one manifest per campaign.
* ``list-presets [--csv]`` prints the preset catalog and shipped scenarios.
* ``audit <scenario> [--trials N] [--budget DB]`` re-runs a scenario's link
  chain against the frequency-domain prediction and reports the relative
  residual against the budget.

Exit codes: 0 success, 1 audit over budget, 2 configuration or validation
error, 3 runtime or I/O failure.
"""

import argparse
import os
import sys
from dataclasses import replace

from . import __version__, experiments
from .errors import ConfigurationError, ShapeError

EXIT_OK = 0
EXIT_AUDIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mmwlink",
        description="Monte-Carlo link simulator for oscillator/amplifier/I-Q impairments",
    )
    parser.add_argument("--version", action="version", version=f"mmwlink {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute the campaigns in a scenario file")
    p_run.add_argument("scenario", help="path to a .scn file, or a shipped scenario name")
    p_run.add_argument("--out", default=".", help="output directory (default: current)")
    p_run.add_argument("--seed", type=int, default=None, help="override every campaign's master seed")
    p_run.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")

    p_list = sub.add_parser("list-presets", help="print the preset catalog")
    p_list.add_argument("--csv", action="store_true", help="machine-readable output")

    p_audit = sub.add_parser("audit", help="check the equivalent-channel model against the simulator")
    p_audit.add_argument("scenario", help="path to a .scn file, or a shipped scenario name")
    p_audit.add_argument("--trials", type=int, default=100, help="Monte-Carlo trials (default: 100)")
    p_audit.add_argument("--out", default=".", help="output directory (default: current)")
    p_audit.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")
    p_audit.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    p_audit.add_argument(
        "--budget",
        type=float,
        default=None,
        help="residual budget in dB (default: -30 phase-noise-only, -25 otherwise)",
    )
    return parser


def _cmd_run(args):
    campaigns = experiments.parse_scenario(args.scenario)
    if args.seed is not None:
        campaigns = [replace(c, master_seed=args.seed) for c in campaigns]
    for campaign in campaigns:
        manifest = experiments.run(campaign, out_dir=args.out, jobs=args.jobs)
        for name, digest in manifest.outputs:
            print(f"{campaign.name}: wrote {name} ({manifest.wall_time_s:.1f} s, sha256 {digest[:12]})")
    return EXIT_OK


def _cmd_list(args):
    sys.stdout.write(experiments.list_presets_text(csv_format=args.csv))
    return EXIT_OK


def _cmd_audit(args):
    campaign = experiments.audit_campaign(
        args.scenario, n_trials=args.trials, seed=args.seed, budget_db=args.budget
    )
    manifest = experiments.run(campaign, out_dir=args.out, jobs=args.jobs)
    name, digest = manifest.outputs[0]
    with open(os.path.join(args.out, name)) as fh:
        residual_db, budget_db, passed, _ = fh.read().splitlines()[1].split(",")
    verdict = "PASS" if int(passed) else "FAIL"
    print(
        f"{campaign.name}: residual {float(residual_db):+.1f} dB vs budget "
        f"{float(budget_db):+.1f} dB ({verdict}, wrote {name}, sha256 {digest[:12]})"
    )
    return EXIT_OK if int(passed) else EXIT_AUDIT_FAILED


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list-presets":
            return _cmd_list(args)
        return _cmd_audit(args)
    except (ConfigurationError, ShapeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
