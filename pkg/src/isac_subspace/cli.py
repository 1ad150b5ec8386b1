"""Command-line entry point.

Subcommands::

    pareto        rate-threshold sweep: closed form and bisection oracle per point
    beampattern   ISAC (both criteria), CRB-min and comm-optimal beampatterns
    corr-study    correlation coefficient G over several channel realizations
    export-sdp    write the CRB-trace SDP in SDPA sparse format
    validate      run all oracle/invariant checks; exit 1 on any failure

Exit status: 0 success, 1 validation failure, 2 configuration/input error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .config import Scenario, SweepSpec, load_config
from .errors import ConfigError, IsacError

logger = logging.getLogger(__name__)

DEFAULT_OUT = {
    "pareto": "pareto.csv",
    "beampattern": "beampattern.csv",
    "corr-study": "corr_study.csv",
    "export-sdp": "problem.dat-s",
    "validate": None,
}


def create_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value config file (defaults: 10 x 12 array, 20 dBm, target at 15 deg)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", type=Path, help="output path")
    common.add_argument("--threads", type=int, default=1, help="worker threads (output is identical for any value)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="isac-subspace", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("pareto", parents=[common], help="rate-threshold sweep CSV")
    p = sub.add_parser("beampattern", parents=[common], help="beampattern CSV")
    p.add_argument("--gamma", type=float, help="rate threshold in bits/s/Hz (default: half the maximum rate)")
    sub.add_parser("corr-study", parents=[common], help="correlation coefficient CSVs")
    p = sub.add_parser("export-sdp", parents=[common], help="SDPA export")
    p.add_argument("--gamma", type=float, help="rate threshold in bits/s/Hz (default: half the maximum rate)")
    sub.add_parser("validate", parents=[common], help="run the validation suite")
    return parser


def _load(args) -> tuple[Scenario, SweepSpec]:
    if args.config is not None:
        scn, spec = load_config(args.config)
    else:
        scn, spec = Scenario(), SweepSpec()
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer", key="seed")
        scn = dataclasses.replace(scn, seed=args.seed)
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    return scn, spec


def run(args) -> int:
    from . import experiments
    from .sdp import export_sdp
    from .validation import validate_suite
    from .channel_model import snr_threshold

    scn, spec = _load(args)
    out = args.out if args.out is not None else DEFAULT_OUT[args.command]

    if args.command == "pareto":
        experiments.run_pareto(scn, spec, out, threads=args.threads)
    elif args.command in ("beampattern", "export-sdp"):
        ch = experiments.channel_for(scn, spec)
        gamma = args.gamma if args.gamma is not None else 0.5 * experiments.max_rate(scn, ch)
        if args.command == "beampattern":
            experiments.run_beampattern(scn, ch, gamma, out)
        else:
            export_sdp(scn, ch, snr_threshold(gamma, scn.sigma_c_sq).Gamma, out)
    elif args.command == "corr-study":
        experiments.run_corr_study(scn, spec, out, threads=args.threads)
    elif args.command == "validate":
        ok, report = validate_suite(scn)
        if out is not None:
            Path(out).write_text(report)
        sys.stdout.write(report)
        return 0 if ok else 1
    if out is not None:
        logger.info("wrote %s", out)
    return 0


def main(argv=None) -> int:
    args = create_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except IsacError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
