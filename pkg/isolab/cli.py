"""Command-line entry point: isolab <verb> [options]."""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from isolab.exceptions import AmbiguousToleranceError, IsolabError
from isolab.channels import simulation_gate
from isolab.io import dumps, load_channel, load_descriptor, load_state, parse_descriptor
from isolab.lab import IsotropyLab
from isolab.lattice import class_leq, hasse_dot, join_class, leq, meet
from isolab.models import IsolabConfig, SubgroupClass, SubgroupDescriptor
from isolab.scan import write_scan_csv, write_scan_rows

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_AMBIGUOUS = 1
EXIT_INVALID = 2


def _descriptor_arg(value: str) -> SubgroupDescriptor:
    """A descriptor JSON file, or a bare class tag for the axis-free classes."""
    path = Path(value)
    if path.exists():
        return load_descriptor(path)
    return parse_descriptor({'class': value})


def _class_arg(value: str) -> SubgroupClass:
    try:
        return SubgroupClass(value)
    except ValueError as e:
        choices = ", ".join(c.value for c in SubgroupClass)
        raise argparse.ArgumentTypeError(f"unknown class {value!r} (choose from {choices})") from e


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        print(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text + '\n', encoding='utf-8')
    logger.info("Output saved to %s", out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", help="Logging level (default: ISOLAB_LOG_LEVEL or WARNING)")
    common.add_argument("--tol", type=float, help="Relative decision tolerance (default: ISOLAB_TOL or 1e-8)")
    common.add_argument("--out", type=Path, help="Output file path (if not specified, prints to stdout)")

    parser = argparse.ArgumentParser(
        prog="isolab",
        description="Classify two-qubit states and qubit channels by their collective SU(2) isotropy",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    classify = sub.add_parser("classify", parents=[common], help="Isotropy subgroup of a state")
    classify.add_argument("--state", type=Path, required=True, help="State JSON file")
    classify.add_argument("--eps", type=float, default=0.0, help="Smoothing radius in trace distance")

    project = sub.add_parser("project", parents=[common], help="Apply the subgroup twirl P_H to a state")
    project.add_argument("--state", type=Path, required=True, help="State JSON file")
    project.add_argument("--group", required=True, help="Descriptor JSON file or class tag (Z2, SU2)")

    lattice = sub.add_parser("lattice", parents=[common], help="Lattice queries on subgroups")
    query = lattice.add_mutually_exclusive_group(required=True)
    query.add_argument("--meet", nargs=2, metavar="GROUP", help="Intersection of two descriptors")
    query.add_argument("--leq", nargs=2, metavar="GROUP", help="Whether the first descriptor is inside the second")
    query.add_argument("--join", nargs=2, metavar="CLASS", type=_class_arg, help="Least common upper class")
    query.add_argument("--class-leq", nargs=2, metavar="CLASS", type=_class_arg, help="Class order on the diagram")
    query.add_argument("--dot", action="store_true", help="Hasse diagram as Graphviz DOT")

    gate = sub.add_parser("gate", parents=[common], help="Necessary-condition check for channel simulation")
    gate.add_argument("--state", type=Path, required=True, help="Resource state JSON file")
    gate.add_argument("--channel", type=Path, required=True, help="Channel JSON file")

    scan = sub.add_parser("scan", parents=[common], help="Classify the T-state tetrahedron grid to CSV")
    scan.add_argument("--resolution", type=int, default=20, help="Grid points per edge minus one")
    scan.add_argument("--eps", type=float, default=0.0, help="Smoothing radius in trace distance")
    scan.add_argument("--threads", type=int, help="Worker cap (default: ISOLAB_THREADS)")

    lemmas = sub.add_parser("verify-lemmas", parents=[common], help="Run the randomised property suite")
    lemmas.add_argument("--seed", type=int, help="Seed (default: ISOLAB_SEED or 0)")
    lemmas.add_argument("--n-trials", type=int, default=100, help="Trials per property family")
    return parser


def _run(args: argparse.Namespace, lab: IsotropyLab) -> int:
    if args.command == "classify":
        state = load_state(args.state)
        report = lab.smoothed_classify(state, args.eps) if args.eps > 0 else lab.classify(state)
        _emit(dumps(report.to_json_dict()), args.out)

    elif args.command == "project":
        projected = lab.project(_descriptor_arg(args.group), load_state(args.state))
        _emit(dumps(projected.to_json_dict()), args.out)

    elif args.command == "lattice":
        if args.dot:
            _emit(hasse_dot().rstrip('\n'), args.out)
        elif args.meet:
            first, second = (_descriptor_arg(v) for v in args.meet)
            _emit(dumps({'meet': meet(first, second).to_json_dict()}), args.out)
        elif args.leq:
            first, second = (_descriptor_arg(v) for v in args.leq)
            _emit(dumps({'leq': leq(first, second)}), args.out)
        elif args.join:
            _emit(dumps({'join': join_class(*args.join).value}), args.out)
        else:
            _emit(dumps({'class_leq': class_leq(*args.class_leq)}), args.out)

    elif args.command == "gate":
        state_report = lab.classify(load_state(args.state))
        channel_report = lab.channel_isotropy(load_channel(args.channel))
        verdict = simulation_gate(state_report, channel_report)
        _emit(dumps({
            'verdict': verdict.value,
            'state': state_report.to_json_dict(),
            'channel': channel_report.to_json_dict(),
        }), args.out)

    elif args.command == "scan":
        if args.threads is not None:
            lab.config = lab.config.model_copy(update={'threads': args.threads})
        rows, skipped = lab.scan(args.resolution, args.eps)
        if args.out is not None:
            write_scan_csv(rows, args.out)
            logger.info("Scan saved to %s", args.out)
        else:
            write_scan_rows(rows, sys.stdout)
        print(f"{len(rows)} rows, {skipped} skipped", file=sys.stderr)

    else:
        report = lab.verify_lemmas(args.seed, args.n_trials)
        _emit(dumps({**report.model_dump(), "passed": report.passed}), args.out)

    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one verb, and return the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = IsolabConfig.from_env()
        if args.tol is not None:
            config = IsolabConfig(**{**config.model_dump(), "tol": args.tol})
        logging.basicConfig(
            level=(args.log_level or config.log_level).upper(),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
    except (ValueError, ValidationError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID

    try:
        return _run(args, IsotropyLab(config))
    except AmbiguousToleranceError as e:
        print(dumps(e.to_json_dict()))
        return EXIT_AMBIGUOUS
    except (IsolabError, ValueError, FileNotFoundError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
