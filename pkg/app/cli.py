# Command line for deriving relations, operators and flows of the hierarchy
# and for running the verification suites.
#   python -m app relations 1
#   python -m app operator A 1 2 --format latex
#   python -m app flow reduced 1 u
#   python -m app verify all --depth 6

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence, Union

from pydantic import ValidationError

from app.config import CliConfig, settings
from app.exceptions import AlgebraError, DepthExceeded, InsufficientPrecision
from app.models.diffpoly import Jet
from app.models.hierarchy import REDUCED, FlowValue
from app.models.verification import Suite
from app.services.hierarchy import get_hierarchy
from app.services.lax import get_relation_table
from app.services.rendering import render_flow, render_operator, render_relations, render_report
from app.services.verification import run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INSUFFICIENT_PRECISION = 2
EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(f"{self.prog}: error: {message}")


def cmd_relations(max_index: int, cfg: CliConfig) -> tuple[str, int]:
    if max_index < 0:
        raise UsageError(f"max index must be nonnegative, got {max_index}")
    if max_index > cfg.depth:
        raise DepthExceeded(f"relations up to index {max_index} need --depth {max_index} or more")
    table = get_relation_table(cfg.depth)
    return render_relations(table, max_index, cfg.format), EXIT_OK


def cmd_operator(kind: str, i: int, n: int, cfg: CliConfig) -> tuple[str, int]:
    hierarchy = get_hierarchy(cfg.depth)
    op = hierarchy.compute_A(i, n) if kind == "A" else hierarchy.compute_B(i, n)
    return render_operator(kind, i, n, op, cfg.format), EXIT_OK


def cmd_flow(i: Union[int, str], n: int, generator: str, cfg: CliConfig) -> tuple[str, int]:
    try:
        jet = Jet.parse_generator(generator)
    except ValueError as e:
        raise UsageError(str(e))
    hierarchy = get_hierarchy(cfg.depth)
    value = hierarchy.flow_on_generator(i, n, jet)
    return render_flow(FlowValue(i=i, n=n, values={jet: value}), cfg.format), EXIT_OK


def cmd_verify(suite: str, cfg: CliConfig) -> tuple[str, int]:
    result = run_suite(Suite(suite), cfg.depth, seed=cfg.seed)
    return render_report(result, cfg.format), result.exit_code


def _flow_index(value: str) -> Union[int, str]:
    if value == REDUCED:
        return REDUCED
    if value in ("1", "2"):
        return int(value)
    raise argparse.ArgumentTypeError(f"expected 1, 2 or {REDUCED}, got '{value}'")


def _side(value: str) -> int:
    if value in ("1", "2"):
        return int(value)
    raise argparse.ArgumentTypeError(f"expected 1 or 2, got '{value}'")


def _level(value: str) -> int:
    try:
        level = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got '{value}'")
    if level < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got '{value}'")
    return level


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--depth", type=int, help=f"Truncation depth K (default {settings.default_depth})")
    common.add_argument("--format", choices=["text", "json", "latex"], help="Output format")
    common.add_argument("--out", help="Write output to this file instead of stdout")
    common.add_argument("--seed", type=int, help="Seed for randomized property checks")

    report_epilog = (
        "With --format json the output is one object with the fields suite, depth, passed, failed, "
        "insufficient_precision, exit_code and reports; reports is the array of per-check reports."
    )

    parser = _Parser(
        prog="bkp",
        description="Derive and verify the coupled BKP hierarchy and its Novikov-Veselov reduction."
    )
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    relations = commands.add_parser("relations", parents=[common], help="Rewriting rules d2(v_m), d1(w_l)")
    relations.add_argument("max_index", type=_level)

    operator = commands.add_parser("operator", parents=[common], help="A_{i,n} or B_{i,n}")
    operator.add_argument("kind", choices=["A", "B"])
    operator.add_argument("i", type=_side)
    operator.add_argument("n", type=_level)

    flow = commands.add_parser("flow", parents=[common], help="Evolution of one generator")
    flow.add_argument("i", type=_flow_index)
    flow.add_argument("n", type=_level)
    flow.add_argument("generator", help="u, v<m> or w<l>")

    verify = commands.add_parser(
        "verify", parents=[common], help="Run a verification suite", epilog=report_epilog
    )
    verify.add_argument("suite", choices=[suite.value for suite in Suite])

    commands.add_parser("nv", parents=[common], help="Same as 'verify nv'", epilog=report_epilog)
    return parser


def _dispatch(args: argparse.Namespace, cfg: CliConfig) -> tuple[str, int]:
    if args.command == "relations":
        return cmd_relations(args.max_index, cfg)
    if args.command == "operator":
        return cmd_operator(args.kind, args.i, args.n, cfg)
    if args.command == "flow":
        return cmd_flow(args.i, args.n, args.generator, cfg)
    if args.command == "verify":
        return cmd_verify(args.suite, cfg)
    return cmd_verify(Suite.NV.value, cfg)


def _emit(output: str, cfg: CliConfig) -> None:
    if cfg.out:
        Path(cfg.out).write_text(output + "\n", encoding="utf-8")
    else:
        sys.stdout.write(output + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=logging.INFO if not settings.debug else logging.DEBUG,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr
    )
    try:
        args = build_parser().parse_args(argv)
        cfg = CliConfig.from_flags(depth=args.depth, format=args.format, out=args.out, seed=args.seed)
        output, code = _dispatch(args, cfg)
        _emit(output, cfg)
        return code

    except SystemExit as e:
        return int(e.code or 0)
    except (UsageError, ValidationError) as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE
    except (InsufficientPrecision, DepthExceeded) as e:
        logger.error(f"Insufficient precision: {e}")
        sys.stderr.write(f"insufficient precision: {e}\n")
        return EXIT_INSUFFICIENT_PRECISION
    except AlgebraError as e:
        logger.error(f"Computation failed: {e}", exc_info=True)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
