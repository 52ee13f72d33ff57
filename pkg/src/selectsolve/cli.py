"""Command-line entry point: ``selectsolve <command> <file> [options]``.

Exit codes: 0 success (the property holds, for ``check``), 1 parse or
validation error, 2 property falsified, 3 resource bound exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .core import DEFAULT_BOUND, Context, DomainError, ResourceBoundError, format_value
from .gamespec import GameFormatError, parse_game, parse_value, serialize_plays, serialize_report, split_top_level
from .properties import (
    CheckResult,
    ContextUniverse,
    IndexingFunction,
    is_upwards_closed,
    is_witnessing,
    upwards_closed_violation,
    witnessing_violation,
)
from .solutions import compare, product_plays, rational_plays, sigma_plays, spe_plays

EXIT_OK, EXIT_ERROR, EXIT_FALSIFIED, EXIT_BOUND = 0, 1, 2, 3

COMMANDS = ("solve", "spe", "rational", "sigma", "compare", "check")
PROPERTIES = ("witnessing", "upwards-closed")


@dataclass(frozen=True)
class RunConfig:
    command: str
    path: str
    format: str = "text"
    bound: int = DEFAULT_BOUND
    player: int | None = None
    prop: str | None = None
    universe: str | None = None
    index: str | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.format not in ("text", "json"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.bound < 1:
            raise ValueError("--bound must be positive")
        if self.command == "check":
            if self.player is None or self.prop not in PROPERTIES:
                raise ValueError("check needs --player and --property witnessing|upwards-closed")


@dataclass(frozen=True)
class RunResult:
    code: int
    output: str = ""
    error: str = ""


def _show(v) -> str:
    # one-dimensional vectors read better as plain numbers
    if isinstance(v, tuple) and len(v) == 1:
        v = v[0]
    return format_value(v)


def _const(v) -> str:
    return f"c_{{{_show(v)}}}"


def _context_text(p: Context, constant: bool) -> str:
    if constant:
        return _const(next(iter(p.values())))
    return format_value(p)


def _parse_index(text: str, domain: tuple, universe: ContextUniverse) -> IndexingFunction:
    """``x=v|v;x=v`` -> the indexing function of constant contexts."""
    names = {str(x): x for x in domain}
    values = {}
    for item in text.split(";"):
        if "=" not in item:
            raise ValueError(f"--index entry {item!r} must read choice=v|v...")
        x, vs = item.split("=", 1)
        x = x.strip()
        if x not in names:
            raise ValueError(f"--index names unknown choice {x!r}")
        if names[x] in values:
            raise ValueError(f"--index lists choice {x!r} twice")
        values[names[x]] = [parse_value(v, universe.space) for v in vs.split("|")]
    missing = [str(x) for x in domain if x not in values]
    if missing:
        raise ValueError(f"--index has no entry for {', '.join(missing)}")
    return IndexingFunction.constant_values(domain, values)


def _universe(config: RunConfig, space) -> ContextUniverse:
    if config.universe is None:
        if space.kind != "poset":
            raise ValueError("check on a real-valued outcome kind requires --universe")
        return ContextUniverse.of_space(space)
    raw = [v for v in split_top_level(config.universe) if v]
    return ContextUniverse([parse_value(v, space) for v in raw], space)


def _check_given(eps, I: IndexingFunction, prop: str, universe: ContextUniverse) -> CheckResult:
    if prop == "witnessing":
        x = witnessing_violation(eps, I, universe.space)
        if x is None:
            return CheckResult(True, prop, I, checked=1, universe=universe)
        return CheckResult(False, prop, I, None, x, 1, universe)
    found = upwards_closed_violation(eps, I, universe.space)
    if found is None:
        return CheckResult(True, prop, I, checked=1, universe=universe)
    choice, x = found
    diagonal = Context({x2: p(x2) for x2, p in choice.items()})
    return CheckResult(False, prop, I, diagonal, x, 1, universe)


def _check_report(result: CheckResult, config: RunConfig, eps) -> str:
    universe = [_show(v) for v in result.universe.values]
    doc = {
        "player": config.player,
        "selection": eps.tag,
        "property": result.prop,
        "universe": universe,
        "holds": result.holds,
        "indexing_functions_checked": result.checked,
    }
    if not result.holds:
        I = result.indexing
        doc["counterexample"] = {
            "indexing": {
                format_value(x): [_context_text(p, len(set(p.values())) == 1) for p in I[x]] for x in I
            },
            "element": format_value(result.element),
        }
        if result.choice is not None:
            doc["counterexample"]["choice"] = {
                format_value(x): _const(v) for x, v in result.choice.items()
            }
    if config.format == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    verdict = "holds" if result.holds else "fails"
    lines = [
        f"player {config.player} ({eps.tag}): {result.prop} {verdict}",
        "universe: {" + ", ".join(universe) + "}",
        f"indexing functions checked: {result.checked}",
    ]
    if not result.holds:
        lines.append("counterexample:")
        for x, ps in doc["counterexample"]["indexing"].items():
            lines.append(f"  I({x}) = {{" + ", ".join(ps) + "}")
        if "choice" in doc["counterexample"]:
            picks = ", ".join(f"p_{x} = {c}" for x, c in doc["counterexample"]["choice"].items())
            lines.append(f"  choice: {picks}")
        x = doc["counterexample"]["element"]
        if result.prop == "witnessing":
            lines.append(f"  {x} is selected on the joined context but under no choice function")
        else:
            lines.append(f"  {x} is selected under the choice function but not on the joined context")
    return "\n".join(lines) + "\n"


def _dispatch(config: RunConfig) -> RunResult:
    game = parse_game(Path(config.path).read_text(encoding="utf-8"))
    cmd, fmt = config.command, config.format
    if cmd == "solve":
        return RunResult(EXIT_OK, serialize_plays(game, product_plays(game), fmt, "product_plays"))
    if cmd == "spe":
        oracle = "derived" if game.rounds > 2 else "definition"
        plays = spe_plays(game, config.bound)
        return RunResult(EXIT_OK, serialize_plays(game, plays, fmt, "spe_plays", oracle=oracle))
    if cmd == "rational":
        if game.rounds != 2:
            raise ValueError(f"rational plays are defined for 2-round games, this game has {game.rounds}")
        return RunResult(EXIT_OK, serialize_plays(game, rational_plays(game, config.bound), fmt, "rational_plays"))
    if cmd == "sigma":
        return RunResult(EXIT_OK, serialize_plays(game, sigma_plays(game, bound=config.bound), fmt, "sigma_plays"))
    if cmd == "compare":
        return RunResult(EXIT_OK, serialize_report(compare(game, config.bound), fmt))

    if not 1 <= config.player <= game.rounds:
        raise ValueError(f"--player {config.player} out of range 1..{game.rounds}")
    eps = game.selections[config.player - 1]
    universe = _universe(config, game.space)
    if config.index is not None:
        I = _parse_index(config.index, eps.domain, universe)
        result = _check_given(eps, I, config.prop, universe)
    elif config.prop == "witnessing":
        result = is_witnessing(eps, universe, config.bound)
    else:
        result = is_upwards_closed(eps, universe, config.bound)
    code = EXIT_OK if result.holds else EXIT_FALSIFIED
    return RunResult(code, _check_report(result, config, eps))


def run(config: RunConfig) -> RunResult:
    """Execute one command and map failures onto exit codes."""
    try:
        config.validate()
        return _dispatch(config)
    except GameFormatError as exc:
        return RunResult(EXIT_ERROR, error=f"{config.path}: {exc}\n")
    except ResourceBoundError as exc:
        return RunResult(EXIT_BOUND, error=f"resource bound exceeded: {exc}\n")
    except (OSError, ValueError, DomainError) as exc:
        return RunResult(EXIT_ERROR, error=f"error: {exc}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="game description file")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="maximum enumeration size")

    parser = argparse.ArgumentParser(prog="selectsolve", description="Solve higher-order sequential games.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="plays computed by the product of selection functions")
    sub.add_parser("spe", parents=[common], help="subgame perfect plays")
    sub.add_parser("rational", parents=[common], help="rational plays (2-round games)")
    sub.add_parser("sigma", parents=[common], help="plays of the maximal consistent strategy sets")
    sub.add_parser("compare", parents=[common], help="all play sets and how they relate")
    check = sub.add_parser("check", parents=[common], help="decide a property of one player's selection")
    check.add_argument("--player", type=int, required=True)
    check.add_argument("--property", dest="prop", choices=PROPERTIES, required=True)
    check.add_argument("--universe", help="comma-separated outcome values the contexts range over")
    check.add_argument("--index", help="check one indexing function of constant contexts, e.g. '0=0;1=1|-1'")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(
        command=args.command,
        path=args.file,
        format=args.format,
        bound=args.bound,
        player=getattr(args, "player", None),
        prop=getattr(args, "prop", None),
        universe=getattr(args, "universe", None),
        index=getattr(args, "index", None),
    )
    result = run(config)
    sys.stdout.write(result.output)
    sys.stderr.write(result.error)
    return result.code


if __name__ == "__main__":
    sys.exit(main())
