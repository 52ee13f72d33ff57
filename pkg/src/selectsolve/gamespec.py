"""Plain-text game descriptions and solution reports.

A game file is line oriented; ``#`` starts a comment::

    rounds: 2
    choices[1]: a b
    choices[2]: l r
    outcome-kind: vector 2
    player[1]: argmax 1
    player[2]: argmax 2
    q(a,l): 0 1
    q(a,r): 2 1
    q(b,l): 1 0
    q(b,r): 1 0

Outcome kinds are ``vector <d>``, ``sets <d>`` and ``poset <name>``.  A poset
is declared by ``poset <name>: elements <e>...`` followed by one
``poset <name>: join <a> <b> -> <c>`` line per pair of distinct elements.
Set values are written ``{ (1,-1) (0,0) }``.  An extensional selection is
declared by ``player[i]: table`` plus one ``table[i]: v1 | v2 | ... -> x...``
line per context, the values listed in the round's choice order.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .core import Context, DomainError, OutcomeSpace, all_contexts, format_value
from .dominance import strict_dominance_selection
from .game import GameSpec
from .selection import (
    MultiSelection,
    argmax_selection,
    constant_selection,
    extensional_selection,
    favourite_selection,
)
from .solutions import SolutionReport

__all__ = [
    "GameFormatError",
    "GameDocument",
    "ERROR_CODES",
    "parse_game",
    "parse_document",
    "parse_value",
    "serialize_game",
    "serialize_report",
    "serialize_plays",
    "games_equal",
]

ERROR_CODES = {
    "E_SYNTAX": "malformed line or token",
    "E_MISSING_DIRECTIVE": "a required declaration is absent",
    "E_MISSING_OUTCOME": "the outcome table is incomplete",
    "E_DUPLICATE": "a play key or declaration appears twice",
    "E_UNKNOWN_SELECTION": "unknown selection kind",
    "E_ARITY": "wrong number of components, choices or rounds",
    "E_UNDECLARED": "reference to an undeclared choice or element",
    "E_VALUE": "a value is not valid for the outcome kind",
    "E_POSET": "the poset join table is not a total semilattice",
    "E_SELECTION": "selection parameters do not fit the game",
}


class GameFormatError(ValueError):
    def __init__(self, code: str, message: str, line: int = 0, column: int = 0):
        self.code = code
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{code}: {message}")


@dataclass
class GameDocument:
    """A parsed game and the source line of each declaration."""

    game: GameSpec
    positions: dict = field(default_factory=dict)


_NUMBER = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)(/\d+)?$")
_DIRECTIVE = re.compile(r"^(?P<key>[A-Za-z-]+)(\[(?P<index>[^\]]*)\])?(\((?P<args>[^)]*)\))?(?P<name>\s+\S+)?\s*:(?P<rest>.*)$")


def _number(token: str) -> Fraction:
    token = token.strip()
    if not _NUMBER.match(token):
        raise ValueError(f"not a number: {token!r}")
    return Fraction(token)


def _vector(text: str, dim: int) -> tuple:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    parts = [p for p in re.split(r"[\s,]+", text) if p]
    if len(parts) != dim:
        raise DomainError(f"expected {dim} components, got {len(parts)}")
    return tuple(_number(p) for p in parts)


def parse_value(text: str, space: OutcomeSpace) -> Any:
    """Parse one outcome value written in the game-file syntax."""
    text = text.strip()
    if space.kind == "vector":
        return _vector(text, space.dim)
    if space.kind == "sets":
        if not (text.startswith("{") and text.endswith("}")):
            raise ValueError(f"a set value must be enclosed in braces: {text!r}")
        points = re.findall(r"\(([^()]*)\)", text[1:-1])
        leftover = re.sub(r"\(([^()]*)\)", "", text[1:-1]).strip()
        if leftover or not points:
            raise ValueError(f"malformed set value: {text!r}")
        return frozenset(_vector(p, space.dim) for p in points)
    if text not in space.elements:
        raise DomainError(f"{text!r} is not an element of poset {space.name}")
    return text


def split_top_level(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside parentheses and braces."""
    parts, depth, current = [], 0, ""
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append(current)
            current = ""
        else:
            current += ch
    parts.append(current)
    return [p.strip() for p in parts]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.rounds: int | None = None
        self.choices: dict[int, tuple] = {}
        self.kind: tuple | None = None
        self.posets: dict[str, dict] = {}
        self.players: dict[int, tuple] = {}
        self.tables: dict[int, list] = {}
        self.outcomes: dict[tuple, tuple] = {}
        self.positions: dict = {}

    def fail(self, code: str, message: str, lineno: int = 0, col: int = 0):
        if not lineno:
            # things that are absent are reported at the end of the document
            lineno, col = max(1, len(self.text.splitlines())), 1
        raise GameFormatError(code, message, lineno, col)

    def column(self, line: str, token: str) -> int:
        i = line.find(token)
        return i + 1 if i >= 0 else 1

    def run(self) -> GameDocument:
        for lineno, raw in enumerate(self.text.splitlines(), 1):
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            m = _DIRECTIVE.match(line.strip())
            if not m:
                self.fail("E_SYNTAX", f"cannot parse {line.strip()!r}", lineno, self.column(raw, line.strip()))
            self.directive(m, raw, lineno)
        return self.build()

    def index(self, m, raw: str, lineno: int) -> int:
        idx = m.group("index")
        if idx is None or not idx.strip().isdigit():
            self.fail("E_SYNTAX", f"{m.group('key')} needs a round index", lineno, self.column(raw, m.group("key")))
        return int(idx)

    def directive(self, m, raw: str, lineno: int) -> None:
        key, rest = m.group("key"), m.group("rest").strip()
        col = self.column(raw, rest) if rest else len(raw) + 1
        if key == "rounds":
            if self.rounds is not None:
                self.fail("E_DUPLICATE", "rounds declared twice", lineno, 1)
            if not rest.isdigit() or int(rest) < 1:
                self.fail("E_SYNTAX", f"rounds must be a positive integer, got {rest!r}", lineno, col)
            self.rounds = int(rest)
            self.positions["rounds"] = lineno
        elif key == "choices":
            i = self.index(m, raw, lineno)
            names = tuple(rest.split())
            if i in self.choices:
                self.fail("E_DUPLICATE", f"choices[{i}] declared twice", lineno, 1)
            if not names:
                self.fail("E_SYNTAX", f"choices[{i}] is empty", lineno, col)
            if len(set(names)) != len(names):
                self.fail("E_DUPLICATE", f"choices[{i}] repeats a name", lineno, col)
            self.choices[i] = names
            self.positions["choices", i] = lineno
        elif key == "outcome-kind":
            if self.kind is not None:
                self.fail("E_DUPLICATE", "outcome-kind declared twice", lineno, 1)
            parts = rest.split()
            if len(parts) != 2 or parts[0] not in ("vector", "sets", "poset"):
                self.fail("E_SYNTAX", f"outcome-kind must be 'vector <d>', 'sets <d>' or 'poset <name>'", lineno, col)
            if parts[0] != "poset" and (not parts[1].isdigit() or int(parts[1]) < 1):
                self.fail("E_SYNTAX", f"dimension must be a positive integer, got {parts[1]!r}", lineno, col)
            self.kind = (parts[0], parts[1], lineno)
            self.positions["outcome-kind"] = lineno
        elif key == "poset":
            name = (m.group("name") or "").strip()
            if not name:
                self.fail("E_SYNTAX", "poset declaration needs a name", lineno, 1)
            self.poset_line(name, rest, raw, lineno)
        elif key == "player":
            i = self.index(m, raw, lineno)
            if i in self.players:
                self.fail("E_DUPLICATE", f"player[{i}] declared twice", lineno, 1)
            parts = rest.split()
            if not parts:
                self.fail("E_SYNTAX", f"player[{i}] needs a selection kind", lineno, col)
            self.players[i] = (parts[0], parts[1:], lineno, self.column(raw, parts[0]))
            self.positions["player", i] = lineno
        elif key == "table":
            i = self.index(m, raw, lineno)
            if "->" not in rest:
                self.fail("E_SYNTAX", "table line needs '->'", lineno, col)
            lhs, rhs = rest.split("->", 1)
            self.tables.setdefault(i, []).append((lhs, rhs.split(), lineno, col))
        elif key == "q":
            args = m.group("args")
            if args is None:
                self.fail("E_SYNTAX", "outcome line must look like q(c1,...,cn): value", lineno, 1)
            play = tuple(a.strip() for a in args.split(","))
            if play in self.outcomes:
                self.fail("E_DUPLICATE", f"duplicate outcome for play ({','.join(play)})", lineno, 1)
            self.outcomes[play] = (rest, lineno, col)
        else:
            self.fail("E_SYNTAX", f"unknown directive {key!r}", lineno, self.column(raw, key))

    def poset_line(self, name: str, rest: str, raw: str, lineno: int) -> None:
        col = self.column(raw, rest) if rest else 1
        parts = rest.split()
        entry = self.posets.setdefault(name, {"elements": None, "joins": {}, "line": lineno})
        if parts and parts[0] == "elements":
            if entry["elements"] is not None:
                self.fail("E_DUPLICATE", f"poset {name} elements declared twice", lineno, col)
            if len(parts) < 2 or len(set(parts[1:])) != len(parts) - 1:
                self.fail("E_POSET", f"poset {name} needs distinct elements", lineno, col)
            entry["elements"] = tuple(parts[1:])
        elif parts and parts[0] == "join":
            if len(parts) != 5 or parts[3] != "->":
                self.fail("E_SYNTAX", "join line must read 'join <a> <b> -> <c>'", lineno, col)
            pair = frozenset(parts[1:3])
            if pair in entry["joins"]:
                self.fail("E_DUPLICATE", f"join of {parts[1]} and {parts[2]} given twice", lineno, col)
            entry["joins"][pair] = (parts[4], lineno, col)
        else:
            self.fail("E_SYNTAX", f"poset line must start with 'elements' or 'join'", lineno, col)

    # -- assembly ----------------------------------------------------------

    def space(self) -> OutcomeSpace:
        if self.kind is None:
            self.fail("E_MISSING_DIRECTIVE", "outcome-kind is not declared")
        kind, arg, lineno = self.kind
        if kind in ("vector", "sets"):
            return OutcomeSpace(kind, dim=int(arg))
        entry = self.posets.get(arg)
        if entry is None or entry["elements"] is None:
            self.fail("E_UNDECLARED", f"poset {arg} is not declared", lineno, 1)
        elements = entry["elements"]
        joins = {}
        for pair, (result, jl, jc) in entry["joins"].items():
            for e in list(pair) + [result]:
                if e not in elements:
                    self.fail("E_UNDECLARED", f"{e!r} is not an element of poset {arg}", jl, jc)
            joins[pair if len(pair) == 2 else (next(iter(pair)),) * 2] = result
        for a, b in itertools.combinations(elements, 2):
            if frozenset((a, b)) not in entry["joins"]:
                self.fail("E_POSET", f"poset {arg} has no join for {a} and {b}", entry["line"], 1)
        try:
            return OutcomeSpace.poset(elements, joins, name=arg)
        except ValueError as exc:
            self.fail("E_POSET", str(exc), entry["line"], 1)

    def build(self) -> GameDocument:
        if self.rounds is None:
            self.fail("E_MISSING_DIRECTIVE", "rounds is not declared")
        n = self.rounds
        for i in self.choices:
            if not 1 <= i <= n:
                self.fail("E_ARITY", f"choices[{i}] but the game has {n} rounds", self.positions["choices", i], 1)
        for i in range(1, n + 1):
            if i not in self.choices:
                self.fail("E_MISSING_DIRECTIVE", f"choices[{i}] is not declared")
        space = self.space()
        choices = [self.choices[i] for i in range(1, n + 1)]

        outcome = {}
        for play, (text, lineno, col) in self.outcomes.items():
            if len(play) != n:
                self.fail("E_ARITY", f"play ({','.join(play)}) has {len(play)} moves, expected {n}", lineno, 1)
            for i, (x, xs) in enumerate(zip(play, choices), 1):
                if x not in xs:
                    self.fail("E_UNDECLARED", f"{x!r} is not a choice of round {i}", lineno, 1)
            outcome[play] = self.value(text, space, lineno, col)
            self.positions["q", play] = lineno
        for play in itertools.product(*choices):
            if play not in outcome:
                self.fail("E_MISSING_OUTCOME", f"incomplete outcome table: missing q({','.join(play)})")

        for i in self.players:
            if not 1 <= i <= n:
                self.fail("E_ARITY", f"player[{i}] but the game has {n} rounds", self.positions["player", i], 1)
        for i in self.tables:
            if self.players.get(i, ("",))[0] != "table":
                self.fail("E_SELECTION", f"table[{i}] lines without 'player[{i}]: table'", self.tables[i][0][2], 1)
        selections = []
        for i in range(1, n + 1):
            if i not in self.players:
                self.fail("E_MISSING_DIRECTIVE", f"player[{i}] is not declared")
            selections.append(self.selection(i, choices[i - 1], space))
        return GameDocument(GameSpec(choices, space, outcome, selections), self.positions)

    def value(self, text: str, space: OutcomeSpace, lineno: int, col: int) -> Any:
        try:
            return parse_value(text, space)
        except DomainError as exc:
            code = "E_UNDECLARED" if space.kind == "poset" else "E_ARITY"
            self.fail(code, str(exc), lineno, col)
        except ValueError as exc:
            self.fail("E_VALUE", str(exc), lineno, col)

    def selection(self, i: int, xs: tuple, space: OutcomeSpace) -> MultiSelection:
        kind, args, lineno, col = self.players[i]

        def need(count: int) -> None:
            if len(args) != count:
                self.fail("E_ARITY", f"{kind} takes {count} argument(s), got {len(args)}", lineno, col)

        def coordinate() -> int:
            need(1)
            if not args[0].isdigit():
                self.fail("E_SYNTAX", f"{kind} needs a coordinate index", lineno, col)
            j = int(args[0])
            if space.kind == "poset" or not 1 <= j <= space.dim:
                self.fail("E_SELECTION", f"{kind} {j} does not fit outcome kind {space.describe()}", lineno, col)
            return j

        if kind == "argmax":
            j = coordinate()
            if space.kind != "vector":
                self.fail("E_SELECTION", "argmax needs vector outcomes", lineno, col)
            return argmax_selection(j, xs, space)
        if kind == "strict-dominance":
            j = coordinate()
            return strict_dominance_selection(j, xs, space.dim, space)
        if kind == "constant":
            if not args:
                self.fail("E_ARITY", "constant needs at least one choice", lineno, col)
            for a in args:
                if a not in xs:
                    self.fail("E_UNDECLARED", f"{a!r} is not a choice of round {i}", lineno, col)
            return constant_selection(args, xs, space)
        if kind == "favourite":
            need(1)
            if args[0] not in xs:
                self.fail("E_UNDECLARED", f"{args[0]!r} is not a choice of round {i}", lineno, col)
            if space.kind != "poset":
                self.fail("E_SELECTION", "favourite needs a poset outcome kind", lineno, col)
            return favourite_selection(args[0], xs, space.top(), space)
        if kind == "table":
            need(0)
            return self.table(i, xs, space)
        self.fail("E_UNKNOWN_SELECTION", f"unknown selection kind {kind!r}", lineno, col)

    def table(self, i: int, xs: tuple, space: OutcomeSpace) -> MultiSelection:
        entries = {}
        for lhs, rhs, lineno, col in self.tables.get(i, []):
            cells = lhs.split("|")
            if len(cells) != len(xs):
                self.fail("E_ARITY", f"table[{i}] context has {len(cells)} values, expected {len(xs)}", lineno, col)
            k = Context(zip(xs, (self.value(c, space, lineno, col) for c in cells)))
            if k in entries:
                self.fail("E_DUPLICATE", f"table[{i}] lists a context twice", lineno, col)
            if not rhs:
                self.fail("E_SYNTAX", f"table[{i}] line selects nothing", lineno, col)
            for x in rhs:
                if x not in xs:
                    self.fail("E_UNDECLARED", f"{x!r} is not a choice of round {i}", lineno, col)
            entries[k] = rhs
        if not entries:
            self.fail("E_SELECTION", f"player[{i}] table has no entries", self.players[i][2], 1)
        if space.kind == "poset":
            for k in all_contexts(xs, space.elements):
                if k not in entries:
                    shown = " | ".join(k[x] for x in xs)
                    self.fail("E_SELECTION", f"table[{i}] is missing context {shown}", self.players[i][2], 1)
        return extensional_selection(xs, entries, space)


def parse_document(text: str) -> GameDocument:
    return _Parser(text).run()


def parse_game(text: str) -> GameSpec:
    """Parse and validate a game description."""
    return parse_document(text).game


# -- serialization -------------------------------------------------------------


def _write_value(v: Any, space: OutcomeSpace) -> str:
    if space.kind == "vector":
        return " ".join(format_value(x) for x in v)
    if space.kind == "sets":
        return "{ " + " ".join(format_value(p) for p in sorted(v)) + " }"
    return str(v)


def _write_selection(i: int, sel: MultiSelection, space: OutcomeSpace) -> list[str]:
    tag, params = sel.tag, sel.params
    if tag in ("argmax", "strict-dominance"):
        return [f"player[{i}]: {tag} {params[0]}"]
    if tag == "constant":
        return [f"player[{i}]: constant " + " ".join(map(str, params))]
    if tag == "favourite":
        return [f"player[{i}]: favourite {params[0]}"]
    if tag == "extensional":
        (table,) = params
        lines = [f"player[{i}]: table"]
        rows = sorted(table.items(), key=lambda kv: tuple(space.sort_key(kv[0][x]) for x in sel.domain))
        for k, chosen in rows:
            lhs = " | ".join(_write_value(k[x], space) for x in sel.domain)
            rhs = " ".join(str(x) for x in sel.domain if x in chosen)
            lines.append(f"table[{i}]: {lhs} -> {rhs}")
        return lines
    raise ValueError(f"selection {tag!r} has no file representation")


def serialize_game(game: GameSpec) -> str:
    """Canonical text of ``game``; parsing it gives back an equal game."""
    space = game.space
    lines = [f"rounds: {game.rounds}"]
    lines += [f"choices[{i}]: " + " ".join(map(str, xs)) for i, xs in enumerate(game.choices, 1)]
    if space.kind == "poset":
        lines.append(f"outcome-kind: poset {space.name}")
        lines.append(f"poset {space.name}: elements " + " ".join(space.elements))
        for a, b in itertools.combinations(space.elements, 2):
            lines.append(f"poset {space.name}: join {a} {b} -> {space.join(a, b)}")
    else:
        lines.append(f"outcome-kind: {space.kind} {space.dim}")
    for i, sel in enumerate(game.selections, 1):
        lines += _write_selection(i, sel, space)
    for play in game.plays():
        lines.append(f"q({','.join(map(str, play))}): {_write_value(game.outcome[play], space)}")
    return "\n".join(lines) + "\n"


def _selection_signature(sel: MultiSelection) -> tuple:
    if sel.tag == "extensional":
        return (sel.tag, frozenset(sel.params[0].items()))
    return (sel.tag, sel.params)


def games_equal(a: GameSpec, b: GameSpec) -> bool:
    return (
        a.choices == b.choices
        and a.space == b.space
        and a.outcome == b.outcome
        and [set(s.domain) for s in a.selections] == [set(s.domain) for s in b.selections]
        and [_selection_signature(s) for s in a.selections] == [_selection_signature(s) for s in b.selections]
    )


def _play_text(play: tuple) -> str:
    return "(" + ",".join(format_value(x) for x in play) + ")"


def _plays_text(game: GameSpec, plays: frozenset) -> str:
    return "{" + ",".join(_play_text(p) for p in game.sort_plays(plays)) + "}"


def _plays_json(game: GameSpec, plays: frozenset) -> list:
    return [[format_value(x) for x in p] for p in game.sort_plays(plays)]


def serialize_plays(game: GameSpec, plays: frozenset, fmt: str = "text", label: str = "plays", **extra: Any) -> str:
    """One play set, e.g. the answer to ``solve``."""
    if fmt == "json":
        doc = {label: _plays_json(game, plays), **extra}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    notes = "".join(f"# {k}: {v}\n" for k, v in sorted(extra.items()))
    return notes + _plays_text(game, plays) + "\n"


def serialize_report(report: SolutionReport, fmt: str = "text") -> str:
    """Deterministic rendering of a :class:`SolutionReport` as ``text`` or ``json``."""
    game = report.game
    sets = report.play_sets()
    oracle = "derived" if report.spe_derived else "definition"
    witness = None
    if report.indifference_witness is not None:
        witness = [format_value(x) for x in report.indifference_witness]
    if fmt == "json":
        doc = {
            "rounds": game.rounds,
            "play_sets": {name: _plays_json(game, plays) for name, plays in sets.items()},
            "spe_oracle": oracle,
            "coinciding_indifference": report.coinciding_indifference,
            "indifference_witness": witness,
            "relations": [
                {"left": a, "right": b, "relation": rel} for (a, b), rel in report.relations.items()
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"rounds: {game.rounds}"]
    for name, plays in sets.items():
        suffix = f" ({oracle})" if name == "spe_plays" and report.spe_derived else ""
        lines.append(f"{name}{suffix}: {_plays_text(game, plays)}")
    if report.coinciding_indifference is not None:
        flag = "true" if report.coinciding_indifference else "false"
        if witness:
            flag += f" (x={witness[0]}, y={witness[1]}, y'={witness[2]})"
        lines.append(f"coinciding_indifference: {flag}")
    if report.relations:
        lines.append("relations:")
        lines += [f"  {a} {rel} {b}" for (a, b), rel in report.relations.items()]
    return "\n".join(lines) + "\n"
