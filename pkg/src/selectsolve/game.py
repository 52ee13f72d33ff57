"""Sequential games, strategies, strategic plays and subgames."""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping, Sequence
from typing import Any

from .core import DEFAULT_BOUND, Context, DomainError, OutcomeSpace, ResourceBoundError
from .selection import MultiSelection, argmax_selection

__all__ = [
    "GameSpec",
    "Strategy",
    "strategic_play",
    "strategic_extension",
    "enumerate_strategies",
    "strategy_count",
    "subgame",
    "classical_game",
]


class GameSpec:
    """An n-round higher-order sequential game of perfect information.

    ``choices[i]`` is the choice set of round ``i + 1`` in declaration order,
    ``outcome`` maps every full play (an n-tuple) to an outcome in ``space``
    and ``selections[i]`` is the selection function of round ``i + 1``.
    """

    def __init__(
        self,
        choices: Sequence[Iterable],
        space: OutcomeSpace,
        outcome: Mapping[tuple, Any],
        selections: Sequence[MultiSelection],
        validate: bool = True,
    ):
        self.choices = tuple(tuple(xs) for xs in choices)
        self.space = space
        self.outcome = dict(outcome)
        self.selections = tuple(selections)
        if validate:
            self._validate()

    @property
    def rounds(self) -> int:
        return len(self.choices)

    def _validate(self) -> None:
        if not self.choices:
            raise ValueError("a game needs at least one round")
        for i, xs in enumerate(self.choices, 1):
            if not xs:
                raise ValueError(f"round {i} has no choices")
            if len(set(xs)) != len(xs):
                raise ValueError(f"round {i} has duplicate choices")
        if len(self.selections) != self.rounds:
            raise ValueError(f"expected {self.rounds} selection functions, got {len(self.selections)}")
        for i, (xs, sel) in enumerate(zip(self.choices, self.selections), 1):
            if set(sel.domain) != set(xs):
                raise ValueError(f"selection of round {i} is not over the round's choice set")
            if sel.space is not None and sel.space != self.space:
                raise ValueError(f"selection of round {i} uses a different outcome space")
        for play in self.plays():
            if play not in self.outcome:
                raise DomainError(f"outcome table is missing play {play!r}")
            if not self.space.contains(self.outcome[play]):
                raise DomainError(f"outcome of {play!r} is not in {self.space.describe()}")
        if len(self.outcome) != math.prod(len(xs) for xs in self.choices):
            raise DomainError("outcome table has entries that are not plays")

    def q(self, play: tuple) -> Any:
        return self.outcome[tuple(play)]

    def plays(self) -> Iterable[tuple]:
        return itertools.product(*self.choices)

    def histories(self, i: int) -> list[tuple]:
        """All partial plays observed before round ``i`` (1-based)."""
        return list(itertools.product(*self.choices[: i - 1]))

    def outcome_context(self) -> Context:
        return Context((p, self.outcome[p]) for p in self.plays())

    def play_key(self, play: tuple) -> tuple:
        """Sort key putting plays in declaration order."""
        return tuple(xs.index(x) for xs, x in zip(self.choices, play))

    def sort_plays(self, plays: Iterable[tuple]) -> list[tuple]:
        return sorted(plays, key=self.play_key)

    def __repr__(self) -> str:
        sizes = "x".join(str(len(xs)) for xs in self.choices)
        return f"GameSpec(rounds={self.rounds}, choices={sizes}, space={self.space.describe()})"


class Strategy:
    """A total table from histories of earlier rounds to a choice at ``round``."""

    __slots__ = ("round", "table", "_hash")

    def __init__(self, round: int, table: Mapping[tuple, Any]):
        self.round = round
        self.table = dict(table)
        self._hash = None

    def __call__(self, history: tuple) -> Any:
        return self.table[tuple(history)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Strategy):
            return NotImplemented
        return self.round == other.round and self.table == other.table

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.round, frozenset(self.table.items())))
        return self._hash

    def __repr__(self) -> str:
        if self.round == 1:
            return f"Strategy(1, {self.table[()]!r})"
        return f"Strategy({self.round}, {self.table!r})"

    @classmethod
    def constant(cls, round: int, choice: Any, game: GameSpec) -> Strategy:
        return cls(round, {h: choice for h in game.histories(round)})


def _check_strategy(s: Strategy, game: GameSpec) -> None:
    allowed = set(game.choices[s.round - 1])
    for h in game.histories(s.round):
        if h not in s.table:
            raise DomainError(f"strategy for round {s.round} is undefined at {h!r}")
        if s.table[h] not in allowed:
            raise DomainError(f"strategy for round {s.round} plays {s.table[h]!r} outside its choice set")


def strategic_extension(
    partial: tuple,
    strategies: Sequence[Strategy],
    game: GameSpec | None = None,
) -> tuple:
    """Extend ``partial`` (length j) by the strategies of rounds j+1..n."""
    play = tuple(partial)
    for s in strategies:
        if s.round != len(play) + 1:
            raise ValueError(f"strategy for round {s.round} cannot extend a play of length {len(play)}")
        if game is not None:
            _check_strategy(s, game)
        play = play + (s(play),)
    if game is not None and len(play) != game.rounds:
        raise ValueError(f"strategies extend to length {len(play)}, game has {game.rounds} rounds")
    return play


def strategic_play(profile: Sequence[Strategy], game: GameSpec | None = None) -> tuple:
    """The play obtained by running every strategy forward from the empty history."""
    return strategic_extension((), profile, game)


def strategy_count(game: GameSpec, i: int) -> int:
    n_hist = math.prod(len(xs) for xs in game.choices[: i - 1])
    return len(game.choices[i - 1]) ** n_hist


def enumerate_strategies(game: GameSpec, i: int, bound: int = DEFAULT_BOUND) -> list[Strategy]:
    """Every strategy of round ``i``, ordered lexicographically over the histories."""
    if not 1 <= i <= game.rounds:
        raise ValueError(f"round {i} out of range")
    count = strategy_count(game, i)
    if count > bound:
        raise ResourceBoundError(f"strategies of round {i}", count, bound)
    hists = game.histories(i)
    return [
        Strategy(i, dict(zip(hists, moves)))
        for moves in itertools.product(game.choices[i - 1], repeat=len(hists))
    ]


def subgame(game: GameSpec, partial: tuple) -> GameSpec:
    """The game left after ``partial`` has been played."""
    partial = tuple(partial)
    j = len(partial)
    if j >= game.rounds:
        raise ValueError("a subgame needs at least one remaining round")
    if j == 0:
        return game
    for xs, x in zip(game.choices, partial):
        if x not in xs:
            raise DomainError(f"{x!r} is not a legal choice")
    rest = game.choices[j:]
    outcome = {tail: game.outcome[partial + tail] for tail in itertools.product(*rest)}
    return GameSpec(rest, game.space, outcome, game.selections[j:], validate=False)


def classical_game(choices: Sequence[Iterable], payoffs: Mapping[tuple, Sequence]) -> GameSpec:
    """A game over real payoff vectors where round ``i`` maximizes coordinate ``i``."""
    choices = [tuple(xs) for xs in choices]
    space = OutcomeSpace.vector(len(choices))
    outcome = {tuple(p): space.value(v) for p, v in payoffs.items()}
    selections = [argmax_selection(i, xs, space) for i, xs in enumerate(choices, 1)]
    return GameSpec(choices, space, outcome, selections)
