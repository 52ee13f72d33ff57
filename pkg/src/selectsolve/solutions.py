"""Solution concepts of sequential games, all computed by exhaustive enumeration."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any

from .core import DEFAULT_BOUND, Context, ResourceBoundError
from .game import GameSpec, Strategy, enumerate_strategies, strategic_extension, strategic_play, strategy_count
from .selection import nary_product

__all__ = [
    "product_plays",
    "is_rational_profile",
    "rational_plays",
    "spe_plays",
    "ConsistentSets",
    "sigma_sets",
    "sigma_plays",
    "coinciding_indifference",
    "SolutionReport",
    "compare",
    "relation",
]


def _require_two_rounds(game: GameSpec) -> None:
    if game.rounds != 2:
        raise ValueError(f"defined for 2-round games only, this game has {game.rounds} rounds")


def _section(game: GameSpec, x: Any) -> Context:
    """The context ``y -> q(x, y)`` of the second round."""
    return Context({y: game.outcome[x, y] for y in game.choices[1]})


def product_plays(game: GameSpec) -> frozenset:
    """Plays returned by the n-ary product of the game's selections applied to ``q``."""
    if game.rounds == 1:
        (eps,) = game.selections
        return frozenset((x,) for x in eps(Context({x: game.outcome[(x,)] for x in game.choices[0]})))
    return frozenset(nary_product(game.selections, game.space)(game.outcome_context()))


def is_rational_profile(sigma1: Any, sigma2: Strategy | Any, game: GameSpec) -> tuple[bool, dict | None]:
    """Decide rationality of ``(sigma1, sigma2)`` in a 2-round game.

    ``sigma2`` is a :class:`Strategy` of round 2 or a plain mapping ``x -> y``.
    On success the witnessing hypothesis ``y(.)`` is returned as a dict.
    """
    _require_two_rounds(game)
    eps, delta = game.selections
    xs = game.choices[0]
    second = sigma2.table if isinstance(sigma2, Strategy) else sigma2
    responses = {x: delta(_section(game, x)) for x in xs}
    for x in xs:
        move = second[(x,)] if (x,) in second else second[x]
        if move not in responses[x]:
            return False, None
    for ys in itertools.product(*(sorted(responses[x], key=game.choices[1].index) for x in xs)):
        hypothesis = dict(zip(xs, ys))
        if sigma1 in eps(Context({x: game.outcome[x, hypothesis[x]] for x in xs})):
            return True, hypothesis
    return False, None


def rational_plays(game: GameSpec, bound: int = DEFAULT_BOUND) -> frozenset:
    """Plays ``(sigma1, sigma2(sigma1))`` of every rational profile."""
    _require_two_rounds(game)
    count = len(game.choices[0]) * strategy_count(game, 2)
    if count > bound:
        raise ResourceBoundError("2-round strategy profiles", count, bound)
    plays = set()
    for sigma2 in enumerate_strategies(game, 2, bound):
        for sigma1 in game.choices[0]:
            ok, _ = is_rational_profile(sigma1, sigma2, game)
            if ok:
                plays.add((sigma1, sigma2((sigma1,))))
    return frozenset(plays)


def _acceptable_at(game: GameSpec, history: tuple, continuation: tuple) -> frozenset:
    """Choices the selection at ``history`` accepts when later rounds follow ``continuation``."""
    i = len(history)
    k = Context(
        {y: game.outcome[strategic_extension(history + (y,), continuation)] for y in game.choices[i]}
    )
    return game.selections[i](k)


def _check_profile_bound(game: GameSpec, bound: int) -> None:
    total = math.prod(strategy_count(game, i) for i in range(1, game.rounds + 1))
    if total > bound:
        raise ResourceBoundError("strategy profiles", total, bound)


def spe_profiles(game: GameSpec, bound: int = DEFAULT_BOUND) -> list[tuple[Strategy, ...]]:
    """Profiles in which every round's move is acceptable in every subgame.

    For two rounds this is the usual subgame perfect equilibrium of a
    higher-order game.  For more rounds the continuation used at a history
    is the profile's own later strategies.
    """
    _check_profile_bound(game, bound)
    suffixes: list[tuple[Strategy, ...]] = [()]
    for i in range(game.rounds, 0, -1):
        strategies = enumerate_strategies(game, i, bound)
        hists = game.histories(i)
        extended = []
        for suffix in suffixes:
            accepted = {h: _acceptable_at(game, h, suffix) for h in hists}
            for s in strategies:
                if all(s.table[h] in accepted[h] for h in hists):
                    extended.append((s,) + suffix)
        suffixes = extended
    return suffixes


def spe_plays(game: GameSpec, bound: int = DEFAULT_BOUND) -> frozenset:
    return frozenset(strategic_play(profile) for profile in spe_profiles(game, bound))


@dataclass(frozen=True)
class ConsistentSets:
    """The maximal consistent set of strategies, split by round (index 0 is round 1)."""

    rounds: tuple[tuple[Strategy, ...], ...]

    def __getitem__(self, i: int) -> tuple[Strategy, ...]:
        """Strategies of round ``i`` (1-based)."""
        return self.rounds[i - 1]

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.rounds)


def sigma_sets(game: GameSpec, bound: int = DEFAULT_BOUND) -> ConsistentSets:
    """Compute the maximal consistent strategy sets from the last round down.

    A round-``i`` strategy survives when, at every history of length
    ``i - 1``, its move is accepted for *some* continuation drawn from the
    sets already computed for rounds ``i + 1 .. n``.  Because histories are
    independent, the survivors are exactly the strategies whose move at each
    history lies in the union of accepted moves over those continuations.
    """
    n = game.rounds
    per_round: list[tuple[Strategy, ...]] = [()] * n
    for i in range(n, 0, -1):
        hists = game.histories(i)
        later = per_round[i:]
        continuations = math.prod(len(r) for r in later)
        if continuations * len(hists) > bound:
            raise ResourceBoundError(f"continuations at round {i}", continuations * len(hists), bound)
        allowed = {}
        for h in hists:
            accepted: set = set()
            seen: set = set()
            for cont in itertools.product(*later):
                play_tails = tuple(strategic_extension(h + (y,), cont) for y in game.choices[i - 1])
                if play_tails in seen:
                    continue
                seen.add(play_tails)
                accepted |= _acceptable_at(game, h, cont)
            allowed[h] = [x for x in game.choices[i - 1] if x in accepted]
        count = math.prod(len(v) for v in allowed.values())
        if count > bound:
            raise ResourceBoundError(f"consistent strategies of round {i}", count, bound)
        per_round[i - 1] = tuple(
            Strategy(i, dict(zip(hists, moves))) for moves in itertools.product(*(allowed[h] for h in hists))
        )
    return ConsistentSets(tuple(per_round))


def sigma_plays(game: GameSpec, sets: ConsistentSets | None = None, bound: int = DEFAULT_BOUND) -> frozenset:
    """Strategic plays of profiles whose round-``i`` strategy lies in the round-``i`` set.

    A strategic play queries each strategy at a single history, and the sets
    are chosen independently per round, so a play qualifies exactly when each
    move is made by some surviving strategy at the preceding history.
    """
    sets = sets if sets is not None else sigma_sets(game, bound)
    if any(not r for r in sets.rounds):
        return frozenset()
    moves = [
        {h: {s(h) for s in sets[i]} for h in game.histories(i)} for i in range(1, game.rounds + 1)
    ]
    plays = [()]
    for i in range(game.rounds):
        plays = [p + (x,) for p in plays for x in game.choices[i] if x in moves[i][p]]
    return frozenset(plays)


def coinciding_indifference(game: GameSpec) -> tuple[bool, tuple | None]:
    """Whether the second round's indifferences never change the first round's choice.

    Returns ``(False, (x, y, y'))`` for the first violation found.
    """
    _require_two_rounds(game)
    eps, delta = game.selections
    xs, ys = game.choices
    first = {y: eps(Context({x: game.outcome[x, y] for x in xs})) for y in ys}
    for x in xs:
        indifferent = [y for y in ys if y in delta(_section(game, x))]
        for y, y2 in itertools.combinations(indifferent, 2):
            if first[y] != first[y2]:
                return False, (x, y, y2)
    return True, None


def relation(a: frozenset, b: frozenset) -> str:
    if a == b:
        return "equal"
    if a < b:
        return "subset"
    if a > b:
        return "superset"
    return "incomparable"


@dataclass
class SolutionReport:
    """Play sets of one game and how they relate to each other."""

    game: GameSpec
    product_plays: frozenset
    spe_plays: frozenset
    sigma_plays: frozenset
    rational_plays: frozenset | None = None
    coinciding_indifference: bool | None = None
    indifference_witness: tuple | None = None
    spe_derived: bool = False
    relations: dict[tuple[str, str], str] = field(default_factory=dict)

    def play_sets(self) -> dict[str, frozenset]:
        sets = {"product_plays": self.product_plays}
        if self.rational_plays is not None:
            sets["rational_plays"] = self.rational_plays
        sets["sigma_plays"] = self.sigma_plays
        sets["spe_plays"] = self.spe_plays
        return sets


def compare(game: GameSpec, bound: int = DEFAULT_BOUND) -> SolutionReport:
    report = SolutionReport(
        game=game,
        product_plays=product_plays(game),
        spe_plays=spe_plays(game, bound),
        sigma_plays=sigma_plays(game, bound=bound),
        spe_derived=game.rounds > 2,
    )
    if game.rounds == 2:
        report.rational_plays = rational_plays(game, bound)
        report.coinciding_indifference, report.indifference_witness = coinciding_indifference(game)
    sets = report.play_sets()
    for a, b in itertools.combinations(sets, 2):
        report.relations[a, b] = relation(sets[a], sets[b])
    return report
