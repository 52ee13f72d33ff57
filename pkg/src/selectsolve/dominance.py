"""Strict dominance between finite sets of reals, and elimination procedures."""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

from .core import DEFAULT_BOUND, Context, OutcomeSpace, ResourceBoundError
from .game import GameSpec, enumerate_strategies, strategic_play
from .selection import MultiSelection

__all__ = [
    "strictly_dominates",
    "strict_dominance_selection",
    "NormalFormGame",
    "iterated_removal",
    "normal_form",
    "normal_form_plays",
    "surviving_plays",
]


def strictly_dominates(s: Iterable, t: Iterable) -> bool:
    """``min(s) > max(t)``."""
    s, t = list(s), list(t)
    if not s or not t:
        raise ValueError("strict dominance compares nonempty sets")
    return min(s) > max(t)


def _projection(outcome: Any, i: int) -> set:
    """Coordinate ``i`` (1-based) of a set of vectors, or of a single vector."""
    if isinstance(outcome, frozenset):
        return {v[i - 1] for v in outcome}
    return {outcome[i - 1]}


def strict_dominance_selection(
    i: int, domain: Iterable, dim: int, space: OutcomeSpace | None = None
) -> MultiSelection:
    """Choices whose ``i``-th projected outcome set is not strictly dominated by another's."""
    if not 1 <= i <= dim:
        raise ValueError(f"player {i} out of range for dimension {dim}")
    if space is None:
        space = OutcomeSpace.sets(dim)
    domain = tuple(domain)

    def rule(k: Context) -> list:
        lows = {x: min(_projection(k[x], i)) for x in domain}
        highs = {x: max(_projection(k[x], i)) for x in domain}
        best_low = max(lows.values())
        return [x for x in domain if not best_low > highs[x]]

    return MultiSelection(domain, rule, "strict-dominance", (i,), space)


@dataclass(frozen=True)
class NormalFormGame:
    """Finite strategy sets per player and a payoff for every strategy profile.

    A payoff is a real vector, or a finite set of real vectors when several
    outcomes are possible.
    """

    strategies: tuple[tuple, ...]
    payoffs: Mapping[tuple, Any]

    def __post_init__(self):
        for profile in itertools.product(*self.strategies):
            if profile not in self.payoffs:
                raise ValueError(f"payoff table is missing profile {profile!r}")


def _dominated(game: NormalFormGame, alive: list[list], player: int, s: Any) -> bool:
    others = [alive[j] for j in range(len(alive)) if j != player]

    def outcome(choice: Any, rest: tuple) -> set:
        profile = rest[:player] + (choice,) + rest[player:]
        return _projection(game.payoffs[profile], player + 1)

    for t in alive[player]:
        if t == s:
            continue
        if all(strictly_dominates(outcome(t, rest), outcome(s, rest)) for rest in itertools.product(*others)):
            return True
    return False


def iterated_removal(game: NormalFormGame, rng: random.Random | None = None) -> tuple[tuple, ...]:
    """Delete strictly dominated pure strategies until none remain.

    Without ``rng`` every dominated strategy is removed in each pass.  With
    ``rng`` a single randomly chosen dominated strategy goes at a time, which
    is how order independence is exercised.
    """
    alive = [list(s) for s in game.strategies]
    while True:
        dominated = [
            (p, s) for p in range(len(alive)) for s in alive[p] if _dominated(game, alive, p, s)
        ]
        if not dominated:
            return tuple(tuple(s) for s in alive)
        if rng is not None:
            dominated = [rng.choice(dominated)]
        for p, s in dominated:
            alive[p].remove(s)


def normal_form(seq_game: GameSpec, bound: int = DEFAULT_BOUND) -> NormalFormGame:
    """Strategic form of a sequential game over full strategy tables."""
    strategies = tuple(tuple(enumerate_strategies(seq_game, i, bound)) for i in range(1, seq_game.rounds + 1))
    total = 1
    for s in strategies:
        total *= len(s)
    if total > bound:
        raise ResourceBoundError("strategy profiles", total, bound)
    payoffs = {profile: seq_game.q(strategic_play(profile)) for profile in itertools.product(*strategies)}
    return NormalFormGame(strategies, payoffs)


def normal_form_plays(seq_game: GameSpec, bound: int = DEFAULT_BOUND) -> frozenset:
    """Plays of profiles surviving iterated removal in the strategic form."""
    survivors = iterated_removal(normal_form(seq_game, bound))
    return frozenset(strategic_play(profile) for profile in itertools.product(*survivors))


def surviving_plays(choices: Sequence[Sequence], outcome: Mapping[tuple, Any]) -> frozenset:
    """Plays left when every node prunes moves that are strictly dominated there.

    Works directly on the game tree.  At a node of round ``i`` each move is
    scored by the set of player-``i`` payoffs reachable through the surviving
    plays below it; a move is pruned when another move's worst score beats
    its best.
    """
    n = len(choices)

    def below(history: tuple) -> list[tuple]:
        i = len(history)
        if i == n:
            return [history]
        reachable = {x: below(history + (x,)) for x in choices[i]}
        scores = {
            x: [v for play in plays for v in _projection(outcome[play], i + 1)]
            for x, plays in reachable.items()
        }
        kept = [
            x for x in choices[i] if not any(min(scores[y]) > max(scores[x]) for y in choices[i] if y != x)
        ]
        return [play for x in kept for play in reachable[x]]

    return frozenset(below(()))
