"""Decision procedures for witnessing and upwards-closed selection functions.

Both properties quantify over indexing functions ``I : X -> P(X -> R)``.
Only the value ``p(x)`` of a context ``p`` in ``I(x)`` is ever inspected, so an
indexing function matters solely through the value sets
``V(x) = {p(x) | p in I(x)}``.  The exhaustive checkers therefore enumerate
every assignment of a nonempty subset of the universe to each choice, and
report counterexamples using constant contexts, which realize every such
assignment.  This is complete relative to the finite universe.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .core import (
    DEFAULT_BOUND,
    Context,
    DomainError,
    NonemptySet,
    OutcomeSpace,
    ResourceBoundError,
    all_contexts,
    constant_context,
    format_value,
    nonempty_subsets,
)
from .game import GameSpec
from .selection import MultiSelection, product_multi
from .dominance import strict_dominance_selection

__all__ = [
    "ContextUniverse",
    "IndexingFunction",
    "CheckResult",
    "collapse",
    "choice_functions",
    "witnessing_violation",
    "upwards_closed_violation",
    "is_witnessing",
    "is_upwards_closed",
    "pathological_delta",
    "application_game",
    "ProductCounterexample",
    "product_witnessing_counterexample",
]


class ContextUniverse:
    """A finite set of outcome values from which contexts are built.

    The values must be closed under the join so that collapsing an indexing
    function never leaves the universe.
    """

    def __init__(self, values: Iterable, space: OutcomeSpace):
        normalized: list = []
        for v in values:
            v = space.value(v)
            if v not in normalized:
                normalized.append(v)
        if not normalized:
            raise ValueError("a context universe needs at least one value")
        members = set(normalized)
        for a, b in itertools.combinations(normalized, 2):
            if space.join(a, b) not in members:
                raise DomainError(f"universe is not closed under join: {format_value(a)} v {format_value(b)} is missing")
        self.values = tuple(normalized)
        self.space = space

    @classmethod
    def closure(cls, values: Iterable, space: OutcomeSpace) -> ContextUniverse:
        """The smallest join-closed universe containing ``values``."""
        found = [space.value(v) for v in values]
        frontier = list(found)
        while frontier:
            new = []
            for a in frontier:
                for b in list(found):
                    j = space.join(a, b)
                    if j not in found:
                        found.append(j)
                        new.append(j)
            frontier = new
        return cls(found, space)

    @classmethod
    def of_space(cls, space: OutcomeSpace) -> ContextUniverse:
        if space.kind != "poset":
            raise ValueError("only poset spaces have a default universe")
        return cls(space.elements, space)

    def contexts(self, domain: Iterable) -> list[Context]:
        return all_contexts(domain, self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __repr__(self) -> str:
        return f"ContextUniverse({list(self.values)!r})"


class IndexingFunction(Mapping):
    """A total map from choices to nonempty sets of contexts.

    The order in which contexts are listed for each choice is kept for
    display; membership is what matters.
    """

    def __init__(self, table: Mapping[Any, Iterable[Context]]):
        self._table = {}
        for x, ps in table.items():
            ps = tuple(dict.fromkeys(ps))
            if not ps:
                raise ValueError(f"indexing function is empty at {x!r}")
            self._table[x] = ps

    @classmethod
    def constant_values(cls, domain: Iterable, values: Mapping[Any, Iterable]) -> IndexingFunction:
        """``x -> {c_v | v in values[x]}`` with ``c_v`` the constant context."""
        domain = tuple(domain)
        return cls({x: [constant_context(domain, v) for v in values[x]] for x in domain})

    def __getitem__(self, x: Any) -> tuple[Context, ...]:
        return self._table[x]

    def __iter__(self):
        return iter(self._table)

    def __len__(self) -> int:
        return len(self._table)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IndexingFunction):
            return NotImplemented
        return {x: frozenset(ps) for x, ps in self._table.items()} == {
            x: frozenset(ps) for x, ps in other._table.items()
        }

    __hash__ = None

    def __repr__(self) -> str:
        return f"IndexingFunction({self._table!r})"


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a property check.

    ``choice`` is only set for upwards-closedness violations.  ``universe``
    records what the verdict is relative to.
    """

    holds: bool
    prop: str
    indexing: IndexingFunction | None = None
    choice: Context | None = None
    element: Any = None
    checked: int = 0
    universe: ContextUniverse | None = None

    def __bool__(self) -> bool:
        return self.holds


def collapse(I: Mapping[Any, Iterable[Context]], space: OutcomeSpace) -> Context:
    """The context ``x -> join {p(x) | p in I(x)}``."""
    return Context({x: space.join_all(p(x) for p in ps) for x, ps in I.items()})


def choice_functions(I: Mapping[Any, Iterable[Context]]):
    """Yield each choice function for ``I`` as a dict ``x -> p_x``."""
    xs = list(I)
    for picks in itertools.product(*(I[x] for x in xs)):
        yield dict(zip(xs, picks))


def _diagonal(choice: Mapping[Any, Context]) -> Context:
    """The context ``x -> p_x(x)``."""
    return Context({x: p(x) for x, p in choice.items()})


def witnessing_violation(eps: MultiSelection, I: Mapping[Any, Iterable[Context]], space: OutcomeSpace | None = None):
    """The first ``x`` accepted on the collapse of ``I`` but under no choice function, else ``None``."""
    space = space or eps.space
    missing = set(eps(collapse(I, space)))
    for choice in choice_functions(I):
        missing -= eps(_diagonal(choice))
        if not missing:
            return None
    return min(missing, key=eps.domain.index)


def upwards_closed_violation(
    eps: MultiSelection, I: Mapping[Any, Iterable[Context]], space: OutcomeSpace | None = None
):
    """The first ``(p, x)`` with ``x`` accepted under choice function ``p`` but not on the collapse."""
    space = space or eps.space
    collapsed = eps(collapse(I, space))
    for choice in choice_functions(I):
        extra = eps(_diagonal(choice)) - collapsed
        if extra:
            return choice, min(extra, key=eps.domain.index)
    return None


def _value_assignments(eps: MultiSelection, universe: ContextUniverse, bound: int):
    subsets = nonempty_subsets(universe.values)
    count = len(subsets) ** len(eps.domain)
    if count > bound:
        raise ResourceBoundError("indexing functions", count, bound)
    return itertools.product(subsets, repeat=len(eps.domain)), count


def _evaluator(eps: MultiSelection):
    cache: dict = {}
    domain = eps.domain

    def evaluate(values: tuple) -> NonemptySet:
        try:
            return cache[values]
        except KeyError:
            cache[values] = out = eps(Context(zip(domain, values)))
            return out

    return evaluate


def is_witnessing(eps: MultiSelection, universe: ContextUniverse, bound: int = DEFAULT_BOUND) -> CheckResult:
    """Exhaustively decide witnessing relative to ``universe``."""
    space = universe.space
    evaluate = _evaluator(eps)
    assignments, count = _value_assignments(eps, universe, bound)
    for vsets in assignments:
        missing = set(evaluate(tuple(space.join_all(vs) for vs in vsets)))
        for diagonal in itertools.product(*vsets):
            missing -= evaluate(diagonal)
            if not missing:
                break
        else:
            x = min(missing, key=eps.domain.index)
            I = IndexingFunction.constant_values(eps.domain, dict(zip(eps.domain, vsets)))
            return CheckResult(False, "witnessing", I, None, x, count, universe)
    return CheckResult(True, "witnessing", checked=count, universe=universe)


def is_upwards_closed(eps: MultiSelection, universe: ContextUniverse, bound: int = DEFAULT_BOUND) -> CheckResult:
    """Exhaustively decide upwards-closedness relative to ``universe``."""
    space = universe.space
    evaluate = _evaluator(eps)
    assignments, count = _value_assignments(eps, universe, bound)
    domain = eps.domain
    for vsets in assignments:
        collapsed = evaluate(tuple(space.join_all(vs) for vs in vsets))
        for diagonal in itertools.product(*vsets):
            extra = evaluate(diagonal) - collapsed
            if extra:
                x = min(extra, key=domain.index)
                I = IndexingFunction.constant_values(domain, dict(zip(domain, vsets)))
                choice = {x2: constant_context(domain, v) for x2, v in zip(domain, diagonal)}
                return CheckResult(False, "upwards-closed", I, _diagonal(choice), x, count, universe)
    return CheckResult(True, "upwards-closed", checked=count, universe=universe)


# -- counterexample constructions ---------------------------------------------


def _application_section(x: Any, contexts: Iterable[Context]) -> Context:
    """``q(x, -)`` for the application outcome ``q(x, p) = p(x)``."""
    return Context({p: p(x) for p in contexts})


def pathological_delta(I: IndexingFunction, universe: ContextUniverse) -> MultiSelection:
    """The selection over contexts that answers ``I(x')`` when shown ``q(x', -)``.

    Here ``q(x, p) = p(x)`` is function application and the choice set is
    every context ``X -> universe``.  Any other context falls back to
    ``I(x0)`` for the first choice ``x0``.
    """
    domain = tuple(I)
    if len(universe) < 2:
        raise ValueError("the construction needs at least two outcome values")
    contexts = universe.contexts(domain)
    members = set(contexts)
    for x in domain:
        if not set(I[x]) <= members:
            raise DomainError(f"I({x!r}) uses contexts outside the universe")
    sections = {_application_section(x, contexts): x for x in domain}
    fallback = I[domain[0]]

    def rule(p: Context) -> tuple:
        x = sections.get(p)
        return I[x] if x is not None else fallback

    return MultiSelection(contexts, rule, "pathological", (I,), universe.space)


def application_game(eps: MultiSelection, delta: MultiSelection, universe: ContextUniverse) -> GameSpec:
    """The 2-round game with ``Y = X -> universe`` and outcome ``q(x, p) = p(x)``."""
    xs = eps.domain
    contexts = universe.contexts(xs)
    outcome = {(x, p): p(x) for x in xs for p in contexts}
    return GameSpec([xs, contexts], universe.space, outcome, [eps, delta], validate=False)


@dataclass(frozen=True)
class ProductCounterexample:
    """Data showing two witnessing selections whose product is not witnessing."""

    choices: tuple
    space: OutcomeSpace
    eps: MultiSelection
    delta: MultiSelection
    p_eps: Context
    p_delta: Context
    p_zero: Context
    indexing: IndexingFunction
    universe: ContextUniverse

    @property
    def product(self) -> MultiSelection:
        return product_multi(self.eps, self.delta, self.space)


def product_witnessing_counterexample() -> ProductCounterexample:
    """Strict-dominance selections on ``X = {0, 1}`` over sets of points in the plane."""
    space = OutcomeSpace.sets(2)
    xs = (0, 1)
    pairs = tuple(itertools.product(xs, xs))
    zero = frozenset({(Fraction(0), Fraction(0))})
    first = frozenset({(Fraction(1), Fraction(-1))})
    second = frozenset({(Fraction(-1), Fraction(1))})
    p_eps = Context({xy: first if xy == (0, 0) else zero for xy in pairs})
    p_delta = Context({xy: second if xy == (0, 0) else zero for xy in pairs})
    p_zero = Context({xy: zero for xy in pairs})
    I = IndexingFunction({xy: (p_eps, p_delta) if xy == (0, 0) else (p_zero,) for xy in pairs})
    return ProductCounterexample(
        choices=xs,
        space=space,
        eps=strict_dominance_selection(1, xs, 2, space),
        delta=strict_dominance_selection(2, xs, 2, space),
        p_eps=p_eps,
        p_delta=p_delta,
        p_zero=p_zero,
        indexing=I,
        universe=ContextUniverse.closure([first, second, zero], space),
    )
