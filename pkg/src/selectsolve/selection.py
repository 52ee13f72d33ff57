"""Deterministic and multi-valued selection functions.

A multi-valued selection function over a finite choice set ``X`` maps every
context ``k : X -> R`` to a nonempty subset of ``X``.  Contexts are always
materialized as :class:`~selectsolve.core.Context` tables.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Mapping, Sequence
from typing import Any

from .core import (
    Context,
    DomainError,
    NonemptySet,
    OutcomeSpace,
    all_contexts,
    nonempty_subsets,
    powerset_bind,
    powerset_dependent_product,
)

__all__ = [
    "MultiSelection",
    "DetSelection",
    "selection_unit",
    "bind_multi",
    "product_det",
    "product_multi",
    "nary_product",
    "nary_product_det",
    "argmax_selection",
    "argmax_det",
    "constant_selection",
    "favourite_selection",
    "extensional_selection",
    "enumerate_extensional",
]


class MultiSelection:
    """A multi-valued selection function ``(X -> R) -> P(X)``.

    ``tag`` names the family the selection came from and ``params`` carries
    whatever is needed to rebuild or serialize it.
    """

    def __init__(
        self,
        domain: Iterable,
        rule: Callable[[Context], Iterable],
        tag: str = "rule",
        params: tuple = (),
        space: OutcomeSpace | None = None,
    ):
        self.domain = tuple(domain)
        if not self.domain:
            raise ValueError("a selection function needs a nonempty choice set")
        self._members = frozenset(self.domain)
        self.rule = rule
        self.tag = tag
        self.params = params
        self.space = space

    def __call__(self, k: Context) -> NonemptySet:
        result = NonemptySet(self.rule(k))
        if not result <= self._members:
            raise DomainError(f"{self.tag} selected {set(result - self._members)} outside its domain")
        return result

    def memoized(self) -> MultiSelection:
        """Same selection, caching results per context."""
        cache: dict = {}
        rule = self.__call__

        def cached(k: Context) -> NonemptySet:
            try:
                return cache[k]
            except KeyError:
                cache[k] = out = rule(k)
                return out

        return MultiSelection(self.domain, cached, self.tag, self.params, self.space)

    def tabulate(self, contexts: Iterable[Context]) -> MultiSelection:
        """The extensional selection agreeing with this one on ``contexts``."""
        return extensional_selection(self.domain, {k: self(k) for k in contexts}, self.space)

    def with_space(self, space: OutcomeSpace) -> MultiSelection:
        return MultiSelection(self.domain, self.rule, self.tag, self.params, space)

    def __repr__(self) -> str:
        if self.tag == "extensional":
            return f"MultiSelection(extensional, |table|={len(self.params[0])})"
        return f"MultiSelection({self.tag}{self.params!r})"


class DetSelection:
    """A deterministic selection function ``(X -> R) -> X``."""

    def __init__(self, domain: Iterable, rule: Callable[[Context], Any], tag: str = "rule", params: tuple = ()):
        self.domain = tuple(domain)
        self.rule = rule
        self.tag = tag
        self.params = params

    def __call__(self, k: Context) -> Any:
        x = self.rule(k)
        if x not in self.domain:
            raise DomainError(f"{self.tag} selected {x!r} outside its domain")
        return x

    def to_multi(self, space: OutcomeSpace | None = None) -> MultiSelection:
        return MultiSelection(self.domain, lambda k: (self(k),), self.tag, self.params, space)

    def __repr__(self) -> str:
        return f"DetSelection({self.tag}{self.params!r})"


def _shared_space(*selections: MultiSelection, space: OutcomeSpace | None = None) -> OutcomeSpace:
    spaces = {s.space for s in selections if s.space is not None}
    if space is not None:
        spaces.add(space)
    if not spaces:
        raise ValueError("no outcome space given for the join")
    if len(spaces) > 1:
        raise ValueError("selections do not share an outcome space")
    return spaces.pop()


# -- monad structure -----------------------------------------------------------


def selection_unit(x: Any, domain: Iterable | None = None, space: OutcomeSpace | None = None) -> MultiSelection:
    """``lambda k. {x}``."""
    domain = tuple(domain) if domain is not None else (x,)
    if x not in domain:
        raise DomainError(f"{x!r} is not in the choice set")
    return MultiSelection(domain, lambda k: (x,), "unit", (x,), space)


def bind_multi(
    eps: MultiSelection,
    f: Callable[[Any], MultiSelection],
    space: OutcomeSpace | None = None,
) -> MultiSelection:
    """Kleisli bind of the selection monad over the nonempty powerset.

    For a context ``k : Y -> R`` the result is ``eps(h) >>= g`` where
    ``g(x) = f(x)(k)`` and ``h(x) = join {k(y) | y in g(x)}``.
    """
    space = _shared_space(eps, space=space)
    images = {x: f(x) for x in eps.domain}
    codomain = next(iter(images.values())).domain
    for sel in images.values():
        if set(sel.domain) != set(codomain):
            raise ValueError("Kleisli map returns selections over different choice sets")

    def rule(k: Context) -> NonemptySet:
        g = {x: images[x](k) for x in eps.domain}
        h = Context({x: space.join_all(k[y] for y in g[x]) for x in eps.domain})
        return powerset_bind(eps(h), g.__getitem__)

    return MultiSelection(codomain, rule, "bind", (), space)


# -- products ------------------------------------------------------------------


def _pair(x: Any, y: Any) -> tuple:
    return (x, y)


def _cons(x: Any, rest: tuple) -> tuple:
    return (x,) + rest


def product_multi(
    eps: MultiSelection,
    delta: MultiSelection,
    space: OutcomeSpace | None = None,
    pair: Callable[[Any, Any], Any] = _pair,
) -> MultiSelection:
    """Simple monoidal product of two multi-valued selection functions.

    For ``k : X x Y -> R``, with ``f(x) = delta(k(x, -))`` and
    ``a = eps(lambda x. join {k(x, y) | y in f(x)})``, the product returns
    ``{(x, y) | x in a, y in f(x)}``.  ``pair`` builds the combined choice,
    which lets :func:`nary_product` flatten nested tuples.
    """
    space = _shared_space(eps, delta, space=space)
    xs, ys = eps.domain, delta.domain
    domain = tuple(pair(x, y) for x in xs for y in ys)

    def rule(k: Context) -> NonemptySet:
        f = {x: delta(Context({y: k[pair(x, y)] for y in ys})) for x in xs}
        a = eps(Context({x: space.join_all(k[pair(x, y)] for y in f[x]) for x in xs}))
        return powerset_dependent_product(a, f.__getitem__).map(lambda xy: pair(*xy))

    return MultiSelection(domain, rule, "product", (eps, delta), space)


def nary_product(selections: Sequence[MultiSelection], space: OutcomeSpace | None = None) -> MultiSelection:
    """Right-nested product ``e1 (x) (e2 (x) (... (x) en))`` over flat n-tuples.

    A single selection is returned unchanged; its choices are not wrapped
    in 1-tuples.
    """
    selections = list(selections)
    if not selections:
        raise ValueError("nary_product needs at least one selection")
    if len(selections) == 1:
        return selections[0]
    space = _shared_space(*selections, space=space)
    acc = product_multi(selections[-2], selections[-1], space)
    for sel in reversed(selections[:-2]):
        acc = product_multi(sel, acc, space, pair=_cons)
    return acc


def product_det(eps: DetSelection, delta: DetSelection, pair: Callable[[Any, Any], Any] = _pair) -> DetSelection:
    """``lambda k. (a, f(a))`` with ``f(x) = delta(k(x,-))`` and ``a = eps(lambda x. k(x, f(x)))``."""
    xs, ys = eps.domain, delta.domain
    domain = tuple(pair(x, y) for x in xs for y in ys)

    def rule(k: Context) -> Any:
        def f(x: Any) -> Any:
            return delta(Context({y: k[pair(x, y)] for y in ys}))

        a = eps(Context({x: k[pair(x, f(x))] for x in xs}))
        return pair(a, f(a))

    return DetSelection(domain, rule, "product", (eps, delta))


def nary_product_det(selections: Sequence[DetSelection]) -> DetSelection:
    selections = list(selections)
    if not selections:
        raise ValueError("nary_product_det needs at least one selection")
    if len(selections) == 1:
        return selections[0]
    acc = product_det(selections[-2], selections[-1])
    for sel in reversed(selections[:-2]):
        acc = product_det(sel, acc, pair=_cons)
    return acc


# -- concrete families ---------------------------------------------------------


def _coordinate(value: Any, i: int) -> Any:
    if isinstance(value, tuple):
        if not 1 <= i <= len(value):
            raise DomainError(f"coordinate {i} out of range for {value!r}")
        return value[i - 1]
    if i != 1:
        raise DomainError(f"coordinate {i} out of range for scalar {value!r}")
    return value


def _check_coordinate(i: int, space: OutcomeSpace | None) -> None:
    if i < 1:
        raise ValueError(f"coordinate index must be positive, got {i}")
    if space is not None:
        if space.kind != "vector":
            raise ValueError(f"argmax needs a vector outcome space, not {space.describe()}")
        if i > space.dim:
            raise ValueError(f"coordinate {i} out of range for dimension {space.dim}")


def argmax_selection(i: int, domain: Iterable, space: OutcomeSpace | None = None) -> MultiSelection:
    """All maximizers of the ``i``-th coordinate (1-based) of the context."""
    _check_coordinate(i, space)
    domain = tuple(domain)

    def rule(k: Context) -> list:
        scores = {x: _coordinate(k[x], i) for x in domain}
        best = max(scores.values())
        return [x for x in domain if scores[x] == best]

    return MultiSelection(domain, rule, "argmax", (i,), space)


def argmax_det(i: int, domain: Iterable) -> DetSelection:
    """Deterministic argmax of coordinate ``i``, ties broken by the least index."""
    _check_coordinate(i, None)
    domain = tuple(domain)

    def rule(k: Context) -> Any:
        best = domain[0]
        for x in domain[1:]:
            if _coordinate(k[x], i) > _coordinate(k[best], i):
                best = x
        return best

    return DetSelection(domain, rule, "argmax", (i,))


def constant_selection(choices: Iterable, domain: Iterable, space: OutcomeSpace | None = None) -> MultiSelection:
    domain = tuple(domain)
    chosen = NonemptySet(choices)
    if not chosen <= set(domain):
        raise DomainError("constant selection picks choices outside its domain")
    ordered = tuple(x for x in domain if x in chosen)
    return MultiSelection(domain, lambda k: chosen, "constant", ordered, space)


def favourite_selection(star: Any, domain: Iterable, top: Any, space: OutcomeSpace | None = None) -> MultiSelection:
    """``{star}`` together with every choice whose outcome is ``top``."""
    domain = tuple(domain)
    if star not in domain:
        raise DomainError(f"favourite {star!r} is not in the choice set")

    def rule(k: Context) -> list:
        return [star] + [x for x in domain if k[x] == top]

    return MultiSelection(domain, rule, "favourite", (star, top), space)


def extensional_selection(
    domain: Iterable,
    table: Mapping[Context, Iterable],
    space: OutcomeSpace | None = None,
) -> MultiSelection:
    """A selection given by an explicit finite table of contexts."""
    domain = tuple(domain)
    frozen = {}
    for k, chosen in table.items():
        if set(k) != set(domain):
            raise DomainError(f"table context {k!r} is not over the choice set")
        frozen[k] = NonemptySet(chosen)

    def rule(k: Context) -> NonemptySet:
        try:
            return frozen[k]
        except KeyError:
            raise DomainError(f"context {k!r} is outside the selection's table") from None

    return MultiSelection(domain, rule, "extensional", (frozen,), space)


def enumerate_extensional(domain: Iterable, values: Iterable, space: OutcomeSpace | None = None):
    """Yield every extensional selection over ``domain`` with contexts valued in ``values``.

    There are ``(2^|X| - 1)^(|values|^|X|)`` of them.
    """
    domain = tuple(domain)
    contexts = all_contexts(domain, values)
    options = nonempty_subsets(domain)
    for choice in itertools.product(options, repeat=len(contexts)):
        yield extensional_selection(domain, dict(zip(contexts, choice)), space)
