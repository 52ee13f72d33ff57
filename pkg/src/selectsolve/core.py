"""Outcome semilattices, the finite nonempty powerset monad, and contexts.

Every value handled here is immutable.  Real numbers are kept as
:class:`fractions.Fraction` so that comparisons never suffer from
floating-point ties.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Any

__all__ = [
    "DomainError",
    "ResourceBoundError",
    "NonemptySet",
    "OutcomeSpace",
    "Context",
    "canonical_key",
    "join_all",
    "powerset_unit",
    "powerset_bind",
    "powerset_dependent_product",
    "all_contexts",
    "constant_context",
    "nonempty_subsets",
    "format_number",
    "format_value",
]

DEFAULT_BOUND = 10**6


class DomainError(ValueError):
    """A value lies outside the space or table it was checked against."""


class ResourceBoundError(RuntimeError):
    """An exhaustive enumeration would exceed the configured bound."""

    def __init__(self, what: str, count: int, bound: int):
        super().__init__(f"{what}: {count} candidates exceed the bound of {bound}")
        self.what = what
        self.count = count
        self.bound = bound


def canonical_key(value: Any) -> tuple:
    """Total sort key over the heterogeneous values used as choices and outcomes."""
    if isinstance(value, bool):
        return (0, int(value))
    if isinstance(value, Rational):
        return (0, value)
    if isinstance(value, str):
        return (1, value)
    if isinstance(value, tuple):
        return (2, len(value), tuple(canonical_key(v) for v in value))
    if isinstance(value, (frozenset, set)):
        return (3, len(value), tuple(sorted(canonical_key(v) for v in value)))
    if isinstance(value, Context):
        return (4, tuple((canonical_key(k), canonical_key(v)) for k, v in value.items()))
    return (5, repr(value))


class NonemptySet(frozenset):
    """A finite set that refuses to be empty.

    Set semantics are those of :class:`frozenset`; the canonical ordering is
    only used for display and serialization.
    """

    def __new__(cls, elements: Iterable = ()):
        self = super().__new__(cls, elements)
        if not self:
            raise ValueError("NonemptySet requires at least one element")
        return self

    def bind(self, f: Callable[[Any], Iterable]) -> NonemptySet:
        return powerset_bind(self, f)

    def map(self, f: Callable[[Any], Any]) -> NonemptySet:
        return NonemptySet(f(x) for x in self)

    def union(self, *others: Iterable) -> NonemptySet:
        return NonemptySet(frozenset.union(self, *others))

    def sorted(self, key: Callable[[Any], Any] = canonical_key) -> list:
        return sorted(self, key=key)

    def __repr__(self) -> str:
        return "{" + ", ".join(repr(x) for x in self.sorted()) + "}"


def powerset_unit(x: Hashable) -> NonemptySet:
    return NonemptySet((x,))


def powerset_bind(a: Iterable, f: Callable[[Any], Iterable]) -> NonemptySet:
    """Union of ``f(x)`` over ``x`` in ``a``."""
    out: set = set()
    for x in a:
        out.update(f(x))
    return NonemptySet(out)


def powerset_dependent_product(a: Iterable, f: Callable[[Any], Iterable]) -> NonemptySet:
    """The dependent cartesian product ``{(x, y) | x in a, y in f(x)}``."""
    return NonemptySet((x, y) for x in a for y in f(x))


def nonempty_subsets(items: Iterable) -> list[tuple]:
    """All nonempty subsets, ordered by size and then lexicographically by position."""
    items = list(items)
    return [
        combo
        for size in range(1, len(items) + 1)
        for combo in itertools.combinations(items, size)
    ]


def _as_fraction(x: Any) -> Fraction:
    if isinstance(x, bool):
        raise DomainError(f"not a real number: {x!r}")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise DomainError(f"not an exact real number: {x!r}")


class OutcomeSpace:
    """An outcome space ``R`` together with its semilattice join.

    Three kinds are supported:

    ``vector``
        tuples of ``dim`` rationals, joined by componentwise maximum.
    ``sets``
        finite nonempty sets of such tuples, joined by union.
    ``poset``
        a finite set of named elements with an explicit total join table.
    """

    KINDS = ("vector", "sets", "poset")

    def __init__(self, kind: str, dim: int = 0, elements: tuple = (), joins=None, name: str = ""):
        if kind not in self.KINDS:
            raise ValueError(f"unknown outcome kind {kind!r}")
        self.kind = kind
        self.dim = dim
        self.elements = tuple(elements)
        self.name = name
        self._join: dict = {}
        if kind in ("vector", "sets") and dim < 1:
            raise ValueError("dimension must be at least 1")
        if kind == "poset":
            self._build_join_table(joins or {})

    @classmethod
    def vector(cls, dim: int) -> OutcomeSpace:
        return cls("vector", dim=dim)

    @classmethod
    def sets(cls, dim: int) -> OutcomeSpace:
        return cls("sets", dim=dim)

    @classmethod
    def poset(cls, elements: Iterable, joins: Mapping, name: str = "R") -> OutcomeSpace:
        """``joins`` maps unordered pairs (any 2-element iterable) to their join."""
        return cls("poset", elements=tuple(elements), joins=joins, name=name)

    @classmethod
    def chain(cls, elements: Iterable, name: str = "chain") -> OutcomeSpace:
        """A total order listed from bottom to top."""
        elements = tuple(elements)
        joins = {
            (a, b): elements[max(i, j)]
            for i, a in enumerate(elements)
            for j, b in enumerate(elements)
            if i < j
        }
        return cls.poset(elements, joins, name=name)

    def _build_join_table(self, joins: Mapping) -> None:
        elements = self.elements
        if not elements:
            raise ValueError("a poset needs at least one element")
        if len(set(elements)) != len(elements):
            raise ValueError("duplicate poset elements")
        known = set(elements)
        table: dict = {(e, e): e for e in elements}
        for pair, result in joins.items():
            a, b = tuple(pair)
            for v in (a, b, result):
                if v not in known:
                    raise DomainError(f"join table mentions unknown element {v!r}")
            for key in ((a, b), (b, a)):
                if key in table and table[key] != result:
                    raise ValueError(f"conflicting joins for {a!r}, {b!r}")
                table[key] = result
        for a, b in itertools.product(elements, repeat=2):
            if (a, b) not in table:
                raise ValueError(f"join table is not total: missing {a!r} v {b!r}")
        for a, b, c in itertools.product(elements, repeat=3):
            if table[table[a, b], c] != table[a, table[b, c]]:
                raise ValueError(f"join table is not associative at {a!r}, {b!r}, {c!r}")
        self._join = table

    # -- values -------------------------------------------------------------

    def value(self, raw: Any) -> Any:
        """Normalize ``raw`` into this space, raising :class:`DomainError` if impossible."""
        if self.kind == "poset":
            if raw not in self._join_elements():
                raise DomainError(f"{raw!r} is not an element of poset {self.name}")
            return raw
        if self.kind == "vector":
            return self._vector(raw)
        if isinstance(raw, (tuple, list)) and raw and not isinstance(raw[0], (tuple, list)):
            raw = [raw]
        vecs = frozenset(self._vector(v) for v in raw)
        if not vecs:
            raise DomainError("a set outcome must be nonempty")
        return vecs

    def _join_elements(self) -> frozenset:
        return frozenset(self.elements)

    def _vector(self, raw: Any) -> tuple:
        if not isinstance(raw, (tuple, list)):
            raw = (raw,)
        if len(raw) != self.dim:
            raise DomainError(f"expected {self.dim} components, got {len(raw)}")
        return tuple(_as_fraction(x) for x in raw)

    def contains(self, v: Any) -> bool:
        if self.kind == "poset":
            return v in self._join_elements()
        if self.kind == "vector":
            return isinstance(v, tuple) and len(v) == self.dim and all(
                isinstance(x, Rational) and not isinstance(x, bool) for x in v
            )
        return (
            isinstance(v, frozenset)
            and len(v) > 0
            and all(isinstance(t, tuple) and len(t) == self.dim for t in v)
        )

    def join(self, a: Any, b: Any) -> Any:
        if self.kind == "vector":
            return tuple(x if x >= y else y for x, y in zip(a, b))
        if self.kind == "sets":
            return a | b
        try:
            return self._join[a, b]
        except KeyError:
            raise DomainError(f"{a!r} or {b!r} is not an element of poset {self.name}") from None

    def join_all(self, values: Iterable) -> Any:
        values = list(values)
        if not values:
            raise ValueError("join of an empty collection")
        if self.kind == "poset":
            for v in values:
                if v not in self._join_elements():
                    raise DomainError(f"{v!r} is not an element of poset {self.name}")
        return reduce(self.join, values)

    def leq(self, a: Any, b: Any) -> bool:
        """The order induced by the join: ``a <= b`` iff ``a v b == b``."""
        return self.join(a, b) == b

    def top(self) -> Any:
        if self.kind != "poset":
            raise DomainError(f"a {self.kind} space has no top element")
        return self.join_all(self.elements)

    def sort_key(self, v: Any) -> Any:
        if self.kind == "poset":
            return self.elements.index(v)
        return canonical_key(v)

    def describe(self) -> str:
        if self.kind == "poset":
            return f"poset {self.name}"
        return f"{self.kind} {self.dim}"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OutcomeSpace):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.dim == other.dim
            and self.elements == other.elements
            and self._join == other._join
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.dim, self.elements))

    def __repr__(self) -> str:
        if self.kind == "poset":
            return f"OutcomeSpace.poset({list(self.elements)!r}, name={self.name!r})"
        return f"OutcomeSpace.{self.kind}({self.dim})"


def join_all(space: OutcomeSpace, values: Iterable) -> Any:
    return space.join_all(values)


class Context(Mapping):
    """A total finite map ``X -> R``, compared and hashed by its table.

    Contexts are callable, so ``k(x)`` and ``k[x]`` are interchangeable.
    """

    __slots__ = ("_table", "_hash")

    def __init__(self, table: Mapping | Iterable):
        self._table = dict(table)
        self._hash = None

    def __getitem__(self, x: Any) -> Any:
        return self._table[x]

    __call__ = __getitem__

    def __iter__(self) -> Iterator:
        return iter(self._table)

    def __len__(self) -> int:
        return len(self._table)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._table.items()))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Context):
            return self._table == other._table
        if isinstance(other, Mapping):
            return self._table == dict(other)
        return NotImplemented

    def restrict(self, f: Callable[[Any], Any], domain: Iterable) -> Context:
        """The context ``y -> self[f(y)]`` over ``domain``."""
        return Context({y: self._table[f(y)] for y in domain})

    def __repr__(self) -> str:
        inner = ", ".join(f"{format_value(k)}↦{format_value(v)}" for k, v in self._table.items())
        return f"Context({inner})"


def constant_context(domain: Iterable, value: Any) -> Context:
    return Context({x: value for x in domain})


def all_contexts(domain: Iterable, values: Iterable) -> list[Context]:
    """Every total map ``domain -> values``, in lexicographic order."""
    domain = list(domain)
    values = list(values)
    return [Context(zip(domain, combo)) for combo in itertools.product(values, repeat=len(domain))]


def format_number(x: Rational) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    sign = "-" if x < 0 else ""
    x = abs(x)
    whole, frac = divmod(x, 1)
    digits = ""
    while frac:
        frac *= 10
        digit, frac = divmod(frac, 1)
        digits += str(int(digit))
    return f"{sign}{int(whole)}.{digits}"


def format_value(v: Any) -> str:
    """Compact deterministic rendering used by reports and error messages."""
    if isinstance(v, Rational) and not isinstance(v, bool):
        return format_number(v)
    if isinstance(v, tuple):
        return "(" + ",".join(format_value(x) for x in v) + ")"
    if isinstance(v, frozenset):
        return "{" + " ".join(format_value(x) for x in sorted(v, key=canonical_key)) + "}"
    if isinstance(v, Context):
        return "[" + " ".join(f"{format_value(k)}:{format_value(x)}" for k, x in v.items()) + "]"
    return str(v)
