"""Multi-valued selection functions and the sequential games they solve."""

from .core import (
    Context,
    DomainError,
    NonemptySet,
    OutcomeSpace,
    ResourceBoundError,
    join_all,
    powerset_bind,
    powerset_dependent_product,
    powerset_unit,
)
from .dominance import iterated_removal, strict_dominance_selection, strictly_dominates
from .game import GameSpec, Strategy, enumerate_strategies, strategic_extension, strategic_play, subgame
from .gamespec import GameFormatError, parse_game, serialize_game, serialize_report
from .properties import (
    ContextUniverse,
    IndexingFunction,
    collapse,
    is_upwards_closed,
    is_witnessing,
    pathological_delta,
)
from .selection import (
    DetSelection,
    MultiSelection,
    argmax_selection,
    bind_multi,
    favourite_selection,
    nary_product,
    product_det,
    product_multi,
    selection_unit,
)
from .solutions import (
    coinciding_indifference,
    compare,
    product_plays,
    rational_plays,
    sigma_plays,
    sigma_sets,
    spe_plays,
)

__version__ = "0.1.0"
