"""Ordered groups: words, order oracles, balls and the operators built on them."""

from .balls import BALL_FORMAT_VERSION, GroupBall
from .braids import burau, handle_reduce
from .core import (
    EQUAL,
    GREATER,
    LESS,
    BraidGroup3,
    FreeGroup,
    Group,
    GroupWord,
    Lattice,
    OrderOracle,
    get_group,
    order_compare,
    parse_word,
    sign,
    word_equal,
)
from .operators import (
    CommutatorReport,
    FreeHilbertSigns,
    commutator_report,
    free_hilbert,
    free_hilbert_commutator,
    group_f_operator,
    group_toeplitz_index,
)

__all__ = [
    "BALL_FORMAT_VERSION", "GroupBall", "burau", "handle_reduce", "EQUAL", "GREATER", "LESS",
    "BraidGroup3", "FreeGroup", "Group", "GroupWord", "Lattice", "OrderOracle", "get_group",
    "order_compare", "parse_word", "sign", "word_equal", "CommutatorReport", "FreeHilbertSigns",
    "commutator_report", "free_hilbert", "free_hilbert_commutator", "group_f_operator",
    "group_toeplitz_index",
]
