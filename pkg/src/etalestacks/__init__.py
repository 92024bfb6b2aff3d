"""Etale groupoids over finite topological spaces, and their stack calculus."""

from .fintop import (
    CMap,
    Decision,
    FinSpace,
    Germ,
    OpenSet,
    StructureError,
    all_germs,
    constant_map,
    disjoint_union,
    fibered_product,
    germ_of,
    identity_germ,
    identity_map,
    is_etale,
    is_open_map,
    minimal_open,
)

__all__ = [
    "CMap",
    "Decision",
    "FinSpace",
    "Germ",
    "OpenSet",
    "StructureError",
    "all_germs",
    "constant_map",
    "disjoint_union",
    "fibered_product",
    "germ_of",
    "identity_germ",
    "identity_map",
    "is_etale",
    "is_open_map",
    "minimal_open",
]
