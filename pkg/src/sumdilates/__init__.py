"""Sums of dilates λ1·A + ... + λk·A in Z_p and on the circle."""

from .circle import IntervalSet, discretize, prune_to_avoid
from .construct import ConstructionParams, choose_params, construct_zp, cycle_construction, rokhlin_set
from .errors import SumDilatesError
from .structure import diameter, rectify
from .zp import DilateVector, ZpSet, dilate, dilate_sum, sumset

__all__ = [
    "ConstructionParams",
    "DilateVector",
    "IntervalSet",
    "SumDilatesError",
    "ZpSet",
    "choose_params",
    "construct_zp",
    "cycle_construction",
    "diameter",
    "dilate",
    "dilate_sum",
    "discretize",
    "prune_to_avoid",
    "rectify",
    "rokhlin_set",
    "sumset",
]
