"""Parsing and evaluation of analytics expressions with error guarantees."""
from .ast import walk
from .calculus import propagate_measures, propagate_scalar
from .combination import (
    SegmentCombination,
    check_aligned,
    cover,
    greedy_combination,
    is_combination_value,
    os_combination,
)
from .evaluate import eval_approx, eval_exact, stat
from .guarantees import (
    aligned_product_bound,
    guarantee_product_aligned,
    guarantee_product_misaligned,
    guarantee_sum_range,
)
from .parser import parse

__all__ = [
    "SegmentCombination",
    "aligned_product_bound",
    "check_aligned",
    "cover",
    "eval_approx",
    "eval_exact",
    "greedy_combination",
    "guarantee_product_aligned",
    "guarantee_product_misaligned",
    "guarantee_sum_range",
    "is_combination_value",
    "os_combination",
    "parse",
    "propagate_measures",
    "propagate_scalar",
    "stat",
    "walk",
]
