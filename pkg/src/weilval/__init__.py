"""Exact p-adic valuations of Weil sums of binomials over finite fields."""

from .cyclotomic import CyclotomicInteger, Valuation, pi_valuation
from .finite_field import FieldSpec, FieldTable, build_field
from .stickelberger import classify_exponent, enumerate_exponent_classes, v_stickelberger
from .weil import v_direct, weil_spectrum, weil_sum

__version__ = "0.1.0"

__all__ = [
    "CyclotomicInteger", "Valuation", "pi_valuation",
    "FieldSpec", "FieldTable", "build_field",
    "classify_exponent", "enumerate_exponent_classes", "v_stickelberger",
    "v_direct", "weil_spectrum", "weil_sum",
]
