"""Calderón–Zygmund toolkit for finitely supported measures."""

from ._czkit import (
    CzkitError,
    Measure,
    cz_decompose,
    generate,
    growth_constant,
    h1_upper_bound,
    main_lemma,
    maximal,
    rbmo_norm,
)

__all__ = [
    "CzkitError",
    "Measure",
    "cz_decompose",
    "generate",
    "growth_constant",
    "h1_upper_bound",
    "main_lemma",
    "maximal",
    "rbmo_norm",
]
