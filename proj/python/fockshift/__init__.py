"""Weighted multi-shifts on the full Fock space.

Thin wrapper over the compiled module; weights are built from the same JSON
spec strings the command-line tool accepts.
"""

from ._fockshift import (  # noqa: F401
    Weights,
    __version__,
    graded_dim,
    multinomial,
    parse_word,
    word_to_string,
    words_in_class,
)

__all__ = [
    "Weights",
    "__version__",
    "graded_dim",
    "multinomial",
    "parse_word",
    "word_to_string",
    "words_in_class",
]
