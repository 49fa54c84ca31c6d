"""Sentence-pair matching with deep encoding and bidirectional interaction.

The pipeline: static (plus optional precomputed contextual) word vectors,
a convolutional encoder with cross-sentence alignment and gated fusion,
bidirectional attention between the two encoded sentences, a position
self-attention pass, and a classification or ranking head. Everything
runs on the package's own float64 reverse-mode tensor engine so each
stage is gradient-checkable.
"""

from .errors import (
    CacheMissError,
    ConfigError,
    DataError,
    NumericalError,
    ParseError,
    SentMatchError,
    ShapeError,
)

__all__ = [
    "CacheMissError",
    "ConfigError",
    "DataError",
    "NumericalError",
    "ParseError",
    "SentMatchError",
    "ShapeError",
]
