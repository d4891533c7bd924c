"""Exact power indices, inverse power index problems and limit diagnostics for simple games."""

__version__ = "0.1.0"

from .game import (
    Coalition,
    EnvelopeError,
    GameError,
    SimpleGame,
    WeightedGame,
    canonical_form,
    dummies,
    from_weights,
    is_complete,
    is_decisive,
    is_weighted,
    minimal_winning,
    realize,
)
from .indices import PowerVector, SwingVector, compute

__all__ = [
    "__version__",
    "Coalition",
    "EnvelopeError",
    "GameError",
    "SimpleGame",
    "WeightedGame",
    "PowerVector",
    "SwingVector",
    "canonical_form",
    "compute",
    "dummies",
    "from_weights",
    "is_complete",
    "is_decisive",
    "is_weighted",
    "minimal_winning",
    "realize",
]
