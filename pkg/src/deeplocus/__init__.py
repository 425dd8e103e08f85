"""deeplocus: deep points of cluster varieties, exactly.

Constructs, classifies, and independently certifies the points of a
cluster variety lying outside every cluster torus, for four families:
polygons / type A, rank 2, the Markov quiver, and unpunctured marked
surfaces.  All arithmetic is exact (Q, Q(i), or F_p).
"""

from .errors import DeepLocusError
from .field import (
    FieldContext,
    FieldValue,
    QI,
    QQ,
    gaussian_rationals,
    prime_field,
    rationals,
)

__version__ = "0.1.0"

__all__ = [
    "DeepLocusError",
    "FieldContext",
    "FieldValue",
    "QQ",
    "QI",
    "rationals",
    "gaussian_rationals",
    "prime_field",
    "__version__",
]
