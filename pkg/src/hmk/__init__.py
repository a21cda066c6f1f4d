"""Complex Hadamard matrices of order six and mutually unbiased bases."""

from .core import (
    DEFAULT_TOL,
    BasisMatrix,
    HMKError,
    Tolerances,
    ValidationError,
    are_unbiased,
    identity,
    is_hadamard,
)
from .catalog import (
    Family,
    FamilySpec,
    bjorck,
    build,
    dita,
    dita_block_circulant,
    fourier,
    fourier_transposed,
    hermitian,
    tao,
    twisted_fourier,
)
from .equivalence import are_equivalent, canonical_key, dephase, haagerup_invariant
from .geometry import average_distance_estimate, chordal_distance_sq, distance_table
from .io import read_matrix, write_matrix

__version__ = "0.1.0"
