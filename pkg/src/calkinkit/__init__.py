"""Executable operator theory for essential spherical isometries.

Operators live in the closed *-algebra ``Toeplitz(Laurent polynomial) + finite
block`` on l^2(N), where the compact part of every operator is an explicit
finite matrix and the Calkin class is the symbol.
"""

from .errors import (
    CalkinError,
    CaptureConditionViolated,
    CertificateFailed,
    IndexObstruction,
    MonotonicityFailed,
    NotEssentialInversePair,
    NotEssentialIsometry,
    NotHermitian,
    NotPositive,
    NotStabilized,
    SymbolVanishesOnCircle,
    ToleranceAmbiguous,
)
from .isometrize import (
    IsometrizationReport,
    build_kernel_pairing,
    inverse_sqrt,
    isometrize,
    perturb_and_gram,
)
from .obstruction import (
    IndexReport,
    Verdict,
    commuting_perturbation_verdict,
    counterexample_demo,
    essential_inverse_pair_check,
    fredholm_index,
)
from .operator import (
    CompactBlock,
    StructuredOperator,
    adjoint,
    commutator,
    compose,
    is_compact,
    is_essential_isometry,
    truncate,
)
from .optuple import (
    OperatorTuple,
    column_truncate,
    essential_left_inverse,
    gram,
    is_essential_spherical_isometry,
    row_truncate,
)
from .presets import PRESETS, preset
from .spectral import (
    KernelBasis,
    closed_range_witness,
    kernel_basis,
    row_kernel_growth_certificate,
    stabilized_joint_kernel,
)
from .symbol import LaurentPoly, sum_of_squares, winding_number

__version__ = "0.1.0"
