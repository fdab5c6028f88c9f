"""Minimal sets of dequantizers and quantizers for finite-dimensional quantum systems."""

from .duality import (
    DualPair,
    OperatorSet,
    check_minimal,
    flatten_dequantizers,
    flatten_quantizers,
    pairing_matrix,
    solve_quantizers,
    verify_duality,
)
from .errors import (
    CertificationFailed,
    DegenerateTransform,
    DimensionMismatch,
    InfeasibleParams,
    NonSquare,
    NoRealSolution,
    NotOrthonormalBase,
    QdqError,
    Singular,
    SingularSet,
    UnknownPreset,
)
from .matkit import DEFAULT_TOL, Tolerance
from .selfdual import (
    Family1Params,
    Family2Params,
    Family3Params,
    family1_build,
    family1_solve,
    family2_build,
    family3_build,
    preset,
    validate_selfdual,
)
from .symbols import Symbol, build_star_kernel, reconstruct, star_apply, star_direct, symbol_of
from .tensorext import parameter_count, tensor_pair, tensor_sets
from .transforms import (
    TransformMatrix,
    apply_transform,
    find_transform,
    find_transform_general,
    quantizer_transform,
    transform_pair,
)

__version__ = "0.1.0"
