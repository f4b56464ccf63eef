"""Low-rank Hankel completion of spectrally sparse signals."""

from ._hankelrec import (
    ArgumentError,
    Error,
    GenerationError,
    HankelShape,
    OracleScaleError,
    ResourceError,
    adjoint_rank_one,
    generate_signal,
    hankel_adjoint_dense,
    hankel_dense,
    hankel_matvec,
    hankel_matvec_adjoint,
    make_shape,
    make_signal,
    nd_generate_signal,
    nd_hankel_dense,
    nd_solve,
    partial_svd,
    phase_cell,
    pseudo_inverse,
    sample_indices,
    solve,
)

__all__ = [
    "ArgumentError",
    "Error",
    "GenerationError",
    "HankelShape",
    "OracleScaleError",
    "ResourceError",
    "adjoint_rank_one",
    "generate_signal",
    "hankel_adjoint_dense",
    "hankel_dense",
    "hankel_matvec",
    "hankel_matvec_adjoint",
    "make_shape",
    "make_signal",
    "nd_generate_signal",
    "nd_hankel_dense",
    "nd_solve",
    "partial_svd",
    "phase_cell",
    "pseudo_inverse",
    "sample_indices",
    "solve",
]
