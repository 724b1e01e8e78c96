"""Clifford generators from qubit trees, fermion-to-qubit maps and quadratic circuit simulation."""
from .fermion import (
    LadderOperator,
    NumberOperator,
    OccupationMap,
    bk_standard,
    gtree_to_xz,
    ladder_binary_xy,
    ladder_jw,
    ladder_operators,
    ladder_xz,
    number_operator,
    occupation_forward,
    occupation_inverse,
    occupation_map,
)
from .pauli import OracleSizeError, PauliTerm, WidthMismatchError, anticommutes, multiply, to_dense, weight
from .spin import (
    ModeUnitary,
    QuadraticHamiltonian,
    RotationMatrix,
    adjoint_rotation,
    mode_unitary,
    perfect_transfer_check,
    propagate_covariance,
    propagate_expectations,
    propagate_path_state,
    terminal_pair_su4_set,
)
from .tree import (
    GeneratorSet,
    GeneratorSetError,
    QubitTree,
    TreeError,
    build_cf_binary,
    build_cf_ternary,
    build_jw_chain,
    build_xz_binary,
    extend_odd,
    extend_spin_even,
    generators,
    prune,
    stub,
)

__version__ = "0.1.0"
