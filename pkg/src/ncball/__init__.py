"""Numerical tools for free polynomials and bounded nc functions on the nc unit ball."""

from .freealg import (
    FreePoly,
    MatrixTuple,
    conjugate,
    direct_sum,
    eval_poly,
    homogeneous_component,
    row_norm,
)
from .fock import (
    TruncatedFock,
    creation_operators,
    fock_inner,
    kernel_coefficients,
    multiplier_adjoint_check,
    szego_apply,
)
from .ideals import (
    GradedIdeal,
    commutator_ideal,
    commutatorize,
    compressed_shift,
    fiber,
    graded_basis,
    matrix_span_subspace,
    membership,
    nullstellensatz_witness,
    quotient_norm_estimate,
    verify_unitary_equivalence,
)
from .pick import PickProblem, dbr_choi, feasible, homogeneous_multiplier_norm, sup_norm_lower_bound
from .mobius import (
    BallAutomorphism,
    apply,
    cartan_check,
    circle_average,
    compose,
    from_point,
    from_unitary,
    identity,
    invert,
)

__version__ = "0.1.0"
