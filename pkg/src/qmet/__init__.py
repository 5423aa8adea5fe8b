"""Finite-dimensional laboratory for mean ergodic averages of quantum group actions."""

from .algebra import (
    Element,
    Functional,
    StarAlgebra,
    TensorAlgebra,
    dual_norm,
    slice_left,
    state_spanning_family,
    validate_algebra,
)
from .dynamics import Action, GnsSpace, TransferOperator, gns, mu_tilde, transfer_operator
from .ergodic import ergodic_average_experiment, ergodicity_test, fixed_space, mean_projection
from .quantum_group import (
    AveragingNet,
    QuantumGroup,
    amenability_defect,
    build_function_algebra,
    build_group_algebra,
    cesaro_net,
    convolve,
    haar_state,
)

__version__ = "0.1.0"
