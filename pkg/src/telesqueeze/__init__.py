"""Truncated-Fock-space simulation of squeezed-state teleportation protocols."""

__version__ = "0.1.0"

from .fock import (
    ModeOperator,
    MultiModeState,
    SingleModeState,
    apply_operator,
    basis_state,
    fock_state,
    inner_product,
    matrix_exponential,
    partial_inner,
    reduced_density,
    tensor,
)
from .measurement import (
    OutcomeTable,
    condition_on_counts,
    fidelity_to_target,
    joint_photon_distribution,
    project,
    quasi_bell_case1,
    quasi_bell_case2,
)
from .optics import LossSpec, beam_splitter, loss_channel, squeeze, squeeze_operator
from .protocols import ProtocolReport, run_case1, run_case2, run_lossless
from .states import (
    InputCoefficients,
    SqueezeParam,
    TruncationError,
    auto_dim,
    channel_case1,
    channel_case2,
    channel_squeezed,
    coherent,
    squeezed_one_photon,
    squeezed_vacuum,
    two_mode_squeezed,
)

__all__ = [
    "InputCoefficients", "LossSpec", "ModeOperator", "MultiModeState", "OutcomeTable",
    "ProtocolReport", "SingleModeState", "SqueezeParam", "TruncationError", "apply_operator",
    "auto_dim", "basis_state", "beam_splitter", "channel_case1", "channel_case2",
    "channel_squeezed", "coherent", "condition_on_counts", "fidelity_to_target", "fock_state",
    "inner_product", "joint_photon_distribution", "loss_channel", "matrix_exponential",
    "partial_inner", "project", "quasi_bell_case1", "quasi_bell_case2", "reduced_density",
    "run_case1", "run_case2", "run_lossless", "squeeze", "squeeze_operator",
    "squeezed_one_photon", "squeezed_vacuum", "tensor", "two_mode_squeezed",
]
