from .caesar import (
    GradientIngredients,
    caesar_forward,
    caesar_gradient_finalize,
    caesar_gradient_mlr,
    caesar_setup_weights,
    forward_ras_cleartext,
)
from .common import (
    IdealDealer,
    IterationStats,
    PartyState,
    Shares,
    SigmoidPoly,
    TrainingConfig,
    mask_ciphertext,
    reconstruct,
    retag,
    secret_share,
)
from .linr import vfl_linr_iteration
from .nn import vfl_nn_backward, vfl_nn_forward

__all__ = [
    "GradientIngredients",
    "IdealDealer",
    "IterationStats",
    "PartyState",
    "Shares",
    "SigmoidPoly",
    "TrainingConfig",
    "caesar_forward",
    "caesar_gradient_finalize",
    "caesar_gradient_mlr",
    "caesar_setup_weights",
    "forward_ras_cleartext",
    "mask_ciphertext",
    "reconstruct",
    "retag",
    "secret_share",
    "vfl_linr_iteration",
    "vfl_nn_backward",
    "vfl_nn_forward",
]
