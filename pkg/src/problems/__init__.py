from .base import (
    MODEL_TAGS,
    Problem,
    SharpnessProfile,
    UnknownModel,
    build_model,
    corruption_mask,
    random_direction,
    random_init,
)
from .blind import BlindBatch, BlindDeconvolution, BlindInstance, dist_blind, project_feasible, sample_blind
from .constants import MomentEstimate, TooFewSamples, estimate_constants, estimate_moments
from .idx import IdxFormatError, idx_instance, load_idx, read_idx
from .logistic import (
    LogisticBatch,
    LogisticInstance,
    LogisticRegression,
    MissingReference,
    dist_support,
    dist_to_reference,
    draw_indices,
    logistic_gradient,
    logistic_losses,
    logistic_objective,
    solve_reference,
    synth_logistic,
)
from .phase import PhaseBatch, PhaseInstance, PhaseRetrieval, dist_phase, sample_phase
