from .models import (
    AffineAbsModel,
    BilinearAbsModel,
    ClippedAffineModel,
    LinearL1Model,
    LinearModel,
    QuadraticAbsModel,
    QuadraticAnchor,
    Vector,
)
from .prox import (
    affine_abs_prox,
    bilinear_abs_prox,
    clipped_affine_abs_prox,
    linear_l1_prox,
    linear_model_prox,
    quadratic_abs_prox,
    soft_threshold,
    solve_anchored,
)
from .roots import real_roots
