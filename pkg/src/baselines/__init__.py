from .common import BaselineTrace, index_stream, sample_gradient
from .proxgrad import poly_prox_gradient, poly_stepsize, prox_grad_poly
from .rda import RdaState, rda_path, rda_step, run_rda
