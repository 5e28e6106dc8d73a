"""
Module 'channels.diamond'

Diamond-norm distance between channels.

For channels with trace-one Choi states J_a, J_b on d_in x d_out,

    ||a - b||_diamond = 2 d_in min { ||Tr_B Z||_inf : Z >= J_a - J_b, Z >= 0 }.

The operator norm is posed as t 1 - Tr_B Z >= 0 and the program minimises t.
Evaluating both channels on Phi_{d_in} gives the Phi lower bound
||J_a - J_b||_1; a value below it means the encoding or the solve is wrong and
raises ``SolverError``.
"""
from typing import Optional, Tuple

import numpy as np

from linalg.operations import trace_norm
from logger_config import get_logger
from sdp.builder import HermitianSdp
from sdp.models import VerifyReport
from tempered import settings
from tempered.exceptions import DimensionMismatchError, SolverError
from .models import Channel

logger = get_logger(__name__)


def phi_lower_bound(a: Channel, b: Channel) -> float:
    """
    Returns ||J_a - J_b||_1, the output trace distance on Phi_{d_in}.
    """
    return trace_norm(a.choi.matrix - b.choi.matrix)


def certified_diamond_distance(a: Channel, b: Channel, tol: Optional[float] = None
                               ) -> Tuple[float, VerifyReport]:
    """
    Computes ||a - b||_diamond together with its certificate.

    Args:
        a (Channel): First channel.
        b (Channel): Second channel, with the same dimensions.
        tol (float, optional): Solver tolerance.

    Returns:
        tuple: (value clipped to [0, 2], verify report).

    Raises:
        DimensionMismatchError: If the channels map different spaces.
        SolverError: If the program fails or undercuts the Phi bound.
    """
    if a.dims != b.dims:
        raise DimensionMismatchError(f"cannot compare channels on {a.dims} and {b.dims}",
                                     "channels")
    dims = a.dims
    difference = a.choi.matrix - b.choi.matrix
    real = a.is_real and b.is_real

    sdp = HermitianSdp("diamond")
    z = sdp.hermitian(a.choi.dim, "Z", real=real)
    t = sdp.real("t")
    sdp.psd(z, "Z")
    sdp.psd(z - difference, "dominates")
    sdp.psd(t.times(np.eye(a.dim_in)) - z.partial_trace(dims, "A"), "marginal")
    sdp.minimize(t)
    result = sdp.solve(tol)

    value = 2.0 * a.dim_in * result.value
    bound = phi_lower_bound(a, b)
    if value < bound - settings.PRIMAL_DUAL_MATCH_TOL:
        logger.error("diamond(%s, %s) = %.12g undercuts the Phi bound %.12g", a, b, value,
                     bound)
        raise SolverError(f"diamond distance {value:.12g} is below the Phi lower bound "
                          f"{bound:.12g}", result.solution, result.report)
    value = min(max(value, 0.0), 2.0)
    logger.info("diamond(%s, %s) = %.12g", a, b, value)
    return value, result.report


def diamond_distance(a: Channel, b: Channel, tol: Optional[float] = None) -> float:
    """
    Returns ||a - b||_diamond in [0, 2].
    """
    value, _ = certified_diamond_distance(a, b, tol)
    return value
