"""
Module 'chmono.bounds'

Channel monotones and the bounds compared in the irreversibility report.

Key Functions:

- **channel_robustness_ke**: standard robustness of a channel against
  PPT-binding channels,

      R + 1 = min { d_in t : Tr_B J_Theta <= t 1, J_Theta - J_Lambda and its
                    partial transpose PSD, J_Theta and J_Theta^Gamma PSD }.

- **ec_lower_bound**: (1/n) log2 of the seesaw bound on N_tau(Lambda^{(x) n}),
  a lower bound on the entanglement cost in bits per channel use.
- **qcap_upper_bound**: log2 of the least t with t J_Gamma >= J_Lambda over
  PPT-binding Gamma, an upper bound on the distillable capacity. Posed with
  G = t J_Gamma; the marginal condition Tr_B G = (t/d_in) 1 is relaxed to
  Tr_B G <= (t/d_in) 1 without changing the value, since the slack can be
  added back as (slack) (x) 1/d_out.
- **dmax_divergence**: D_max(Lambda || Gamma) for a fixed Gamma.
- **dmax_phi_lower_bound**: the Phi-overlap lower bound on
  qcap_upper_bound.
- **channel_tempered_robustness**: R^tau of the output at a given input.
- **irreversibility_report**: the ``BoundReport`` of a channel.
"""
import math
from typing import Optional, Tuple

import numpy as np

from channels.models import Channel
from channels.operations import apply, tensor_channels
from linalg.models import BipartiteOperator
from linalg.operations import hermitian_part, op_norm, support_split
from logger_config import get_logger
from sdp.builder import HermitianSdp
from sdp.models import VerifyReport
from states.models import DensityOperator
from states.monotones import tempered_robustness_ppt
from tempered import settings
from tempered.exceptions import DimensionMismatchError, SolverError, ValidationError
from .models import BoundReport, SeesawConfig, SeesawResult
from .seesaw import seesaw_tempered_negativity
from .validators import validate_copies

logger = get_logger(__name__)


def certified_channel_robustness_ke(c: Channel, tol: Optional[float] = None
                                    ) -> Tuple[float, BipartiteOperator, VerifyReport]:
    """
    Computes R^s_KE(Lambda) with the optimal J_Theta and the certificate.
    """
    dims = c.dims
    j = c.choi.matrix
    sdp = HermitianSdp("channel-robustness")
    theta = sdp.hermitian(c.choi.dim, "J_theta", real=c.is_real)
    t = sdp.real("t")
    excess = theta - j
    sdp.psd(t.times(np.eye(c.dim_in)) - theta.partial_trace(dims, "A"), "marginal")
    sdp.psd(excess, "dominates")
    sdp.psd(excess.partial_transpose(dims), "dominates_pt")
    sdp.psd(theta, "J_theta")
    sdp.psd(theta.partial_transpose(dims), "J_theta_pt")
    sdp.minimize(t * c.dim_in)
    result = sdp.solve(tol)
    value = result.value - 1.0
    optimum = c.choi.with_matrix(hermitian_part(result.value_of(theta)))
    logger.info("channel robustness of %s: %.12g", c, value)
    return value, optimum, result.report


def channel_robustness_ke(c: Channel, tol: Optional[float] = None
                          ) -> Tuple[float, BipartiteOperator]:
    """
    Computes the standard robustness of a channel against PPT-binding
    channels.

    Args:
        c (Channel): The channel.
        tol (float, optional): Solver tolerance.

    Returns:
        tuple: (R^s_KE, optimal J_Theta).

    Raises:
        SolverError: If the program cannot be certified.
    """
    value, optimum, _ = certified_channel_robustness_ke(c, tol)
    return value, optimum


def dmax_phi_lower_bound(c: Channel) -> float:
    """
    Returns max(0, log2(k <Phi_k| J_Lambda |Phi_k>)) with k = min(d_in, d_out).

    Every PPT-binding Gamma has k <Phi_k| J_Gamma |Phi_k> <= 1, so this
    bounds qcap_upper_bound from below.
    """
    k = min(c.dim_in, c.dim_out)
    vector = np.zeros(c.choi.dim, dtype=np.complex128)
    for i in range(k):
        vector[i * c.dim_out + i] = 1.0 / math.sqrt(k)
    overlap = k * float(np.real(vector.conj() @ c.choi.matrix @ vector))
    if overlap <= 1.0:
        return 0.0
    return math.log2(overlap)


def certified_qcap_upper_bound(c: Channel, tol: Optional[float] = None
                               ) -> Tuple[float, VerifyReport]:
    """
    Computes the PPT-binding D_max bound on the distillable capacity.

    Returns:
        tuple: (bits, certificate).

    Raises:
        SolverError: If the program fails or undercuts the Phi bound.
    """
    dims = c.dims
    sdp = HermitianSdp("qcap")
    g = sdp.hermitian(c.choi.dim, "G", real=c.is_real)
    t = sdp.real("t")
    sdp.psd(g - c.choi.matrix, "dominates")
    sdp.psd(g, "G")
    sdp.psd(g.partial_transpose(dims), "G_pt")
    sdp.psd((t / c.dim_in).times(np.eye(c.dim_in)) - g.partial_trace(dims, "A"), "marginal")
    sdp.minimize(t)
    result = sdp.solve(tol)
    if result.value <= 0.0:
        raise SolverError(f"qcap program returned t = {result.value:.3e}", result.solution,
                          result.report)
    bits = math.log2(result.value)
    bound = dmax_phi_lower_bound(c)
    if bits < bound - settings.PRIMAL_DUAL_MATCH_TOL:
        logger.error("qcap bound %.12g of %s undercuts the Phi bound %.12g", bits, c, bound)
        raise SolverError(f"qcap bound {bits:.12g} is below the Phi lower bound "
                          f"{bound:.12g}", result.solution, result.report)
    logger.info("distillable capacity of %s <= %.12g bits", c, bits)
    return bits, result.report


def qcap_upper_bound(c: Channel, tol: Optional[float] = None) -> float:
    """
    Returns min log2 t over PPT-binding Gamma with t J_Gamma >= J_Lambda.
    """
    bits, _ = certified_qcap_upper_bound(c, tol)
    return bits


def certified_dmax_divergence(c: Channel, gamma: Channel, tol: Optional[float] = None
                              ) -> Tuple[float, VerifyReport]:
    """
    Computes D_max(Lambda || Gamma) = log2 min { t : t J_Gamma >= J_Lambda }.

    The program is posed on the support of J_Gamma.

    Raises:
        DimensionMismatchError: If the channels map different spaces.
        ValidationError: If J_Lambda leaves the support of J_Gamma, where
            the divergence is infinite.
    """
    if c.dims != gamma.dims:
        raise DimensionMismatchError(f"cannot compare channels on {c.dims} and {gamma.dims}",
                                     "other")
    support, kernel = support_split(gamma.choi.matrix)
    j = c.choi.matrix
    if kernel.shape[1]:
        leak = op_norm(kernel.conj().T @ j @ kernel)
        if leak > settings.ANCHOR_RANK_TOL:
            raise ValidationError(f"{c.name} is not supported inside {gamma.name} "
                                  f"(leak {leak:.3e}); D_max is infinite", "other")
    reference = hermitian_part(support.conj().T @ gamma.choi.matrix @ support)
    target = hermitian_part(support.conj().T @ j @ support)
    sdp = HermitianSdp("dmax")
    t = sdp.real("t")
    sdp.psd(t.times(reference) - target, "dominates")
    sdp.minimize(t)
    result = sdp.solve(tol)
    bits = math.log2(result.value)
    logger.info("D_max(%s || %s) = %.12g", c, gamma, bits)
    return bits, result.report


def dmax_divergence(c: Channel, gamma: Channel, tol: Optional[float] = None) -> float:
    bits, _ = certified_dmax_divergence(c, gamma, tol)
    return bits


def copies_config(c: Channel, n: int, cfg: Optional[SeesawConfig]) -> SeesawConfig:
    """
    Returns the seesaw configuration used for n copies.

    A single copy uses ``cfg`` (or the defaults). Two copies are evaluated
    at Phi_{d_in}^{(x) 2} only unless a configuration is given.
    """
    if cfg is not None:
        return cfg
    if n == 1:
        return SeesawConfig()
    return SeesawConfig(restarts=1, max_rounds=1)


def certified_ec_lower_bound(c: Channel, n: int = 1, cfg: Optional[SeesawConfig] = None,
                             tol: Optional[float] = None) -> Tuple[float, SeesawResult]:
    """
    Computes (1/n) log2 of the seesaw bound on N_tau(Lambda^{(x) n}).

    Returns:
        tuple: (bits per channel use, seesaw result).

    Raises:
        ValidationError: If n is unsupported for this channel.
    """
    n = validate_copies(n, c.dim_in, c.dim_out)
    channel = c if n == 1 else tensor_channels(c, c)
    result = seesaw_tempered_negativity(channel, copies_config(c, n, cfg), tol)
    bits = math.log2(result.lower_bound) / n
    logger.info("entanglement cost of %s >= %.12g bits per use (n = %d)", c, bits, n)
    return bits, result


def ec_lower_bound(c: Channel, n: int = 1, cfg: Optional[SeesawConfig] = None,
                   tol: Optional[float] = None) -> float:
    """
    Returns a finite-n lower bound on the entanglement cost of a channel.

    Args:
        c (Channel): The channel.
        n (int): Number of copies, 1 or 2 (2 only for d_in * d_out <= 9).
        cfg (SeesawConfig, optional): Seesaw configuration.
        tol (float, optional): Solver tolerance.

    Returns:
        float: Bits per channel use.
    """
    bits, _ = certified_ec_lower_bound(c, n, cfg, tol)
    return bits


def channel_tempered_robustness(c: Channel, psi: DensityOperator,
                                tol: Optional[float] = None) -> float:
    """
    Returns R^tau_PPT([id (x) Lambda](psi)), self-tempered.
    """
    return tempered_robustness_ppt(apply(c, psi), tol=tol)


def irreversibility_report(c: Channel, cfg: Optional[SeesawConfig] = None, copies: int = 1,
                           tol: Optional[float] = None) -> BoundReport:
    """
    Compares the entanglement-cost lower bound with the distillable-capacity
    upper bound.

    Args:
        c (Channel): The channel.
        cfg (SeesawConfig, optional): Seesaw configuration of the one-copy
            bound.
        copies (int): Evaluate n = 1 only, or n = 1 and n = 2.
        tol (float, optional): Solver tolerance.

    Returns:
        BoundReport: Both bounds, the per-copy values, every certificate and
        the irreversibility flag.
    """
    validate_copies(copies, c.dim_in, c.dim_out)
    per_copy = []
    certificates = {}
    for n in range(1, copies + 1):
        bits, seesaw = certified_ec_lower_bound(c, n, cfg if n == 1 else None, tol)
        per_copy.append((n, bits))
        certificates[f"ec-{n}"] = seesaw.certificate
    q_bits, certificates["qcap"] = certified_qcap_upper_bound(c, tol)
    report = BoundReport(c.name, max(bits for _, bits in per_copy), q_bits, tuple(per_copy),
                         certificates)
    logger.info("irreversibility report of %s: lower %.12g, upper %.12g, witnessed %s", c,
                report.ec_lower_bound, report.q_upper_bound, report.irreversible)
    return report
