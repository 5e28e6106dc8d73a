"""
Module 'states.monotones'

Entanglement monotones of bipartite states for the PPT cone.

Key Functions:

- **negativity**, **log_negativity**: ||rho^Gamma||_1 and its log2.
- **tempered_negativity**: sup Tr X rho over ||X^Gamma|| <= 1 and
  ||X|| = Tr X omega.
- **tempered_log_negativity**: log2 of the self-tempered negativity.
- **std_robustness_ppt**: min Tr delta over PPT delta with rho + delta PPT,
  solved together with its dual form and cross-checked.
- **tempered_robustness_ppt**: (sup Tr X rho - 1) / 2 over X in
  [-1, 1]_{PPT*} with the tempering constraint.
- **evaluate**: measure-name dispatch used by the command line.

The tempering constraint ||X|| = Tr X omega is the LMI pair
-(Tr X omega) 1 <= X <= (Tr X omega) 1. Writing s = Tr X omega, the upper
half forces s 1 - X to be PSD and orthogonal to omega, so X is posed directly
on that face as X = s 1 - V Z V^dagger, with V an orthonormal basis of
ker omega, Z >= 0 and 2 s 1 - Z >= 0. The feasible set is the same and has an
interior the solver can start from.

The dual PPT cone is represented as {P + Q^Gamma : P, Q >= 0}, so
X in [-1, 1]_{PPT*} reads 1 - X - Q1^Gamma >= 0, 1 + X - Q2^Gamma >= 0 with
Q1, Q2 >= 0.
"""
import math
from typing import Optional, Tuple

import numpy as np

from linalg.models import BipartiteOperator
from linalg.operations import (eigh, hermitian_part, partial_transpose, support_split,
                               trace_norm)
from logger_config import get_logger
from sdp.builder import AffineMatrix, HermitianSdp, SdpResult
from sdp.models import VerifyReport
from tempered import settings
from tempered.exceptions import SolverError, ValidationError
from .models import DensityOperator, MonotoneResult, TemperedWitness, Variant
from .validators import validate_cone, validate_same_dims

logger = get_logger(__name__)

MEASURES = ("neg", "logneg", "tneg", "tlogneg", "rob", "trob")
TEMPERED_MEASURES = ("tneg", "tlogneg", "trob")
# witnesses must reproduce the reported value to this accuracy
WITNESS_VALUE_TOL = 1e-7


def negativity(rho: DensityOperator) -> float:
    """
    Returns N(rho) = ||rho^Gamma||_1.
    """
    return trace_norm(rho.partial_transpose())


def log_negativity(rho: DensityOperator) -> float:
    """
    Returns E_N(rho) = log2 ||rho^Gamma||_1.
    """
    return math.log2(negativity(rho))


def negativity_witness(rho: DensityOperator) -> BipartiteOperator:
    """
    Returns the optimal X of the negativity program, sign(rho^Gamma)^Gamma.
    """
    values, vectors = eigh(rho.partial_transpose())
    signs = np.where(values >= 0.0, 1.0, -1.0)
    return partial_transpose(rho.op.with_matrix((vectors * signs) @ vectors.conj().T))


def _anchored_operator(sdp: HermitianSdp, omega: DensityOperator, real: bool) -> AffineMatrix:
    _, kernel = support_split(omega.matrix)
    n = omega.dim
    s = sdp.real("s")
    x = s.times(np.eye(n))
    k = kernel.shape[1]
    if k == 0:
        sdp.nonneg(s, "anchor")
        return x
    z = sdp.hermitian(k, "Z", real=real)
    sdp.psd(z, "kernel_floor")
    sdp.psd((2.0 * s).times(np.eye(k)) - z, "kernel_cap")
    return x - z.congruence(kernel)


def _dual_ppt_interval(sdp: HermitianSdp, x: AffineMatrix, dims: Tuple[int, int],
                       real: bool) -> Tuple[AffineMatrix, AffineMatrix]:
    n = x.dim
    identity = np.eye(n)
    q1 = sdp.hermitian(n, "Q1", real=real)
    q2 = sdp.hermitian(n, "Q2", real=real)
    sdp.psd(q1, "Q1")
    sdp.psd(q2, "Q2")
    sdp.psd(identity - x - q1.partial_transpose(dims), "P1")
    sdp.psd(identity + x - q2.partial_transpose(dims), "P2")
    return q1, q2


def _witness(result: SdpResult, x: AffineMatrix, rho: DensityOperator, omega: DensityOperator,
             variant: Variant, decomposition=None) -> TemperedWitness:
    matrix = hermitian_part(result.value_of(x))
    anchor = float(np.real(np.sum(matrix * omega.matrix.T)))
    witness = TemperedWitness(omega.op.with_matrix(matrix), anchor, variant, result.report,
                              decomposition)
    problems = witness.violations()
    reproduced = witness.check(rho)
    if abs(reproduced - result.value) > WITNESS_VALUE_TOL * max(1.0, abs(result.value)):
        problems.append(f"Tr X rho = {reproduced:.12g} differs from the value "
                        f"{result.value:.12g}")
    if problems:
        logger.error("%s witness rejected: %s", variant, "; ".join(problems))
        raise SolverError(f"{variant} witness rejected: " + "; ".join(problems),
                          result.solution, result.report)
    return witness


def _tempered_pair(rho: DensityOperator,
                   omega: Optional[DensityOperator]) -> Tuple[DensityOperator, bool]:
    omega = rho if omega is None else omega
    validate_same_dims(rho, omega)
    return omega, rho.is_real and omega.is_real


def tempered_negativity(rho: DensityOperator, omega: Optional[DensityOperator] = None,
                        tol: Optional[float] = None) -> Tuple[float, TemperedWitness]:
    """
    Computes the omega-tempered negativity N_tau(rho | omega).

    Args:
        rho (DensityOperator): The state.
        omega (DensityOperator, optional): The anchor. Defaults to rho, which
            gives the self-tempered N_tau(rho).
        tol (float, optional): Solver tolerance.

    Returns:
        tuple: (value, witness); the witness carries the verify report.

    Raises:
        DimensionMismatchError: If rho and omega act on different spaces.
        SolverError: If the program or its witness cannot be certified.
    """
    omega, real = _tempered_pair(rho, omega)
    sdp = HermitianSdp("tempered-negativity")
    x = _anchored_operator(sdp, omega, real)
    x_pt = x.partial_transpose(rho.dims)
    identity = np.eye(rho.dim)
    sdp.psd(identity - x_pt, "pt_upper")
    sdp.psd(identity + x_pt, "pt_lower")
    sdp.maximize(x.inner(rho.matrix))
    result = sdp.solve(tol)
    witness = _witness(result, x, rho, omega, "negativity")
    logger.info("tempered negativity of %s: %.12g", rho, result.value)
    return result.value, witness


def tempered_log_negativity(rho: DensityOperator, omega: Optional[DensityOperator] = None,
                            tol: Optional[float] = None) -> float:
    """
    Returns E^tau_N(rho) = log2 N_tau(rho | omega), self-tempered by default.
    """
    value, _ = tempered_negativity(rho, omega, tol)
    return math.log2(value)


def _std_robustness(rho: DensityOperator, tol: Optional[float]
                    ) -> Tuple[float, BipartiteOperator, Tuple[VerifyReport, VerifyReport]]:
    real = rho.is_real
    n, dims = rho.dim, rho.dims

    primal = HermitianSdp("std-robustness")
    delta = primal.hermitian(n, "delta", real=real)
    delta_pt = delta.partial_transpose(dims)
    primal.psd(delta, "delta")
    primal.psd(delta_pt, "delta_pt")
    primal.psd(delta_pt + rho.partial_transpose().matrix, "shifted_pt")
    primal.minimize(delta.trace())
    primal_result = primal.solve(tol)

    dual = HermitianSdp("std-robustness-dual")
    x = dual.hermitian(n, "X", real=real)
    _dual_ppt_interval(dual, x, dims, real)
    dual.maximize(x.inner(rho.matrix))
    dual_result = dual.solve(tol)

    dual_value = (dual_result.value - 1.0) / 2.0
    mismatch = abs(primal_result.value - dual_value)
    if mismatch > settings.PRIMAL_DUAL_MATCH_TOL:
        logger.error("std robustness of %s: primal %.12g and dual %.12g disagree", rho,
                     primal_result.value, dual_value)
        raise SolverError(f"primal value {primal_result.value:.12g} and dual value "
                          f"{dual_value:.12g} differ by {mismatch:.3e}",
                          primal_result.solution, primal_result.report)
    optimum = rho.op.with_matrix(hermitian_part(primal_result.value_of(delta)))
    logger.info("std robustness of %s: %.12g", rho, primal_result.value)
    return primal_result.value, optimum, (primal_result.report, dual_result.report)


def std_robustness_ppt(rho: DensityOperator,
                       tol: Optional[float] = None) -> Tuple[float, BipartiteOperator]:
    """
    Computes the standard PPT robustness R^s_PPT(rho).

    Both the primal program (min Tr delta) and its dual form
    ((sup Tr X rho - 1) / 2 over [-1, 1]_{PPT*}) are solved.

    Returns:
        tuple: (value, optimal delta).

    Raises:
        SolverError: If either program fails or they disagree by more than
            ``settings.PRIMAL_DUAL_MATCH_TOL``.
    """
    value, optimum, _ = _std_robustness(rho, tol)
    return value, optimum


def _tempered_robustness(rho: DensityOperator, omega: Optional[DensityOperator],
                         tol: Optional[float]) -> Tuple[float, TemperedWitness]:
    omega, real = _tempered_pair(rho, omega)
    sdp = HermitianSdp("tempered-robustness")
    x = _anchored_operator(sdp, omega, real)
    q1, q2 = _dual_ppt_interval(sdp, x, rho.dims, real)
    sdp.maximize(x.inner(rho.matrix))
    result = sdp.solve(tol)
    decomposition = (hermitian_part(result.value_of(q1)), hermitian_part(result.value_of(q2)))
    witness = _witness(result, x, rho, omega, "robustness", decomposition)
    value = (result.value - 1.0) / 2.0
    logger.info("tempered robustness of %s: %.12g", rho, value)
    return value, witness


def tempered_robustness_ppt(rho: DensityOperator, omega: Optional[DensityOperator] = None,
                            tol: Optional[float] = None) -> float:
    """
    Computes the omega-tempered PPT robustness R^tau_PPT(rho | omega).

    Args:
        rho (DensityOperator): The state.
        omega (DensityOperator, optional): The anchor, rho by default.
        tol (float, optional): Solver tolerance.

    Returns:
        float: (sup Tr X rho - 1) / 2.
    """
    value, _ = _tempered_robustness(rho, omega, tol)
    return value


def std_robustness(rho: DensityOperator, cone: str = "ppt",
                   tol: Optional[float] = None) -> Tuple[float, BipartiteOperator]:
    """
    Standard robustness for a named cone; only "ppt" is SDP-representable.

    Raises:
        NotSdpRepresentableError: For cone="sep".
    """
    validate_cone(cone)
    return std_robustness_ppt(rho, tol)


def tempered_robustness(rho: DensityOperator, omega: Optional[DensityOperator] = None,
                        cone: str = "ppt", tol: Optional[float] = None) -> float:
    """
    Tempered robustness for a named cone; only "ppt" is SDP-representable.

    Raises:
        NotSdpRepresentableError: For cone="sep".
    """
    validate_cone(cone)
    return tempered_robustness_ppt(rho, omega, tol)


def evaluate(measure: str, rho: DensityOperator, omega: Optional[DensityOperator] = None,
             tol: Optional[float] = None) -> MonotoneResult:
    """
    Computes a monotone by its short name.

    Args:
        measure (str): One of ``MEASURES``.
        rho (DensityOperator): The state.
        omega (DensityOperator, optional): Anchor of the tempered measures.
        tol (float, optional): Solver tolerance.

    Returns:
        MonotoneResult: Value, certificates and witness.

    Raises:
        ValidationError: For an unknown measure, or an anchor passed to a
            measure that has none.
    """
    if measure not in MEASURES:
        raise ValidationError(f"unknown measure {measure!r}; expected one of "
                              f"{', '.join(MEASURES)}", "measure")
    if omega is not None and measure not in TEMPERED_MEASURES:
        raise ValidationError(f"measure {measure!r} takes no anchor", "anchor")
    if measure in ("neg", "logneg"):
        value = negativity(rho)
        if measure == "logneg":
            value = math.log2(value)
        return MonotoneResult(measure, value, (), negativity_witness(rho),
                              ("closed form: trace norm of the partial transpose",))
    if measure in ("tneg", "tlogneg"):
        value, witness = tempered_negativity(rho, omega, tol)
        if measure == "tlogneg":
            value = math.log2(value)
        return MonotoneResult(measure, value, (witness.certificate,), witness.x)
    if measure == "rob":
        value, optimum, reports = _std_robustness(rho, tol)
        return MonotoneResult(measure, value, reports, optimum)
    value, witness = _tempered_robustness(rho, omega, tol)
    return MonotoneResult(measure, value, (witness.certificate,), witness.x)
