"""
Module 'channels.operations'

Operations on channels.

Key Functions:

- **choi**: the trace-one Choi state.
- **apply**, **apply_matrix**: [id_E (x) Lambda] on states and on arbitrary
  operators, through the Kraus operators.
- **apply_via_choi**: the same map reconstructed from the Choi state.
- **adjoint_apply**: the Heisenberg picture [id_E (x) Lambda^dagger].
- **tensor_channels**, **compose**: products of channels.
- **truncate**: the finite-rank cut Lambda_k used to emulate
  infinite-dimensional channels.
- **is_ppt_binding**: PPT test of the Choi state.
- **output_trace_distance**: ||[id (x) a](rho) - [id (x) b](rho)||_1.
"""
from typing import Optional, Union

import numpy as np
import numpy.typing as npt

from linalg.models import BipartiteOperator, ComplexMatrix
from linalg.operations import (eigh, min_eigenvalue, partial_transpose, permute_systems,
                               trace_norm)
from linalg.validators import validate_square
from states.models import DensityOperator
from tempered import settings
from tempered.exceptions import DimensionMismatchError, ValidationError
from .models import Channel

OperatorLike = Union[DensityOperator, BipartiteOperator, npt.ArrayLike]


def choi(c: Channel) -> BipartiteOperator:
    """
    Returns J = [id (x) Lambda](Phi_{d_in}) on d_in x d_out.
    """
    return c.choi


def _environment(c: Channel, matrix: np.ndarray, extended_by: Optional[int]) -> int:
    if extended_by is None:
        extended_by = matrix.shape[0] // c.dim_in
    if extended_by < 1 or extended_by * c.dim_in != matrix.shape[0]:
        raise DimensionMismatchError(f"operator of size {matrix.shape[0]} does not live on "
                                     f"{extended_by} x {c.dim_in}", "extended_by")
    return int(extended_by)


def _unwrap(rho: OperatorLike) -> np.ndarray:
    if isinstance(rho, DensityOperator):
        return rho.matrix
    if isinstance(rho, BipartiteOperator):
        return rho.matrix
    return validate_square(rho, "rho")


def apply_matrix(c: Channel, x: OperatorLike, extended_by: Optional[int] = None) -> ComplexMatrix:
    """
    Returns sum_k (1 (x) K_k) X (1 (x) K_k)^dagger.

    Args:
        c (Channel): The channel, acting on the last tensor factor.
        x: An operator on extended_by x d_in.
        extended_by (int, optional): Dimension of the untouched factor.
            Defaults to size / d_in.

    Returns:
        ComplexMatrix: The output operator on extended_by x d_out.

    Raises:
        DimensionMismatchError: If X does not live on extended_by x d_in.
    """
    matrix = _unwrap(x)
    env = _environment(c, matrix, extended_by)
    blocks = matrix.reshape(env, c.dim_in, env, c.dim_in)
    out = np.zeros((env, c.dim_out, env, c.dim_out), dtype=np.complex128)
    for k in c.kraus:
        out += np.einsum("ai,eifj,bj->eafb", k, blocks, k.conj())
    size = env * c.dim_out
    return out.reshape(size, size)


def apply(c: Channel, rho: OperatorLike, extended_by: Optional[int] = None) -> DensityOperator:
    """
    Applies [id_E (x) Lambda] to a state.

    Args:
        c (Channel): The channel.
        rho: A state on extended_by x d_in. A ``DensityOperator`` whose
            second factor has dimension d_in is extended by its first factor.
        extended_by (int, optional): Dimension of the untouched factor.

    Returns:
        DensityOperator: The output state on extended_by x d_out.
    """
    matrix = _unwrap(rho)
    env = _environment(c, matrix, extended_by)
    return DensityOperator.from_matrix(apply_matrix(c, matrix, env), env, c.dim_out)


def apply_via_choi(c: Channel, x: OperatorLike, extended_by: Optional[int] = None
                   ) -> ComplexMatrix:
    """
    Applies [id_E (x) Lambda] using Lambda(|i><j|) = d_in J_{i.,j.}.
    """
    matrix = _unwrap(x)
    env = _environment(c, matrix, extended_by)
    blocks = matrix.reshape(env, c.dim_in, env, c.dim_in)
    j = c.choi.matrix.reshape(c.dim_in, c.dim_out, c.dim_in, c.dim_out)
    out = c.dim_in * np.einsum("eifj,iajb->eafb", blocks, j)
    size = env * c.dim_out
    return out.reshape(size, size)


def adjoint_apply(c: Channel, y: OperatorLike, extended_by: Optional[int] = None
                  ) -> ComplexMatrix:
    """
    Returns sum_k (1 (x) K_k)^dagger Y (1 (x) K_k) for Y on extended_by x d_out.

    Tr Y [id (x) Lambda](X) = Tr [id (x) Lambda^dagger](Y) X.
    """
    matrix = _unwrap(y)
    if extended_by is None:
        extended_by = matrix.shape[0] // c.dim_out
    if extended_by < 1 or extended_by * c.dim_out != matrix.shape[0]:
        raise DimensionMismatchError(f"operator of size {matrix.shape[0]} does not live on "
                                     f"{extended_by} x {c.dim_out}", "extended_by")
    env = int(extended_by)
    blocks = matrix.reshape(env, c.dim_out, env, c.dim_out)
    out = np.zeros((env, c.dim_in, env, c.dim_in), dtype=np.complex128)
    for k in c.kraus:
        out += np.einsum("ai,eafb,bj->eifj", k.conj(), blocks, k)
    size = env * c.dim_in
    return out.reshape(size, size)


def tensor_channels(a: Channel, b: Channel) -> Channel:
    """
    Returns a (x) b acting on C^{a_in} (x) C^{b_in}.

    The Choi state of the product is choi(a) (x) choi(b) with the factors
    regrouped as (a_in b_in)(a_out b_out).
    """
    kraus = [np.kron(ka, kb) for ka in a.kraus for kb in b.kraus]
    return Channel.from_kraus(kraus, a.dim_in * b.dim_in, a.dim_out * b.dim_out,
                              name=f"{a.name}x{b.name}")


def product_choi(a: Channel, b: Channel) -> ComplexMatrix:
    """
    Returns choi(a) (x) choi(b) regrouped as (a_in b_in)(a_out b_out).
    """
    joint = np.kron(a.choi.matrix, b.choi.matrix)
    return permute_systems(joint, [a.dim_in, a.dim_out, b.dim_in, b.dim_out], [0, 2, 1, 3])


def compose(outer: Channel, inner: Channel) -> Channel:
    """
    Returns outer o inner.

    Raises:
        DimensionMismatchError: If inner's output is not outer's input.
    """
    if inner.dim_out != outer.dim_in:
        raise DimensionMismatchError(f"cannot feed {inner.dim_out} outputs into "
                                     f"{outer.dim_in} inputs", "compose")
    kraus = [ko @ ki for ko in outer.kraus for ki in inner.kraus]
    return Channel.from_kraus(kraus, inner.dim_in, outer.dim_out,
                              name=f"{outer.name}o{inner.name}")


def _anchor_terms(anchor: np.ndarray):
    values, vectors = eigh(anchor)
    return [(np.sqrt(value), vectors[:, m]) for m, value in enumerate(values)
            if value > settings.KRAUS_CUTOFF]


def default_anchor(dim: int) -> ComplexMatrix:
    """
    Returns |0><0| on C^dim.
    """
    anchor = np.zeros((dim, dim), dtype=np.complex128)
    anchor[0, 0] = 1.0
    return anchor


def _check_rank(k: int, largest: int) -> int:
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= largest:
        raise ValidationError(f"k must lie in [1, {largest}], got {k}", "k")
    return int(k)


def _check_anchor(anchor: Optional[npt.ArrayLike], dim: int, k: int) -> np.ndarray:
    anchor = default_anchor(dim) if anchor is None else _unwrap(anchor)
    if anchor.shape != (dim, dim):
        raise DimensionMismatchError(f"anchor of shape {anchor.shape} does not live on "
                                     f"C^{dim}", "anchor")
    if abs(np.trace(anchor).real - 1.0) > settings.STATE_TOL or \
            min_eigenvalue(anchor) < -settings.STATE_TOL:
        raise ValidationError("anchor is not a state", "anchor")
    outside = np.max(np.abs(anchor[k:, :]), initial=0.0)
    if outside > settings.STATE_TOL:
        raise ValidationError(f"anchor is not supported on the first {k} basis vectors",
                              "anchor")
    return anchor


def truncate(c: Channel, k: int, anchor: Optional[npt.ArrayLike] = None) -> Channel:
    """
    Returns the rank-k truncation Lambda_k of a channel.

    With Pi, Pi' the projectors onto the first k input and output basis
    vectors and omega the anchor,

        Lambda_k(X) = Pi' Lambda(Pi X Pi) Pi' + Tr[(1 - Pi') Lambda(Pi X Pi)] omega
                      + Tr[(1 - Pi) X] omega.

    The last term routes the input weight outside Pi to the anchor, so the
    result is trace preserving on every input; for k = dim it is c itself.

    Args:
        c (Channel): The channel.
        k (int): Rank of the projectors, 1 <= k <= min(d_in, d_out).
        anchor: Output state supported inside Pi'. Defaults to |0><0|.

    Raises:
        ValidationError: If k is out of range or the anchor is not a state
            supported inside Pi'.
    """
    k = _check_rank(k, min(c.dim_in, c.dim_out))
    terms = _anchor_terms(_check_anchor(anchor, c.dim_out, k))
    kraus = []
    for op in c.kraus:
        cut = op.copy()
        cut[:, k:] = 0.0
        kept = cut.copy()
        kept[k:, :] = 0.0
        kraus.append(kept)
        for row in range(k, c.dim_out):
            for weight, vector in terms:
                kraus.append(weight * np.outer(vector, cut[row, :]))
    for column in range(k, c.dim_in):
        for weight, vector in terms:
            kraus.append(weight * np.outer(vector, np.eye(c.dim_in)[column]))
    return Channel.from_kraus(kraus, c.dim_in, c.dim_out, name=f"{c.name}|{k}")


def local_projection_channel(dim: int, k: int, anchor: Optional[npt.ArrayLike] = None
                             ) -> Channel:
    """
    Returns Phi(X) = Pi' X Pi' + Tr[(1 - Pi') X] omega on C^dim.

    This map sends PPT-binding channels to PPT-binding channels when applied
    after them.
    """
    k = _check_rank(k, dim)
    terms = _anchor_terms(_check_anchor(anchor, dim, k))
    projection = np.diag([1.0] * k + [0.0] * (dim - k)).astype(np.complex128)
    kraus = [projection]
    for column in range(k, dim):
        for weight, vector in terms:
            kraus.append(weight * np.outer(vector, np.eye(dim)[column]))
    return Channel.from_kraus(kraus, dim, dim, name=f"project{k}")


def is_ppt_binding(c: Channel, tol: float = settings.CHANNEL_TOL) -> bool:
    """
    Returns True iff choi(c)^Gamma >= -tol.
    """
    return min_eigenvalue(partial_transpose(c.choi)) >= -tol


def output_trace_distance(a: Channel, b: Channel, rho: OperatorLike,
                          extended_by: Optional[int] = None) -> float:
    """
    Returns ||[id (x) a](rho) - [id (x) b](rho)||_1.
    """
    if a.dims != b.dims:
        raise DimensionMismatchError(f"channels map {a.dims} and {b.dims}", "channels")
    return trace_norm(apply_matrix(a, rho, extended_by) - apply_matrix(b, rho, extended_by))
