"""
Module 'linalg.operations'

Dense linear algebra on bipartite operators.

Key Functions:

- **tensor**: Kronecker product in the project index convention.
- **partial_transpose**: transpose of one tensor factor.
- **partial_trace**: trace over one subsystem.
- **permute_systems**: reorders the tensor factors of an operator.
- **eigh**: Hermitian eigendecomposition with a residual check.
- **trace_norm**, **op_norm**, **is_psd**: spectral quantities of Hermitian
  matrices.
- **support_split**: orthonormal bases of the support and kernel of a PSD
  matrix (sparse where the support allows it).

Every function accepts either a plain ``numpy`` array or a
``BipartiteOperator`` where that makes sense and never mutates its input.

Dependencies:
- numpy
- linalg.models
- linalg.validators
"""
from typing import Literal, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
import scipy.linalg as sla

from tempered import settings
from tempered.exceptions import ConvergenceError, DimensionMismatchError, ValidationError
from .models import BipartiteOperator, ComplexMatrix
from .validators import hermiticity_defect, validate_hermitian, validate_square

MatrixLike = Union[npt.ArrayLike, BipartiteOperator]
Subsystem = Literal["A", "B"]

# eigh reconstruction residual, relative to max(1, ||H||)
EIGH_RESIDUAL_TOL = 1e-10


def as_matrix(value: MatrixLike) -> np.ndarray:
    """
    Unwraps a BipartiteOperator or coerces an array to complex128.
    """
    if isinstance(value, BipartiteOperator):
        return value.matrix
    return validate_square(value)


def tensor(a: MatrixLike, b: MatrixLike) -> ComplexMatrix:
    """
    Returns the Kronecker product a (x) b.

    Row ``i * dim(b) + j`` of the result corresponds to |i>|j>.

    Args:
        a: Left factor.
        b: Right factor.

    Returns:
        ComplexMatrix: The product, of size dim(a) * dim(b).
    """
    return np.kron(as_matrix(a), as_matrix(b))


def _check_subsystem(system: str) -> None:
    if system not in ("A", "B"):
        raise ValidationError(f"subsystem must be 'A' or 'B', got {system!r}", "system")


def partial_transpose(t: BipartiteOperator, system: Subsystem = "B") -> BipartiteOperator:
    """
    Returns the partial transpose of a bipartite operator.

    With the default ``system="B"`` the entries satisfy
    (T^Gamma)_{(i,j),(k,l)} = T_{(i,l),(k,j)}.

    Args:
        t (BipartiteOperator): The operator.
        system (str): The subsystem to transpose, "A" or "B".

    Returns:
        BipartiteOperator: The partially transposed operator.
    """
    _check_subsystem(system)
    dim_a, dim_b = t.dims
    blocks = t.matrix.reshape(dim_a, dim_b, dim_a, dim_b)
    axes = (0, 3, 2, 1) if system == "B" else (2, 1, 0, 3)
    return t.with_matrix(blocks.transpose(axes).reshape(t.dim, t.dim))


def partial_trace(t: BipartiteOperator, keep: Subsystem = "A") -> ComplexMatrix:
    """
    Traces out one subsystem of a bipartite operator.

    Args:
        t (BipartiteOperator): The operator.
        keep (str): The subsystem that survives, "A" or "B".

    Returns:
        ComplexMatrix: The reduced operator on the kept subsystem.
    """
    _check_subsystem(keep)
    dim_a, dim_b = t.dims
    blocks = t.matrix.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.einsum("ijkj->ik", blocks)
    return np.einsum("ijil->jl", blocks)


def permute_systems(matrix: MatrixLike, dims: Sequence[int],
                    order: Sequence[int]) -> ComplexMatrix:
    """
    Reorders the tensor factors of an operator on (x)_k C^{dims[k]}.

    Factor ``order[p]`` of the input becomes factor ``p`` of the output.

    Args:
        matrix: Operator on the product space.
        dims (Sequence[int]): Dimensions of the factors, in input order.
        order (Sequence[int]): A permutation of ``range(len(dims))``.

    Returns:
        ComplexMatrix: The permuted operator.

    Raises:
        DimensionMismatchError: If the dimensions do not fit the matrix.
        ValidationError: If ``order`` is not a permutation.
    """
    m = as_matrix(matrix)
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != m.shape[0]:
        raise DimensionMismatchError(f"factor dimensions {dims} do not multiply to {m.shape[0]}",
                                     "dims")
    if sorted(order) != list(range(len(dims))):
        raise ValidationError(f"{list(order)} is not a permutation of the factors", "order")
    n = len(dims)
    axes = list(order) + [n + k for k in order]
    return m.reshape(dims + dims).transpose(axes).reshape(m.shape)


def is_hermitian(h: MatrixLike, tol: float = settings.HERMITIAN_TOL) -> bool:
    """
    Returns True if the matrix is Hermitian within the relative tolerance.
    """
    return hermiticity_defect(as_matrix(h)) <= tol


def hermitian_part(h: MatrixLike) -> ComplexMatrix:
    """
    Returns (H + H^dagger) / 2.
    """
    m = as_matrix(h)
    return (m + m.conj().T) / 2


def eigh(h: MatrixLike) -> Tuple[np.ndarray, ComplexMatrix]:
    """
    Hermitian eigendecomposition with ascending eigenvalues.

    The input is symmetrised before decomposition, and the reconstruction
    residual ||H - V diag(w) V^dagger|| is checked afterwards.

    Args:
        h: A Hermitian matrix (within ``settings.HERMITIAN_TOL``).

    Returns:
        tuple: (eigenvalues, eigenvectors as columns).

    Raises:
        NonHermitianError: If the input is not Hermitian.
        ConvergenceError: If LAPACK fails or the residual bound is violated.
    """
    m = validate_hermitian(as_matrix(h))
    try:
        values, vectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition did not converge: {exc}") from exc
    scale = max(1.0, float(np.max(np.abs(values))))
    residual = float(np.max(np.abs(m - (vectors * values) @ vectors.conj().T)))
    if residual > EIGH_RESIDUAL_TOL * scale:
        raise ConvergenceError(f"eigendecomposition residual {residual:.3e} exceeds bound")
    return values, vectors


def eigvalsh(h: MatrixLike) -> np.ndarray:
    """
    Returns the ascending eigenvalues of a Hermitian matrix.
    """
    m = validate_hermitian(as_matrix(h))
    try:
        return np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition did not converge: {exc}") from exc


def trace_norm(h: MatrixLike) -> float:
    """
    Returns ||H||_1, the sum of absolute eigenvalues of a Hermitian matrix.
    """
    return float(np.sum(np.abs(eigvalsh(h))))


def op_norm(h: MatrixLike) -> float:
    """
    Returns ||H||_inf, the largest absolute eigenvalue of a Hermitian matrix.
    """
    return float(np.max(np.abs(eigvalsh(h))))


def min_eigenvalue(h: MatrixLike) -> float:
    """
    Returns the smallest eigenvalue of a Hermitian matrix.
    """
    return float(eigvalsh(h)[0])


def is_psd(h: MatrixLike, tol: float = 0.0) -> bool:
    """
    Returns True iff the smallest eigenvalue is at least -tol.
    """
    return min_eigenvalue(h) >= -tol


def ket(index: int, dim: int) -> np.ndarray:
    """
    Returns the computational basis vector |index> of C^dim.
    """
    if not 0 <= index < dim:
        raise ValidationError(f"basis index {index} out of range for dimension {dim}", "index")
    vector = np.zeros(dim, dtype=np.complex128)
    vector[index] = 1.0
    return vector


def projector(vector: npt.ArrayLike) -> ComplexMatrix:
    """
    Returns |v><v| for a (not necessarily normalised) vector v.
    """
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    return np.outer(v, v.conj())


def swap_operator(dim: int) -> ComplexMatrix:
    """
    Returns the swap F on C^dim (x) C^dim, F|i>|j> = |j>|i>.
    """
    identity = np.eye(dim * dim, dtype=np.complex128).reshape(dim, dim, dim, dim)
    return identity.transpose(1, 0, 2, 3).reshape(dim * dim, dim * dim)


def range_basis(projection: MatrixLike, rank: int) -> ComplexMatrix:
    """
    Returns an orthonormal basis of the range of an orthogonal projector.

    The basis comes from a column-pivoted QR factorisation, so columns of the
    projector that are (close to) computational basis vectors are picked
    first and the basis stays sparse for operators with sparse support.
    Entries below 1e-14 in magnitude are set to zero.

    Args:
        projection: An orthogonal projector.
        rank (int): Its rank.

    Returns:
        ComplexMatrix: An (n x rank) matrix V with V^dagger V = I.
    """
    m = as_matrix(projection)
    if rank == 0:
        return np.zeros((m.shape[0], 0), dtype=np.complex128)
    q, _, _ = sla.qr(m, pivoting=True)
    basis = np.array(q[:, :rank], dtype=np.complex128)
    basis.real[np.abs(basis.real) < 1e-14] = 0.0
    basis.imag[np.abs(basis.imag) < 1e-14] = 0.0
    return basis


def support_split(h: MatrixLike, tol: float = settings.ANCHOR_RANK_TOL
                  ) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """
    Splits the space into the support and the kernel of a PSD matrix.

    Eigenvalues at most ``tol * max(1, ||H||)`` count as zero.

    Args:
        h: A Hermitian PSD matrix.
        tol (float): Relative rank tolerance.

    Returns:
        tuple: (support basis, kernel basis), each with orthonormal columns.
    """
    values, vectors = eigh(h)
    cutoff = tol * max(1.0, float(np.max(np.abs(values))))
    kept = vectors[:, values > cutoff]
    support = kept @ kept.conj().T
    if not np.any(as_matrix(h).imag):
        support = support.real
    rank = kept.shape[1]
    n = support.shape[0]
    return range_basis(support, rank), range_basis(np.eye(n) - support, n - rank)
