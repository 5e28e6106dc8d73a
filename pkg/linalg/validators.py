"""
Module 'linalg.validators'

Validators for the dense matrices that every other app passes around.

Key Functions:

- **validate_square**: coerces input to a finite complex square matrix.
- **validate_hermitian**: checks the Hermiticity tolerance
  max|M_ij - conj(M_ji)| <= tol * max(1, ||M||).
- **validate_bipartite_dims**: checks that a matrix fits a dA x dB split.

Dependencies:
- numpy
- tempered.exceptions
- tempered.settings
"""
from typing import Optional

import numpy as np
import numpy.typing as npt

from tempered import settings
from tempered.exceptions import DimensionMismatchError, NonHermitianError, ValidationError


def validate_square(matrix: npt.ArrayLike, field: str = "matrix") -> np.ndarray:
    """
    Coerces the input to a complex128 square matrix with finite entries.

    Args:
        matrix: Anything ``numpy.asarray`` accepts.
        field: Name reported in the error message.

    Returns:
        np.ndarray: The matrix as a complex128 array.

    Raises:
        ValidationError: If the input is not a finite square matrix.
    """
    array = np.asarray(matrix, dtype=np.complex128)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {array.shape}", field)
    if array.shape[0] == 0:
        raise ValidationError("matrix is empty", field)
    if not np.all(np.isfinite(array)):
        raise ValidationError("matrix contains NaN or Inf entries", field)
    return array


def hermiticity_defect(matrix: np.ndarray) -> float:
    """
    Returns the relative Hermiticity defect of a square matrix.

    Args:
        matrix (np.ndarray): A square matrix.

    Returns:
        float: max|M - M^dagger| / max(1, ||M||_2).
    """
    scale = max(1.0, float(np.linalg.norm(matrix, 2)))
    return float(np.max(np.abs(matrix - matrix.conj().T))) / scale


def validate_hermitian(matrix: npt.ArrayLike, tol: Optional[float] = None,
                       field: str = "matrix") -> np.ndarray:
    """
    Checks that a matrix is Hermitian within tolerance and returns its
    Hermitian part.

    Args:
        matrix: The matrix to check.
        tol (float, optional): Relative tolerance. Defaults to
            ``settings.HERMITIAN_TOL``.
        field: Name reported in the error message.

    Returns:
        np.ndarray: (M + M^dagger) / 2.

    Raises:
        NonHermitianError: If the defect exceeds the tolerance.
    """
    array = validate_square(matrix, field)
    tol = settings.HERMITIAN_TOL if tol is None else tol
    defect = hermiticity_defect(array)
    if defect > tol:
        raise NonHermitianError(f"matrix is not Hermitian (defect {defect:.3e} > {tol:.1e})",
                                field)
    return (array + array.conj().T) / 2


def validate_bipartite_dims(matrix: np.ndarray, dim_a: int, dim_b: int,
                            field: str = "dims") -> None:
    """
    Checks that a square matrix acts on a dim_a x dim_b space.

    Args:
        matrix (np.ndarray): A square matrix.
        dim_a (int): Dimension of subsystem A.
        dim_b (int): Dimension of subsystem B.
        field: Name reported in the error message.

    Raises:
        DimensionMismatchError: If the dimensions are not positive or do not
            multiply to the matrix size.
    """
    if int(dim_a) != dim_a or int(dim_b) != dim_b or dim_a < 1 or dim_b < 1:
        raise DimensionMismatchError(f"subsystem dimensions must be positive integers, "
                                     f"got ({dim_a}, {dim_b})", field)
    if matrix.shape[0] != dim_a * dim_b:
        raise DimensionMismatchError(f"matrix of size {matrix.shape[0]} does not act on "
                                     f"{dim_a} x {dim_b}", field)
