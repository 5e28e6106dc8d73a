"""
Module 'channels.validators'

Validators for channel representations.

Key Functions:

- **validate_kraus**: shapes of Kraus operators and sum K^dagger K = 1.
- **validate_choi**: Hermiticity, positivity and the marginal condition
  Tr_B J = 1/d_in of a trace-one Choi state.
- **validate_channel_dims**: positive integer dimensions.

Dependencies:
- numpy
- linalg
- tempered.exceptions
"""
from typing import List, Optional, Sequence

import numpy as np
import numpy.typing as npt

from linalg.models import BipartiteOperator
from linalg.operations import partial_trace
from linalg.validators import validate_hermitian
from tempered import settings
from tempered.exceptions import DimensionMismatchError, ValidationError


def validate_channel_dims(dim_in: int, dim_out: int) -> None:
    """
    Checks that both dimensions are positive integers.
    """
    for value, field in ((dim_in, "din"), (dim_out, "dout")):
        if isinstance(value, bool) or int(value) != value or value < 1:
            raise ValidationError(f"dimension must be a positive integer, got {value}", field)


def validate_kraus(operators: Sequence[npt.ArrayLike], dim_in: int, dim_out: int,
                   tol: Optional[float] = None) -> List[np.ndarray]:
    """
    Checks a Kraus decomposition of a CPTP map.

    Args:
        operators: The Kraus operators, each dim_out x dim_in.
        dim_in (int): Input dimension.
        dim_out (int): Output dimension.
        tol (float, optional): Tolerance on sum K^dagger K = 1. Defaults to
            ``settings.STATE_TOL``.

    Returns:
        list[np.ndarray]: The operators as complex128 arrays.

    Raises:
        DimensionMismatchError: If an operator has the wrong shape.
        ValidationError: If the list is empty, contains NaN or Inf, or is not
            trace preserving.
    """
    tol = settings.STATE_TOL if tol is None else tol
    validate_channel_dims(dim_in, dim_out)
    kraus = [np.asarray(k, dtype=np.complex128) for k in operators]
    if not kraus:
        raise ValidationError("a channel needs at least one Kraus operator", "kraus")
    total = np.zeros((dim_in, dim_in), dtype=np.complex128)
    for index, k in enumerate(kraus):
        if k.shape != (dim_out, dim_in):
            raise DimensionMismatchError(f"Kraus operator {index} has shape {k.shape}, "
                                         f"expected {(dim_out, dim_in)}", "kraus")
        if not np.all(np.isfinite(k)):
            raise ValidationError(f"Kraus operator {index} contains NaN or Inf", "kraus")
        total += k.conj().T @ k
    defect = float(np.max(np.abs(total - np.eye(dim_in))))
    if defect > tol:
        raise ValidationError(f"sum of K^dagger K deviates from the identity by {defect:.3e}",
                              "kraus")
    return kraus


def validate_choi(choi: BipartiteOperator, dim_in: int, dim_out: int,
                  tol: Optional[float] = None) -> BipartiteOperator:
    """
    Checks the trace-one Choi state of a CPTP map.

    Args:
        choi (BipartiteOperator): J = [id (x) Lambda](Phi_{d_in}) on
            d_in x d_out.
        dim_in (int): Input dimension.
        dim_out (int): Output dimension.
        tol (float, optional): CP and TP tolerance. Defaults to
            ``settings.CHANNEL_TOL``.

    Returns:
        BipartiteOperator: The Choi state with its Hermitian part.

    Raises:
        DimensionMismatchError: If the dimensions do not match.
        NonHermitianError: If J is not Hermitian.
        ValidationError: If J is not PSD or Tr_B J != 1/d_in.
    """
    tol = settings.CHANNEL_TOL if tol is None else tol
    validate_channel_dims(dim_in, dim_out)
    if choi.dims != (dim_in, dim_out):
        raise DimensionMismatchError(f"Choi state acts on {choi.dims}, expected "
                                     f"{(dim_in, dim_out)}", "choi")
    matrix = validate_hermitian(choi.matrix, field="choi")
    lowest = float(np.linalg.eigvalsh(matrix)[0])
    if lowest < -tol:
        raise ValidationError(f"map is not completely positive (smallest Choi eigenvalue "
                              f"{lowest:.3e})", "choi")
    marginal = partial_trace(choi.with_matrix(matrix), "A")
    defect = float(np.max(np.abs(marginal - np.eye(dim_in) / dim_in)))
    if defect > tol:
        raise ValidationError(f"map is not trace preserving (marginal defect {defect:.3e})",
                              "choi")
    return choi.with_matrix(matrix)
