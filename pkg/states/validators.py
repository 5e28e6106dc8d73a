"""
Module 'states.validators'

Validators for bipartite states and the arguments of the state monotones.

Key Functions:

- **validate_density**: PSD and unit-trace check of a bipartite operator.
- **validate_local_dimension**: d >= 2 check for the state families.
- **validate_same_dims**: matching subsystem dimensions of two states.
- **validate_cone**: accepts "ppt", refuses the separable cone.

Dependencies:
- numpy
- linalg
- tempered.exceptions
"""
from typing import Optional

import numpy as np

from linalg.models import BipartiteOperator
from linalg.validators import validate_hermitian
from tempered import settings
from tempered.exceptions import (DimensionMismatchError, NotSdpRepresentableError,
                                 ValidationError)

SUPPORTED_CONES = ("ppt",)
SEPARABLE_CONES = ("sep", "separable")


def validate_density(op: BipartiteOperator, tol: Optional[float] = None,
                     field: str = "state") -> BipartiteOperator:
    """
    Checks that a bipartite operator is a density operator.

    Args:
        op (BipartiteOperator): The candidate state.
        tol (float, optional): Tolerance on the trace and on negative
            eigenvalues. Defaults to ``settings.STATE_TOL``.
        field (str): Name reported in the error message.

    Returns:
        BipartiteOperator: The operator with its matrix replaced by the
        Hermitian part.

    Raises:
        NonHermitianError: If the matrix is not Hermitian.
        ValidationError: If the trace or the spectrum is off.
    """
    tol = settings.STATE_TOL if tol is None else tol
    matrix = validate_hermitian(op.matrix, field=field)
    trace = float(np.trace(matrix).real)
    if abs(trace - 1.0) > tol:
        raise ValidationError(f"trace is {trace:.12g}, expected 1", field)
    lowest = float(np.linalg.eigvalsh(matrix)[0])
    if lowest < -tol:
        raise ValidationError(f"smallest eigenvalue {lowest:.3e} is negative", field)
    return op.with_matrix(matrix)


def validate_local_dimension(d: int, field: str = "d") -> int:
    """
    Checks that a local dimension is an integer >= 2.
    """
    if isinstance(d, bool) or int(d) != d or d < 2:
        raise ValidationError(f"local dimension must be an integer >= 2, got {d}", field)
    return int(d)


def validate_same_dims(first, second, field: str = "anchor") -> None:
    """
    Checks that two states live on the same bipartite space.

    Raises:
        DimensionMismatchError: If the subsystem dimensions differ.
    """
    if first.dims != second.dims:
        raise DimensionMismatchError(f"states act on {first.dims} and {second.dims}", field)


def validate_cone(cone: str) -> str:
    """
    Normalises a cone name.

    Args:
        cone (str): "ppt" (case-insensitive).

    Returns:
        str: "ppt".

    Raises:
        NotSdpRepresentableError: For the separable cone.
        ValidationError: For any other name.
    """
    name = str(cone).lower()
    if name in SEPARABLE_CONES:
        raise NotSdpRepresentableError("the separable cone has no semidefinite description; "
                                       "use cone='ppt'")
    if name not in SUPPORTED_CONES:
        raise ValidationError(f"unknown cone {cone!r}", "cone")
    return name
