"""
Module 'linalg.models'

Numeric carriers shared by the whole project.

- ComplexMatrix: a dense square complex128 ``numpy.ndarray``.
- BipartiteOperator: a ComplexMatrix tagged with subsystem dimensions.

Index convention (used by every app): the basis vector |i>_A (x) |j>_B is row
``i * dim_b + j`` (row-major, B fastest), which is what ``numpy.kron`` and
``reshape(dim_a, dim_b, dim_a, dim_b)`` produce.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import numpy.typing as npt

from tempered.exceptions import DimensionMismatchError
from .validators import validate_bipartite_dims, validate_square

ComplexMatrix = npt.NDArray[np.complex128]


def frozen_copy(matrix: npt.ArrayLike) -> ComplexMatrix:
    """
    Returns a read-only complex128 copy of the input.

    Args:
        matrix: The matrix to copy.

    Returns:
        ComplexMatrix: A copy that cannot be written to.
    """
    array = np.array(matrix, dtype=np.complex128, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class BipartiteOperator:
    """
    An operator on a dim_a x dim_b bipartite space.

    Attributes:
        dim_a (int): Dimension of subsystem A.
        dim_b (int): Dimension of subsystem B.
        matrix (ComplexMatrix): The (dim_a*dim_b)-square matrix, read-only.
    """
    dim_a: int
    dim_b: int
    matrix: ComplexMatrix

    def __post_init__(self) -> None:
        matrix = validate_square(self.matrix)
        validate_bipartite_dims(matrix, self.dim_a, self.dim_b)
        object.__setattr__(self, "dim_a", int(self.dim_a))
        object.__setattr__(self, "dim_b", int(self.dim_b))
        object.__setattr__(self, "matrix", frozen_copy(matrix))

    @property
    def dims(self) -> Tuple[int, int]:
        """
        Returns the subsystem dimensions (dim_a, dim_b).
        """
        return self.dim_a, self.dim_b

    @property
    def dim(self) -> int:
        """
        Returns the total dimension dim_a * dim_b.
        """
        return self.dim_a * self.dim_b

    def with_matrix(self, matrix: npt.ArrayLike) -> "BipartiteOperator":
        """
        Returns an operator with the same dimensions and a new matrix.
        """
        return BipartiteOperator(self.dim_a, self.dim_b, matrix)

    def __add__(self, other: "BipartiteOperator") -> "BipartiteOperator":
        if not isinstance(other, BipartiteOperator):
            return NotImplemented
        if other.dims != self.dims:
            raise DimensionMismatchError(f"cannot add operators on {self.dims} and {other.dims}")
        return self.with_matrix(self.matrix + other.matrix)

    def __sub__(self, other: "BipartiteOperator") -> "BipartiteOperator":
        if not isinstance(other, BipartiteOperator):
            return NotImplemented
        return self + other.scaled(-1.0)

    def scaled(self, factor: complex) -> "BipartiteOperator":
        """
        Returns factor * self.
        """
        return self.with_matrix(factor * self.matrix)

    def __str__(self) -> str:
        return f"BipartiteOperator({self.dim_a}x{self.dim_b})"
