"""
Module 'channels.models'

Channel types.

A ``Channel`` always carries both representations: the Kraus operators
{K_i} (each d_out x d_in) and the trace-one Choi state

    J = [id (x) Lambda](Phi_{d_in}) = (1/d_in) sum_ij |i><j| (x) Lambda(|i><j|)

on d_in x d_out. Whichever one the channel is built from is validated and the
other is derived from it: the Choi state from the Kraus operators as
(1/d_in) sum_k |K_k>><<K_k|, the Kraus operators from the Choi state by
eigendecomposition (eigenvalues below ``settings.KRAUS_CUTOFF`` are dropped).

``HermitianPreservingMap`` holds linear combinations of channels, such as
(3/2) Delta - (1/2) id, before they are validated into a ``Channel``.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from linalg.models import BipartiteOperator, ComplexMatrix, frozen_copy
from linalg.operations import eigh
from linalg.validators import validate_hermitian
from tempered import settings
from tempered.exceptions import DimensionMismatchError, ValidationError
from .validators import validate_channel_dims, validate_choi, validate_kraus


def choi_from_kraus(kraus: Sequence[np.ndarray], dim_in: int) -> ComplexMatrix:
    """
    Returns (1/d_in) sum_k |K_k>><<K_k| with |K>> = sum_i |i> (x) K|i>.
    """
    vectors = np.array([k.T.reshape(-1) for k in kraus])
    return vectors.T @ vectors.conj() / dim_in


def kraus_from_choi(choi: np.ndarray, dim_in: int, dim_out: int) -> Tuple[ComplexMatrix, ...]:
    """
    Extracts Kraus operators from a PSD trace-one Choi state.
    """
    values, vectors = eigh(choi)
    kraus = []
    for value, vector in zip(values[::-1], vectors.T[::-1]):
        if value <= settings.KRAUS_CUTOFF:
            break
        kraus.append(np.sqrt(dim_in * value) * vector.reshape(dim_in, dim_out).T)
    return tuple(frozen_copy(k) for k in kraus)


@dataclass(frozen=True, eq=False)
class Channel:
    """
    A completely positive trace-preserving map.

    Attributes:
        dim_in (int): Input dimension.
        dim_out (int): Output dimension.
        kraus (tuple[ComplexMatrix, ...]): Kraus operators, read-only.
        choi (BipartiteOperator): Trace-one Choi state on dim_in x dim_out.
        name (str): Label used in logs and reports.
    """
    dim_in: int
    dim_out: int
    kraus: Tuple[ComplexMatrix, ...]
    choi: BipartiteOperator
    name: str = "channel"

    def __post_init__(self) -> None:
        validate_channel_dims(self.dim_in, self.dim_out)
        if not self.kraus:
            raise ValidationError("a channel needs at least one Kraus operator", "kraus")
        for index, k in enumerate(self.kraus):
            if k.shape != (self.dim_out, self.dim_in):
                raise DimensionMismatchError(f"Kraus operator has shape {k.shape}, "
                                             f"expected {self.dim_out} x {self.dim_in}",
                                             f"kraus[{index}]")
        if self.choi.dims != (self.dim_in, self.dim_out):
            raise DimensionMismatchError(f"Choi state acts on {self.choi.dims}, expected "
                                         f"{(self.dim_in, self.dim_out)}", "choi")

    @classmethod
    def from_kraus(cls, operators: Sequence[npt.ArrayLike], dim_in: Optional[int] = None,
                   dim_out: Optional[int] = None, name: str = "channel") -> "Channel":
        """
        Builds a channel from Kraus operators.

        Dimensions default to the shape of the first operator. Operators
        whose norm is below ``settings.KRAUS_CUTOFF`` are dropped.

        Raises:
            ValidationError: If the operators do not form a CPTP map.
        """
        operators = [np.asarray(k, dtype=np.complex128) for k in operators]
        if not operators:
            raise ValidationError("a channel needs at least one Kraus operator", "kraus")
        dim_out = operators[0].shape[0] if dim_out is None else dim_out
        dim_in = operators[0].shape[-1] if dim_in is None else dim_in
        kraus = validate_kraus(operators, dim_in, dim_out)
        kraus = [k for k in kraus if np.linalg.norm(k) > settings.KRAUS_CUTOFF]
        choi = BipartiteOperator(dim_in, dim_out, choi_from_kraus(kraus, dim_in))
        return cls(int(dim_in), int(dim_out), tuple(frozen_copy(k) for k in kraus), choi, name)

    @classmethod
    def from_choi(cls, choi: Union[BipartiteOperator, npt.ArrayLike], dim_in: Optional[int] = None,
                  dim_out: Optional[int] = None, name: str = "channel") -> "Channel":
        """
        Builds a channel from its trace-one Choi state.

        Raises:
            ValidationError: If J is not the Choi state of a CPTP map.
        """
        if not isinstance(choi, BipartiteOperator):
            if dim_in is None or dim_out is None:
                raise ValidationError("dimensions are required for a bare Choi matrix", "dims")
            choi = BipartiteOperator(dim_in, dim_out, choi)
        dim_in, dim_out = choi.dims if dim_in is None else (dim_in, dim_out)
        choi = validate_choi(choi, dim_in, dim_out)
        kraus = kraus_from_choi(choi.matrix, dim_in, dim_out)
        return cls(int(dim_in), int(dim_out), kraus, choi, name)

    @property
    def dims(self) -> Tuple[int, int]:
        return self.dim_in, self.dim_out

    @property
    def is_real(self) -> bool:
        return not np.any(self.choi.matrix.imag)

    def renamed(self, name: str) -> "Channel":
        return Channel(self.dim_in, self.dim_out, self.kraus, self.choi, name)

    def __str__(self) -> str:
        return f"Channel({self.name}: {self.dim_in}->{self.dim_out})"


@dataclass(frozen=True, eq=False)
class HermitianPreservingMap:
    """
    A Hermiticity-preserving linear map given by its (trace-one normalised)
    Choi matrix.

    Attributes:
        dim_in (int): Input dimension.
        dim_out (int): Output dimension.
        choi (BipartiteOperator): Hermitian Choi matrix on dim_in x dim_out.
    """
    dim_in: int
    dim_out: int
    choi: BipartiteOperator

    def __post_init__(self) -> None:
        validate_channel_dims(self.dim_in, self.dim_out)
        if self.choi.dims != (self.dim_in, self.dim_out):
            raise DimensionMismatchError(f"Choi matrix acts on {self.choi.dims}, expected "
                                         f"{(self.dim_in, self.dim_out)}", "choi")
        object.__setattr__(self, "choi", self.choi.with_matrix(
            validate_hermitian(self.choi.matrix, settings.STATE_TOL, "choi")))

    @classmethod
    def from_channel(cls, channel: Channel) -> "HermitianPreservingMap":
        return cls(channel.dim_in, channel.dim_out, channel.choi)

    def __add__(self, other: "HermitianPreservingMap") -> "HermitianPreservingMap":
        if not isinstance(other, HermitianPreservingMap):
            return NotImplemented
        return HermitianPreservingMap(self.dim_in, self.dim_out, self.choi + other.choi)

    def __sub__(self, other: "HermitianPreservingMap") -> "HermitianPreservingMap":
        if not isinstance(other, HermitianPreservingMap):
            return NotImplemented
        return HermitianPreservingMap(self.dim_in, self.dim_out, self.choi - other.choi)

    def __mul__(self, factor: float) -> "HermitianPreservingMap":
        if isinstance(factor, (complex, np.complexfloating)):
            raise ValidationError("only real multiples preserve Hermiticity", "factor")
        return HermitianPreservingMap(self.dim_in, self.dim_out, self.choi.scaled(float(factor)))

    __rmul__ = __mul__

    def to_channel(self, name: str = "channel") -> Channel:
        """
        Validates the map as CPTP.

        Raises:
            ValidationError: If the map is not completely positive or not
                trace preserving.
        """
        return Channel.from_choi(self.choi, name=name)
