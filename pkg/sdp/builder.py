"""
Module 'sdp.builder'

Modelling front end that turns Hermitian-matrix programs into ``SdpProblem``.

A program is stated in terms of modelling variables (Hermitian matrices and
real scalars), affine expressions over them and constraints:

    sdp = HermitianSdp("negativity")
    x = sdp.hermitian(9)
    sdp.psd(identity - x.partial_transpose((3, 3)))
    sdp.psd(identity + x.partial_transpose((3, 3)))
    sdp.maximize(x.inner(rho))
    result = sdp.solve()

The real coordinates of the modelling variables become the dual variables y
of the canonical problem (orthonormal basis E_pp, (E_pq + E_qp)/sqrt2 and
i(E_pq - E_qp)/sqrt2). A Hermitian LMI F(y) >= 0 becomes one psd block with
C = embed(F_0)/2 and A_i = -embed(F_i)/2, so every value reported by the
canonical problem is the un-doubled value of the complex program. LMIs whose
coefficients are all real use a real block of the original size instead.

Key Classes:

- **AffineMatrix**: square complex affine expression.
- **AffineScalar**: real affine expression.
- **HermitianSdp**: the program; ``compile`` and ``solve``.
- **SdpResult**: certified answer with expression evaluation and LMI
  multipliers.
"""
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

from logger_config import get_logger
from tempered import settings
from tempered.exceptions import DimensionMismatchError, SolverError, ValidationError
from .embedding import compress_hermitian, embed_columns, embed_hermitian
from .models import Block, SdpProblem, SdpSolution, VerifyReport, summarise
from .solver import default_tolerance, solve as solve_problem
from .verify import verify

logger = get_logger(__name__)

Number = Union[int, float]
# imaginary parts below this are treated as zero when choosing real blocks
REAL_BLOCK_TOL = 1e-15


def _check_real(value: object) -> float:
    if isinstance(value, (bool, complex, np.complexfloating)) or not np.isscalar(value):
        raise ValidationError(f"expected a real scalar, got {value!r}", "scalar")
    return float(value)


def _merge(left: Dict[int, object], right: Dict[int, object], factor: float = 1.0) -> Dict:
    merged = dict(left)
    for key, value in right.items():
        merged[key] = merged[key] + factor * value if key in merged else factor * value
    return merged


def _transpose_index(dims: Tuple[int, int], system: str) -> np.ndarray:
    dim_a, dim_b = dims
    n = dim_a * dim_b
    axes = (0, 3, 2, 1) if system == "B" else (2, 1, 0, 3)
    return np.arange(n * n).reshape(dim_a, dim_b, dim_a, dim_b).transpose(axes).reshape(-1)


def _trace_map(dims: Tuple[int, int], keep: str) -> sp.csr_matrix:
    dim_a, dim_b = dims
    i, j, k = np.meshgrid(np.arange(dim_a), np.arange(dim_b), np.arange(dim_a), indexing="ij")
    if keep == "A":
        rows = (i * dim_a + k).reshape(-1)
        cols = ((i * dim_b + j) * (dim_a * dim_b) + (k * dim_b + j)).reshape(-1)
        size = dim_a
    else:
        i, j, k = np.meshgrid(np.arange(dim_b), np.arange(dim_a), np.arange(dim_b),
                              indexing="ij")
        rows = (i * dim_b + k).reshape(-1)
        cols = ((j * dim_b + i) * (dim_a * dim_b) + (j * dim_b + k)).reshape(-1)
        size = dim_b
    data = np.ones(rows.size)
    return sp.csr_matrix((data, (rows, cols)), shape=(size * size, (dim_a * dim_b) ** 2))


def _embedding_map(n: int, before: int, after: int) -> sp.csr_matrix:
    size = before * n * after
    a, i, j, c = np.meshgrid(np.arange(before), np.arange(n), np.arange(n), np.arange(after),
                             indexing="ij")
    rows = ((a * n + i) * after + c) * size + ((a * n + j) * after + c)
    cols = i * n + j
    return sp.csr_matrix((np.ones(rows.size), (rows.reshape(-1), cols.reshape(-1))),
                         shape=(size * size, n * n))


class AffineScalar:
    """
    A real affine expression g_0 + sum_v <g_v, y_v>.

    Attributes:
        terms (dict[int, np.ndarray]): Coefficient vector per variable id.
        constant (float): g_0.
    """

    __array_ufunc__ = None

    def __init__(self, terms: Optional[Dict[int, np.ndarray]] = None, constant: float = 0.0):
        self.terms = terms or {}
        self.constant = float(constant)

    def __add__(self, other: Union["AffineScalar", Number]) -> "AffineScalar":
        if isinstance(other, AffineScalar):
            return AffineScalar(_merge(self.terms, other.terms), self.constant + other.constant)
        return AffineScalar(dict(self.terms), self.constant + _check_real(other))

    __radd__ = __add__

    def __neg__(self) -> "AffineScalar":
        return self * -1.0

    def __sub__(self, other: Union["AffineScalar", Number]) -> "AffineScalar":
        return self + (-other)

    def __rsub__(self, other: Number) -> "AffineScalar":
        return (-self) + other

    def __mul__(self, factor: Number) -> "AffineScalar":
        factor = _check_real(factor)
        return AffineScalar({k: factor * v for k, v in self.terms.items()},
                            factor * self.constant)

    __rmul__ = __mul__

    def __truediv__(self, divisor: Number) -> "AffineScalar":
        return self * (1.0 / _check_real(divisor))

    def times(self, matrix: npt.ArrayLike) -> "AffineMatrix":
        """
        Returns the matrix expression g * M for a constant Hermitian M.
        """
        m = np.asarray(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"expected a square matrix, got shape {m.shape}", "matrix")
        column = sp.csr_matrix(m.reshape(-1, 1))
        terms = {k: sp.csr_matrix(column @ sp.csr_matrix(v.reshape(1, -1)))
                 for k, v in self.terms.items()}
        return AffineMatrix(m.shape[0], terms, self.constant * m)


class AffineMatrix:
    """
    A square complex affine expression F_0 + sum_v F_v y_v.

    Attributes:
        dim (int): Matrix order n.
        terms (dict[int, sp.csr_matrix]): (n^2 x width_v) coefficient map per
            variable id; column j is the row-major vectorisation of the matrix
            multiplying coordinate j.
        constant (np.ndarray): F_0.
    """

    __array_ufunc__ = None

    def __init__(self, dim: int, terms: Optional[Dict[int, sp.csr_matrix]] = None,
                 constant: Optional[npt.ArrayLike] = None):
        self.dim = int(dim)
        self.terms = terms or {}
        self.constant = (np.zeros((self.dim, self.dim), dtype=np.complex128)
                         if constant is None else np.asarray(constant, dtype=np.complex128))
        if self.constant.shape != (self.dim, self.dim):
            raise DimensionMismatchError(f"constant of shape {self.constant.shape} does not fit "
                                         f"dimension {self.dim}", "constant")

    def _coerce(self, other: Union["AffineMatrix", npt.ArrayLike]) -> "AffineMatrix":
        if isinstance(other, AffineMatrix):
            result = other
        else:
            result = AffineMatrix(self.dim, constant=other)
        if result.dim != self.dim:
            raise DimensionMismatchError(f"cannot combine dimensions {self.dim} and {result.dim}",
                                         "dim")
        return result

    def __add__(self, other: Union["AffineMatrix", npt.ArrayLike]) -> "AffineMatrix":
        other = self._coerce(other)
        return AffineMatrix(self.dim, _merge(self.terms, other.terms),
                            self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self) -> "AffineMatrix":
        return self * -1.0

    def __sub__(self, other: Union["AffineMatrix", npt.ArrayLike]) -> "AffineMatrix":
        other = self._coerce(other)
        return AffineMatrix(self.dim, _merge(self.terms, other.terms, -1.0),
                            self.constant - other.constant)

    def __rsub__(self, other: npt.ArrayLike) -> "AffineMatrix":
        return self._coerce(other) - self

    def __mul__(self, factor: Number) -> "AffineMatrix":
        factor = _check_real(factor)
        return AffineMatrix(self.dim, {k: factor * v for k, v in self.terms.items()},
                            factor * self.constant)

    __rmul__ = __mul__

    def _mapped(self, linear: sp.spmatrix, dim: int, constant: np.ndarray) -> "AffineMatrix":
        return AffineMatrix(dim, {k: sp.csr_matrix(linear @ v) for k, v in self.terms.items()},
                            constant)

    def partial_transpose(self, dims: Tuple[int, int], system: str = "B") -> "AffineMatrix":
        """
        Returns the expression with one tensor factor transposed.
        """
        dim_a, dim_b = dims
        if dim_a * dim_b != self.dim:
            raise DimensionMismatchError(f"{dims} does not split dimension {self.dim}", "dims")
        index = _transpose_index((dim_a, dim_b), system)
        constant = self.constant.reshape(-1)[index].reshape(self.dim, self.dim)
        return AffineMatrix(self.dim, {k: v[index] for k, v in self.terms.items()}, constant)

    def partial_trace(self, dims: Tuple[int, int], keep: str = "A") -> "AffineMatrix":
        """
        Returns the expression with one subsystem traced out.
        """
        dim_a, dim_b = dims
        if dim_a * dim_b != self.dim:
            raise DimensionMismatchError(f"{dims} does not split dimension {self.dim}", "dims")
        if keep not in ("A", "B"):
            raise ValidationError(f"keep must be 'A' or 'B', got {keep!r}", "keep")
        linear = _trace_map((dim_a, dim_b), keep)
        size = dim_a if keep == "A" else dim_b
        constant = (linear @ self.constant.reshape(-1)).reshape(size, size)
        return self._mapped(linear, size, constant)

    def congruence(self, v: npt.ArrayLike) -> "AffineMatrix":
        """
        Returns V M V^dagger for a constant (p x n) matrix V.
        """
        v = np.asarray(v, dtype=np.complex128)
        if v.ndim != 2 or v.shape[1] != self.dim:
            raise DimensionMismatchError(f"cannot conjugate dimension {self.dim} by shape "
                                         f"{v.shape}", "v")
        sparse_v = sp.csr_matrix(v)
        linear = sp.kron(sparse_v, sparse_v.conj(), format="csr")
        return self._mapped(linear, v.shape[0], v @ self.constant @ v.conj().T)

    def tensor_identity(self, before: int = 1, after: int = 1) -> "AffineMatrix":
        """
        Returns I_before (x) M (x) I_after.
        """
        linear = _embedding_map(self.dim, int(before), int(after))
        size = before * self.dim * after
        constant = np.kron(np.kron(np.eye(before), self.constant), np.eye(after))
        return self._mapped(linear, size, constant)

    def inner(self, k: npt.ArrayLike) -> AffineScalar:
        """
        Returns Re Tr(M K) for a constant matrix K.
        """
        k = np.asarray(k, dtype=np.complex128)
        if k.shape != (self.dim, self.dim):
            raise DimensionMismatchError(f"cannot pair dimension {self.dim} with {k.shape}", "k")
        weights = k.T.reshape(-1)
        terms = {key: np.asarray(v.T @ weights).reshape(-1).real
                 for key, v in self.terms.items()}
        return AffineScalar(terms, float(np.real(np.sum(self.constant * k.T))))

    def trace(self) -> AffineScalar:
        """
        Returns Re Tr M.
        """
        return self.inner(np.eye(self.dim))


@dataclass(frozen=True)
class _Variable:
    name: str
    offset: int
    width: int
    dim: int
    real: bool


@dataclass(frozen=True, eq=False)
class SdpResult:
    """
    A certified answer of a HermitianSdp.

    Attributes:
        value (float): Optimal value of the modelling objective.
        problem (SdpProblem): The compiled canonical problem.
        solution (SdpSolution): The solver output.
        report (VerifyReport): The certificate the answer was accepted with.
    """
    value: float
    problem: SdpProblem
    solution: SdpSolution
    report: VerifyReport
    coordinates: Dict[int, np.ndarray]
    handles: Dict[str, Tuple[object, bool]]

    def value_of(self, expr: Union[AffineMatrix, AffineScalar]) -> Union[np.ndarray, float]:
        """
        Evaluates an expression at the optimal modelling variables.
        """
        y = self.coordinates
        if isinstance(expr, AffineScalar):
            return expr.constant + float(sum(v @ y[k] for k, v in expr.terms.items()))
        out = expr.constant.reshape(-1).copy()
        for k, v in expr.terms.items():
            out = out + v @ y[k]
        return out.reshape(expr.dim, expr.dim)

    def multiplier(self, name: str) -> Union[np.ndarray, float]:
        """
        Returns the primal multiplier of a named constraint.

        For an LMI this is the Hermitian matrix W >= 0 paired with it (read
        back through ``compress_hermitian`` for complex blocks); for a
        nonnegativity constraint it is a scalar.
        """
        if name not in self.handles:
            raise KeyError(name)
        index, embedded = self.handles[name]
        if isinstance(index, tuple):
            return float(self.solution.x[index[0]][index[1]])
        block = self.solution.x[index]
        return compress_hermitian(block) if embedded else block.astype(np.complex128)

    @property
    def certificate(self) -> dict:
        return self.report.to_dict()


class HermitianSdp:
    """
    A semidefinite program over Hermitian and real variables.

    Attributes:
        name (str): Label used in logs and certificates.
    """

    def __init__(self, name: str = "sdp"):
        self.name = name
        self._variables: List[_Variable] = []
        self._lmis: List[Tuple[str, AffineMatrix]] = []
        self._nonneg: List[Tuple[str, AffineScalar]] = []
        self._objective: Optional[AffineScalar] = None
        self._maximize = True

    @property
    def num_coordinates(self) -> int:
        return sum(v.width for v in self._variables)

    def _add_variable(self, name: str, width: int, dim: int, real: bool) -> int:
        self._variables.append(_Variable(name, self.num_coordinates, width, dim, real))
        return len(self._variables) - 1

    def hermitian(self, dim: int, name: Optional[str] = None, real: bool = False) -> AffineMatrix:
        """
        Declares a dim x dim Hermitian variable (real symmetric if ``real``).

        Returns:
            AffineMatrix: The variable as an expression.
        """
        if int(dim) != dim or dim < 1:
            raise ValidationError(f"dimension must be a positive integer, got {dim}", "dim")
        dim = int(dim)
        rows: List[np.ndarray] = []
        cols: List[np.ndarray] = []
        vals: List[np.ndarray] = []
        diag = np.arange(dim)
        rows.append(diag * dim + diag)
        cols.append(diag)
        vals.append(np.ones(dim, dtype=np.complex128))
        p, q = np.triu_indices(dim, 1)
        pairs = p.size
        scale = 1.0 / math.sqrt(2.0)
        sym = dim + np.arange(pairs)
        rows += [p * dim + q, q * dim + p]
        cols += [sym, sym]
        vals += [np.full(pairs, scale, dtype=np.complex128)] * 2
        width = dim + pairs
        if not real:
            anti = dim + pairs + np.arange(pairs)
            rows += [p * dim + q, q * dim + p]
            cols += [anti, anti]
            vals += [np.full(pairs, 1j * scale), np.full(pairs, -1j * scale)]
            width += pairs
        basis = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                              shape=(dim * dim, width))
        index = self._add_variable(name or f"H{len(self._variables)}", width, dim, real)
        return AffineMatrix(dim, {index: basis})

    def real(self, name: Optional[str] = None) -> AffineScalar:
        """
        Declares a real scalar variable.
        """
        index = self._add_variable(name or f"r{len(self._variables)}", 1, 1, True)
        return AffineScalar({index: np.ones(1)})

    def psd(self, expr: AffineMatrix, name: Optional[str] = None) -> str:
        """
        Adds the constraint expr >= 0 (expr must be Hermitian).

        Returns:
            str: The constraint name, for ``SdpResult.multiplier``.
        """
        if not isinstance(expr, AffineMatrix):
            raise ValidationError("psd() expects a matrix expression", "expr")
        name = name or f"lmi{len(self._lmis)}"
        self._lmis.append((name, expr))
        return name

    def nonneg(self, expr: AffineScalar, name: Optional[str] = None) -> str:
        """
        Adds the constraint expr >= 0.
        """
        if not isinstance(expr, AffineScalar):
            raise ValidationError("nonneg() expects a scalar expression", "expr")
        name = name or f"nonneg{len(self._nonneg)}"
        self._nonneg.append((name, expr))
        return name

    def maximize(self, expr: AffineScalar) -> None:
        self._objective, self._maximize = expr, True

    def minimize(self, expr: AffineScalar) -> None:
        self._objective, self._maximize = expr, False

    def _stack(self, terms: Dict[int, sp.spmatrix], rows: int) -> sp.csr_matrix:
        parts = []
        for index, variable in enumerate(self._variables):
            if index in terms:
                parts.append(sp.csr_matrix(terms[index]))
            else:
                parts.append(sp.csr_matrix((rows, variable.width)))
        return sp.hstack(parts, format="csr")

    def compile(self) -> Tuple[SdpProblem, Dict[str, Tuple[int, bool]]]:
        """
        Translates the program into a canonical SdpProblem.

        Returns:
            tuple: (problem, {constraint name: (block index, embedded)}).

        Raises:
            ValidationError: If the program has no variables, no constraints,
                no objective or an unconstrained coordinate.
        """
        if not self._variables:
            raise ValidationError("program has no variables", "variables")
        if self._objective is None:
            raise ValidationError("program has no objective", "objective")
        if not self._lmis and not self._nonneg:
            raise ValidationError("program has no constraints", "constraints")
        width = self.num_coordinates
        blocks: List[Block] = []
        objective: List[np.ndarray] = []
        constraints: List[sp.csr_matrix] = []
        handles: Dict[str, Tuple[int, bool]] = {}
        touched = np.zeros(width, dtype=bool)

        for name, expr in self._lmis:
            coefficients = self._stack(expr.terms, expr.dim * expr.dim)
            touched[np.unique(sp.coo_matrix(coefficients).col)] = True
            constant = expr.constant
            imag = (np.max(np.abs(coefficients.data.imag), initial=0.0),
                    np.max(np.abs(constant.imag), initial=0.0))
            if max(imag) <= REAL_BLOCK_TOL:
                blocks.append(Block(expr.dim, "psd"))
                objective.append(constant.real)
                constraints.append(sp.csr_matrix(-coefficients.real.T))
                handles[name] = (len(blocks) - 1, False)
            else:
                blocks.append(Block(2 * expr.dim, "psd"))
                objective.append(embed_hermitian(constant) / 2)
                constraints.append(sp.csr_matrix(-embed_columns(coefficients, expr.dim).T / 2))
                handles[name] = (len(blocks) - 1, True)

        if self._nonneg:
            columns = []
            constants = []
            for position, (name, expr) in enumerate(self._nonneg):
                row = np.zeros(width)
                for index, vector in expr.terms.items():
                    start = self._variables[index].offset
                    row[start:start + vector.size] += vector
                columns.append(row)
                constants.append(expr.constant)
                handles[name] = ((len(blocks), position), False)
            matrix = np.array(columns).T
            touched |= np.any(matrix != 0, axis=1)
            blocks.append(Block(len(self._nonneg), "nonneg"))
            objective.append(np.array(constants))
            constraints.append(sp.csr_matrix(-matrix))

        if not np.all(touched):
            missing = sorted({v.name for v in self._variables
                              if not np.all(touched[v.offset:v.offset + v.width])})
            raise ValidationError(f"unconstrained variable coordinates in {missing}", "variables")

        rhs = np.zeros(width)
        for index, vector in self._objective.terms.items():
            start = self._variables[index].offset
            rhs[start:start + vector.size] += vector
        sign = 1.0 if self._maximize else -1.0
        problem = SdpProblem(tuple(blocks), tuple(objective), tuple(constraints), sign * rhs,
                             "min", sign * self._objective.constant, self.name)
        return problem, handles

    def _coordinates(self, y: np.ndarray) -> Dict[int, np.ndarray]:
        return {index: y[v.offset:v.offset + v.width] for index, v in enumerate(self._variables)}

    def solve(self, tol: Optional[float] = None, max_iter: Optional[int] = None) -> SdpResult:
        """
        Compiles, solves and verifies the program.

        A solve that stops short of "optimal" is still accepted when its
        recomputed residuals pass at ``settings.SDP_ACCEPT_TOL``; the returned
        certificate then records that looser tolerance.

        Returns:
            SdpResult: The certified answer.

        Raises:
            SolverError: If no certificate can be produced.
        """
        problem, handles = self.compile()
        tol = default_tolerance() if tol is None else float(tol)
        solution = solve_problem(problem, tol, max_iter)
        report = verify(problem, solution, tol)
        if not report.passed and solution.status in ("optimal", "max-iter"):
            loose = max(tol, settings.SDP_ACCEPT_TOL)
            relaxed = verify(problem, solution, loose)
            if relaxed.passed:
                logger.warning("%s: %s; accepted at tolerance %.1e", self.name,
                               solution.message, loose)
                report = relaxed
        if not report.passed:
            logger.error("%s: solver status %s (%s), %s", self.name, solution.status,
                         solution.message, summarise(report))
            raise SolverError(f"{self.name}: solver status {solution.status} "
                              f"({solution.message}); {summarise(report)}", solution, report)
        sign = 1.0 if self._maximize else -1.0
        return SdpResult(sign * solution.dual_value, problem, solution, report,
                         self._coordinates(solution.y), handles)
