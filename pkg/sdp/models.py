"""
Module 'sdp.models'

Immutable containers for canonical semidefinite programs and their answers.

Canonical form (primal):

    optimise  <C, X> + offset
    s.t.      <A_i, X> = b_i,  i = 1..m
              X = diag(X_1, ..., X_K),  X_k in cone_k

where cone_k is either the real symmetric PSD cone of a given size ("psd")
or the nonnegative orthant ("nonneg"). For ``sense="min"`` the dual is

    max  b^T y + offset   s.t.  S = C - sum_i y_i A_i  in the cone

and for ``sense="max"`` it is ``min b^T y + offset`` with
``S = sum_i y_i A_i - C`` in the cone.

Constraint data is stored per block as a ``scipy.sparse`` CSR matrix with one
row per constraint: for a psd block of size n the row is the row-major
vectorisation of the (symmetric) n x n slice of A_i; for a nonneg block it is
the length-n vector.

Key Classes:

- **Block**: size and cone kind of one diagonal block.
- **SdpProblem**: the canonical program.
- **SdpSolution**: solver output with primal point X, dual point (y, S),
  values, residuals and status.
- **CheckResult**, **VerifyReport**: the per-check certificate produced by
  ``sdp.verify.verify``.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

from tempered.exceptions import ValidationError

BlockKind = Literal["psd", "nonneg"]
Sense = Literal["min", "max"]
Status = Literal["optimal", "infeasible", "unbounded", "max-iter"]

BLOCK_KINDS = ("psd", "nonneg")
SENSES = ("min", "max")
STATUSES = ("optimal", "infeasible", "unbounded", "max-iter")


@dataclass(frozen=True)
class Block:
    """
    One diagonal block of the cone.

    Attributes:
        size (int): Matrix order (psd) or vector length (nonneg).
        kind (str): "psd" or "nonneg".
    """
    size: int
    kind: BlockKind = "psd"

    def __post_init__(self) -> None:
        if self.kind not in BLOCK_KINDS:
            raise ValidationError(f"unknown cone kind {self.kind!r}", "blocks")
        if int(self.size) != self.size or self.size < 1:
            raise ValidationError(f"block size must be a positive integer, got {self.size}",
                                  "blocks")

    @property
    def width(self) -> int:
        """
        Number of scalar entries of the block (n^2 for psd, n for nonneg).
        """
        return self.size * self.size if self.kind == "psd" else self.size

    @property
    def order(self) -> int:
        """
        Contribution of the block to the barrier parameter.
        """
        return self.size


def block_shape(block: Block) -> Tuple[int, ...]:
    return (block.size, block.size) if block.kind == "psd" else (block.size,)


@dataclass(frozen=True, eq=False)
class SdpProblem:
    """
    A canonical block-diagonal SDP.

    Attributes:
        blocks (tuple[Block, ...]): The cone structure.
        objective (tuple[np.ndarray, ...]): C, one array per block (n x n
            symmetric for psd, length n for nonneg).
        constraints (tuple[sp.csr_matrix, ...]): A, one (m x width) matrix per
            block.
        rhs (np.ndarray): b, length m.
        sense (str): "min" or "max".
        offset (float): Constant added to both objective values.
        name (str): Label used in logs and dumps.
    """
    blocks: Tuple[Block, ...]
    objective: Tuple[np.ndarray, ...]
    constraints: Tuple[sp.csr_matrix, ...]
    rhs: np.ndarray
    sense: Sense = "min"
    offset: float = 0.0
    name: str = "sdp"

    def __post_init__(self) -> None:
        blocks = tuple(self.blocks)
        if not blocks:
            raise ValidationError("a problem needs at least one block", "blocks")
        if self.sense not in SENSES:
            raise ValidationError(f"sense must be 'min' or 'max', got {self.sense!r}", "sense")
        if len(self.objective) != len(blocks) or len(self.constraints) != len(blocks):
            raise ValidationError("objective and constraints must have one entry per block",
                                  "blocks")
        rhs = np.asarray(self.rhs, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(rhs)):
            raise ValidationError("right-hand side contains NaN or Inf", "b")
        m = rhs.shape[0]

        objective: List[np.ndarray] = []
        constraints: List[sp.csr_matrix] = []
        for k, (block, c, a) in enumerate(zip(blocks, self.objective, self.constraints)):
            c = np.asarray(c, dtype=np.float64)
            if c.shape != block_shape(block):
                raise ValidationError(f"objective block {k} has shape {c.shape}, expected "
                                      f"{block_shape(block)}", "C")
            if not np.all(np.isfinite(c)):
                raise ValidationError(f"objective block {k} contains NaN or Inf", "C")
            if block.kind == "psd" and np.max(np.abs(c - c.T), initial=0.0) > 1e-12 * max(
                    1.0, float(np.max(np.abs(c), initial=0.0))):
                raise ValidationError(f"objective block {k} is not symmetric", "C")
            if block.kind == "psd":
                c = (c + c.T) / 2
            a = sp.csr_matrix(a, dtype=np.float64)
            if a.shape != (m, block.width):
                raise ValidationError(f"constraint block {k} has shape {a.shape}, expected "
                                      f"{(m, block.width)}", "A")
            if a.nnz and not np.all(np.isfinite(a.data)):
                raise ValidationError(f"constraint block {k} contains NaN or Inf", "A")
            if block.kind == "psd" and a.nnz:
                n = block.size
                transposed = a[:, np.arange(n * n).reshape(n, n).T.reshape(-1)]
                if abs(a - transposed).max() > 1e-12 * max(1.0, abs(a).max()):
                    raise ValidationError(f"constraint block {k} is not symmetric", "A")
            c.setflags(write=False)
            objective.append(c)
            constraints.append(a)
        rhs.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "objective", tuple(objective))
        object.__setattr__(self, "constraints", tuple(constraints))
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_dense(cls, blocks: Sequence[Tuple[int, str]], objective: Sequence[npt.ArrayLike],
                   constraints: Sequence[Tuple[Sequence[npt.ArrayLike], float]] = (),
                   sense: Sense = "min", offset: float = 0.0,
                   name: str = "sdp") -> "SdpProblem":
        """
        Builds a problem from dense per-constraint block lists.

        Args:
            blocks: (size, kind) pairs.
            objective: C, one array per block.
            constraints: (A_i blocks, b_i) pairs.
            sense (str): "min" or "max".
            offset (float): Objective constant.
            name (str): Problem label.

        Returns:
            SdpProblem: The problem.
        """
        parsed = tuple(Block(int(size), kind) for size, kind in blocks)
        rows: List[List[np.ndarray]] = [[] for _ in parsed]
        rhs: List[float] = []
        for a_blocks, b in constraints:
            if len(a_blocks) != len(parsed):
                raise ValidationError("constraint must have one entry per block", "A")
            for k, (block, a) in enumerate(zip(parsed, a_blocks)):
                a = np.asarray(a, dtype=np.float64)
                if a.shape != block_shape(block):
                    raise ValidationError(f"constraint block {k} has shape {a.shape}", "A")
                rows[k].append(a.reshape(-1))
            rhs.append(float(b))
        matrices = tuple(
            sp.csr_matrix(np.array(r).reshape(len(rhs), block.width)) if r
            else sp.csr_matrix((0, block.width))
            for r, block in zip(rows, parsed))
        return cls(parsed, tuple(objective), matrices, np.array(rhs), sense, offset, name)

    @property
    def num_constraints(self) -> int:
        return int(self.rhs.shape[0])

    @property
    def barrier_order(self) -> int:
        """
        Sum of block orders, the denominator of the duality measure.
        """
        return sum(block.order for block in self.blocks)

    def apply(self, x: Sequence[np.ndarray]) -> np.ndarray:
        """
        Returns (<A_i, X>)_i.
        """
        result = np.zeros(self.num_constraints)
        for a, xk in zip(self.constraints, x):
            result += a @ np.asarray(xk).reshape(-1)
        return result

    def adjoint(self, y: np.ndarray) -> Tuple[np.ndarray, ...]:
        """
        Returns sum_i y_i A_i, block by block.
        """
        y = np.asarray(y, dtype=np.float64)
        return tuple((a.T @ y).reshape(block_shape(block))
                     for a, block in zip(self.constraints, self.blocks))

    def objective_value(self, x: Sequence[np.ndarray]) -> float:
        """
        Returns <C, X> + offset.
        """
        return float(sum(np.sum(c * xk) for c, xk in zip(self.objective, x))) + self.offset

    def dual_slack(self, y: np.ndarray) -> Tuple[np.ndarray, ...]:
        """
        Returns the dual slack S (C - A*y for min, A*y - C for max).
        """
        sign = 1.0 if self.sense == "min" else -1.0
        return tuple(sign * (c - ay) for c, ay in zip(self.objective, self.adjoint(y)))

    def objective_norm(self) -> float:
        """
        Frobenius norm of C over all blocks.
        """
        return float(np.sqrt(sum(np.sum(c * c) for c in self.objective)))

    def __str__(self) -> str:
        sizes = ",".join(f"{b.size}{'' if b.kind == 'psd' else 'n'}" for b in self.blocks)
        return f"SdpProblem({self.name}: {self.sense}, blocks [{sizes}], m={self.num_constraints})"


@dataclass(frozen=True, eq=False)
class SdpSolution:
    """
    The answer of ``sdp.solver.solve``.

    ``gap`` is the relative duality gap |p - d| / (1 + |p| + |d|).
    ``primal_residual`` is max_i |<A_i,X> - b_i| / max(1, |b_i|) and
    ``dual_residual`` is ||C - S - A*y||_F / max(1, ||C||_F) (signs as in the
    problem's sense).

    Attributes:
        status (str): "optimal", "infeasible", "unbounded" or "max-iter".
        primal_value (float): <C, X> + offset.
        dual_value (float): b^T y + offset.
        gap (float): Relative duality gap.
        x (tuple[np.ndarray, ...]): Primal point.
        y (np.ndarray): Dual multipliers.
        s (tuple[np.ndarray, ...]): Dual slack.
        iterations (int): Interior-point iterations performed.
        primal_residual (float): Relative primal infeasibility.
        dual_residual (float): Relative dual infeasibility.
        tolerance (float): The tolerance the solve was asked for.
        message (str): Human-readable termination reason.
    """
    status: Status
    primal_value: float
    dual_value: float
    gap: float
    x: Tuple[np.ndarray, ...]
    y: np.ndarray
    s: Tuple[np.ndarray, ...]
    iterations: int
    primal_residual: float
    dual_residual: float
    tolerance: float
    message: str = ""

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"

    def with_y(self, y: np.ndarray) -> "SdpSolution":
        """
        Returns a copy with a different dual point (used to build corrupted
        certificates in tests).
        """
        return SdpSolution(self.status, self.primal_value, self.dual_value, self.gap, self.x,
                           np.asarray(y, dtype=np.float64), self.s, self.iterations,
                           self.primal_residual, self.dual_residual, self.tolerance,
                           self.message)

    def with_x(self, x: Sequence[np.ndarray]) -> "SdpSolution":
        """
        Returns a copy with a different primal point.
        """
        return SdpSolution(self.status, self.primal_value, self.dual_value, self.gap,
                           tuple(np.asarray(xk, dtype=np.float64) for xk in x), self.y, self.s,
                           self.iterations, self.primal_residual, self.dual_residual,
                           self.tolerance, self.message)


@dataclass(frozen=True)
class CheckResult:
    """
    One line of a verify report.

    Attributes:
        name (str): Check identifier.
        value (float): The measured quantity.
        bound (float): The threshold it was compared against.
        passed (bool): Whether the check holds.
    """
    name: str
    value: float
    bound: float
    passed: bool


@dataclass(frozen=True)
class VerifyReport:
    """
    Independent certificate of an SdpSolution.

    Attributes:
        checks (tuple[CheckResult, ...]): Individual checks, in a fixed order.
        primal_value (float): Recomputed primal objective.
        dual_value (float): Recomputed dual objective.
        tolerance (float): Tolerance the checks were run at.
        problem (str): Name of the verified problem.
    """
    checks: Tuple[CheckResult, ...]
    primal_value: float
    dual_value: float
    tolerance: float
    problem: str = "sdp"
    status: str = "optimal"
    iterations: int = 0
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> CheckResult:
        """
        Returns the check with the given name.

        Raises:
            KeyError: If no such check exists.
        """
        for item in self.checks:
            if item.name == name:
                return item
        raise KeyError(name)

    @property
    def failures(self) -> Tuple[str, ...]:
        return tuple(check.name for check in self.checks if not check.passed)

    def to_dict(self) -> Dict[str, object]:
        """
        Returns the certificate as a JSON-ready dict.
        """
        return {
            "problem": self.problem,
            "status": self.status,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "iterations": self.iterations,
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "gap": self.check("gap").value,
            "residuals": {
                "primal": self.check("primal_residual").value,
                "dual": -min(0.0, self.check("dual_cone").value),
            },
            "checks": {c.name: {"value": c.value, "bound": c.bound, "passed": c.passed}
                       for c in self.checks},
            "notes": list(self.notes),
        }


def summarise(report: Optional[VerifyReport]) -> str:
    """
    One-line description of a report for log and error messages.
    """
    if report is None:
        return "no certificate"
    if report.passed:
        return f"certified at tol {report.tolerance:.1e}"
    return "failed checks: " + ", ".join(report.failures)
