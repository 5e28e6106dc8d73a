"""
Module 'states.models'

Domain types of the states app.

Key Classes:

- **DensityOperator**: a validated bipartite state.
- **TemperedWitness**: the optimal operator X of a tempered program together
  with the anchor value Tr X omega and, for the robustness variant, the PPT*
  decomposition that certifies X in [-1, 1]_{PPT*}.
- **MonotoneResult**: a value with its certificates and witness, as emitted
  by the command line.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
import numpy.typing as npt

from linalg.models import BipartiteOperator, ComplexMatrix
from linalg.operations import min_eigenvalue, op_norm, partial_trace, partial_transpose
from sdp.models import VerifyReport
from tempered import settings
from .validators import validate_density, validate_same_dims

Variant = Literal["negativity", "robustness"]


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """
    A bipartite density operator.

    Attributes:
        op (BipartiteOperator): The state, PSD within 1e-10 and of trace 1
            within 1e-10.
    """
    op: BipartiteOperator

    def __post_init__(self) -> None:
        object.__setattr__(self, "op", validate_density(self.op))

    @classmethod
    def from_matrix(cls, matrix: npt.ArrayLike, dim_a: int, dim_b: int) -> "DensityOperator":
        return cls(BipartiteOperator(dim_a, dim_b, matrix))

    @property
    def matrix(self) -> ComplexMatrix:
        return self.op.matrix

    @property
    def dims(self) -> Tuple[int, int]:
        return self.op.dims

    @property
    def dim(self) -> int:
        return self.op.dim

    @property
    def is_real(self) -> bool:
        """
        True if every entry is real.
        """
        return not np.any(self.matrix.imag)

    def marginal(self, keep: str = "A") -> ComplexMatrix:
        """
        Returns the reduced state on the kept subsystem.
        """
        return partial_trace(self.op, keep)

    def partial_transpose(self) -> BipartiteOperator:
        return partial_transpose(self.op)

    def is_ppt(self, tol: float = settings.STATE_TOL) -> bool:
        """
        Returns True if the partial transpose is PSD within tol.
        """
        return min_eigenvalue(self.partial_transpose()) >= -tol

    def __str__(self) -> str:
        return f"DensityOperator({self.dims[0]}x{self.dims[1]})"


@dataclass(frozen=True, eq=False)
class TemperedWitness:
    """
    Optimal operator of a tempered negativity or robustness program.

    Attributes:
        x (BipartiteOperator): The Hermitian operator X.
        anchor_value (float): Tr X omega.
        variant (str): "negativity" or "robustness".
        certificate (VerifyReport, optional): The report of the solve that
            produced X.
        decomposition (tuple, optional): (Q1, Q2) with 1 - X - Q1^Gamma >= 0
            and 1 + X - Q2^Gamma >= 0; robustness variant only.
    """
    x: BipartiteOperator
    anchor_value: float
    variant: Variant = "negativity"
    certificate: Optional[VerifyReport] = None
    decomposition: Optional[Tuple[ComplexMatrix, ComplexMatrix]] = None

    def check(self, rho: DensityOperator) -> float:
        """
        Returns Tr X rho, the value the witness certifies for rho.
        """
        validate_same_dims(self.x, rho.op, "rho")
        return float(np.real(np.sum(self.x.matrix * rho.matrix.T)))

    def violations(self, tol: float = settings.WITNESS_TOL) -> List[str]:
        """
        Lists the witness invariants that fail at the given tolerance.

        Returns:
            list[str]: Human-readable descriptions; empty when X is a valid
            witness.
        """
        problems: List[str] = []
        norm = op_norm(self.x)
        if norm > self.anchor_value + tol:
            problems.append(f"||X|| = {norm:.12g} exceeds the anchor value "
                            f"{self.anchor_value:.12g}")
        if self.variant == "negativity":
            pt_norm = op_norm(partial_transpose(self.x))
            if pt_norm > 1.0 + tol:
                problems.append(f"||X^Gamma|| = {pt_norm:.12g} exceeds 1")
            return problems
        if self.decomposition is None:
            problems.append("robustness witness carries no PPT* decomposition")
            return problems
        identity = np.eye(self.x.dim)
        for sign, q, label in ((-1.0, self.decomposition[0], "1 - X"),
                               (1.0, self.decomposition[1], "1 + X")):
            q_op = self.x.with_matrix(q)
            p = identity + sign * self.x.matrix - partial_transpose(q_op).matrix
            if min_eigenvalue(q) < -tol or min_eigenvalue(p) < -tol:
                problems.append(f"{label} is not in the dual PPT cone")
        return problems

    @property
    def is_valid(self) -> bool:
        return not self.violations()


@dataclass(frozen=True)
class MonotoneResult:
    """
    A monotone value as reported to the user.

    Attributes:
        measure (str): Short measure name ("neg", "tneg", ...).
        value (float): The value.
        reports (tuple[VerifyReport, ...]): One report per SDP solved; empty
            for closed-form measures.
        witness (BipartiteOperator, optional): X for the negativity-type
            measures, the optimal delta for the standard robustness.
        notes (tuple[str, ...]): Extra remarks carried into the output.
    """
    measure: str
    value: float
    reports: Tuple[VerifyReport, ...] = ()
    witness: Optional[BipartiteOperator] = None
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    @property
    def certificate(self) -> Dict[str, object]:
        """
        Aggregated certificate: worst gap and residuals over all solves.
        """
        solves = [report.to_dict() for report in self.reports]
        return {
            "passed": self.passed,
            "gap": max((s["gap"] for s in solves), default=0.0),
            "residuals": {
                "primal": max((s["residuals"]["primal"] for s in solves), default=0.0),
                "dual": max((s["residuals"]["dual"] for s in solves), default=0.0),
            },
            "solves": solves,
            "notes": list(self.notes),
        }
