"""
Module 'sdp.verify'

Independent certificate for an SDP answer.

``verify`` recomputes everything from the stored points (X, y) and the
problem data. It never trusts the solver's own residuals, slack or values.

Checks, in report order:

- **primal_residual**: max_i |<A_i,X> - b_i| / max(1, |b_i|) <= tol.
- **primal_cone**: smallest eigenvalue (or entry) of every X block >= -tol.
- **dual_cone**: smallest eigenvalue of the recomputed slack
  S = C - A*y (min) or A*y - C (max) >= -tol * max(1, ||C||_F).
- **gap**: |p - d| / (1 + |p| + |d|) <= tol for the recomputed values.
- **weak_duality**: p >= d (min) or p <= d (max), up to the same slack.
- **reported_values**: the values stored in the solution match the
  recomputed ones.
"""
from typing import List, Optional

import numpy as np

from tempered.exceptions import ValidationError
from .models import CheckResult, SdpProblem, SdpSolution, VerifyReport, block_shape


def _min_eigenvalue(blocks, problem: SdpProblem) -> float:
    lowest = np.inf
    for block, value in zip(problem.blocks, blocks):
        value = np.asarray(value, dtype=np.float64)
        if block.kind == "psd":
            lowest = min(lowest, float(np.linalg.eigvalsh((value + value.T) / 2)[0]))
        else:
            lowest = min(lowest, float(np.min(value)))
    return lowest


def verify(problem: SdpProblem, solution: SdpSolution,
           tol: Optional[float] = None) -> VerifyReport:
    """
    Recomputes residuals, cone membership and gap of a solution.

    Args:
        problem (SdpProblem): The problem that was solved.
        solution (SdpSolution): The claimed answer.
        tol (float, optional): Check tolerance. Defaults to the tolerance the
            solution was computed with.

    Returns:
        VerifyReport: One CheckResult per check; ``passed`` is their
        conjunction.

    Raises:
        ValidationError: If the stored points do not fit the problem.
    """
    tol = solution.tolerance if tol is None else float(tol)
    if len(solution.x) != len(problem.blocks):
        raise ValidationError("solution has the wrong number of blocks", "x")
    for k, (block, xk) in enumerate(zip(problem.blocks, solution.x)):
        if np.shape(xk) != block_shape(block):
            raise ValidationError(f"primal block {k} has shape {np.shape(xk)}", "x")
    y = np.asarray(solution.y, dtype=np.float64)
    if y.shape != (problem.num_constraints,):
        raise ValidationError(f"dual point has shape {y.shape}", "y")

    checks: List[CheckResult] = []
    residual = problem.rhs - problem.apply(solution.x)
    worst = float(np.max(np.abs(residual) / np.maximum(1.0, np.abs(problem.rhs)))) \
        if problem.num_constraints else 0.0
    checks.append(CheckResult("primal_residual", worst, tol, worst <= tol))

    lowest_x = _min_eigenvalue(solution.x, problem)
    checks.append(CheckResult("primal_cone", lowest_x, -tol, lowest_x >= -tol))

    slack_bound = -tol * max(1.0, problem.objective_norm())
    lowest_s = _min_eigenvalue(problem.dual_slack(y), problem)
    checks.append(CheckResult("dual_cone", lowest_s, slack_bound, lowest_s >= slack_bound))

    primal = problem.objective_value(solution.x)
    dual = float(problem.rhs @ y) + problem.offset
    scale = 1.0 + abs(primal) + abs(dual)
    gap = abs(primal - dual) / scale
    checks.append(CheckResult("gap", gap, tol, gap <= tol))

    excess = (dual - primal if problem.sense == "min" else primal - dual) / scale
    checks.append(CheckResult("weak_duality", excess, tol, excess <= tol))

    drift = max(abs(primal - solution.primal_value), abs(dual - solution.dual_value)) / scale
    checks.append(CheckResult("reported_values", drift, tol, drift <= tol))

    return VerifyReport(tuple(checks), primal, dual, tol, problem.name, solution.status,
                        solution.iterations)
