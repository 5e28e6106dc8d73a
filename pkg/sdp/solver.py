"""
Module 'sdp.solver'

Primal-dual interior-point solver for ``SdpProblem``.

The method is the infeasible-start HKM direction with Mehrotra's
predictor-corrector:

- the Schur complement M_ij = <A_i, X A_j S^-1> is assembled densely, a batch
  of constraints at a time, and factored once per iteration by Cholesky;
- the predictor (sigma = 0) fixes the centring parameter
  sigma = (mu_aff / mu)^3, the corrector adds the second-order term;
- step lengths come from the eigenvalues of L^-1 dX L^-T (psd blocks) or the
  ratio test (nonneg blocks), damped by 0.95 and capped at 1.

Termination ("optimal") requires relative primal infeasibility, relative dual
infeasibility and relative gap all below ``tol``, measured exactly the way
``sdp.verify.verify`` measures them. Divergence of the iterates past
``settings.SDP_DIVERGENCE_BOUND`` is reported as infeasible or unbounded; a
Cholesky breakdown or a stalled step is reported as "max-iter" with the
residuals of the last iterate.

Functions:
    default_tolerance: settings.SDP_TOL (TB_SDP_TOL).
    solve: solves a problem with a fresh solver instance.
"""
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from logger_config import get_logger
from tempered import settings
from tempered.exceptions import ValidationError
from .models import SdpProblem, SdpSolution

logger = get_logger(__name__)

STEP_FACTOR = 0.95
MIN_STEP = 1e-10


def default_tolerance() -> float:
    """
    Returns ``settings.SDP_TOL``, the solver tolerance read from TB_SDP_TOL.

    Raises:
        ValidationError: If the configured value is not a positive number.
    """
    tol = settings.SDP_TOL
    if not tol > 0 or not math.isfinite(tol):
        raise ValidationError(f"must be positive, got {tol!r}", "TB_SDP_TOL")
    return tol


def relative_gap(primal: float, dual: float) -> float:
    return abs(primal - dual) / (1.0 + abs(primal) + abs(dual))


class _Breakdown(Exception):
    """
    Internal signal: a factorisation failed beyond repair.
    """


class InteriorPointSolver:
    """
    Single-use HKM predictor-corrector solver.

    The instance owns its iterates; call ``run`` once.

    Attributes:
        problem (SdpProblem): The problem being solved.
        tol (float): Target tolerance.
        max_iter (int): Iteration cap.
    """

    def __init__(self, problem: SdpProblem, tol: float, max_iter: int):
        if not tol > 0:
            raise ValidationError(f"tolerance must be positive, got {tol}", "tol")
        if max_iter < 1:
            raise ValidationError(f"max_iter must be at least 1, got {max_iter}", "max_iter")
        self.problem = problem
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self.sign = 1.0 if problem.sense == "min" else -1.0
        self.blocks = problem.blocks
        self.c = tuple(self.sign * c for c in problem.objective)
        self.a = problem.constraints
        self.b = np.asarray(problem.rhs, dtype=np.float64)
        self.m = problem.num_constraints
        self.c_scale = max(1.0, problem.objective_norm())
        self.b_scale = np.maximum(1.0, np.abs(self.b))
        self.batch = max(1, settings.SDP_SCHUR_BATCH)
        self.x: List[np.ndarray] = []
        self.s: List[np.ndarray] = []
        self.y = np.zeros(self.m)
        self.iterations = 0
        self._done = False

    # --- block helpers -------------------------------------------------------

    def _is_psd(self, k: int) -> bool:
        return self.blocks[k].kind == "psd"

    def _inner(self, u: Sequence[np.ndarray], v: Sequence[np.ndarray]) -> float:
        return float(sum(np.sum(uk * vk) for uk, vk in zip(u, v)))

    def _apply(self, blocks: Sequence[np.ndarray]) -> np.ndarray:
        result = np.zeros(self.m)
        for a, xk in zip(self.a, blocks):
            if a.nnz:
                result += a @ xk.reshape(-1)
        return result

    def _adjoint(self, y: np.ndarray) -> List[np.ndarray]:
        out = []
        for k, (a, block) in enumerate(zip(self.a, self.blocks)):
            vec = a.T @ y if a.nnz else np.zeros(block.width)
            out.append(vec.reshape(block.size, block.size) if self._is_psd(k) else vec)
        return out

    def _initial_point(self) -> None:
        for k, (a, block) in enumerate(zip(self.a, self.blocks)):
            n = block.size
            row_norms = np.sqrt(np.asarray(a.multiply(a).sum(axis=1)).reshape(-1))
            if self.m:
                xi = max(10.0, math.sqrt(n),
                         math.sqrt(n) * float(np.max((1.0 + np.abs(self.b)) / (1.0 + row_norms))))
                eta = max(10.0, math.sqrt(n), float(np.linalg.norm(self.c[k])),
                          float(np.max(row_norms)))
            else:
                xi = max(10.0, math.sqrt(n))
                eta = max(10.0, math.sqrt(n), float(np.linalg.norm(self.c[k])))
            if self._is_psd(k):
                self.x.append(xi * np.eye(n))
                self.s.append(eta * np.eye(n))
            else:
                self.x.append(np.full(n, xi))
                self.s.append(np.full(n, eta))

    # --- residuals -----------------------------------------------------------

    def primal_residual(self) -> np.ndarray:
        return self.b - self._apply(self.x)

    def dual_residual(self) -> List[np.ndarray]:
        ay = self._adjoint(self.y)
        return [c - s - aty for c, s, aty in zip(self.c, self.s, ay)]

    def duality_measure(self) -> float:
        return self._inner(self.x, self.s) / self.problem.barrier_order

    # --- Newton system -------------------------------------------------------

    def _inverse_slack(self) -> List[np.ndarray]:
        inverses = []
        for k, s in enumerate(self.s):
            if self._is_psd(k):
                try:
                    factor = sla.cho_factor(s, lower=True, check_finite=False)
                except sla.LinAlgError as exc:
                    raise _Breakdown("dual slack lost definiteness") from exc
                inv = sla.cho_solve(factor, np.eye(s.shape[0]), check_finite=False)
                inverses.append((inv + inv.T) / 2)
            else:
                inverses.append(1.0 / s)
        return inverses

    def schur_complement(self, s_inv: Sequence[np.ndarray]) -> np.ndarray:
        """
        Assembles M_ij = <A_i, X A_j S^-1>.

        Columns are built in batches of ``settings.SDP_SCHUR_BATCH``
        constraints, and only for constraints that touch the block.
        """
        m = self.m
        schur = np.zeros((m, m))
        for k, (a, block) in enumerate(zip(self.a, self.blocks)):
            if not a.nnz:
                continue
            if not self._is_psd(k):
                schur += (a @ sp.diags(self.x[k] / self.s[k]) @ a.T).toarray()
                continue
            n = block.size
            x, inv = self.x[k], s_inv[k]
            touching = np.flatnonzero(np.diff(a.indptr))
            for start in range(0, touching.size, self.batch):
                cols = touching[start:start + self.batch]
                width = cols.size
                a_cols = a[cols].reshape((width * n, n))
                t = np.asarray(a_cols @ inv).reshape(width, n, n)
                g = np.matmul(x, t).reshape(width, n * n)
                schur[:, cols] += np.asarray(a @ g.T)
        return (schur + schur.T) / 2

    def _factor(self, schur: np.ndarray):
        if self.m == 0:
            return None
        scale = max(1.0, float(np.max(np.abs(np.diag(schur)))))
        for shift in (0.0, 1e-14, 1e-12, 1e-10):
            try:
                return sla.cho_factor(schur + shift * scale * np.eye(self.m), lower=True,
                                      check_finite=False)
            except sla.LinAlgError:
                logger.debug("%s: Schur complement not positive definite, shift %.0e",
                             self.problem.name, shift)
        raise _Breakdown("Schur complement factorisation failed")

    def direction(self, factor, s_inv: Sequence[np.ndarray], rd: Sequence[np.ndarray],
                  sigma_mu: float,
                  corrector: Optional[Tuple[Sequence[np.ndarray], Sequence[np.ndarray]]] = None
                  ) -> Tuple[List[np.ndarray], np.ndarray, List[np.ndarray]]:
        """
        Solves the HKM Newton system for (dX, dy, dS).

        Args:
            factor: Cholesky factor of the Schur complement (None when m = 0).
            s_inv: Block inverses of S.
            rd: Dual residual C - S - A*y.
            sigma_mu (float): Centring target sigma * mu.
            corrector: (dX, dS) of the predictor, for the second-order term.

        Returns:
            tuple: (dX blocks, dy, dS blocks).
        """
        extra = []
        for k in range(len(self.blocks)):
            x, inv = self.x[k], s_inv[k]
            if self._is_psd(k):
                term = x @ rd[k] @ inv - sigma_mu * inv
                if corrector is not None:
                    term = term + corrector[0][k] @ corrector[1][k] @ inv
            else:
                term = x * rd[k] * inv - sigma_mu * inv
                if corrector is not None:
                    term = term + corrector[0][k] * corrector[1][k] * inv
            extra.append(term)
        rhs = self.b + self._apply(extra)
        dy = sla.cho_solve(factor, rhs, check_finite=False) if factor is not None else rhs[:0]
        ady = self._adjoint(dy)
        ds = [r - aty for r, aty in zip(rd, ady)]
        dx = []
        for k in range(len(self.blocks)):
            x, inv = self.x[k], s_inv[k]
            if self._is_psd(k):
                prod = x @ ds[k]
                if corrector is not None:
                    prod = prod + corrector[0][k] @ corrector[1][k]
                step = sigma_mu * inv - x - prod @ inv
                dx.append((step + step.T) / 2)
            else:
                prod = x * ds[k]
                if corrector is not None:
                    prod = prod + corrector[0][k] * corrector[1][k]
                dx.append(sigma_mu * inv - x - prod * inv)
        return dx, dy, ds

    def max_step(self, point: Sequence[np.ndarray], delta: Sequence[np.ndarray]) -> float:
        """
        Returns the largest alpha with point + alpha * delta in the cone.
        """
        alpha = math.inf
        for k, (p, d) in enumerate(zip(point, delta)):
            if self._is_psd(k):
                try:
                    lower = np.linalg.cholesky(p)
                except np.linalg.LinAlgError as exc:
                    raise _Breakdown("iterate lost definiteness") from exc
                w = sla.solve_triangular(lower, d, lower=True, check_finite=False)
                w = sla.solve_triangular(lower, w.T, lower=True, check_finite=False)
                lowest = float(np.linalg.eigvalsh((w + w.T) / 2)[0])
                if lowest < 0:
                    alpha = min(alpha, -1.0 / lowest)
            else:
                negative = d < 0
                if np.any(negative):
                    alpha = min(alpha, float(np.min(-p[negative] / d[negative])))
        return alpha

    # --- main loop -----------------------------------------------------------

    def _values(self) -> Tuple[float, float]:
        pobj = self._inner(self.c, self.x)
        dobj = float(self.b @ self.y)
        offset = self.problem.offset
        return self.sign * pobj + offset, self.sign * dobj + offset

    def run(self) -> SdpSolution:
        """
        Runs the interior-point iteration.

        Returns:
            SdpSolution: The final iterate with an honest status.
        """
        if self._done:
            raise RuntimeError("an InteriorPointSolver instance can only be run once")
        self._done = True
        self._initial_point()
        name = self.problem.name
        status, message = "max-iter", f"iteration limit {self.max_iter} reached"
        bound = settings.SDP_DIVERGENCE_BOUND

        while True:
            rp = self.primal_residual()
            rd = self.dual_residual()
            pinf = float(np.max(np.abs(rp) / self.b_scale)) if self.m else 0.0
            dinf = math.sqrt(self._inner(rd, rd)) / self.c_scale
            primal, dual = self._values()
            gap = relative_gap(primal, dual)
            logger.debug("%s it %3d: p=% .9e d=% .9e gap=%.2e pinf=%.2e dinf=%.2e",
                         name, self.iterations, primal, dual, gap, pinf, dinf)

            if pinf <= self.tol and dinf <= self.tol and gap <= self.tol:
                status, message = "optimal", "converged"
                break
            if abs(dual) > bound or float(np.max(np.abs(self.y), initial=0.0)) > bound:
                status = "infeasible"
                message = "dual objective diverged; primal infeasibility suspected"
                break
            if abs(primal) > bound or max(float(np.max(np.abs(x))) for x in self.x) > bound:
                status = "unbounded"
                message = "primal iterates diverged; unboundedness suspected"
                break
            if self.iterations >= self.max_iter:
                break

            try:
                mu = self.duality_measure()
                s_inv = self._inverse_slack()
                factor = self._factor(self.schur_complement(s_inv))
                dx_a, _, ds_a = self.direction(factor, s_inv, rd, 0.0)
                step_p = min(1.0, self.max_step(self.x, dx_a))
                step_d = min(1.0, self.max_step(self.s, ds_a))
                x_aff = [x + step_p * d for x, d in zip(self.x, dx_a)]
                s_aff = [s + step_d * d for s, d in zip(self.s, ds_a)]
                mu_aff = self._inner(x_aff, s_aff) / self.problem.barrier_order
                sigma = min(1.0, max(0.0, mu_aff / mu) ** 3) if mu > 0 else 0.0
                dx, dy, ds = self.direction(factor, s_inv, rd, sigma * mu, (dx_a, ds_a))
                step_p = min(1.0, STEP_FACTOR * self.max_step(self.x, dx))
                step_d = min(1.0, STEP_FACTOR * self.max_step(self.s, ds))
            except _Breakdown as exc:
                message = f"numerical breakdown: {exc}"
                logger.warning("%s: %s after %d iterations", name, message, self.iterations)
                break
            if max(step_p, step_d) < MIN_STEP:
                message = "stalled: step length below 1e-10"
                logger.warning("%s: %s after %d iterations", name, message, self.iterations)
                break

            self.x = [x + step_p * d for x, d in zip(self.x, dx)]
            self.y = self.y + step_d * dy
            self.s = [s + step_d * d for s, d in zip(self.s, ds)]
            self.iterations += 1

        primal, dual = self._values()
        solution = SdpSolution(
            status=status,
            primal_value=primal,
            dual_value=dual,
            gap=gap,
            x=tuple(self.x),
            y=self.sign * self.y,
            s=tuple(self.s),
            iterations=self.iterations,
            primal_residual=pinf,
            dual_residual=dinf,
            tolerance=self.tol,
            message=message,
        )
        logger.info("%s: %s in %d iterations (p=%.12g, d=%.12g, gap=%.1e)", name, status,
                    self.iterations, primal, dual, gap)
        return solution


def solve(problem: SdpProblem, tol: Optional[float] = None,
          max_iter: Optional[int] = None) -> SdpSolution:
    """
    Solves a canonical SDP.

    Args:
        problem (SdpProblem): The problem.
        tol (float, optional): Gap and feasibility tolerance. Defaults to
            ``default_tolerance()``.
        max_iter (int, optional): Iteration cap. Defaults to
            ``settings.SDP_MAX_ITER``.

    Returns:
        SdpSolution: The solver's answer; check ``status`` before use.

    Raises:
        ValidationError: If the tolerance or iteration cap is invalid.
    """
    tol = default_tolerance() if tol is None else tol
    max_iter = settings.SDP_MAX_ITER if max_iter is None else max_iter
    return InteriorPointSolver(problem, tol, max_iter).run()
