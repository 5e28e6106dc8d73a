"""
Module 'chmono.seesaw'

Certified lower bounds on the channel tempered negativity

    N_tau(Lambda) = sup_psi N_tau([id (x) Lambda](psi)).

The supremum is not a convex program: the anchor of the inner program is the
output state itself and moves with psi. Each restart alternates two steps:

1. with psi fixed, solve the self-tempered negativity program of
   [id (x) Lambda](psi) and keep its witness X;
2. with X fixed, replace psi by the top eigenvector of
   [id (x) Lambda^dagger](X), the pure input maximising Tr X [id (x) Lambda](psi).

Every value entering the bound is a certified inner solve, so the result is
a lower bound whatever the seesaw converges to. Restarts begin at the
configured inputs (Phi_{d_in} by default) and continue with Haar-random pure
inputs.
"""
from typing import List, Optional, Tuple

import numpy as np

from channels.models import Channel
from channels.operations import adjoint_apply, apply
from linalg.operations import eigh
from logger_config import get_logger
from states.constructors import from_pure, haar_pure_state, max_entangled
from states.models import DensityOperator, TemperedWitness
from states.monotones import tempered_negativity
from tempered.exceptions import ConvergenceError, DimensionMismatchError, SolverError
from .models import SeesawConfig, SeesawResult

logger = get_logger(__name__)

Candidate = Tuple[float, DensityOperator, TemperedWitness]


def starting_inputs(c: Channel, cfg: SeesawConfig) -> List[DensityOperator]:
    """
    Returns the restart inputs on d_in x d_in.

    Raises:
        DimensionMismatchError: If a configured input has other dimensions.
    """
    dim = c.dim_in
    inputs = list(cfg.initial_inputs) or [max_entangled(dim)]
    for psi in inputs:
        if psi.dims != (dim, dim):
            raise DimensionMismatchError(f"seesaw inputs must live on {dim} x {dim}, got "
                                         f"{psi.dims}", "initial_inputs")
    rng = np.random.default_rng(cfg.seed)
    while len(inputs) < cfg.restarts:
        inputs.append(haar_pure_state(dim, dim, rng))
    return inputs[:cfg.restarts]


def improve_input(c: Channel, witness: TemperedWitness) -> DensityOperator:
    """
    Returns the pure input maximising Tr X [id (x) Lambda](psi).
    """
    lifted = adjoint_apply(c, witness.x.matrix, c.dim_in)
    _, vectors = eigh(lifted)
    return from_pure(vectors[:, -1], c.dim_in, c.dim_in)


def _run_restart(c: Channel, psi: DensityOperator, cfg: SeesawConfig, index: int,
                 tol: Optional[float]
                 ) -> Tuple[List[float], Optional[Candidate], bool]:
    history: List[float] = []
    best = None
    previous = None
    for round_index in range(cfg.max_rounds):
        try:
            value, witness = tempered_negativity(apply(c, psi), tol=tol)
        except (SolverError, ConvergenceError) as exc:
            logger.warning("seesaw %s: restart %d aborted in round %d: %s", c.name, index,
                           round_index, exc)
            return history, best, True
        if best is None or value > best[0]:
            best = (value, psi, witness)
        history.append(best[0])
        logger.debug("seesaw %s restart %d round %d: %.12g", c.name, index, round_index, value)
        if previous is not None and abs(value - previous) < cfg.inner_tol:
            break
        previous = value
        if round_index + 1 < cfg.max_rounds:
            psi = improve_input(c, witness)
    return history, best, False


def seesaw_tempered_negativity(c: Channel, cfg: Optional[SeesawConfig] = None,
                               tol: Optional[float] = None) -> SeesawResult:
    """
    Runs the seesaw and returns the best certified value.

    A solver failure stops the restart it happens in; the values that
    restart already certified are kept. A later restart replaces the best
    value only when it beats it by more than ``cfg.inner_tol``, so ties keep
    the earliest restart.

    Args:
        c (Channel): The channel.
        cfg (SeesawConfig, optional): Seesaw configuration.
        tol (float, optional): Tolerance of the inner solves.

    Returns:
        SeesawResult: Bound, best input, witness and history.

    Raises:
        SolverError: If no restart produced a certified value.
    """
    cfg = SeesawConfig() if cfg is None else cfg
    best = None
    best_restart = -1
    histories = []
    aborted = []
    for index, psi in enumerate(starting_inputs(c, cfg)):
        history, found, failed = _run_restart(c, psi, cfg, index, tol)
        if failed:
            aborted.append(index)
        histories.append(tuple(history))
        if found is not None and (best is None or found[0] > best[0] + cfg.inner_tol):
            best, best_restart = found, index
    if best is None:
        logger.error("seesaw %s: every restart failed", c.name)
        raise SolverError(f"seesaw on {c.name}: no restart produced a certified value")
    value, psi, witness = best
    logger.info("channel tempered negativity of %s >= %.12g (restart %d)", c.name, value,
                best_restart)
    return SeesawResult(value, psi, best_restart, witness, tuple(histories), tuple(aborted))


def channel_tempered_negativity(c: Channel, cfg: Optional[SeesawConfig] = None,
                                tol: Optional[float] = None) -> Tuple[float, DensityOperator]:
    """
    Returns (lower bound on N_tau(Lambda), input reaching it).
    """
    result = seesaw_tempered_negativity(c, cfg, tol)
    return result.lower_bound, result.best_input
