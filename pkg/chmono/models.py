"""
Module 'chmono.models'

Types of the channel-monotone computations.

Key Classes:

- **SeesawConfig**: restarts, rounds, tolerance, seed and starting inputs of
  the channel tempered-negativity seesaw.
- **SeesawResult**: the certified lower bound, the input that reached it and
  the per-restart history.
- **BoundReport**: entanglement-cost lower bound against the distillable
  capacity upper bound of one channel.
"""
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from sdp.models import VerifyReport
from states.models import DensityOperator, TemperedWitness
from tempered import settings
from .validators import validate_finite, validate_seesaw_counts

FINITE_N_LABEL = "finite-n lower bound"
# lower minus upper bound above which irreversibility is reported
IRREVERSIBILITY_MARGIN = 1e-4


@dataclass(frozen=True)
class SeesawConfig:
    """
    Configuration of the channel tempered-negativity seesaw.

    Attributes:
        restarts (int): Number of starting inputs.
        max_rounds (int): Rounds per restart; 1 evaluates the starting input
            only.
        inner_tol (float): A restart stops once a round changes the value by
            less than this; later restarts must beat the best value by more
            than this to replace it.
        seed (int): Seed of the Haar-random starting inputs.
        initial_inputs (tuple[DensityOperator, ...]): Starting inputs on
            d_in x d_in, tried first. When empty, Phi_{d_in} is the first
            input. Haar-random pure states fill the remaining restarts.
    """
    restarts: int = settings.SEESAW_RESTARTS
    max_rounds: int = settings.SEESAW_MAX_ROUNDS
    inner_tol: float = settings.SEESAW_INNER_TOL
    seed: int = settings.TEMPER_SEED
    initial_inputs: Tuple[DensityOperator, ...] = ()

    def __post_init__(self) -> None:
        validate_seesaw_counts(self.restarts, self.max_rounds)
        object.__setattr__(self, "initial_inputs", tuple(self.initial_inputs))


@dataclass(frozen=True, eq=False)
class SeesawResult:
    """
    Outcome of the seesaw.

    Attributes:
        lower_bound (float): Best certified N_tau([id (x) Lambda](psi)).
        best_input (DensityOperator): The input psi that reached it.
        best_restart (int): Index of the restart that produced it.
        witness (TemperedWitness): Witness of the best value, with its
            certificate.
        history (tuple[tuple[float, ...], ...]): Running best per round, one
            row per restart; non-decreasing along each row.
        aborted (tuple[int, ...]): Restarts stopped by a solver failure.
    """
    lower_bound: float
    best_input: DensityOperator
    best_restart: int
    witness: TemperedWitness
    history: Tuple[Tuple[float, ...], ...]
    aborted: Tuple[int, ...] = ()

    @property
    def certificate(self) -> Optional[VerifyReport]:
        return self.witness.certificate


@dataclass(frozen=True, eq=False)
class BoundReport:
    """
    Irreversibility report of one channel.

    Attributes:
        channel_id (str): Name of the channel.
        ec_lower_bound (float): Entanglement-cost lower bound in bits per use,
            the best of the finite-n values.
        q_upper_bound (float): Distillable-capacity upper bound in bits.
        per_copy_tempered_neg (tuple[tuple[int, float], ...]): (n, (1/n)
            log2 N_tau(Lambda^{(x) n})) for each evaluated n.
        certificates (dict[str, VerifyReport]): The report behind every value.
        label (str): Nature of the lower bound.
    """
    channel_id: str
    ec_lower_bound: float
    q_upper_bound: float
    per_copy_tempered_neg: Tuple[Tuple[int, float], ...]
    certificates: Dict[str, VerifyReport]
    label: str = FINITE_N_LABEL
    flags: Dict[str, bool] = field(default_factory=dict)

    def __post_init__(self) -> None:
        validate_finite(self.ec_lower_bound, "ec_lower_bound")
        validate_finite(self.q_upper_bound, "q_upper_bound")
        for n, value in self.per_copy_tempered_neg:
            validate_finite(value, f"per_copy[{n}]")
        if not self.flags:
            object.__setattr__(self, "flags", {
                "irreversibility_witnessed": self.gap > IRREVERSIBILITY_MARGIN})

    @property
    def gap(self) -> float:
        return self.ec_lower_bound - self.q_upper_bound

    @property
    def irreversible(self) -> bool:
        return self.flags["irreversibility_witnessed"]

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.certificates.values())

    def per_copy(self, n: int) -> float:
        """
        Returns the per-copy bound for n copies.

        Raises:
            KeyError: If n copies were not evaluated.
        """
        for copies, value in self.per_copy_tempered_neg:
            if copies == n:
                return value
        raise KeyError(n)
