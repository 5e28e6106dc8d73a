"""
Module 'commands.corpus'

Property corpus run by ``manage.py corpus``.

Each property is a function ``(seed, size, sabotage) -> (checked, worst)``
that evaluates an inequality on seeded inputs and returns the number of cases
checked and the worst margin (negative when the property fails). Properties
are independent, so they may run in worker processes; results are merged in
the fixed order of ``PROPERTIES`` and seeds.

With ``sabotage`` the diamond check compares id_2 with itself instead of
with Pauli-Z conjugation, which must be reported as a failure.

Output format corpus-v1:

    {"format": "corpus-v1", "seeds": [0, 1, 2], "size": 50, "sabotage": false,
     "passed": true,
     "properties": [{"name", "seed", "passed", "checked", "worst_margin",
                     "error"}, ...]}
"""
import concurrent.futures
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from rest_framework import serializers

from channels.diamond import diamond_distance
from channels.operations import apply, truncate
from channels.zoo import dephasing, identity, omega3_channel, pauli_z_channel, random_channel
from chmono.bounds import channel_robustness_ke
from linalg.operations import partial_transpose, trace_norm
from linalg.serializers import FormatSerializer
from logger_config import get_logger
from states.constructors import depolarize, omega3, random_state_corpus
from states.monotones import (negativity, std_robustness_ppt, tempered_negativity,
                              tempered_robustness_ppt)
from tempered.exceptions import TemperedError

logger = get_logger(__name__)

DEFAULT_SEEDS = (0, 1, 2)
DEFAULT_SIZE = 50
PROPERTY_TOL = 1e-6
INPUT_CORPUS_SIZE = 10
TRUNCATE_DIM = 6
PERTURBATION_LEVELS = (0.01, 0.05)
# omega3 is at trace distance 7/9 * p from its depolarised version at level p
OMEGA3_NOISE_DISTANCE = 7 / 9

Check = Callable[[int, int, bool], Tuple[int, float]]


@dataclass(frozen=True)
class PropertyOutcome:
    """
    Result of one property at one seed.

    Attributes:
        name (str): Property name.
        seed (int): Seed the inputs were drawn with.
        checked (int): Number of cases evaluated.
        worst_margin (float): Smallest slack over the cases; negative on
            failure.
        error (str, optional): Error that stopped the check.
    """
    name: str
    seed: int
    checked: int
    worst_margin: float
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.worst_margin >= 0.0


def check_partial_transpose_involution(seed: int, size: int, sabotage: bool
                                       ) -> Tuple[int, float]:
    worst = np.inf
    states = random_state_corpus(seed, size)
    for rho in states:
        twice = partial_transpose(rho.partial_transpose())
        worst = min(worst, 1e-12 - float(np.max(np.abs(twice.matrix - rho.matrix))))
    return len(states), worst


def check_monotone_inequalities(seed: int, size: int, sabotage: bool) -> Tuple[int, float]:
    worst = np.inf
    states = random_state_corpus(seed, size)
    for rho in states:
        n_tau, _ = tempered_negativity(rho)
        r_tau = tempered_robustness_ppt(rho)
        r_std, _ = std_robustness_ppt(rho)
        worst = min(worst,
                    negativity(rho) - n_tau + PROPERTY_TOL,
                    r_std - r_tau + PROPERTY_TOL,
                    r_tau - (n_tau - 1) / 2 + PROPERTY_TOL)
    return len(states), worst


def check_perturbation_bound(seed: int, size: int, sabotage: bool) -> Tuple[int, float]:
    rho = omega3()
    base = 1 + 2 * tempered_robustness_ppt(rho)
    worst = np.inf
    for eps in PERTURBATION_LEVELS:
        nearby = depolarize(rho, eps / OMEGA3_NOISE_DISTANCE)
        shifted = 1 + 2 * tempered_robustness_ppt(nearby, rho)
        worst = min(worst, shifted - (1 - 2 * eps) * base + PROPERTY_TOL)
    return len(PERTURBATION_LEVELS), worst


def check_primal_dual_agreement(seed: int, size: int, sabotage: bool) -> Tuple[int, float]:
    # std_robustness_ppt raises SolverError on disagreement above 1e-6
    states = random_state_corpus(seed, size)
    for rho in states:
        std_robustness_ppt(rho)
    return len(states), 0.0


def check_diamond(seed: int, size: int, sabotage: bool) -> Tuple[int, float]:
    c = random_channel(2, 2, 2, seed)
    same = PROPERTY_TOL - diamond_distance(c, c)
    other = identity(2) if sabotage else pauli_z_channel()
    apart = 1e-4 - abs(diamond_distance(identity(2), other) - 2.0)
    return 2, min(same, apart)


def check_channel_robustness(seed: int, size: int, sabotage: bool) -> Tuple[int, float]:
    inputs = random_state_corpus(seed, INPUT_CORPUS_SIZE, dims=((3, 3),))
    worst = np.inf
    for c in (identity(3), dephasing(3), omega3_channel()):
        channel_value, _ = channel_robustness_ke(c)
        for rho in inputs:
            output_value, _ = std_robustness_ppt(apply(c, rho))
            worst = min(worst, channel_value - output_value + PROPERTY_TOL)
    return 3 * len(inputs), worst


def check_truncation(seed: int, size: int, sabotage: bool) -> Tuple[int, float]:
    c = random_channel(TRUNCATE_DIM, TRUNCATE_DIM, 3, seed)
    errors = [trace_norm(truncate(c, k).choi.matrix - c.choi.matrix)
              for k in range(1, TRUNCATE_DIM + 1)]
    steps = [previous - current + 1e-9 for previous, current in zip(errors, errors[1:])]
    return len(steps), min(steps)


PROPERTIES: Dict[str, Check] = {
    "partial_transpose_involution": check_partial_transpose_involution,
    "monotone_inequalities": check_monotone_inequalities,
    "perturbation_bound": check_perturbation_bound,
    "primal_dual_agreement": check_primal_dual_agreement,
    "diamond": check_diamond,
    "channel_robustness_dominates_outputs": check_channel_robustness,
    "truncation_error_monotone": check_truncation,
}


def run_property(name: str, seed: int, size: int, sabotage: bool) -> PropertyOutcome:
    """
    Runs one property, turning project errors into a failed outcome.
    """
    try:
        checked, worst = PROPERTIES[name](seed, size, sabotage)
    except TemperedError as exc:
        logger.error("property %s (seed %d) stopped: %s", name, seed, exc)
        return PropertyOutcome(name, seed, 0, -np.inf, str(exc))
    outcome = PropertyOutcome(name, seed, checked, float(worst))
    if outcome.passed:
        logger.info("property %s (seed %d) holds on %d cases", name, seed, checked)
    else:
        logger.error("property %s (seed %d) fails: worst margin %.3e", name, seed, worst)
    return outcome


def run_corpus(seeds: Sequence[int] = DEFAULT_SEEDS, size: int = DEFAULT_SIZE,
               sabotage: bool = False, workers: int = 1) -> List[PropertyOutcome]:
    """
    Runs every property at every seed.

    Args:
        seeds: Seeds of the random inputs.
        size (int): Size of the random state corpus.
        sabotage (bool): Inject the corrupted diamond fixture.
        workers (int): Worker processes; 1 runs in this process.

    Returns:
        list[PropertyOutcome]: One outcome per (property, seed), in a fixed
        order.
    """
    tasks = [(name, seed) for name in PROPERTIES for seed in seeds]
    if workers <= 1:
        return [run_property(name, seed, size, sabotage) for name, seed in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(run_property, name, seed, size, sabotage)
                   for name, seed in tasks]
        return [future.result() for future in futures]


@dataclass(frozen=True)
class CorpusRun:
    """
    A corpus run with its parameters, as written to corpus-v1.
    """
    seeds: Tuple[int, ...]
    size: int
    sabotage: bool
    outcomes: Tuple[PropertyOutcome, ...]

    @property
    def passed(self) -> bool:
        return all(outcome.passed for outcome in self.outcomes)


class PropertyOutcomeSerializer(serializers.Serializer):
    """
    One entry of the ``properties`` list.
    """

    name = serializers.CharField()
    seed = serializers.IntegerField()
    passed = serializers.BooleanField(read_only=True)
    checked = serializers.IntegerField()
    worst_margin = serializers.SerializerMethodField()
    error = serializers.CharField(allow_null=True)

    def get_worst_margin(self, outcome: PropertyOutcome) -> Optional[float]:
        return outcome.worst_margin if np.isfinite(outcome.worst_margin) else None


class CorpusRunSerializer(FormatSerializer):
    """
    Serializer for the corpus-v1 summary (write only).
    """

    format_name = "corpus-v1"

    format = serializers.SerializerMethodField()
    seeds = serializers.ListField(child=serializers.IntegerField())
    size = serializers.IntegerField()
    sabotage = serializers.BooleanField()
    passed = serializers.BooleanField(read_only=True)
    properties = PropertyOutcomeSerializer(source="outcomes", many=True)

    def get_format(self, run: CorpusRun) -> str:
        return self.format_name
