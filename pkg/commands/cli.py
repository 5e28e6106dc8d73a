"""
Module 'commands.cli'

Command-line front end, exposed through ``manage.py``.

Subcommands:

- **state**: a monotone of a state file (cmat-v1), written as result-v1.
- **channel**: a monotone or bound of a channel file (chan-v1), written as
  result-v1.
- **repro**: the irreversibility report of Omega_3 (report-v1).
- **corpus**: the property corpus (corpus-v1).

Exit codes: 0 when every certificate passed, 1 on input errors (the
diagnostic on stderr names the offending field), 2 on solver, certificate or
property failures. JSON goes to ``--output`` or stdout.
"""
import functools
import os
from typing import Any, Callable, Optional, Sequence

import click
from rest_framework import exceptions as drf_exceptions

from channels.diamond import certified_diamond_distance
from channels.models import Channel
from channels.serializers import ChannelSerializer
from channels.zoo import omega3_channel
from chmono.bounds import (certified_channel_robustness_ke, certified_dmax_divergence,
                           certified_ec_lower_bound, certified_qcap_upper_bound,
                           irreversibility_report)
from chmono.models import FINITE_N_LABEL, BoundReport, SeesawConfig
from chmono.seesaw import seesaw_tempered_negativity
from chmono.serializers import BoundReportSerializer, per_copy_csv
from chmono.validators import validate_positive_count
from linalg.serializers import as_validation_error
from logger_config import get_logger
from states.models import MonotoneResult
from states.monotones import MEASURES, evaluate
from states.serializers import DensityOperatorSerializer, MonotoneResultSerializer
from tempered.exceptions import (ConvergenceError, NotSdpRepresentableError, SolverError,
                                 ValidationError)
from .corpus import DEFAULT_SEEDS, DEFAULT_SIZE, CorpusRun, CorpusRunSerializer, run_corpus

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAILURE = 2

CHANNEL_MEASURES = ("tneg", "rob", "dmax", "diamond", "ec-lb", "q-ub")
PAIRED_MEASURES = ("diamond",)
# measures that take a second channel when one is given
OPTIONAL_PAIR_MEASURES = ("dmax",)

# pass criteria of the Omega_3 reproduction
REPRO_EC_MIN = 1 - 1e-4
REPRO_TWO_COPY_MIN = 1 - 1e-3
REPRO_Q_MAX = 0.5850 + 1e-5


def handle_errors(command: Callable[..., int]) -> Callable[..., None]:
    """
    Maps the project exceptions of a command onto exit codes.

    The wrapped command returns its own exit code.
    """

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        ctx = click.get_current_context()
        try:
            code = command(*args, **kwargs)
        except drf_exceptions.ValidationError as exc:
            click.echo(f"input error: {as_validation_error(exc.detail)}", err=True)
            ctx.exit(EXIT_INPUT)
        except (ValidationError, NotSdpRepresentableError) as exc:
            click.echo(f"input error: {exc}", err=True)
            ctx.exit(EXIT_INPUT)
        except (SolverError, ConvergenceError) as exc:
            click.echo(f"solver failure: {exc}", err=True)
            ctx.exit(EXIT_FAILURE)
        ctx.exit(code)

    return wrapper


def emit(text: str, output: Optional[str]) -> None:
    if output is None:
        click.echo(text, nl=False)
        return
    with open(output, "w", encoding="utf-8") as handle:
        handle.write(text)


def emit_result(result: MonotoneResult, output: Optional[str]) -> int:
    emit(MonotoneResultSerializer().dumps(result), output)
    if not result.passed:
        click.echo(f"certificate failed for {result.measure}", err=True)
        return EXIT_FAILURE
    return EXIT_OK


def load_channel(path: str) -> Channel:
    name = os.path.splitext(os.path.basename(path))[0]
    return ChannelSerializer().load(path).renamed(name)


def seesaw_config(seed: Optional[int]) -> Optional[SeesawConfig]:
    return None if seed is None else SeesawConfig(seed=seed)


@click.group()
def cli() -> None:
    """
    SDP entanglement monotones of states and channels.
    """


@cli.command()
@click.option("--measure", required=True, type=click.Choice(MEASURES))
@click.option("--input", "input_path", required=True, help="State file (cmat-v1).")
@click.option("--anchor", "anchor_path", default=None,
              help="Anchor of the tempered measures (cmat-v1); defaults to the state.")
@click.option("--tol", type=float, default=None, help="Solver tolerance.")
@click.option("--output", default=None, help="Write result-v1 here instead of stdout.")
@handle_errors
def state(measure: str, input_path: str, anchor_path: Optional[str], tol: Optional[float],
          output: Optional[str]) -> int:
    """
    Computes a monotone of a bipartite state.
    """
    serializer = DensityOperatorSerializer()
    rho = serializer.load(input_path)
    omega = serializer.load(anchor_path) if anchor_path else None
    return emit_result(evaluate(measure, rho, omega, tol), output)


def channel_result(measure: str, c: Channel, other: Optional[Channel], copies: int,
                   seed: Optional[int], tol: Optional[float]) -> MonotoneResult:
    """
    Computes a channel measure by its short name.

    Raises:
        ValidationError: If --other is missing for diamond or given to a
            measure that takes no second channel.

    Without --other, dmax reports the PPT-binding D_max bound on the
    distillable capacity.
    """
    if measure in PAIRED_MEASURES and other is None:
        raise ValidationError(f"measure {measure!r} needs a second channel", "other")
    if measure not in PAIRED_MEASURES + OPTIONAL_PAIR_MEASURES and other is not None:
        raise ValidationError(f"measure {measure!r} takes no second channel", "other")
    if measure != "ec-lb" and copies != 1:
        raise ValidationError(f"measure {measure!r} takes no copies", "copies")
    if measure == "tneg":
        found = seesaw_tempered_negativity(c, seesaw_config(seed), tol)
        reports = (found.certificate,) if found.certificate is not None else ()
        return MonotoneResult(measure, found.lower_bound, reports, found.witness.x,
                              ("seesaw lower bound over inputs",
                               f"best restart {found.best_restart}"))
    if measure == "rob":
        value, optimum, report = certified_channel_robustness_ke(c, tol)
        return MonotoneResult(measure, value, (report,), optimum)
    if measure == "dmax" and other is None:
        value, report = certified_qcap_upper_bound(c, tol)
        return MonotoneResult(measure, value, (report,), None,
                              ("minimised over PPT-binding channels",))
    if measure == "dmax":
        value, report = certified_dmax_divergence(c, other, tol)
        return MonotoneResult(measure, value, (report,), None, (f"against {other.name}",))
    if measure == "diamond":
        value, report = certified_diamond_distance(c, other, tol)
        return MonotoneResult(measure, value, (report,), None, (f"against {other.name}",))
    if measure == "ec-lb":
        cfg = seesaw_config(seed) if copies == 1 else None
        value, found = certified_ec_lower_bound(c, copies, cfg, tol)
        reports = (found.certificate,) if found.certificate is not None else ()
        return MonotoneResult(measure, value, reports, found.witness.x,
                              (FINITE_N_LABEL, f"copies {copies}"))
    value, report = certified_qcap_upper_bound(c, tol)
    return MonotoneResult(measure, value, (report,), None)


@cli.command()
@click.option("--measure", required=True, type=click.Choice(CHANNEL_MEASURES))
@click.option("--input", "input_path", required=True, help="Channel file (chan-v1).")
@click.option("--other", "other_path", default=None,
              help="Second channel of diamond, and of a pairwise dmax (chan-v1).")
@click.option("--copies", type=int, default=1, help="Copies of the ec-lb bound (1 or 2).")
@click.option("--seed", type=int, default=None, help="Seed of the seesaw restarts.")
@click.option("--tol", type=float, default=None, help="Solver tolerance.")
@click.option("--output", default=None, help="Write result-v1 here instead of stdout.")
@handle_errors
def channel(measure: str, input_path: str, other_path: Optional[str], copies: int,
            seed: Optional[int], tol: Optional[float], output: Optional[str]) -> int:
    """
    Computes a monotone or bound of a channel.
    """
    c = load_channel(input_path)
    other = load_channel(other_path) if other_path else None
    return emit_result(channel_result(measure, c, other, copies, seed, tol), output)


def repro_failures(report: BoundReport, copies: int) -> Sequence[str]:
    """
    Returns the pass criteria the Omega_3 report misses.
    """
    failures = []
    if not report.passed:
        failures.append("a certificate failed")
    if report.ec_lower_bound < REPRO_EC_MIN:
        failures.append(f"ec lower bound {report.ec_lower_bound:.12g} < {REPRO_EC_MIN}")
    if copies == 2 and report.per_copy(2) < REPRO_TWO_COPY_MIN:
        failures.append(f"two-copy bound {report.per_copy(2):.12g} < {REPRO_TWO_COPY_MIN}")
    if report.q_upper_bound > REPRO_Q_MAX:
        failures.append(f"q upper bound {report.q_upper_bound:.12g} > {REPRO_Q_MAX}")
    if not report.irreversible:
        failures.append("irreversibility not witnessed")
    return failures


@cli.command()
@click.option("--copies", type=int, default=1, help="Evaluate n = 1, or n = 1 and n = 2.")
@click.option("--seed", type=int, default=None, help="Seed of the seesaw restarts.")
@click.option("--tol", type=float, default=None, help="Solver tolerance.")
@click.option("--output", default=None, help="Write report-v1 here instead of stdout.")
@click.option("--emit-plot-data", "plot_path", default=None,
              help="Write the per-copy bounds as CSV (n,value) here.")
@handle_errors
def repro(copies: int, seed: Optional[int], tol: Optional[float], output: Optional[str],
          plot_path: Optional[str]) -> int:
    """
    Reproduces the irreversibility of Omega_3.
    """
    report = irreversibility_report(omega3_channel(), seesaw_config(seed), copies, tol)
    emit(BoundReportSerializer().dumps(report), output)
    if plot_path:
        with open(plot_path, "w", encoding="utf-8") as handle:
            handle.write(per_copy_csv(report))
    failures = repro_failures(report, copies)
    for failure in failures:
        logger.error("repro: %s", failure)
        click.echo(f"repro failed: {failure}", err=True)
    return EXIT_FAILURE if failures else EXIT_OK


@cli.command()
@click.option("--seed", "seeds", type=int, multiple=True, help="Seed; repeat for several.")
@click.option("--sabotage", is_flag=True, help="Inject a corrupted fixture.")
@click.option("--workers", type=int, default=1, help="Worker processes.")
@click.option("--size", type=int, default=DEFAULT_SIZE, help="Random states per seed.")
@click.option("--output", default=None, help="Write corpus-v1 here instead of stdout.")
@handle_errors
def corpus(seeds: Sequence[int], sabotage: bool, workers: int, size: int,
           output: Optional[str]) -> int:
    """
    Runs the property corpus.
    """
    validate_positive_count(workers, "workers")
    validate_positive_count(size, "size")
    seeds = tuple(seeds) or DEFAULT_SEEDS
    outcomes = run_corpus(seeds, size, sabotage, workers)
    run = CorpusRun(seeds, size, sabotage, tuple(outcomes))
    emit(CorpusRunSerializer().dumps(run), output)
    for outcome in outcomes:
        if not outcome.passed:
            click.echo(f"property {outcome.name} failed at seed {outcome.seed}", err=True)
    return EXIT_OK if run.passed else EXIT_FAILURE
