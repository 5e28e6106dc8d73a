"""
Tests for the chmono app.

Test Cases:
    1. `ChannelRobustnessTest`: the channel robustness program, its relation
       to the output robustness and its behaviour under post-processing.
    2. `SeesawTest`: the channel tempered-negativity seesaw.
    3. `EntanglementCostTest`: one- and two-copy lower bounds.
    4. `CapacityBoundTest`: the D_max programs and the Phi bound.
    5. `IrreversibilityReportTest`: the report, its flag and its formats.

The two-copy Omega3 bound (81 x 81 programs) and the full input corpus run
only with TB_RUN_SLOW=True.
"""
import math
import unittest
from unittest import mock

from channels.operations import apply, compose, local_projection_channel
from channels.zoo import dephasing, identity, omega3_channel
from states.constructors import max_entangled, omega3, random_state_corpus
from states.monotones import std_robustness_ppt, tempered_negativity
from tempered import settings
from tempered.exceptions import DimensionMismatchError, SolverError, ValidationError
from .bounds import (certified_qcap_upper_bound, channel_robustness_ke,
                     channel_tempered_robustness, dmax_divergence, dmax_phi_lower_bound,
                     ec_lower_bound, irreversibility_report, qcap_upper_bound)
from .models import BoundReport, SeesawConfig
from .seesaw import channel_tempered_negativity, seesaw_tempered_negativity, starting_inputs
from .serializers import BoundReportSerializer, per_copy_csv

QUICK = SeesawConfig(restarts=2, max_rounds=3)
INPUT_COUNT = 10 if settings.RUN_SLOW_TESTS else 3
LOG2_THREE_HALVES = math.log2(1.5)


class ChannelRobustnessTest(unittest.TestCase):
    """
    Test case for channel_robustness_ke.
    """

    def test_identity(self) -> None:
        """
        Tests R^s_KE(id_d) = d - 1 for d = 2, 3.
        """
        for d in (2, 3):
            value, theta = channel_robustness_ke(identity(d))
            self.assertAlmostEqual(value, d - 1, delta=1e-4)
            self.assertEqual(theta.dims, (d, d))

    def test_dephasing(self) -> None:
        """
        Tests that an entanglement-breaking channel has robustness 0.
        """
        value, _ = channel_robustness_ke(dephasing(3))
        self.assertAlmostEqual(value, 0.0, delta=1e-6)

    def test_omega3_dominates_its_choi_state(self) -> None:
        """
        Tests R^s_KE(Omega3) >= R^s_PPT(omega3).
        """
        channel_value, _ = channel_robustness_ke(omega3_channel())
        state_value, _ = std_robustness_ppt(omega3())
        self.assertGreaterEqual(channel_value, state_value - 1e-6)

    def test_dominates_output_robustness(self) -> None:
        """
        Tests R^s_KE(c) >= R^s_PPT([id (x) c](rho)) on a seeded input corpus.
        """
        inputs = random_state_corpus(0, INPUT_COUNT, dims=((3, 3),))
        for c in (identity(3), dephasing(3), omega3_channel()):
            channel_value, _ = channel_robustness_ke(c)
            for index, rho in enumerate(inputs):
                with self.subTest(channel=c.name, state=index):
                    output_value, _ = std_robustness_ppt(apply(c, rho))
                    self.assertGreaterEqual(channel_value, output_value - 1e-6)

    def test_post_processing_does_not_increase(self) -> None:
        """
        Tests R^s_KE(Phi o c) <= R^s_KE(c) for the local projection map Phi.
        """
        projection = local_projection_channel(3, 2)
        for c in (identity(3), omega3_channel()):
            before, _ = channel_robustness_ke(c)
            after, _ = channel_robustness_ke(compose(projection, c))
            self.assertLessEqual(after, before + 1e-6)


class SeesawTest(unittest.TestCase):
    """
    Test case for the channel tempered-negativity seesaw.
    """

    def test_omega3(self) -> None:
        """
        Tests N_tau(Omega3) >= 2, reached at Phi_3.
        """
        result = seesaw_tempered_negativity(omega3_channel(), QUICK)
        self.assertGreaterEqual(result.lower_bound, 2.0 - 1e-5)
        self.assertTrue(result.certificate.passed)
        for row in result.history:
            for previous, current in zip(row, row[1:]):
                self.assertGreaterEqual(current, previous)
        self.assertGreaterEqual(result.history[0][0], 2.0 - 1e-5)

    def test_identity(self) -> None:
        """
        Tests N_tau(id_d) >= d.
        """
        for d in (2, 3):
            value, best_input = channel_tempered_negativity(identity(d), QUICK)
            self.assertGreaterEqual(value, d - 1e-5)
            self.assertEqual(best_input.dims, (d, d))

    def test_dephasing(self) -> None:
        """
        Tests that every output of the dephasing channel gives 1.
        """
        value, _ = channel_tempered_negativity(dephasing(3), QUICK)
        self.assertAlmostEqual(value, 1.0, delta=1e-6)

    def test_ties_keep_the_first_restart(self) -> None:
        """
        Tests that equal values keep the earliest restart.
        """
        cfg = SeesawConfig(restarts=3, max_rounds=1, inner_tol=1e-6)
        result = seesaw_tempered_negativity(dephasing(2), cfg)
        self.assertEqual(result.best_restart, 0)
        self.assertEqual(len(result.history), 3)

    def test_failed_restart_is_skipped(self) -> None:
        """
        Tests that a solver failure aborts only the restart it happens in.
        """
        calls = []

        def flaky(rho, tol=None):
            calls.append(rho)
            if len(calls) == 2:
                raise SolverError("injected failure")
            return tempered_negativity(rho, tol=tol)

        cfg = SeesawConfig(restarts=3, max_rounds=1)
        with mock.patch("chmono.seesaw.tempered_negativity", side_effect=flaky):
            result = seesaw_tempered_negativity(identity(2), cfg)
        self.assertEqual(result.aborted, (1,))
        self.assertEqual(result.history[1], ())
        self.assertGreaterEqual(result.lower_bound, 2.0 - 1e-5)

    def test_all_restarts_failing(self) -> None:
        """
        Tests that SolverError is raised when nothing was certified.
        """
        with mock.patch("chmono.seesaw.tempered_negativity",
                        side_effect=SolverError("injected failure")):
            with self.assertRaises(SolverError):
                seesaw_tempered_negativity(identity(2), SeesawConfig(restarts=2, max_rounds=1))

    def test_starting_inputs(self) -> None:
        """
        Tests that restarts begin at Phi_{d_in} and are reproducible.
        """
        cfg = SeesawConfig(restarts=4, seed=5)
        first = starting_inputs(identity(3), cfg)
        second = starting_inputs(identity(3), cfg)
        self.assertEqual(len(first), 4)
        self.assertTrue((first[0].matrix == max_entangled(3).matrix).all())
        for a, b in zip(first, second):
            self.assertTrue((a.matrix == b.matrix).all())

    def test_config_validation(self) -> None:
        """
        Tests the checks on the seesaw configuration.
        """
        with self.assertRaises(ValidationError):
            SeesawConfig(restarts=0)
        with self.assertRaises(ValidationError):
            SeesawConfig(max_rounds=0)
        cfg = SeesawConfig(initial_inputs=(max_entangled(2),))
        with self.assertRaises(DimensionMismatchError):
            starting_inputs(identity(3), cfg)

    def test_bounded_by_channel_robustness(self) -> None:
        """
        Tests log2(1 + 2 R^tau) at the best input against log2(1 + 2 R^s_KE).
        """
        c = omega3_channel()
        _, best_input = channel_tempered_negativity(c, QUICK)
        tempered = channel_tempered_robustness(c, best_input)
        robustness, _ = channel_robustness_ke(c)
        self.assertLessEqual(math.log2(1 + 2 * tempered),
                             math.log2(1 + 2 * robustness) + 1e-6)


class EntanglementCostTest(unittest.TestCase):
    """
    Test case for ec_lower_bound.
    """

    def test_omega3_one_copy(self) -> None:
        """
        Tests that Omega3 costs at least one ebit per use.
        """
        self.assertGreaterEqual(ec_lower_bound(omega3_channel(), 1, QUICK), 1.0 - 1e-4)

    def test_dephasing(self) -> None:
        """
        Tests that the dephasing channel gets the bound 0.
        """
        self.assertAlmostEqual(ec_lower_bound(dephasing(3), 1, QUICK), 0.0, delta=1e-6)

    def test_identity_two_copies(self) -> None:
        """
        Tests the two-copy bound of id_2 at Phi_2 (x) Phi_2.
        """
        self.assertAlmostEqual(ec_lower_bound(identity(2), 2), 1.0, delta=1e-5)

    def test_rejects_unsupported_copies(self) -> None:
        """
        Tests that n = 3 and oversized two-copy problems are refused.
        """
        with self.assertRaises(ValidationError):
            ec_lower_bound(identity(2), 3)
        with self.assertRaises(ValidationError):
            ec_lower_bound(identity(4), 2)

    @unittest.skipUnless(settings.RUN_SLOW_TESTS, "set TB_RUN_SLOW=True to run")
    def test_omega3_two_copies(self) -> None:
        """
        Tests the two-copy bound of Omega3 and its supermultiplicativity.
        """
        c = omega3_channel()
        one = ec_lower_bound(c, 1, QUICK)
        two = ec_lower_bound(c, 2)
        self.assertGreaterEqual(two, 1.0 - 1e-3)
        self.assertGreaterEqual(two, one - 1e-3)


class CapacityBoundTest(unittest.TestCase):
    """
    Test case for the D_max bounds.
    """

    def test_omega3(self) -> None:
        """
        Tests log2(3/2) >= qcap(Omega3) >= its Phi bound.
        """
        c = omega3_channel()
        bits, report = certified_qcap_upper_bound(c)
        self.assertLessEqual(bits, LOG2_THREE_HALVES + 1e-5)
        self.assertGreaterEqual(bits, dmax_phi_lower_bound(c) - 1e-6)
        self.assertTrue(report.passed)

    def test_dephasing(self) -> None:
        """
        Tests qcap(Delta_3) = 0.
        """
        self.assertAlmostEqual(qcap_upper_bound(dephasing(3)), 0.0, delta=1e-6)

    def test_identity(self) -> None:
        """
        Tests qcap(id_2) = 1, where the Phi bound is tight.
        """
        self.assertAlmostEqual(dmax_phi_lower_bound(identity(2)), 1.0, delta=1e-12)
        self.assertAlmostEqual(qcap_upper_bound(identity(2)), 1.0, delta=1e-5)

    def test_phi_bound(self) -> None:
        """
        Tests the Phi-overlap bound on the zoo.
        """
        self.assertAlmostEqual(dmax_phi_lower_bound(identity(3)), math.log2(3), delta=1e-12)
        self.assertEqual(dmax_phi_lower_bound(omega3_channel()), 0.0)
        self.assertEqual(dmax_phi_lower_bound(dephasing(3)), 0.0)

    def test_dmax_divergence(self) -> None:
        """
        Tests D_max(Omega3 || Delta_3) = log2(3/2) and D_max(id_3 || Delta_3) = log2 3.
        """
        self.assertAlmostEqual(dmax_divergence(omega3_channel(), dephasing(3)),
                               LOG2_THREE_HALVES, delta=1e-6)
        self.assertAlmostEqual(dmax_divergence(identity(3), dephasing(3)), math.log2(3),
                               delta=1e-6)
        self.assertAlmostEqual(dmax_divergence(omega3_channel(), omega3_channel()), 0.0,
                               delta=1e-6)

    def test_dmax_divergence_rejections(self) -> None:
        """
        Tests infinite divergences and mismatched channels.
        """
        with self.assertRaises(ValidationError) as raised:
            dmax_divergence(dephasing(3), omega3_channel())
        self.assertEqual(raised.exception.field, "other")
        with self.assertRaises(DimensionMismatchError):
            dmax_divergence(identity(2), identity(3))


class IrreversibilityReportTest(unittest.TestCase):
    """
    Test case for irreversibility_report and its formats.
    """

    def test_omega3(self) -> None:
        """
        Tests that Omega3 witnesses irreversibility.
        """
        report = irreversibility_report(omega3_channel(), QUICK)
        self.assertTrue(report.irreversible)
        self.assertGreaterEqual(report.gap, 1.0 - LOG2_THREE_HALVES - 1e-4)
        self.assertTrue(report.passed)
        self.assertEqual(sorted(report.certificates), ["ec-1", "qcap"])
        self.assertEqual(report.label, "finite-n lower bound")

    def test_reversible_channels(self) -> None:
        """
        Tests that id_2 and Delta_3 raise no flag.
        """
        report = irreversibility_report(identity(2), QUICK)
        self.assertFalse(report.irreversible)
        self.assertAlmostEqual(report.ec_lower_bound, 1.0, delta=1e-5)
        self.assertAlmostEqual(report.q_upper_bound, 1.0, delta=1e-5)
        report = irreversibility_report(dephasing(3), QUICK)
        self.assertFalse(report.irreversible)
        self.assertAlmostEqual(report.ec_lower_bound, 0.0, delta=1e-6)
        self.assertAlmostEqual(report.q_upper_bound, 0.0, delta=1e-6)

    def test_rejects_non_finite_bounds(self) -> None:
        """
        Tests that a report cannot carry infinite values.
        """
        with self.assertRaises(ValidationError):
            BoundReport("c", math.inf, 0.0, ((1, math.inf),), {})

    def test_formats(self) -> None:
        """
        Tests the report-v1 and CSV outputs.
        """
        report = irreversibility_report(identity(2), SeesawConfig(restarts=1, max_rounds=1))
        serializer = BoundReportSerializer()
        text = serializer.dumps(report)
        self.assertEqual(text, serializer.dumps(report))
        parsed = serializer.loads(text)
        self.assertEqual(parsed["channel"], "id2")
        self.assertEqual(parsed["flags"], {"irreversibility_witnessed": False})
        self.assertEqual(parsed["per_copy"][0][0], 1)
        self.assertIn("qcap", parsed["certificates"])
        lines = per_copy_csv(report).splitlines()
        self.assertEqual(lines[0], "n,value")
        self.assertTrue(lines[1].startswith("1,"))
        with self.assertRaises(ValidationError):
            serializer.parse({"format": "report-v1", "channel": "c"})
