"""
Tests for the command line.

Test Cases:
    1. `StateCommandTest`: ``state`` on state files, exit codes and
       deterministic output.
    2. `ChannelCommandTest`: ``channel`` on channel files.
    3. `ReproCommandTest`: the Omega3 reproduction report.
    4. `CorpusTest`: the property corpus and the ``corpus`` command.

The full corpus at seeds 0, 1, 2 runs only with TB_RUN_SLOW=True.
"""
import json
import math
import os
import shutil
import tempfile
import unittest
from unittest import mock

import numpy as np
from click.testing import CliRunner

from channels.serializers import ChannelSerializer
from channels.zoo import dephasing, identity, omega3_channel, pauli_z_channel
from chmono.models import BoundReport
from sdp.models import VerifyReport
from states.constructors import max_entangled, omega3, product_state
from states.serializers import DensityOperatorSerializer
from tempered import settings
from tempered.exceptions import SolverError
from .cli import EXIT_FAILURE, EXIT_INPUT, EXIT_OK, cli
from .corpus import PROPERTIES, run_corpus, run_property


class CommandTestCase(unittest.TestCase):
    """
    Base class: a temporary directory and a click runner.
    """

    def setUp(self) -> None:
        self.directory = tempfile.mkdtemp()
        self.runner = CliRunner()

    def tearDown(self) -> None:
        shutil.rmtree(self.directory)

    def path(self, name: str) -> str:
        return os.path.join(self.directory, name)

    def write_state(self, name: str, rho) -> str:
        path = self.path(name)
        DensityOperatorSerializer().dump(rho, path)
        return path

    def write_channel(self, name: str, c) -> str:
        path = self.path(name)
        ChannelSerializer().dump(c, path)
        return path

    def invoke(self, *args: str):
        return self.runner.invoke(cli, list(args))

    def read_json(self, name: str) -> dict:
        with open(self.path(name), encoding="utf-8") as handle:
            return json.load(handle)


class StateCommandTest(CommandTestCase):
    """
    Test case for ``state``.
    """

    def test_negativity_of_product_state(self) -> None:
        """
        Tests that a product state has negativity 1.
        """
        zero = np.diag([1.0, 0.0])
        path = self.write_state("product.json", product_state(zero, zero))
        result = self.invoke("state", "--measure", "neg", "--input", path,
                             "--output", self.path("out.json"))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        data = self.read_json("out.json")
        self.assertEqual(data["format"], "result-v1")
        self.assertAlmostEqual(data["value"], 1.0, places=10)

    def test_tempered_negativity_of_omega3(self) -> None:
        """
        Tests N_tau(omega3) = 2 through the command line.
        """
        path = self.write_state("omega3.json", omega3())
        result = self.invoke("state", "--measure", "tneg", "--input", path,
                             "--output", self.path("out.json"))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        data = self.read_json("out.json")
        self.assertAlmostEqual(data["value"], 2.0, delta=1e-5)
        self.assertTrue(data["certificate"]["passed"])

    def test_robustness_of_phi3(self) -> None:
        """
        Tests R^s(Phi_3) = 2 through the command line.
        """
        path = self.write_state("phi3.json", max_entangled(3))
        result = self.invoke("state", "--measure", "rob", "--input", path,
                             "--output", self.path("out.json"))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertAlmostEqual(self.read_json("out.json")["value"], 2.0, delta=1e-5)

    def test_output_is_deterministic(self) -> None:
        """
        Tests that two identical invocations print identical bytes.
        """
        path = self.write_state("phi2.json", max_entangled(2))
        first = self.invoke("state", "--measure", "trob", "--input", path)
        second = self.invoke("state", "--measure", "trob", "--input", path)
        self.assertEqual(first.exit_code, EXIT_OK)
        self.assertEqual(first.output, second.output)

    def test_malformed_file_names_field(self) -> None:
        """
        Tests that a state file without dims exits 1 naming the field.
        """
        path = self.path("bad.json")
        with open(path, "w", encoding="utf-8") as handle:
            json.dump({"format": "cmat-v1", "rows": 1, "cols": 1, "re": [[1.0]],
                       "im": [[0.0]]}, handle)
        result = self.invoke("state", "--measure", "neg", "--input", path)
        self.assertEqual(result.exit_code, EXIT_INPUT)
        self.assertIn("dims", result.output)

    def test_out_of_range_entry_names_field(self) -> None:
        """
        Tests that an entry beyond the float range exits 1 naming its position.
        """
        path = self.path("huge.json")
        with open(path, "w", encoding="utf-8") as handle:
            json.dump({"format": "cmat-v1", "rows": 1, "cols": 1, "re": [[10 ** 400]],
                       "im": [[0.0]], "dims": [1, 1]}, handle)
        result = self.invoke("state", "--measure", "neg", "--input", path)
        self.assertEqual(result.exit_code, EXIT_INPUT)
        self.assertIn("re[0][0]", result.output)

    def test_missing_file(self) -> None:
        """
        Tests that an unreadable path is an input error.
        """
        result = self.invoke("state", "--measure", "neg", "--input", self.path("none.json"))
        self.assertEqual(result.exit_code, EXIT_INPUT)
        self.assertIn("path", result.output)

    def test_anchor_rejected_for_negativity(self) -> None:
        """
        Tests that an anchor passed to ``neg`` is an input error.
        """
        path = self.write_state("phi2.json", max_entangled(2))
        result = self.invoke("state", "--measure", "neg", "--input", path, "--anchor", path)
        self.assertEqual(result.exit_code, EXIT_INPUT)
        self.assertIn("anchor", result.output)

    def test_solver_failure_exit_code(self) -> None:
        """
        Tests that a solver failure exits 2.
        """
        path = self.write_state("phi2.json", max_entangled(2))
        with mock.patch("commands.cli.evaluate", side_effect=SolverError("stalled")):
            result = self.invoke("state", "--measure", "tneg", "--input", path)
        self.assertEqual(result.exit_code, EXIT_FAILURE)
        self.assertIn("stalled", result.output)


class ChannelCommandTest(CommandTestCase):
    """
    Test case for ``channel``.
    """

    def test_robustness_of_identity(self) -> None:
        """
        Tests R^s_KE(id_3) = 2 through the command line.
        """
        path = self.write_channel("id3.json", identity(3))
        result = self.invoke("channel", "--measure", "rob", "--input", path,
                             "--output", self.path("out.json"))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertAlmostEqual(self.read_json("out.json")["value"], 2.0, delta=1e-4)

    def test_capacity_bound_of_omega3(self) -> None:
        """
        Tests that the q-ub bound of Omega3 is at most log2(3/2).
        """
        path = self.write_channel("omega3chan.json", omega3_channel())
        result = self.invoke("channel", "--measure", "q-ub", "--input", path,
                             "--output", self.path("out.json"))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertLessEqual(self.read_json("out.json")["value"], 0.5850 + 1e-5)

    def test_diamond_identity_against_z(self) -> None:
        """
        Tests ||id_2 - Z . Z||_diamond = 2.
        """
        first = self.write_channel("id2.json", identity(2))
        second = self.write_channel("z2.json", pauli_z_channel())
        result = self.invoke("channel", "--measure", "diamond", "--input", first,
                             "--other", second, "--output", self.path("out.json"))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        data = self.read_json("out.json")
        self.assertAlmostEqual(data["value"], 2.0, delta=1e-4)
        self.assertIsNone(data["witness"])

    def test_diamond_needs_other(self) -> None:
        """
        Tests that ``diamond`` without --other exits 1 naming the field.
        """
        path = self.write_channel("id2.json", identity(2))
        result = self.invoke("channel", "--measure", "diamond", "--input", path)
        self.assertEqual(result.exit_code, EXIT_INPUT)
        self.assertIn("other", result.output)

    def test_dmax_without_other(self) -> None:
        """
        Tests that ``dmax`` alone reports the PPT-binding D_max bound of
        Omega3, the same value as ``q-ub``.
        """
        path = self.write_channel("omega3chan.json", omega3_channel())
        result = self.invoke("channel", "--measure", "dmax", "--input", path,
                             "--output", self.path("dmax.json"))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        data = self.read_json("dmax.json")
        self.assertEqual(data["measure"], "dmax")
        self.assertLessEqual(data["value"], 0.5850 + 1e-5)
        self.assertIn("minimised over PPT-binding channels", data["certificate"]["notes"])
        result = self.invoke("channel", "--measure", "q-ub", "--input", path,
                             "--output", self.path("qub.json"))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertAlmostEqual(data["value"], self.read_json("qub.json")["value"], delta=1e-9)

    def test_dmax_against_itself(self) -> None:
        """
        Tests D_max(id_2 || id_2) = 0 with --other.
        """
        path = self.write_channel("id2.json", identity(2))
        result = self.invoke("channel", "--measure", "dmax", "--input", path, "--other", path,
                             "--output", self.path("out.json"))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        data = self.read_json("out.json")
        self.assertAlmostEqual(data["value"], 0.0, delta=1e-6)
        self.assertIn("against id2", data["certificate"]["notes"])

    def test_dmax_dimension_mismatch(self) -> None:
        """
        Tests that D_max of channels on different spaces is an input error.
        """
        first = self.write_channel("id2.json", identity(2))
        second = self.write_channel("deph3.json", dephasing(3))
        result = self.invoke("channel", "--measure", "dmax", "--input", first,
                             "--other", second)
        self.assertEqual(result.exit_code, EXIT_INPUT)

    def test_copies_rejected_outside_ec(self) -> None:
        """
        Tests that --copies is refused for measures other than ec-lb.
        """
        path = self.write_channel("id2.json", identity(2))
        result = self.invoke("channel", "--measure", "rob", "--input", path, "--copies", "2")
        self.assertEqual(result.exit_code, EXIT_INPUT)
        self.assertIn("copies", result.output)

    def test_ec_lower_bound_of_identity(self) -> None:
        """
        Tests that the one-copy bound of id_2 is 1 bit.
        """
        path = self.write_channel("id2.json", identity(2))
        result = self.invoke("channel", "--measure", "ec-lb", "--input", path, "--seed", "3",
                             "--output", self.path("out.json"))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        data = self.read_json("out.json")
        self.assertAlmostEqual(data["value"], 1.0, delta=1e-4)
        self.assertIn("finite-n lower bound", data["certificate"]["notes"])


class ReproCommandTest(CommandTestCase):
    """
    Test case for ``repro``.
    """

    def test_default_run(self) -> None:
        """
        Tests that the Omega3 report witnesses irreversibility and exits 0.
        """
        result = self.invoke("repro", "--output", self.path("report.json"),
                             "--emit-plot-data", self.path("plot.csv"))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        data = self.read_json("report.json")
        self.assertEqual(data["format"], "report-v1")
        self.assertTrue(data["flags"]["irreversibility_witnessed"])
        self.assertGreaterEqual(data["bounds"]["ec_lower_bound"], 1 - 1e-4)
        self.assertLessEqual(data["bounds"]["q_upper_bound"], 0.5850 + 1e-5)
        self.assertGreaterEqual(data["bounds"]["gap"], 1 - math.log2(1.5) - 1e-3)
        with open(self.path("plot.csv"), encoding="utf-8") as handle:
            lines = handle.read().splitlines()
        self.assertEqual(lines[0], "n,value")
        self.assertTrue(lines[1].startswith("1,"))

    def test_missed_criterion_exits_2(self) -> None:
        """
        Tests that a report without the irreversibility gap exits 2.
        """
        report = BoundReport("omega3", 0.5, 0.6, ((1, 0.5),), {})
        with mock.patch("commands.cli.irreversibility_report", return_value=report):
            result = self.invoke("repro", "--output", self.path("report.json"))
        self.assertEqual(result.exit_code, EXIT_FAILURE)
        self.assertIn("irreversibility not witnessed", result.output)

    def test_failed_certificate_exits_2(self) -> None:
        """
        Tests that a failed certificate fails the reproduction.
        """
        failed = mock.Mock(spec=VerifyReport, passed=False)
        failed.to_dict.return_value = {"passed": False}
        report = BoundReport("omega3", 1.0, 0.58, ((1, 1.0),), {"qcap": failed})
        with mock.patch("commands.cli.irreversibility_report", return_value=report):
            result = self.invoke("repro", "--output", self.path("report.json"))
        self.assertEqual(result.exit_code, EXIT_FAILURE)
        self.assertIn("certificate", result.output)

    def test_unsupported_copies(self) -> None:
        """
        Tests that --copies 3 is an input error.
        """
        result = self.invoke("repro", "--copies", "3")
        self.assertEqual(result.exit_code, EXIT_INPUT)
        self.assertIn("copies", result.output)


class CorpusTest(CommandTestCase):
    """
    Test case for the property corpus.
    """

    def test_sabotage_is_reported(self) -> None:
        """
        Tests that the corrupted diamond fixture fails the property.
        """
        honest = run_property("diamond", 0, 1, False)
        sabotaged = run_property("diamond", 0, 1, True)
        self.assertTrue(honest.passed)
        self.assertFalse(sabotaged.passed)
        self.assertLess(sabotaged.worst_margin, 0.0)

    def test_solver_failure_becomes_outcome(self) -> None:
        """
        Tests that a property stopped by a solver error is a failure, not a
        crash.
        """
        with mock.patch("commands.corpus.std_robustness_ppt", side_effect=SolverError("gap")):
            outcome = run_property("primal_dual_agreement", 0, 2, False)
        self.assertFalse(outcome.passed)
        self.assertEqual(outcome.error, "gap")

    def test_cheap_properties_hold(self) -> None:
        """
        Tests the properties that need no SDP at seeds 0, 1, 2.
        """
        for name in ("partial_transpose_involution", "truncation_error_monotone"):
            for seed in (0, 1, 2):
                with self.subTest(name=name, seed=seed):
                    self.assertTrue(run_property(name, seed, 10, False).passed)

    def test_command_with_sabotage(self) -> None:
        """
        Tests that ``corpus --sabotage`` exits 2 and names the diamond check.
        """
        result = self.invoke("corpus", "--seed", "0", "--size", "2", "--sabotage",
                             "--output", self.path("corpus.json"))
        self.assertEqual(result.exit_code, EXIT_FAILURE)
        data = self.read_json("corpus.json")
        self.assertEqual(data["format"], "corpus-v1")
        self.assertFalse(data["passed"])
        failed = [entry["name"] for entry in data["properties"] if not entry["passed"]]
        self.assertEqual(failed, ["diamond"])

    def test_command_rejects_zero_workers(self) -> None:
        """
        Tests that --workers 0 is an input error.
        """
        result = self.invoke("corpus", "--workers", "0")
        self.assertEqual(result.exit_code, EXIT_INPUT)
        self.assertIn("workers", result.output)

    @unittest.skipUnless(settings.RUN_SLOW_TESTS, "set TB_RUN_SLOW=True for the full corpus")
    def test_full_corpus(self) -> None:
        """
        Tests that every property holds at seeds 0, 1, 2 on 50 states.
        """
        result = self.invoke("corpus", "--output", self.path("corpus.json"))
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        self.assertEqual(len(self.read_json("corpus.json")["properties"]), 3 * len(PROPERTIES))

    @unittest.skipUnless(settings.RUN_SLOW_TESTS, "set TB_RUN_SLOW=True to run")
    def test_workers_keep_order(self) -> None:
        """
        Tests that worker processes give the same outcomes in the same order.
        """
        serial = run_corpus((0,), 2, False, workers=1)
        parallel = run_corpus((0,), 2, False, workers=2)
        self.assertEqual(serial, parallel)
