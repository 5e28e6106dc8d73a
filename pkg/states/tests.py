"""
Tests for the states app.

Test Cases:
    1. `ConstructorTest`: Phi_d, omega3, sigma_pm, two_copy and the random
       corpus.
    2. `DensityOperatorTest`: construction-time validation.
    3. `NegativityTest`: closed-form negativity and its witness.
    4. `TemperedNegativityTest`: the tempered negativity program and its
       witness.
    5. `RobustnessTest`: standard and tempered PPT robustness, cone
       selection and the perturbation bound.
    6. `CorpusPropertyTest`: inequalities between the monotones on a seeded
       random corpus.
    7. `EvaluateTest`: measure dispatch.
    8. `StateSerializerTest`: state files and the result-v1 format.

Tests marked slow (the 81 x 81 two-copy program, the full 50-state corpus)
run only with TB_RUN_SLOW=True.
"""
import math
import unittest

import numpy as np
from numpy.testing import assert_allclose

from linalg.models import BipartiteOperator
from linalg.operations import is_psd, partial_trace, partial_transpose, tensor
from linalg.serializers import CmatSerializer
from tempered import settings
from tempered.exceptions import (DimensionMismatchError, NotSdpRepresentableError,
                                 ValidationError)
from .constructors import (depolarize, haar_pure_state, max_entangled, maximally_mixed, omega3,
                           product_state, random_state_corpus, sigma_pm, two_copy)
from .models import DensityOperator
from .monotones import (evaluate, log_negativity, negativity, negativity_witness,
                        std_robustness, std_robustness_ppt, tempered_log_negativity,
                        tempered_negativity, tempered_robustness, tempered_robustness_ppt)
from .serializers import DensityOperatorSerializer, MonotoneResultSerializer

KET0 = np.array([[1, 0], [0, 0]])
KET_PLUS = np.full((2, 2), 0.5)
CORPUS_SIZE = 50 if settings.RUN_SLOW_TESTS else 10
# omega3 is at trace distance 7/9 * p from its depolarised version at level p
OMEGA3_NOISE_DISTANCE = 7 / 9


class ConstructorTest(unittest.TestCase):
    """
    Test case for the state constructors.
    """

    def test_max_entangled_qubit(self) -> None:
        """
        Tests the four entries 1/2 of Phi_2.
        """
        expected = np.zeros((4, 4))
        for row in (0, 3):
            for col in (0, 3):
                expected[row, col] = 0.5
        assert_allclose(max_entangled(2).matrix, expected, atol=1e-15)

    def test_max_entangled_marginal_and_projector(self) -> None:
        """
        Tests Tr_B Phi_d = 1/d and Phi_d^2 = Phi_d.
        """
        for d in (2, 3, 4):
            phi = max_entangled(d)
            assert_allclose(partial_trace(phi.op, "A"), np.eye(d) / d, atol=1e-15)
            assert_allclose(phi.matrix @ phi.matrix, phi.matrix, atol=1e-15)

    def test_rejects_small_dimension(self) -> None:
        """
        Tests that d < 2 is rejected.
        """
        with self.assertRaises(ValidationError):
            max_entangled(1)
        with self.assertRaises(ValidationError):
            sigma_pm(1)

    def test_omega3(self) -> None:
        """
        Tests Tr omega3 = 1, omega3 >= 0 and ||omega3^Gamma||_1 = 2.
        """
        state = omega3()
        self.assertAlmostEqual(np.trace(state.matrix).real, 1.0)
        self.assertTrue(is_psd(state.matrix, 1e-12))
        assert_allclose(np.linalg.eigvalsh(state.matrix)[-2:], [0.5, 0.5], atol=1e-14)
        self.assertFalse(state.is_ppt())

    def test_sigma_pm(self) -> None:
        """
        Tests d sigma_+ - (d-1) sigma_- = Phi_d and that both are PPT states.
        """
        for d in (2, 3):
            plus, minus = sigma_pm(d)
            assert_allclose(d * plus.matrix - (d - 1) * minus.matrix, max_entangled(d).matrix,
                            atol=1e-14)
            for state in (plus, minus):
                self.assertAlmostEqual(np.trace(state.matrix).real, 1.0)
                self.assertTrue(state.is_ppt())

    def test_two_copy_of_phi2_is_phi4(self) -> None:
        """
        Tests that Phi_2 (x) Phi_2 regrouped as (AA')(BB') is Phi_4.
        """
        joint = two_copy(max_entangled(2))
        self.assertEqual(joint.dims, (4, 4))
        assert_allclose(joint.matrix, max_entangled(4).matrix, atol=1e-15)

    def test_product_and_mixed(self) -> None:
        """
        Tests product_state and maximally_mixed.
        """
        state = product_state(KET0, KET_PLUS)
        assert_allclose(state.matrix, tensor(KET0, KET_PLUS))
        self.assertTrue(state.is_ppt())
        assert_allclose(maximally_mixed(2, 3).matrix, np.eye(6) / 6)

    def test_random_corpus_is_reproducible(self) -> None:
        """
        Tests that the corpus depends on the seed only and cycles dimensions.
        """
        first = random_state_corpus(0, 6)
        second = random_state_corpus(0, 6)
        other = random_state_corpus(1, 6)
        for a, b in zip(first, second):
            self.assertTrue(np.array_equal(a.matrix, b.matrix))
        self.assertFalse(np.allclose(first[0].matrix, other[0].matrix))
        self.assertEqual([s.dims for s in first], [(2, 2), (3, 3)] * 3)
        # states 0 and 1 are pure, 2 and 3 carry noise 0.3
        self.assertAlmostEqual(np.trace(first[0].matrix @ first[0].matrix).real, 1.0)
        self.assertLess(np.trace(first[2].matrix @ first[2].matrix).real, 1.0)

    def test_depolarize_rejects_bad_level(self) -> None:
        """
        Tests that noise levels outside [0, 1] are rejected.
        """
        with self.assertRaises(ValidationError):
            depolarize(omega3(), 1.5)


class DensityOperatorTest(unittest.TestCase):
    """
    Test case for `DensityOperator` validation.
    """

    def test_rejects_wrong_trace(self) -> None:
        """
        Tests that a trace-2 operator is rejected.
        """
        with self.assertRaises(ValidationError):
            DensityOperator.from_matrix(np.eye(4) / 2, 2, 2)

    def test_rejects_negative_eigenvalue(self) -> None:
        """
        Tests that diag(1.5, -0.5) is rejected.
        """
        with self.assertRaises(ValidationError):
            DensityOperator.from_matrix(np.diag([1.5, -0.5]), 1, 2)

    def test_accepts_rounding_noise(self) -> None:
        """
        Tests that perturbations below 1e-10 are tolerated.
        """
        state = DensityOperator.from_matrix(np.diag([1.0 + 1e-12, -1e-12, 0, 0]), 2, 2)
        self.assertEqual(state.dims, (2, 2))


class NegativityTest(unittest.TestCase):
    """
    Test case for `negativity` and `log_negativity`.
    """

    def test_values(self) -> None:
        """
        Tests product -> 1, Phi_d -> d and omega3 -> 2.
        """
        self.assertAlmostEqual(negativity(product_state(KET0, KET_PLUS)), 1.0, places=12)
        for d in (2, 3, 4):
            self.assertAlmostEqual(negativity(max_entangled(d)), d, places=12)
        self.assertAlmostEqual(negativity(omega3()), 2.0, places=12)

    def test_log_values(self) -> None:
        """
        Tests product -> 0, Phi_2 -> 1 and omega3 -> 1.
        """
        self.assertAlmostEqual(log_negativity(product_state(KET0, KET_PLUS)), 0.0, places=12)
        self.assertAlmostEqual(log_negativity(max_entangled(2)), 1.0, places=12)
        self.assertAlmostEqual(log_negativity(omega3()), 1.0, places=12)

    def test_witness(self) -> None:
        """
        Tests that the closed-form witness has ||X^Gamma|| = 1 and attains N.
        """
        rho = omega3()
        x = negativity_witness(rho)
        self.assertAlmostEqual(np.max(np.abs(np.linalg.eigvalsh(partial_transpose(x).matrix))),
                               1.0, places=12)
        self.assertAlmostEqual(np.trace(x.matrix @ rho.matrix).real, 2.0, places=12)


class TemperedNegativityTest(unittest.TestCase):
    """
    Test case for `tempered_negativity`.
    """

    def test_omega3(self) -> None:
        """
        Tests N_tau(omega3) = 2 and E^tau_N(omega3) = 1.
        """
        value, witness = tempered_negativity(omega3())
        self.assertAlmostEqual(value, 2.0, delta=1e-5)
        self.assertTrue(witness.is_valid)
        self.assertTrue(witness.certificate.passed)
        self.assertAlmostEqual(witness.check(omega3()), value, delta=1e-7)
        self.assertAlmostEqual(tempered_log_negativity(omega3()), 1.0, delta=1e-5)

    def test_max_entangled(self) -> None:
        """
        Tests N_tau(Phi_d) = d for d = 2, 3.
        """
        for d in (2, 3):
            value, witness = tempered_negativity(max_entangled(d))
            self.assertAlmostEqual(value, d, delta=1e-6)
            self.assertAlmostEqual(witness.anchor_value, d, delta=1e-6)
        self.assertAlmostEqual(tempered_log_negativity(max_entangled(2)), 1.0, delta=1e-6)

    def test_separable(self) -> None:
        """
        Tests that separable states give 1.
        """
        for rho in (product_state(KET0, KET_PLUS), sigma_pm(3)[0], maximally_mixed(2, 2)):
            value, _ = tempered_negativity(rho)
            self.assertAlmostEqual(value, 1.0, delta=1e-6)
        self.assertAlmostEqual(tempered_log_negativity(sigma_pm(2)[1]), 0.0, delta=1e-6)

    def test_full_rank_anchor(self) -> None:
        """
        Tests that a full-rank anchor forces X = s 1 and the value 1.
        """
        value, witness = tempered_negativity(max_entangled(2), maximally_mixed(2, 2))
        self.assertAlmostEqual(value, 1.0, delta=1e-6)
        assert_allclose(witness.x.matrix, np.eye(4), atol=1e-6)

    def test_bounded_by_negativity(self) -> None:
        """
        Tests N_tau(rho | omega) <= N(rho) for cross-anchored pairs.
        """
        corpus = random_state_corpus(5, 4)
        for rho, omega in ((corpus[0], corpus[2]), (corpus[1], corpus[3]),
                           (max_entangled(3), omega3())):
            value, _ = tempered_negativity(rho, omega)
            self.assertLessEqual(value, negativity(rho) + 1e-6)

    def test_rejects_mismatched_anchor(self) -> None:
        """
        Tests that the anchor must live on the same space.
        """
        with self.assertRaises(DimensionMismatchError):
            tempered_negativity(omega3(), max_entangled(2))

    def test_supermultiplicativity_two_qubits(self) -> None:
        """
        Tests N_tau(rho (x) rho) >= N_tau(rho)^2 on random two-qubit states.
        """
        rng = np.random.default_rng(17)
        count = 5 if settings.RUN_SLOW_TESTS else 2
        for _ in range(count):
            rho = depolarize(haar_pure_state(2, 2, rng), 0.2)
            single, _ = tempered_negativity(rho)
            double, _ = tempered_negativity(two_copy(rho))
            self.assertGreaterEqual(double, single ** 2 - 1e-4)

    @unittest.skipUnless(settings.RUN_SLOW_TESTS, "set TB_RUN_SLOW=True for the 81 x 81 program")
    def test_supermultiplicativity_omega3(self) -> None:
        """
        Tests N_tau(omega3 (x) omega3) >= 4 (1 - 1e-3).
        """
        value, witness = tempered_negativity(two_copy(omega3()))
        self.assertGreaterEqual(value, 4 * (1 - 1e-3))
        self.assertTrue(witness.is_valid)


class RobustnessTest(unittest.TestCase):
    """
    Test case for the standard and tempered PPT robustness.
    """

    def test_ppt_state(self) -> None:
        """
        Tests that PPT states have zero robustness.
        """
        for rho in (sigma_pm(3)[0], product_state(KET0, KET_PLUS)):
            value, delta = std_robustness_ppt(rho)
            self.assertAlmostEqual(value, 0.0, delta=1e-6)
            self.assertAlmostEqual(np.trace(delta.matrix).real, value, delta=1e-6)
            self.assertAlmostEqual(tempered_robustness_ppt(rho), 0.0, delta=1e-6)

    def test_max_entangled(self) -> None:
        """
        Tests R^s(Phi_d) = d - 1 with a PSD optimal delta.
        """
        for d in (2, 3):
            value, delta = std_robustness_ppt(max_entangled(d))
            self.assertAlmostEqual(value, d - 1, delta=1e-5)
            self.assertTrue(is_psd(delta.matrix, 1e-7))

    def test_tempered_lower_bounds(self) -> None:
        """
        Tests R^tau(Phi_d) >= (d - 1) / 2 and R^tau(omega3) >= 1/2, each also
        above (N_tau - 1) / 2.
        """
        cases = [(max_entangled(2), 0.5), (max_entangled(3), 1.0), (omega3(), 0.5)]
        for rho, bound in cases:
            with self.subTest(dims=rho.dims, bound=bound):
                value = tempered_robustness_ppt(rho)
                self.assertGreaterEqual(value, bound - 1e-6)
                self.assertGreaterEqual(value, (tempered_negativity(rho)[0] - 1) / 2 - 1e-6)

    def test_omega3(self) -> None:
        """
        Tests R^tau(omega3) <= R^s(omega3) and R^s(omega3) >= (N - 1)/2.
        """
        standard, _ = std_robustness_ppt(omega3())
        tempered = tempered_robustness_ppt(omega3())
        self.assertLessEqual(tempered, standard + 1e-6)
        self.assertGreaterEqual(standard, (negativity(omega3()) - 1) / 2 - 1e-6)

    def test_cone_selection(self) -> None:
        """
        Tests that the separable cone is refused and unknown cones rejected.
        """
        with self.assertRaises(NotSdpRepresentableError):
            std_robustness(omega3(), cone="sep")
        with self.assertRaises(NotSdpRepresentableError):
            tempered_robustness(omega3(), cone="sep")
        with self.assertRaises(ValidationError):
            std_robustness(omega3(), cone="dps")
        value, _ = std_robustness(max_entangled(2), cone="PPT")
        self.assertAlmostEqual(value, 1.0, delta=1e-5)

    def test_perturbation_bound(self) -> None:
        """
        Tests 1 + 2 R^tau(rho' | rho) >= (1 - 2 eps)(1 + 2 R^tau(rho)) for
        depolarised omega3 at trace distance eps.
        """
        rho = omega3()
        base = 1 + 2 * tempered_robustness_ppt(rho)
        for eps in (0.01, 0.05):
            nearby = depolarize(rho, eps / OMEGA3_NOISE_DISTANCE)
            distance = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(rho.matrix - nearby.matrix)))
            self.assertAlmostEqual(distance, eps, places=10)
            shifted = 1 + 2 * tempered_robustness_ppt(nearby, rho)
            self.assertGreaterEqual(shifted, (1 - 2 * eps) * base - 1e-6)


class CorpusPropertyTest(unittest.TestCase):
    """
    Test case for the monotone inequalities on a seeded random corpus.
    """

    def test_monotone_inequalities(self) -> None:
        """
        Tests N_tau <= N, R^tau >= (N_tau - 1)/2 and R^tau <= R^s.
        """
        for rho in random_state_corpus(0, CORPUS_SIZE):
            with self.subTest(rho=str(rho)):
                n_tau, _ = tempered_negativity(rho)
                r_tau = tempered_robustness_ppt(rho)
                r_std, _ = std_robustness_ppt(rho)
                self.assertLessEqual(n_tau, negativity(rho) + 1e-6)
                self.assertGreaterEqual(r_tau, (n_tau - 1) / 2 - 1e-6)
                self.assertLessEqual(r_tau, r_std + 1e-6)


class EvaluateTest(unittest.TestCase):
    """
    Test case for `evaluate`.
    """

    def test_dispatch(self) -> None:
        """
        Tests the closed-form and SDP measures by name.
        """
        self.assertAlmostEqual(evaluate("neg", omega3()).value, 2.0, places=10)
        self.assertAlmostEqual(evaluate("logneg", max_entangled(2)).value, 1.0, places=10)
        result = evaluate("tneg", omega3())
        self.assertAlmostEqual(result.value, 2.0, delta=1e-5)
        self.assertTrue(result.passed)
        self.assertEqual(len(result.reports), 1)
        rob = evaluate("rob", max_entangled(3))
        self.assertAlmostEqual(rob.value, 2.0, delta=1e-5)
        self.assertEqual(len(rob.reports), 2)

    def test_rejects_unknown_measure(self) -> None:
        """
        Tests the diagnostic for an unknown measure.
        """
        with self.assertRaises(ValidationError) as ctx:
            evaluate("entropy", omega3())
        self.assertEqual(ctx.exception.field, "measure")

    def test_rejects_anchor_for_plain_measure(self) -> None:
        """
        Tests that only tempered measures accept an anchor.
        """
        with self.assertRaises(ValidationError) as ctx:
            evaluate("neg", omega3(), omega3())
        self.assertEqual(ctx.exception.field, "anchor")


class StateSerializerTest(unittest.TestCase):
    """
    Test case for `DensityOperatorSerializer` and `MonotoneResultSerializer`.
    """

    def test_state_file(self) -> None:
        """
        Tests that a written state parses back to the same state.
        """
        serializer = DensityOperatorSerializer()
        parsed = serializer.loads(serializer.dumps(omega3()))
        self.assertEqual(parsed.dims, (3, 3))
        assert_allclose(parsed.matrix, omega3().matrix, atol=1e-12)

    def test_state_file_needs_dims(self) -> None:
        """
        Tests that a cmat-v1 file without dims is not a state.
        """
        text = CmatSerializer().dumps(np.eye(4) / 4)
        with self.assertRaises(ValidationError) as ctx:
            DensityOperatorSerializer().loads(text)
        self.assertEqual(ctx.exception.field, "dims")

    def test_state_file_rejects_non_states(self) -> None:
        """
        Tests that a valid matrix file with trace 2 is rejected.
        """
        text = CmatSerializer().dumps(BipartiteOperator(2, 2, np.eye(4) / 2))
        with self.assertRaises(ValidationError):
            DensityOperatorSerializer().loads(text)

    def test_result_file(self) -> None:
        """
        Tests the result-v1 fields and that the output is deterministic.
        """
        serializer = MonotoneResultSerializer()
        result = evaluate("tneg", max_entangled(2))
        text = serializer.dumps(result)
        self.assertEqual(text, serializer.dumps(result))
        parsed = serializer.loads(text)
        self.assertEqual(parsed["measure"], "tneg")
        self.assertAlmostEqual(parsed["value"], 2.0, delta=1e-6)
        self.assertTrue(parsed["certificate"]["passed"])
        self.assertEqual(parsed["witness"].dims, (2, 2))
        self.assertFalse(math.isnan(parsed["certificate"]["gap"]))
