"""
Tests for the sdp app.

Test Cases:
    1. `SolverTest`: small problems with known optima, degenerate inputs,
       determinism and the infeasibility report.
    2. `EmbeddingTest`: the Hermitian embedding and its inverse.
    3. `VerifyTest`: certificates of honest and corrupted solutions.
    4. `BuilderTest`: the modelling front end, including the negativity
       program and its LMI multipliers.
    5. `SdpProblemSerializerTest`: the sdp-v1 dump.
"""
import unittest
from unittest import mock

import numpy as np
from numpy.testing import assert_allclose

from linalg.models import BipartiteOperator
from linalg.operations import partial_trace, partial_transpose, tensor
from tempered import settings
from tempered.exceptions import NonHermitianError, SolverError, ValidationError
from .builder import HermitianSdp
from .embedding import compress_hermitian, embed_hermitian
from .models import SdpProblem
from .serializers import SdpProblemSerializer
from .solver import default_tolerance, solve
from .verify import verify

PAULI_Y = np.array([[0, -1j], [1j, 0]])


def omega3_matrix() -> np.ndarray:
    vector = np.eye(3).reshape(-1) / np.sqrt(3)
    p3 = np.diag(np.eye(3).reshape(-1))
    return ((p3 - np.outer(vector, vector)) / 2).astype(np.complex128)


def top_eigenvalue_problem() -> SdpProblem:
    return SdpProblem.from_dense([(2, "psd")], [np.diag([1.0, -1.0])],
                                 [([np.eye(2)], 1.0)], sense="max", name="top-eigenvalue")


def shifted_identity_problem() -> SdpProblem:
    # min Tr X s.t. X >= I, written as X = I + W with W >= 0
    return SdpProblem.from_dense([(2, "psd")], [np.eye(2)], [], sense="min", offset=2.0,
                                 name="shifted-identity")


def negativity_program(rho: np.ndarray, dims, real: bool = False) -> HermitianSdp:
    n = rho.shape[0]
    sdp = HermitianSdp("negativity")
    x = sdp.hermitian(n, "X", real=real)
    sdp.psd(np.eye(n) - x.partial_transpose(dims), "upper")
    sdp.psd(np.eye(n) + x.partial_transpose(dims), "lower")
    sdp.maximize(x.inner(rho))
    return sdp


class SolverTest(unittest.TestCase):
    """
    Test case for `solve`.
    """

    def test_identity_lower_bound(self) -> None:
        """
        Tests min Tr X s.t. X >= I gives 2 at X = I.
        """
        solution = solve(shifted_identity_problem())
        self.assertEqual(solution.status, "optimal")
        self.assertAlmostEqual(solution.primal_value, 2.0, places=7)
        assert_allclose(solution.x[0], np.zeros((2, 2)), atol=1e-7)

    def test_identity_lower_bound_through_builder(self) -> None:
        """
        Tests the same program posed with a variable and an LMI.
        """
        sdp = HermitianSdp("identity-bound")
        x = sdp.hermitian(2, "X")
        sdp.psd(x - np.eye(2))
        sdp.minimize(x.trace())
        result = sdp.solve()
        self.assertAlmostEqual(result.value, 2.0, places=7)
        assert_allclose(result.value_of(x), np.eye(2), atol=1e-6)

    def test_top_eigenvalue(self) -> None:
        """
        Tests max Tr(diag(1,-1) X) s.t. Tr X = 1 gives 1.
        """
        solution = solve(top_eigenvalue_problem())
        self.assertEqual(solution.status, "optimal")
        self.assertAlmostEqual(solution.primal_value, 1.0, places=7)
        self.assertAlmostEqual(solution.dual_value, 1.0, places=7)
        self.assertAlmostEqual(solution.y[0], 1.0, places=6)

    def test_nonnegative_block(self) -> None:
        """
        Tests an LP with one nonnegative block.
        """
        problem = SdpProblem.from_dense([(2, "nonneg")], [np.array([1.0, 2.0])],
                                        [([np.array([1.0, 1.0])], 1.0)], sense="max")
        solution = solve(problem)
        self.assertEqual(solution.status, "optimal")
        self.assertAlmostEqual(solution.primal_value, 2.0, places=7)

    def test_zero_objective(self) -> None:
        """
        Tests that a pure feasibility problem terminates as optimal.
        """
        problem = SdpProblem.from_dense([(3, "psd")], [np.zeros((3, 3))],
                                        [([np.eye(3)], 1.0)])
        solution = solve(problem)
        self.assertEqual(solution.status, "optimal")
        self.assertAlmostEqual(solution.primal_value, 0.0, places=7)

    def test_single_feasible_point(self) -> None:
        """
        Tests a problem whose feasible set is the single point x = 0.
        """
        problem = SdpProblem.from_dense([(1, "nonneg")], [np.array([1.0])],
                                        [([np.array([1.0])], 0.0)])
        solution = solve(problem)
        self.assertEqual(solution.status, "optimal")
        self.assertAlmostEqual(solution.primal_value, 0.0, places=7)

    def test_infeasible_is_not_optimal(self) -> None:
        """
        Tests that Tr X = -1, X >= 0 is never reported as optimal.
        """
        problem = SdpProblem.from_dense([(2, "psd")], [np.eye(2)], [([np.eye(2)], -1.0)])
        solution = solve(problem, max_iter=100)
        self.assertNotEqual(solution.status, "optimal")

    def test_determinism(self) -> None:
        """
        Tests that repeated solves agree bit for bit.
        """
        first = negativity_program(omega3_matrix(), (3, 3)).solve()
        second = negativity_program(omega3_matrix(), (3, 3)).solve()
        self.assertEqual(first.solution.iterations, second.solution.iterations)
        self.assertEqual(first.value, second.value)
        self.assertTrue(np.array_equal(first.solution.y, second.solution.y))

    def test_rejects_bad_block_structure(self) -> None:
        """
        Tests that a constraint block of the wrong shape is rejected.
        """
        with self.assertRaises(ValidationError):
            SdpProblem.from_dense([(2, "psd")], [np.eye(2)], [([np.eye(3)], 1.0)])
        with self.assertRaises(ValidationError):
            SdpProblem.from_dense([(2, "cone")], [np.eye(2)])

    def test_rejects_non_positive_tolerance(self) -> None:
        """
        Tests that tol <= 0 is rejected.
        """
        with self.assertRaises(ValidationError):
            solve(top_eigenvalue_problem(), tol=0.0)

    def test_tolerance_from_settings(self) -> None:
        """
        Tests that the default tolerance is settings.SDP_TOL.
        """
        with mock.patch.object(settings, "SDP_TOL", 1e-6):
            self.assertEqual(default_tolerance(), 1e-6)
            self.assertEqual(solve(top_eigenvalue_problem()).tolerance, 1e-6)
        with mock.patch.object(settings, "SDP_TOL", -1.0):
            with self.assertRaises(ValidationError) as ctx:
                default_tolerance()
        self.assertEqual(ctx.exception.field, "TB_SDP_TOL")


class EmbeddingTest(unittest.TestCase):
    """
    Test case for `embed_hermitian` and `compress_hermitian`.
    """

    def test_real_symmetric(self) -> None:
        """
        Tests that a real symmetric H embeds as diag(H, H).
        """
        h = np.array([[2.0, 1.0], [1.0, -1.0]])
        expected = np.zeros((4, 4))
        expected[:2, :2] = h
        expected[2:, 2:] = h
        assert_allclose(embed_hermitian(h), expected)

    def test_pauli_y(self) -> None:
        """
        Tests that the embedding of Pauli-Y has eigenvalues (-1,-1,1,1).
        """
        assert_allclose(np.linalg.eigvalsh(embed_hermitian(PAULI_Y)), [-1, -1, 1, 1],
                        atol=1e-14)

    def test_trace_and_inner_product_double(self) -> None:
        """
        Tests Tr embed(H) = 2 Tr H and <embed A, embed B> = 2 Re Tr(AB).
        """
        rng = np.random.default_rng(0)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        a, b = a + a.conj().T, b + b.conj().T
        self.assertAlmostEqual(np.trace(embed_hermitian(a)), 2 * np.trace(a).real)
        self.assertAlmostEqual(np.sum(embed_hermitian(a) * embed_hermitian(b)),
                               2 * np.trace(a @ b).real)

    def test_compress_inverts_embed(self) -> None:
        """
        Tests compress(embed(H)) = H.
        """
        assert_allclose(compress_hermitian(embed_hermitian(PAULI_Y)), PAULI_Y)

    def test_rejects_non_hermitian(self) -> None:
        """
        Tests that a non-Hermitian input is rejected.
        """
        with self.assertRaises(NonHermitianError):
            embed_hermitian(np.array([[0, 1], [0, 0]]))


class VerifyTest(unittest.TestCase):
    """
    Test case for `verify`.
    """

    def test_passes_on_honest_solution(self) -> None:
        """
        Tests that a fresh solve verifies.
        """
        problem = shifted_identity_problem()
        report = verify(problem, solve(problem))
        self.assertTrue(report.passed)
        self.assertEqual(report.failures, ())

    def test_corrupted_primal_fails_gap_only(self) -> None:
        """
        Tests that X + 0.1 I stays feasible but fails the gap check.
        """
        problem = shifted_identity_problem()
        solution = solve(problem)
        corrupted = solution.with_x([solution.x[0] + 0.1 * np.eye(2)])
        report = verify(problem, corrupted)
        self.assertTrue(report.check("primal_residual").passed)
        self.assertTrue(report.check("primal_cone").passed)
        self.assertFalse(report.check("gap").passed)
        self.assertFalse(report.passed)

    def test_sign_flipped_dual_is_detected(self) -> None:
        """
        Tests that negating y breaks dual feasibility.
        """
        problem = top_eigenvalue_problem()
        solution = solve(problem)
        report = verify(problem, solution.with_y(-solution.y))
        self.assertFalse(report.check("dual_cone").passed)
        self.assertFalse(report.passed)

    def test_certificate_dict(self) -> None:
        """
        Tests the JSON-ready certificate fields.
        """
        problem = top_eigenvalue_problem()
        certificate = verify(problem, solve(problem)).to_dict()
        self.assertTrue(certificate["passed"])
        self.assertIn("gap", certificate)
        self.assertEqual(set(certificate["residuals"]), {"primal", "dual"})


class BuilderTest(unittest.TestCase):
    """
    Test case for `HermitianSdp`.
    """

    def test_negativity_of_omega3(self) -> None:
        """
        Tests that the negativity program of omega3 gives 2, not 4.
        """
        result = negativity_program(omega3_matrix(), (3, 3)).solve()
        self.assertAlmostEqual(result.value, 2.0, delta=1e-6)
        self.assertTrue(result.report.passed)
        embedded = [block.size for block in result.problem.blocks]
        self.assertEqual(embedded, [18, 18])

    def test_real_variable_uses_real_blocks(self) -> None:
        """
        Tests the real symmetric variant of the same program.
        """
        result = negativity_program(omega3_matrix(), (3, 3), real=True).solve()
        self.assertAlmostEqual(result.value, 2.0, delta=1e-6)
        self.assertEqual([block.size for block in result.problem.blocks], [9, 9])

    def test_multipliers_reproduce_partial_transpose(self) -> None:
        """
        Tests that the LMI multipliers satisfy P - Q = rho^Gamma and
        Tr(P + Q) = N(rho).
        """
        rho = omega3_matrix()
        result = negativity_program(rho, (3, 3)).solve()
        upper, lower = result.multiplier("upper"), result.multiplier("lower")
        expected = partial_transpose(BipartiteOperator(3, 3, rho)).matrix
        assert_allclose(upper - lower, expected, atol=1e-6)
        self.assertAlmostEqual(np.trace(upper + lower).real, 2.0, delta=1e-6)

    def test_expression_operations(self) -> None:
        """
        Tests partial trace, congruence and identity padding of expressions
        against the dense implementations.
        """
        rng = np.random.default_rng(3)
        sdp = HermitianSdp("expressions")
        x = sdp.hermitian(6, "X")
        sdp.psd(np.eye(6) - x)
        sdp.psd(np.eye(6) + x)
        target = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        sdp.maximize(x.inner((target + target.conj().T) / 2))
        result = sdp.solve()
        value = result.value_of(x)
        op = BipartiteOperator(2, 3, value)
        assert_allclose(result.value_of(x.partial_trace((2, 3), "A")),
                        partial_trace(op, "A"), atol=1e-10)
        assert_allclose(result.value_of(x.partial_trace((2, 3), "B")),
                        partial_trace(op, "B"), atol=1e-10)
        v = rng.normal(size=(4, 6))
        assert_allclose(result.value_of(x.congruence(v)), v @ value @ v.T, atol=1e-10)
        assert_allclose(result.value_of(x.tensor_identity(2, 1)), tensor(np.eye(2), value),
                        atol=1e-10)
        assert_allclose(result.value_of(x.tensor_identity(1, 3)), tensor(value, np.eye(3)),
                        atol=1e-10)

    def test_scalar_variables_and_nonneg(self) -> None:
        """
        Tests max s s.t. 1 - s >= 0 and s I - Z >= 0 style constraints.
        """
        sdp = HermitianSdp("scalar")
        s = sdp.real("s")
        sdp.nonneg(1.0 - s, "cap")
        sdp.psd(s.times(np.eye(2)) + np.diag([0.0, 1.0]), "floor")
        sdp.maximize(2.0 * s + 0.5)
        result = sdp.solve()
        self.assertAlmostEqual(result.value, 2.5, places=6)
        self.assertAlmostEqual(result.value_of(s), 1.0, places=6)
        self.assertAlmostEqual(result.multiplier("cap"), 2.0, places=5)

    def test_unconstrained_variable_is_rejected(self) -> None:
        """
        Tests that a variable outside every constraint is reported.
        """
        sdp = HermitianSdp("loose")
        x = sdp.hermitian(2, "X")
        sdp.real("dangling")
        sdp.psd(np.eye(2) - x)
        sdp.maximize(x.trace())
        with self.assertRaises(ValidationError):
            sdp.compile()

    def test_unbounded_program_raises(self) -> None:
        """
        Tests that a program with no certificate raises SolverError.
        """
        sdp = HermitianSdp("unbounded")
        s = sdp.real("s")
        sdp.nonneg(s)
        sdp.maximize(s)
        with self.assertRaises(SolverError):
            sdp.solve(max_iter=60)


class SdpProblemSerializerTest(unittest.TestCase):
    """
    Test case for the sdp-v1 dump.
    """

    def test_dump_and_resolve(self) -> None:
        """
        Tests that a dumped problem parses and solves to the same value.
        """
        serializer = SdpProblemSerializer()
        problem, _ = negativity_program(omega3_matrix(), (3, 3)).compile()
        parsed = serializer.loads(serializer.dumps(problem))
        self.assertEqual(parsed.sense, problem.sense)
        self.assertEqual(parsed.num_constraints, problem.num_constraints)
        self.assertAlmostEqual(solve(parsed).dual_value, 2.0, delta=1e-6)

    def test_rejects_missing_field(self) -> None:
        """
        Tests that a dump without b names the field.
        """
        serializer = SdpProblemSerializer()
        data = dict(SdpProblemSerializer(top_eigenvalue_problem()).data)
        del data["b"]
        with self.assertRaises(ValidationError) as ctx:
            serializer.parse(data)
        self.assertEqual(ctx.exception.field, "b")
