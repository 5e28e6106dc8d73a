"""
Tests for the linalg app.

This module checks the tensor structure helpers, the spectral functions and
the cmat-v1 serializer against hand-computed values.

Test Cases:
    1. `TensorTest`: Kronecker product and its mixed-product property.
    2. `PartialTransposeTest`: entry rule, involution and the swap identity.
    3. `PartialTraceTest`: product states, maximally entangled marginals,
       linearity.
    4. `SpectralTest`: eigh, trace_norm, op_norm, is_psd and support_split.
    5. `BipartiteOperatorTest`: construction-time validation.
    6. `CmatSerializerTest`: parsing and rejection of malformed files.
"""
import json
import unittest

import numpy as np
from numpy.testing import assert_allclose

from tempered.exceptions import (DimensionMismatchError, NonHermitianError,
                                 ValidationError)
from .models import BipartiteOperator
from .operations import (eigh, is_hermitian, is_psd, ket, op_norm, partial_trace,
                         partial_transpose, permute_systems, projector, support_split,
                         swap_operator, tensor, trace_norm)
from .serializers import CmatSerializer, round_significant


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2


def phi(d: int) -> np.ndarray:
    vector = np.eye(d).reshape(-1) / np.sqrt(d)
    return np.outer(vector, vector).astype(np.complex128)


def omega3_matrix() -> np.ndarray:
    p3 = np.diag(np.eye(3).reshape(-1)).astype(np.complex128)
    return (p3 - phi(3)) / 2


class TensorTest(unittest.TestCase):
    """
    Test case for `tensor`.
    """

    def test_identities(self) -> None:
        """
        Tests that I2 (x) I3 is I6.
        """
        assert_allclose(tensor(np.eye(2), np.eye(3)), np.eye(6))

    def test_diagonal(self) -> None:
        """
        Tests diag(1,2) (x) diag(3,4) = diag(3,4,6,8).
        """
        assert_allclose(tensor(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))

    def test_mixed_product(self) -> None:
        """
        Tests (A (x) B)(C (x) D) = AC (x) BD on random 2x2 matrices.
        """
        rng = np.random.default_rng(7)
        a, b, c, d = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
        assert_allclose(tensor(a, b) @ tensor(c, d), tensor(a @ c, b @ d), atol=1e-12)


class PartialTransposeTest(unittest.TestCase):
    """
    Test case for `partial_transpose`.
    """

    def test_product_operator(self) -> None:
        """
        Tests (X (x) Y)^Gamma = X (x) Y^T.
        """
        rng = np.random.default_rng(1)
        x, y = random_hermitian(2, rng), random_hermitian(3, rng)
        result = partial_transpose(BipartiteOperator(2, 3, tensor(x, y)))
        assert_allclose(result.matrix, tensor(x, y.T), atol=1e-14)

    def test_entry_rule(self) -> None:
        """
        Tests (T^Gamma)_{(i,j),(k,l)} = T_{(i,l),(k,j)} on a 2x3 operator.
        """
        rng = np.random.default_rng(2)
        t = BipartiteOperator(2, 3, random_hermitian(6, rng))
        result = partial_transpose(t).matrix
        for i, j, k, l in [(0, 1, 1, 2), (1, 0, 0, 2), (1, 2, 1, 0)]:
            self.assertAlmostEqual(result[i * 3 + j, k * 3 + l], t.matrix[i * 3 + l, k * 3 + j])

    def test_involution(self) -> None:
        """
        Tests that transposing twice returns the original operator.
        """
        rng = np.random.default_rng(3)
        for dims in [(2, 2), (2, 3), (3, 3)]:
            t = BipartiteOperator(*dims, random_hermitian(dims[0] * dims[1], rng))
            twice = partial_transpose(partial_transpose(t))
            self.assertLessEqual(np.max(np.abs(twice.matrix - t.matrix)), 1e-15)
            twice_a = partial_transpose(partial_transpose(t, "A"), "A")
            assert_allclose(twice_a.matrix, t.matrix)

    def test_maximally_entangled_gives_swap(self) -> None:
        """
        Tests Phi_3^Gamma = F / 3.
        """
        result = partial_transpose(BipartiteOperator(3, 3, phi(3)))
        assert_allclose(result.matrix, swap_operator(3) / 3, atol=1e-15)

    def test_transpose_of_a_equals_full_transpose_of_b(self) -> None:
        """
        Tests T^{T_A} = (T^{T_B})^T.
        """
        rng = np.random.default_rng(4)
        t = BipartiteOperator(2, 3, random_hermitian(6, rng))
        assert_allclose(partial_transpose(t, "A").matrix, partial_transpose(t).matrix.T)

    def test_bad_subsystem(self) -> None:
        """
        Tests that an unknown subsystem name is rejected.
        """
        with self.assertRaises(ValidationError):
            partial_transpose(BipartiteOperator(2, 2, np.eye(4)), "C")


class PartialTraceTest(unittest.TestCase):
    """
    Test case for `partial_trace`.
    """

    def test_product(self) -> None:
        """
        Tests Tr_B(rho (x) sigma) = rho Tr(sigma).
        """
        rng = np.random.default_rng(5)
        rho, sigma = random_hermitian(2, rng), random_hermitian(3, rng)
        t = BipartiteOperator(2, 3, tensor(rho, sigma))
        assert_allclose(partial_trace(t, "A"), rho * np.trace(sigma), atol=1e-13)
        assert_allclose(partial_trace(t, "B"), sigma * np.trace(rho), atol=1e-13)

    def test_maximally_entangled_marginal(self) -> None:
        """
        Tests Tr_B Phi_d = I / d.
        """
        for d in (2, 3, 4):
            assert_allclose(partial_trace(BipartiteOperator(d, d, phi(d)), "A"),
                            np.eye(d) / d, atol=1e-15)

    def test_trace_preserved(self) -> None:
        """
        Tests that tracing out either side keeps the trace.
        """
        rng = np.random.default_rng(6)
        t = BipartiteOperator(3, 2, random_hermitian(6, rng))
        self.assertAlmostEqual(np.trace(partial_trace(t, "A")), np.trace(t.matrix))
        self.assertAlmostEqual(np.trace(partial_trace(t, "B")), np.trace(t.matrix))

    def test_linearity(self) -> None:
        """
        Tests Tr_B(aS + bT) = a Tr_B S + b Tr_B T.
        """
        rng = np.random.default_rng(8)
        s = BipartiteOperator(2, 3, random_hermitian(6, rng))
        t = BipartiteOperator(2, 3, random_hermitian(6, rng))
        combined = BipartiteOperator(2, 3, 0.3 * s.matrix - 1.7 * t.matrix)
        expected = 0.3 * partial_trace(s) - 1.7 * partial_trace(t)
        self.assertLessEqual(np.max(np.abs(partial_trace(combined) - expected)), 1e-12)


class PermuteSystemsTest(unittest.TestCase):
    """
    Test case for `permute_systems`.
    """

    def test_swap_factors(self) -> None:
        """
        Tests that swapping two factors turns X (x) Y into Y (x) X.
        """
        rng = np.random.default_rng(9)
        x, y = random_hermitian(2, rng), random_hermitian(3, rng)
        assert_allclose(permute_systems(tensor(x, y), [2, 3], [1, 0]), tensor(y, x))

    def test_three_factors(self) -> None:
        """
        Tests a cyclic permutation of three factors.
        """
        rng = np.random.default_rng(10)
        x, y, z = random_hermitian(2, rng), random_hermitian(3, rng), random_hermitian(2, rng)
        result = permute_systems(tensor(tensor(x, y), z), [2, 3, 2], [2, 0, 1])
        assert_allclose(result, tensor(tensor(z, x), y), atol=1e-13)

    def test_rejects_bad_order(self) -> None:
        """
        Tests that a non-permutation is rejected.
        """
        with self.assertRaises(ValidationError):
            permute_systems(np.eye(4), [2, 2], [0, 0])


class SpectralTest(unittest.TestCase):
    """
    Test case for `eigh`, `trace_norm`, `op_norm` and `is_psd`.
    """

    def test_eigh_diagonal(self) -> None:
        """
        Tests ascending eigenvalues of diag(3,1,2).
        """
        values, _ = eigh(np.diag([3.0, 1.0, 2.0]))
        assert_allclose(values, [1.0, 2.0, 3.0])

    def test_eigh_pauli_x(self) -> None:
        """
        Tests the spectrum of Pauli-X.
        """
        values, _ = eigh(np.array([[0, 1], [1, 0]]))
        assert_allclose(values, [-1.0, 1.0])

    def test_eigh_random(self) -> None:
        """
        Tests the trace identity, reconstruction and unitarity on a random matrix.
        """
        h = random_hermitian(7, np.random.default_rng(11))
        values, vectors = eigh(h)
        self.assertAlmostEqual(np.sum(values), np.trace(h).real, delta=1e-10)
        assert_allclose(vectors @ np.diag(values) @ vectors.conj().T, h, atol=1e-10)
        assert_allclose(vectors.conj().T @ vectors, np.eye(7), atol=1e-10)

    def test_eigh_rejects_non_hermitian(self) -> None:
        """
        Tests that a non-Hermitian matrix raises NonHermitianError.
        """
        with self.assertRaises(NonHermitianError):
            eigh(np.array([[0, 1], [0, 0]]))

    def test_eigh_symmetrises_small_defects(self) -> None:
        """
        Tests that asymmetry below the tolerance is accepted.
        """
        h = np.array([[1.0, 1e-14], [0.0, 2.0]])
        values, _ = eigh(h)
        assert_allclose(values, [1.0, 2.0], atol=1e-12)

    def test_is_hermitian(self) -> None:
        """
        Tests the relative Hermiticity tolerance.
        """
        self.assertTrue(is_hermitian(np.array([[1.0, 1j], [-1j, 2.0]])))
        self.assertTrue(is_hermitian(np.array([[1.0, 1e-14], [0.0, 2.0]])))
        self.assertFalse(is_hermitian(np.array([[1.0, 1.0], [0.0, 2.0]])))

    def test_ket_projector(self) -> None:
        """
        Tests that |i><i| is the diagonal unit matrix and that bad indices are
        refused.
        """
        assert_allclose(projector(ket(1, 3)), np.diag([0.0, 1.0, 0.0]))
        with self.assertRaises(ValidationError):
            ket(3, 3)

    def test_trace_norm(self) -> None:
        """
        Tests trace norms of a state, of omega3^Gamma and of Phi_d^Gamma.
        """
        self.assertAlmostEqual(trace_norm(omega3_matrix()), 1.0, places=12)
        pt = partial_transpose(BipartiteOperator(3, 3, omega3_matrix()))
        self.assertAlmostEqual(trace_norm(pt), 2.0, places=12)
        for d in (2, 3):
            pt = partial_transpose(BipartiteOperator(d, d, phi(d)))
            self.assertAlmostEqual(trace_norm(pt), float(d), places=12)

    def test_op_norm(self) -> None:
        """
        Tests operator norms of the identity, d Phi_d and the swap.
        """
        self.assertAlmostEqual(op_norm(np.eye(4)), 1.0)
        self.assertAlmostEqual(op_norm(3 * phi(3)), 3.0, places=12)
        self.assertAlmostEqual(op_norm(swap_operator(3)), 1.0, places=12)

    def test_norm_inequalities(self) -> None:
        """
        Tests trace_norm >= |Tr| and op_norm <= trace_norm on random matrices.
        """
        rng = np.random.default_rng(12)
        for _ in range(10):
            h = random_hermitian(5, rng)
            self.assertGreaterEqual(trace_norm(h) + 1e-12, abs(np.trace(h).real))
            self.assertLessEqual(op_norm(h), trace_norm(h) + 1e-12)

    def test_is_psd(self) -> None:
        """
        Tests is_psd on omega3, its partial transpose and the identity.
        """
        self.assertTrue(is_psd(omega3_matrix(), 1e-12))
        pt = partial_transpose(BipartiteOperator(3, 3, omega3_matrix()))
        self.assertFalse(is_psd(pt, 1e-12))
        self.assertTrue(is_psd(np.eye(3)))

    def test_support_split_of_omega3(self) -> None:
        """
        Tests that omega3 has a rank-two support and a sparse kernel basis.
        """
        support, kernel = support_split(omega3_matrix())
        self.assertEqual(support.shape, (9, 2))
        self.assertEqual(kernel.shape, (9, 7))
        assert_allclose(kernel.conj().T @ kernel, np.eye(7), atol=1e-12)
        assert_allclose(omega3_matrix() @ kernel, np.zeros((9, 7)), atol=1e-12)
        assert_allclose(support @ support.conj().T + kernel @ kernel.conj().T, np.eye(9),
                        atol=1e-12)
        # the six |ij>, i != j, are picked as they are
        self.assertGreaterEqual(np.sum(np.abs(kernel) > 0), 6)
        self.assertLess(np.sum(np.abs(kernel) > 0), 9 * 7)

    def test_support_split_full_rank(self) -> None:
        """
        Tests that a full-rank matrix has an empty kernel basis.
        """
        support, kernel = support_split(np.eye(4) / 4)
        self.assertEqual(support.shape, (4, 4))
        self.assertEqual(kernel.shape, (4, 0))


class BipartiteOperatorTest(unittest.TestCase):
    """
    Test case for `BipartiteOperator` validation.
    """

    def test_dimension_mismatch(self) -> None:
        """
        Tests that a 5x5 matrix cannot be tagged as 2x3.
        """
        with self.assertRaises(DimensionMismatchError):
            BipartiteOperator(2, 3, np.eye(5))

    def test_matrix_is_read_only(self) -> None:
        """
        Tests that the stored matrix cannot be written to.
        """
        op = BipartiteOperator(2, 2, np.eye(4))
        with self.assertRaises(ValueError):
            op.matrix[0, 0] = 2.0

    def test_rejects_nan(self) -> None:
        """
        Tests that NaN entries are rejected.
        """
        m = np.eye(4)
        m[1, 1] = np.nan
        with self.assertRaises(ValidationError):
            BipartiteOperator(2, 2, m)


class CmatSerializerTest(unittest.TestCase):
    """
    Test case for the cmat-v1 serializer.
    """

    def setUp(self) -> None:
        self.serializer = CmatSerializer()

    def test_bipartite_operator(self) -> None:
        """
        Tests that a file with dims parses to a BipartiteOperator.
        """
        op = BipartiteOperator(2, 2, phi(2))
        parsed = self.serializer.loads(self.serializer.dumps(op))
        self.assertIsInstance(parsed, BipartiteOperator)
        self.assertEqual(parsed.dims, (2, 2))
        assert_allclose(parsed.matrix, phi(2), atol=1e-12)

    def test_plain_matrix(self) -> None:
        """
        Tests that a file without dims parses to an array.
        """
        text = json.dumps({"format": "cmat-v1", "rows": 2, "cols": 2,
                           "re": [[1, 0], [0, 1]], "im": [[0, 0.5], [-0.5, 0]]})
        parsed = self.serializer.loads(text)
        self.assertIsInstance(parsed, np.ndarray)
        self.assertEqual(parsed[0, 1], 0.5j)

    def test_rejects_nan(self) -> None:
        """
        Tests that a NaN literal is rejected with the field named.
        """
        text = ('{"format": "cmat-v1", "rows": 1, "cols": 1, '
                '"re": [[NaN]], "im": [[0]]}')
        with self.assertRaises(ValidationError) as ctx:
            self.serializer.loads(text)
        self.assertEqual(ctx.exception.field, "json")

    def test_rejects_wrong_shape(self) -> None:
        """
        Tests that a short row names the 'im' field.
        """
        text = json.dumps({"format": "cmat-v1", "rows": 2, "cols": 2,
                           "re": [[1, 0], [0, 1]], "im": [[0, 0], [0]]})
        with self.assertRaises(ValidationError) as ctx:
            self.serializer.loads(text)
        self.assertEqual(ctx.exception.field, "im")

    def test_rejects_out_of_range_numbers(self) -> None:
        """
        Tests that entries beyond the float range name their position.
        """
        for entry in (10 ** 400, -10 ** 400):
            text = json.dumps({"format": "cmat-v1", "rows": 1, "cols": 1,
                               "re": [[entry]], "im": [[0]]})
            with self.assertRaises(ValidationError) as ctx:
                self.serializer.loads(text)
            self.assertEqual(ctx.exception.field, "re[0][0]")
        text = ('{"format": "cmat-v1", "rows": 1, "cols": 1, '
                '"re": [[1]], "im": [[1e400]]}')
        with self.assertRaises(ValidationError) as ctx:
            self.serializer.loads(text)
        self.assertEqual(ctx.exception.field, "im[0][0]")

    def test_rejects_non_numbers(self) -> None:
        """
        Tests that booleans and strings are not matrix entries or sizes.
        """
        base = {"format": "cmat-v1", "rows": 1, "cols": 1, "re": [[1]], "im": [[0]]}
        cases = [
            (dict(base, re=[[True]]), "re[0][0]"),
            (dict(base, im=[["0"]]), "im[0][0]"),
            (dict(base, rows="1"), "rows"),
            (dict(base, dims=[1]), "dims"),
        ]
        for data, field in cases:
            with self.subTest(field=field):
                with self.assertRaises(ValidationError) as ctx:
                    self.serializer.parse(data)
                self.assertEqual(ctx.exception.field, field)

    def test_rejects_wrong_format(self) -> None:
        """
        Tests that another format tag is rejected.
        """
        with self.assertRaises(ValidationError) as ctx:
            self.serializer.parse({"format": "chan-v1"})
        self.assertEqual(ctx.exception.field, "format")

    def test_round_significant(self) -> None:
        """
        Tests rounding to twelve significant digits.
        """
        self.assertEqual(round_significant(1 / 3), 0.333333333333)
        self.assertEqual(round_significant(-0.0), 0.0)
        self.assertEqual(round_significant(2.0000000000001), 2.0)
