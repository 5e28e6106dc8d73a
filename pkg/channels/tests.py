"""
Tests for the channels app.

Test Cases:
    1. `ChannelModelTest`: Kraus and Choi validation and interconversion.
    2. `ZooTest`: identity, dephasing, Omega3, Gamma_+-, unitary and
       replacement channels.
    3. `ApplyTest`: channel application through Kraus operators and through
       the Choi state, the adjoint, products and composition.
    4. `TruncateTest`: the rank-k truncation and the local projection map.
    5. `PptBindingTest`: the PPT test of Choi states.
    6. `DiamondTest`: the diamond-norm program and its metric properties.
    7. `ChannelSerializerTest`: the chan-v1 format.
"""
import itertools
import unittest

import numpy as np
from numpy.testing import assert_allclose

from linalg.models import BipartiteOperator
from linalg.operations import partial_trace, tensor, trace_norm
from linalg.serializers import CmatSerializer
from states.constructors import (haar_pure_state, max_entangled, correlated_projector, omega3,
                                 sigma_pm, two_copy)
from states.models import DensityOperator
from tempered.exceptions import DimensionMismatchError, ValidationError
from .diamond import certified_diamond_distance, diamond_distance, phi_lower_bound
from .models import Channel, HermitianPreservingMap
from .operations import (adjoint_apply, apply, apply_matrix, apply_via_choi, compose,
                         is_ppt_binding, local_projection_channel, output_trace_distance,
                         product_choi, tensor_channels, truncate)
from .serializers import ChannelSerializer
from .zoo import (dephasing, gamma_pm, identity, omega3_channel, pauli_z_channel,
                  random_channel, replacement_channel, unitary_channel)


def random_density(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


class ChannelModelTest(unittest.TestCase):
    """
    Test case for the Channel and HermitianPreservingMap models.
    """

    def test_rejects_non_trace_preserving_kraus(self) -> None:
        """
        Tests that sum K^dagger K != 1 is rejected.
        """
        with self.assertRaises(ValidationError):
            Channel.from_kraus([0.5 * np.eye(2)])

    def test_rejects_wrong_kraus_shape(self) -> None:
        """
        Tests that Kraus operators of inconsistent shapes are rejected.
        """
        with self.assertRaises(DimensionMismatchError):
            Channel.from_kraus([np.eye(2), np.zeros((3, 2))])

    def test_direct_construction_checks_shapes(self) -> None:
        """
        Tests that Channel(...) rejects Kraus operators and Choi states of the
        wrong dimensions.
        """
        c = random_channel(3, 2, 2, 5)
        self.assertEqual(Channel(3, 2, c.kraus, c.choi).dims, (3, 2))
        cases = [
            ((2, 3, c.kraus, c.choi), "kraus[0]"),
            ((3, 2, c.kraus, identity(3).choi), "choi"),
            ((3, 2, (), c.choi), "kraus"),
        ]
        for args, field in cases:
            with self.subTest(field=field):
                with self.assertRaises(ValidationError) as raised:
                    Channel(*args)
                self.assertEqual(raised.exception.field, field)
        with self.assertRaises(DimensionMismatchError):
            Channel(3, 2, c.kraus + (np.eye(3),), c.choi)

    def test_rejects_non_cp_choi(self) -> None:
        """
        Tests that a trace-preserving but non-PSD Choi matrix is rejected.
        """
        phi = max_entangled(2).matrix
        flipped = np.eye(4) / 2 - phi
        with self.assertRaises(ValidationError):
            Channel.from_choi(flipped, 2, 2)

    def test_rejects_non_trace_preserving_choi(self) -> None:
        """
        Tests that Tr_B J != 1/d_in is rejected.
        """
        j = np.zeros((4, 4))
        j[0, 0] = 1.0
        with self.assertRaises(ValidationError):
            Channel.from_choi(j, 2, 2)

    def test_bare_choi_needs_dimensions(self) -> None:
        """
        Tests that a bare Choi matrix without dimensions is rejected.
        """
        with self.assertRaises(ValidationError) as raised:
            Channel.from_choi(np.eye(4) / 4)
        self.assertEqual(raised.exception.field, "dims")

    def test_choi_kraus_round_trip(self) -> None:
        """
        Tests Choi -> Kraus -> Choi within 1e-9 on random channels.
        """
        for seed, (din, dout, n) in enumerate([(2, 2, 2), (3, 2, 4), (2, 3, 1), (3, 3, 3)]):
            c = random_channel(din, dout, n, seed)
            rebuilt = Channel.from_choi(c.choi)
            again = Channel.from_kraus(rebuilt.kraus, din, dout)
            assert_allclose(again.choi.matrix, c.choi.matrix, atol=1e-9)
            self.assertLessEqual(len(rebuilt.kraus), din * dout)

    def test_choi_marginal(self) -> None:
        """
        Tests Tr J = 1 and Tr_B J = 1/d_in.
        """
        c = random_channel(3, 2, 2, 7)
        self.assertAlmostEqual(np.trace(c.choi.matrix).real, 1.0, delta=1e-12)
        assert_allclose(partial_trace(c.choi, "A"), np.eye(3) / 3, atol=1e-12)

    def test_kraus_are_read_only(self) -> None:
        """
        Tests that the stored Kraus operators cannot be written to.
        """
        c = identity(2)
        with self.assertRaises(ValueError):
            c.kraus[0][0, 0] = 2.0

    def test_hermitian_preserving_combination(self) -> None:
        """
        Tests linear combinations and their validation as channels.
        """
        delta = HermitianPreservingMap.from_channel(dephasing(3))
        ident = HermitianPreservingMap.from_channel(identity(3))
        combination = 1.5 * delta - 0.5 * ident
        assert_allclose(combination.choi.matrix, omega3().matrix, atol=1e-14)
        with self.assertRaises(ValidationError):
            (2.0 * ident - delta).to_channel()
        with self.assertRaises(ValidationError):
            delta * 1j
        with self.assertRaises(ValidationError):
            HermitianPreservingMap(3, 3, BipartiteOperator(3, 3, 1j * np.eye(9)))


class ZooTest(unittest.TestCase):
    """
    Test case for the channel constructors.
    """

    def test_identity_choi(self) -> None:
        """
        Tests choi(id_d) = Phi_d.
        """
        for d in (2, 3):
            assert_allclose(identity(d).choi.matrix, max_entangled(d).matrix, atol=1e-14)

    def test_dephasing(self) -> None:
        """
        Tests choi(Delta_3) = P_3 / 3 and Delta(|0><1|) = 0.
        """
        delta = dephasing(3)
        assert_allclose(delta.choi.matrix, correlated_projector(3) / 3, atol=1e-14)
        coherence = np.zeros((3, 3))
        coherence[0, 1] = 1.0
        assert_allclose(apply_matrix(delta, coherence, 1), np.zeros((3, 3)), atol=1e-15)

    def test_omega3_channel(self) -> None:
        """
        Tests choi(Omega3) = omega3 and Omega3 = (3/2) Delta - (1/2) id on inputs.
        """
        c = omega3_channel()
        assert_allclose(c.choi.matrix, omega3().matrix, atol=1e-12)
        rho = random_density(3, np.random.default_rng(3))
        expected = 1.5 * np.diag(np.diag(rho)) - 0.5 * rho
        assert_allclose(apply_matrix(c, rho, 1), expected, atol=1e-10)

    def test_gamma_pm(self) -> None:
        """
        Tests the Choi states and the action of Gamma_+ and Gamma_-.
        """
        d = 3
        plus, minus = gamma_pm(d)
        sigma_plus, sigma_minus = sigma_pm(d)
        assert_allclose(plus.choi.matrix, sigma_plus.matrix, atol=1e-12)
        assert_allclose(minus.choi.matrix, sigma_minus.matrix, atol=1e-12)
        rho = random_density(d, np.random.default_rng(4))
        assert_allclose(apply_matrix(plus, rho, 1), (np.eye(d) + rho) / (d + 1), atol=1e-10)
        assert_allclose(apply_matrix(minus, rho, 1), (d * np.eye(d) - rho) / (d * d - 1),
                        atol=1e-10)

    def test_unitary_and_replacement(self) -> None:
        """
        Tests that unitaries must be unitary and replacement forgets its input.
        """
        with self.assertRaises(ValidationError):
            unitary_channel(np.array([[1.0, 1.0], [0.0, 1.0]]))
        z = pauli_z_channel()
        assert_allclose(apply_matrix(z, np.full((2, 2), 0.5), 1),
                        np.array([[0.5, -0.5], [-0.5, 0.5]]), atol=1e-15)
        mixer = replacement_channel(3, 2)
        rho = random_density(3, np.random.default_rng(5))
        assert_allclose(apply_matrix(mixer, rho, 1), np.eye(2) / 2, atol=1e-12)

    def test_random_channel_is_reproducible(self) -> None:
        """
        Tests that the same seed gives the same channel.
        """
        first = random_channel(3, 3, 2, seed=11)
        second = random_channel(3, 3, 2, seed=11)
        assert_allclose(first.choi.matrix, second.choi.matrix, atol=0.0)
        with self.assertRaises(ValidationError):
            random_channel(4, 1, 2)


class ApplyTest(unittest.TestCase):
    """
    Test case for channel application.
    """

    def test_identity_leaves_states_alone(self) -> None:
        """
        Tests [id (x) id](rho) = rho.
        """
        rho = haar_pure_state(2, 3, np.random.default_rng(0))
        out = apply(identity(3), rho)
        assert_allclose(out.matrix, rho.matrix, atol=1e-14)
        self.assertEqual(out.dims, (2, 3))

    def test_choi_states_from_phi(self) -> None:
        """
        Tests [id (x) Omega3](Phi_3) = omega3 and [id (x) Delta_3](Phi_3) = P_3 / 3.
        """
        phi = max_entangled(3)
        assert_allclose(apply(omega3_channel(), phi).matrix, omega3().matrix, atol=1e-10)
        assert_allclose(apply(dephasing(3), phi).matrix, correlated_projector(3) / 3,
                        atol=1e-14)

    def test_trace_is_preserved(self) -> None:
        """
        Tests that outputs have trace 1 within 1e-10.
        """
        rng = np.random.default_rng(1)
        c = random_channel(3, 2, 3, 2)
        for _ in range(5):
            rho = DensityOperator.from_matrix(random_density(6, rng), 2, 3)
            out = apply(c, rho)
            self.assertEqual(out.dims, (2, 2))
            self.assertAlmostEqual(np.trace(out.matrix).real, 1.0, delta=1e-10)

    def test_rejects_wrong_dimension(self) -> None:
        """
        Tests that an input not living on extended_by x d_in is rejected.
        """
        with self.assertRaises(DimensionMismatchError):
            apply_matrix(identity(3), np.eye(4) / 4)
        with self.assertRaises(DimensionMismatchError):
            apply_matrix(identity(2), np.eye(4) / 4, extended_by=3)

    def test_kraus_and_choi_agree(self) -> None:
        """
        Tests apply via Kraus against apply via Choi within 1e-9.
        """
        rng = np.random.default_rng(2)
        for c in (omega3_channel(), random_channel(3, 2, 3, 3), gamma_pm(3)[1]):
            for env in (1, 2):
                x = random_density(env * c.dim_in, rng)
                assert_allclose(apply_via_choi(c, x, env), apply_matrix(c, x, env), atol=1e-9)

    def test_adjoint(self) -> None:
        """
        Tests Tr Y [id (x) L](X) = Tr [id (x) L^dagger](Y) X.
        """
        rng = np.random.default_rng(3)
        c = random_channel(2, 3, 2, 4)
        x = random_density(4, rng)
        y = random_density(6, rng)
        left = np.trace(y @ apply_matrix(c, x, 2))
        right = np.trace(adjoint_apply(c, y, 2) @ x)
        self.assertAlmostEqual(complex(left), complex(right), delta=1e-12)
        assert_allclose(adjoint_apply(c, np.eye(3), 1), np.eye(2), atol=1e-12)

    def test_tensor_channels(self) -> None:
        """
        Tests products of channels on product inputs and their Choi states.
        """
        rng = np.random.default_rng(4)
        a = random_channel(2, 3, 2, 5)
        b = omega3_channel()
        joint = tensor_channels(a, b)
        self.assertEqual(joint.dims, (6, 9))
        rho_a, rho_b = random_density(2, rng), random_density(3, rng)
        assert_allclose(apply_matrix(joint, tensor(rho_a, rho_b), 1),
                        tensor(apply_matrix(a, rho_a, 1), apply_matrix(b, rho_b, 1)), atol=1e-12)
        assert_allclose(joint.choi.matrix, product_choi(a, b), atol=1e-12)

    def test_identity_squared_is_identity(self) -> None:
        """
        Tests id_2 (x) id_2 = id_4 in the project index convention.
        """
        joint = tensor_channels(identity(2), identity(2))
        assert_allclose(joint.choi.matrix, identity(4).choi.matrix, atol=1e-14)

    def test_omega3_squared_choi(self) -> None:
        """
        Tests that choi(Omega3 (x) Omega3) is omega3 (x) omega3 regrouped.
        """
        joint = tensor_channels(omega3_channel(), omega3_channel())
        assert_allclose(joint.choi.matrix, two_copy(omega3()).matrix, atol=1e-10)

    def test_compose(self) -> None:
        """
        Tests Delta o Delta = Delta and U^dagger o U = id.
        """
        delta = dephasing(3)
        assert_allclose(compose(delta, delta).choi.matrix, delta.choi.matrix, atol=1e-14)
        u = np.linalg.qr(np.random.default_rng(5).normal(size=(3, 3)))[0]
        undo = compose(unitary_channel(u.conj().T), unitary_channel(u))
        assert_allclose(undo.choi.matrix, identity(3).choi.matrix, atol=1e-12)
        with self.assertRaises(DimensionMismatchError):
            compose(identity(2), identity(3))


class TruncateTest(unittest.TestCase):
    """
    Test case for the rank-k truncation.
    """

    def test_full_rank_is_identity_operation(self) -> None:
        """
        Tests truncate(c, dim) = c.
        """
        c = random_channel(4, 4, 2, 6)
        assert_allclose(truncate(c, 4).choi.matrix, c.choi.matrix, atol=1e-12)

    def test_trace_preserving(self) -> None:
        """
        Tests that the truncation preserves the trace of random inputs.
        """
        rng = np.random.default_rng(6)
        c = random_channel(5, 5, 3, 7)
        for k in range(1, 6):
            cut = truncate(c, k)
            x = random_density(5, rng)
            self.assertAlmostEqual(np.trace(apply_matrix(cut, x, 1)).real, 1.0, delta=1e-10)

    def test_keeps_the_corner(self) -> None:
        """
        Tests that inputs and outputs inside the first k levels are untouched.
        """
        c = unitary_channel(np.eye(4))
        x = np.zeros((4, 4), dtype=complex)
        x[:2, :2] = random_density(2, np.random.default_rng(7))
        assert_allclose(apply_matrix(truncate(c, 2), x, 1), x, atol=1e-14)

    def test_error_is_non_increasing(self) -> None:
        """
        Tests that ||J_k - J||_1 decreases to 0 in k for a random d = 6 channel.
        """
        c = random_channel(6, 6, 3, seed=8)
        errors = [trace_norm(truncate(c, k).choi.matrix - c.choi.matrix) for k in range(1, 7)]
        for previous, current in zip(errors, errors[1:]):
            self.assertLessEqual(current, previous + 1e-9)
        self.assertAlmostEqual(errors[-1], 0.0, delta=1e-12)

    def test_anchor(self) -> None:
        """
        Tests a custom anchor and the rejection of anchors outside Pi'.
        """
        c = random_channel(3, 3, 2, 9)
        anchor = np.diag([0.5, 0.5, 0.0])
        cut = truncate(c, 2, anchor)
        x = np.diag([0.0, 0.0, 1.0])
        assert_allclose(apply_matrix(cut, x, 1), anchor, atol=1e-12)
        with self.assertRaises(ValidationError):
            truncate(c, 2, np.diag([0.0, 0.0, 1.0]))
        with self.assertRaises(ValidationError):
            truncate(c, 2, np.diag([0.5, 0.0, 0.0]))
        with self.assertRaises(ValidationError):
            truncate(c, 0)
        with self.assertRaises(ValidationError):
            truncate(c, 4)

    def test_local_projection_channel(self) -> None:
        """
        Tests that the local projection map is the truncated identity.
        """
        projection = local_projection_channel(3, 2)
        assert_allclose(projection.choi.matrix, truncate(identity(3), 2).choi.matrix,
                        atol=1e-14)
        self.assertTrue(is_ppt_binding(compose(projection, dephasing(3))))


class PptBindingTest(unittest.TestCase):
    """
    Test case for is_ppt_binding.
    """

    def test_zoo(self) -> None:
        """
        Tests dephasing and Gamma_+- (binding) against id and Omega3 (not).
        """
        for d in (2, 3, 4):
            self.assertTrue(is_ppt_binding(dephasing(d)))
            self.assertFalse(is_ppt_binding(identity(d)))
        plus, minus = gamma_pm(3)
        self.assertTrue(is_ppt_binding(plus))
        self.assertTrue(is_ppt_binding(minus))
        self.assertFalse(is_ppt_binding(omega3_channel()))
        self.assertTrue(is_ppt_binding(replacement_channel(3, 3)))


class DiamondTest(unittest.TestCase):
    """
    Test case for the diamond distance.
    """

    def test_zero_on_equal_channels(self) -> None:
        """
        Tests diamond_distance(c, c) = 0.
        """
        c = random_channel(2, 2, 2, 10)
        self.assertAlmostEqual(diamond_distance(c, c), 0.0, delta=1e-6)

    def test_identity_against_pauli_z(self) -> None:
        """
        Tests that id_2 and conjugation by Z are perfectly distinguishable.
        """
        value, report = certified_diamond_distance(identity(2), pauli_z_channel())
        self.assertAlmostEqual(value, 2.0, delta=1e-6)
        self.assertTrue(report.passed)

    def test_omega3_against_dephasing(self) -> None:
        """
        Tests diamond(Omega3, Delta_3) >= ||omega3 - P_3/3||_1.
        """
        bound = trace_norm(omega3().matrix - correlated_projector(3) / 3)
        self.assertAlmostEqual(phi_lower_bound(omega3_channel(), dephasing(3)), bound,
                               delta=1e-12)
        self.assertGreaterEqual(diamond_distance(omega3_channel(), dephasing(3)), bound - 1e-6)

    def test_metric_on_zoo(self) -> None:
        """
        Tests symmetry and the triangle inequality on {id_3, Delta_3, Omega3}.
        """
        zoo = {"id": identity(3), "delta": dephasing(3), "omega": omega3_channel()}
        distance = {}
        for (p, a), (q, b) in itertools.permutations(zoo.items(), 2):
            distance[p, q] = diamond_distance(a, b)
        for p, q in distance:
            self.assertAlmostEqual(distance[p, q], distance[q, p], delta=1e-6)
            self.assertGreaterEqual(distance[p, q], 0.0)
            self.assertLessEqual(distance[p, q], 2.0)
        for p, q, r in itertools.permutations(zoo, 3):
            self.assertLessEqual(distance[p, r], distance[p, q] + distance[q, r] + 1e-6)

    def test_bounds_random_inputs(self) -> None:
        """
        Tests that the diamond distance dominates 20 random input distances.
        """
        rng = np.random.default_rng(12)
        a, b = identity(3), omega3_channel()
        value = diamond_distance(a, b)
        best = max(output_trace_distance(a, b, haar_pure_state(3, 3, rng)) for _ in range(20))
        self.assertGreaterEqual(value, best - 1e-7)

    def test_rejects_mismatched_channels(self) -> None:
        """
        Tests that channels on different spaces are rejected.
        """
        with self.assertRaises(DimensionMismatchError):
            diamond_distance(identity(2), identity(3))


class ChannelSerializerTest(unittest.TestCase):
    """
    Test case for the chan-v1 format.
    """

    def test_kraus_file(self) -> None:
        """
        Tests writing a channel and reading it back.
        """
        serializer = ChannelSerializer()
        c = random_channel(3, 2, 2, 13)
        text = serializer.dumps(c)
        self.assertEqual(text, serializer.dumps(c))
        loaded = serializer.loads(text)
        self.assertEqual(loaded.dims, (3, 2))
        assert_allclose(loaded.choi.matrix, c.choi.matrix, atol=1e-10)

    def test_choi_file(self) -> None:
        """
        Tests reading a channel given by its Choi state.
        """
        data = {"format": "chan-v1", "din": 3, "dout": 3, "kind": "choi",
                "data": CmatSerializer(omega3().op).data}
        loaded = ChannelSerializer().parse(data)
        assert_allclose(loaded.choi.matrix, omega3().matrix, atol=1e-12)

    def test_rejects_bad_files(self) -> None:
        """
        Tests that malformed files name the offending field.
        """
        serializer = ChannelSerializer()
        base = dict(ChannelSerializer(identity(2)).data)
        cases = [
            (dict(base, kind="stinespring"), "kind"),
            (dict(base, din=3), "data[0]"),
            (dict(base, data=[]), "data"),
            (dict(base, format="cmat-v1"), "format"),
            (dict(base, data=[dict(base["data"][0], re=[[1, 0], [0, True]])]), "data[0].re[1][1]"),
        ]
        for data, field in cases:
            with self.subTest(field=field):
                with self.assertRaises(ValidationError) as raised:
                    serializer.parse(data)
                self.assertEqual(raised.exception.field, field)
        with self.assertRaises(ValidationError):
            serializer.loads('{"format": "chan-v1", "din": NaN}')
