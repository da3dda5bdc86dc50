import numpy as np
import pytest

from cosserat_lh import tensors as T
from cosserat_lh.errors import NotRotation, NotSkew


class TestDecompositions:
    def test_sym_skew_split(self, rng):
        A = rng.standard_normal((3, 3))
        np.testing.assert_allclose(T.sym(A) + T.skew(A), A, atol=1e-15)
        assert abs(T.inner(T.sym(A), T.skew(A))) < 1e-14

    def test_dev_traceless(self, rng):
        A = rng.standard_normal((5, 3, 3))
        np.testing.assert_allclose(T.tr(T.dev(A)), 0.0, atol=1e-14)
        np.testing.assert_allclose(T.dev(A) + T.spherical(A), A, atol=1e-15)

    def test_norm_is_frobenius(self, rng):
        A = rng.standard_normal((3, 3))
        assert T.norm(A) == pytest.approx(np.linalg.norm(A))

    def test_batched_inner(self, rng):
        A = rng.standard_normal((4, 2, 3, 3))
        B = rng.standard_normal((4, 2, 3, 3))
        np.testing.assert_allclose(T.inner(A, B), np.einsum("...ij,...ij", A, B))


class TestAxial:
    def test_cross_product(self, rng):
        w, v = rng.standard_normal((2, 3))
        np.testing.assert_allclose(T.skew_from_axial(w) @ v, np.cross(w, v), atol=1e-14)

    def test_round_trip(self, rng):
        w = rng.standard_normal((6, 3))
        np.testing.assert_allclose(T.axl(T.skew_from_axial(w)), w, atol=1e-15)

    def test_rejects_symmetric(self):
        with pytest.raises(NotSkew):
            T.axl(np.eye(3))

    def test_tol_none_takes_skew_part(self, rng):
        A = rng.standard_normal((3, 3))
        np.testing.assert_allclose(T.skew_from_axial(T.axl(A, tol=None)), T.skew(A), atol=1e-15)

    def test_inner_of_skews(self, rng):
        w, a = rng.standard_normal((2, 3))
        assert T.inner(T.skew_from_axial(w), T.skew_from_axial(a)) == pytest.approx(2 * w @ a)


class TestFourthOrder:
    def test_identity_action(self, rng):
        B = rng.standard_normal((3, 3))
        np.testing.assert_allclose(T.apply4(T.identity4(), B), B)

    def test_transpose_defining_identity(self, rng):
        A = rng.standard_normal((3, 3, 3, 3))
        B, C = rng.standard_normal((2, 3, 3))
        assert T.inner(T.apply4(A, B), C) == pytest.approx(
            T.inner(B, T.apply4(T.transpose4(A), C)), rel=1e-12)

    def test_transpose_involution(self, rng):
        A = rng.standard_normal((3, 3, 3, 3))
        np.testing.assert_array_equal(T.transpose4(T.transpose4(A)), A)

    def test_dense_from_action(self, rng):
        A = rng.standard_normal((3, 3, 3, 3))
        np.testing.assert_allclose(T.dense_from_action(lambda X: T.apply4(A, X)), A)

    def test_major_symmetry_detection(self, rng):
        A = rng.standard_normal((3, 3, 3, 3))
        assert T.is_major_symmetric(A + T.transpose4(A), rng)
        assert not T.is_major_symmetric(A, rng)


class TestRotations:
    def test_rodrigues_matches_expm(self, rng):
        w = rng.standard_normal(3)
        theta = np.linalg.norm(w)
        np.testing.assert_allclose(T.rotation_from_axis_angle(w, theta),
                                   T.expm_skew(T.skew_from_axial(w)), atol=1e-14)

    def test_expm_small_angle(self):
        W = T.skew_from_axial([1e-10, 0, 0])
        np.testing.assert_allclose(T.expm_skew(W), np.eye(3) + W, atol=1e-18)

    def test_random_rotation_is_proper(self, rng):
        R = T.random_rotation(rng)
        T.check_rotation(R)
        assert np.linalg.det(R) == pytest.approx(1.0)

    @pytest.mark.parametrize("bad", [np.diag([1.0, 1.0, -1.0]), 1.001 * np.eye(3)])
    def test_check_rotation_rejects(self, bad):
        with pytest.raises(NotRotation):
            T.check_rotation(bad)

    def test_broadcast_angles(self):
        R = T.rotation_from_axis_angle([0, 0, 1], np.linspace(0, 1, 7))
        assert R.shape == (7, 3, 3)
        T.check_rotation(R)
