import numpy as np
import pytest

from cosserat_lh import tensors as T
from cosserat_lh.checks import random_state
from cosserat_lh.material import IsotropicQuadraticMaterial, fd_derivative_oracle


def rel(a, b):
    return np.abs(a - b).max() / max(np.abs(b).max(), 1.0)


class TestEnergy:
    def test_zero_at_natural_state(self, generic):
        assert generic.energy(np.eye(3), np.zeros((3, 3))) == 0.0

    def test_orthogonal_split(self, generic, rng):
        """Pure deviatoric-symmetric, skew and spherical arguments hit one modulus each."""
        X = rng.standard_normal((3, 3))
        S, W, P = T.dev(T.sym(X)), T.skew(X), T.spherical(X)
        I, Z = np.eye(3), np.zeros((3, 3))
        m = generic
        assert m.energy(I + S, Z) == pytest.approx(m.mu * T.inner(S, S))
        assert m.energy(I + W, Z) == pytest.approx(m.mu_c * T.inner(W, W))
        assert m.energy(I + P, Z) == pytest.approx(
            m.mu * T.inner(P, P) + 0.5 * m.lam * T.tr(P) ** 2)
        assert m.energy(I, S) == pytest.approx(m.a1 * T.inner(S, S))
        assert m.energy(I, W) == pytest.approx(m.a2 * T.inner(W, W))
        assert m.energy(I, P) == pytest.approx(m.a3 / 3 * T.tr(P) ** 2)

    def test_sum_of_parts(self, generic, rng):
        E, G = random_state(rng)
        Z = np.zeros((3, 3))
        assert generic.energy(E, G) == pytest.approx(
            generic.energy(E, Z) + generic.energy(np.eye(3), G))

    def test_frame_indifference_of_form(self, generic, rng):
        """Isotropy: W(QHQ^t + I, QGQ^t) = W(H + I, G)."""
        Q = T.random_rotation(rng)
        E, G = random_state(rng)
        H = E - np.eye(3)
        assert generic.energy(Q @ H @ Q.T + np.eye(3), Q @ G @ Q.T) == pytest.approx(
            generic.energy(E, G))

    def test_dict_round_trip(self, generic):
        d = generic.to_dict()
        assert "lambda" in d and "lam" not in d
        assert IsotropicQuadraticMaterial.from_dict(d) == generic


class TestDerivatives:
    def test_first_derivatives_match_fd(self, generic, rng):
        for _ in range(10):
            E, G = random_state(rng)
            fd = fd_derivative_oracle(generic, E, G)
            assert rel(generic.stress_WE(E, G), fd.W_E) < 1e-8
            assert rel(generic.couple_WGamma(G, E), fd.W_Gamma) < 1e-8

    def test_second_derivatives_match_fd(self, generic, rng):
        E, G = random_state(rng)
        fd = fd_derivative_oracle(generic, E, G)
        A, B, Bt, C = generic.hessian_blocks(E, G)
        assert rel(A, fd.W_EE) < 1e-6
        assert rel(C, fd.W_GammaGamma) < 1e-6
        assert np.abs(fd.W_EGamma).max() < 1e-8
        np.testing.assert_array_equal(B, 0.0)
        np.testing.assert_array_equal(Bt, 0.0)

    def test_hessian_state_independent(self, generic, rng):
        E1, G1 = random_state(rng)
        E2, G2 = random_state(rng)
        a = fd_derivative_oracle(generic, E1, G1)
        b = fd_derivative_oracle(generic, E2, G2)
        assert rel(a.W_EE, b.W_EE) < 1e-6
        assert rel(a.W_GammaGamma, b.W_GammaGamma) < 1e-6

    def test_chain_rule(self, generic, rng):
        E, G = random_state(rng)
        dE, dG = rng.standard_normal((2, 3, 3))
        s = 1e-6
        fd = (generic.energy(E + s * dE, G + s * dG) - generic.energy(E - s * dE, G - s * dG)) / (2 * s)
        exact = T.inner(generic.stress_WE(E, G), dE) + T.inner(generic.couple_WGamma(G, E), dG)
        assert fd == pytest.approx(exact, rel=1e-7, abs=1e-7)

    def test_major_symmetry(self, generic, rng):
        A, _, _, C = generic.hessian_blocks()
        assert T.is_major_symmetric(A, rng)
        assert T.is_major_symmetric(C, rng)

    def test_closed_form_actions(self, generic, rng):
        X = rng.standard_normal((3, 3))
        m = generic
        np.testing.assert_allclose(
            m.action_WEE(X),
            2 * m.mu * T.sym(X) + 2 * m.mu_c * T.skew(X) + m.lam * np.trace(X) * np.eye(3))
        np.testing.assert_allclose(
            m.action_WGammaGamma(X),
            2 * m.a1 * T.dev(T.sym(X)) + 2 * m.a2 * T.skew(X) + 2 * m.a3 / 3 * np.trace(X) * np.eye(3))

    def test_batched(self, generic, rng):
        E = np.eye(3) + 0.1 * rng.standard_normal((4, 5, 3, 3))
        out = generic.stress_WE(E)
        np.testing.assert_allclose(out[2, 3], generic.stress_WE(E[2, 3]))

    def test_modulus_scale(self):
        m = IsotropicQuadraticMaterial(1, -3, 0.5, 0, 2, 1)
        assert m.modulus_scale() == 3.0
