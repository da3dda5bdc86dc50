"""Self-validation suites run by ``cosserat-lh validate``.

Every check returns a :class:`CheckResult`; a suite is a list of them.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import kinematics as K
from . import tensors as T
from .material import fd_derivative_oracle
from .rotation_family import det_preservation_check, rotation_family_integrate

DERIVATIVE_RTOL = 1e-6
COUPLING_ATOL = 1e-8
SKEWNESS_MIN_ORDER = 1.9
ROTATION_TOL = 1e-10
ROTATION_DERIVATIVE_TOL = 1e-6
IDENTITY_TOL = 1e-12


class CheckResult(NamedTuple):
    suite: str
    check: str
    value: float
    tol: float
    passed: bool

    def to_dict(self):
        return {"suite": self.suite, "check": self.check, "value": float(self.value),
                "tol": float(self.tol), "passed": bool(self.passed)}


def _rel(a, b):
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1.0))


def random_state(rng, size=0.3):
    return T.I3 + size * rng.standard_normal((3, 3)), size * rng.standard_normal((3, 3))


def derivative_suite(material, rng, n_states=100):
    """Analytic derivatives against finite differences of the energy."""
    worst = dict.fromkeys(("W_E", "W_Gamma", "W_EE", "W_GammaGamma"), 0.0)
    coupling = 0.0
    for _ in range(n_states):
        E, G = random_state(rng)
        fd = fd_derivative_oracle(material, E, G)
        A, B, Bt, C = material.hessian_blocks(E, G)
        worst["W_E"] = max(worst["W_E"], _rel(material.stress_WE(E, G), fd.W_E))
        worst["W_Gamma"] = max(worst["W_Gamma"], _rel(material.couple_WGamma(G, E), fd.W_Gamma))
        worst["W_EE"] = max(worst["W_EE"], _rel(A, fd.W_EE))
        worst["W_GammaGamma"] = max(worst["W_GammaGamma"], _rel(C, fd.W_GammaGamma))
        coupling = max(coupling, float(np.abs(fd.W_EGamma).max()),
                       _rel(B, fd.W_EGamma), _rel(Bt, fd.W_GammaE))
    out = [CheckResult("derivatives", k, v, DERIVATIVE_RTOL, v <= DERIVATIVE_RTOL)
           for k, v in worst.items()]
    out.append(CheckResult("derivatives", "W_EGamma", coupling, COUPLING_ATOL,
                           coupling <= COUPLING_ATOL))
    return out


def skewness_orders(sizes=(9, 17, 33), rate=1.0):
    """Observed convergence orders of the axis-twist skewness residual."""
    res = [K.axis_twist_field(n, rate=rate).skewness_residual() for n in sizes]
    orders = [np.log2(res[i] / res[i + 1]) for i in range(len(res) - 1)]
    return res, orders


def skewness_suite():
    _, orders = skewness_orders()
    order = float(min(orders))
    return [CheckResult("skewness", "observed_order", order, SKEWNESS_MIN_ORDER,
                        bool(order >= SKEWNESS_MIN_ORDER))]


def rotation_suite(rng):
    R = T.random_rotation(rng)
    w = rng.standard_normal(3)
    Omega = T.skew_from_axial(w)
    traj = rotation_family_integrate(R, lambda e: Omega, 1.0, 1e-3)
    exact = T.expm_skew(Omega) @ R
    closed = float(np.abs(traj.Q[-1] - exact).max())
    drift = traj.orthogonality_drift()
    det = det_preservation_check(traj)

    Phi = T.skew_from_axial(rng.standard_normal(3))
    traj2 = rotation_family_integrate(R, lambda e: Omega + e * Phi, 0.1, 1e-3)
    d1 = float(np.abs(traj2.dQ0 - Omega @ R).max())
    d2 = float(np.abs(traj2.d2Q0 - (Phi @ R + Omega @ Omega @ R)).max())
    return [
        CheckResult("rotation", "closed_form", closed, ROTATION_TOL, closed <= ROTATION_TOL),
        CheckResult("rotation", "orthogonality", drift, ROTATION_TOL, drift <= ROTATION_TOL),
        CheckResult("rotation", "determinant", det, ROTATION_TOL, det <= ROTATION_TOL),
        CheckResult("rotation", "first_derivative", d1, ROTATION_DERIVATIVE_TOL,
                    d1 <= ROTATION_DERIVATIVE_TOL),
        CheckResult("rotation", "second_derivative", d2, ROTATION_DERIVATIVE_TOL,
                    d2 <= ROTATION_DERIVATIVE_TOL),
    ]


def identity_errors(rng, n=50):
    """Worst relative defects of the tensor identities over ``n`` instances."""
    err = dict.fromkeys(("A.BC=AC^t.B", "Omega.alpha=2w.a", "wryness_forms",
                         "stress_power", "transpose4"), 0.0)
    for _ in range(n):
        A, B, C = rng.standard_normal((3, 3, 3))
        lhs, rhs = T.inner(A, B @ C), T.inner(A @ C.T, B)
        err["A.BC=AC^t.B"] = max(err["A.BC=AC^t.B"], abs(lhs - rhs) / max(1.0, abs(lhs)))

        w, a = rng.standard_normal((2, 3))
        lhs, rhs = T.inner(T.skew_from_axial(w), T.skew_from_axial(a)), 2.0 * w @ a
        err["Omega.alpha=2w.a"] = max(err["Omega.alpha=2w.a"], abs(lhs - rhs) / max(1.0, abs(rhs)))

        R = T.random_rotation(rng)
        Ws = T.skew_from_axial(rng.standard_normal((3, 3)))  # one skew per direction C
        dR = np.einsum("iA,CAB->iBC", R, Ws)  # R_,C = R W_C
        d = np.abs(K.wryness_from(R, dR) - K.wryness_from_axial(R, dR)).max()
        err["wryness_forms"] = max(err["wryness_forms"], float(d))

        # stress power: sigma . Edot = R sigma . grad u - Omega . skew(R sigma F^t)
        #                             = R sigma . grad u - 2 axl[R skew(sigma E^t) R^t] . w
        F, sigma, gu = rng.standard_normal((3, 3, 3))
        E = R.T @ F
        Om = T.skew_from_axial(w)
        direct = T.inner(sigma, R.T @ (gu - Om @ F))
        skew_form = T.inner(R @ sigma, gu) - T.inner(Om, T.skew(R @ sigma @ F.T))
        couple = 2.0 * T.axl(R @ T.skew(sigma @ E.T) @ R.T, tol=None)
        axial_form = T.inner(R @ sigma, gu) - couple @ w
        scale = max(1.0, abs(direct))
        err["stress_power"] = max(err["stress_power"], abs(direct - skew_form) / scale,
                                  abs(skew_form - axial_form) / scale)

        A4 = rng.standard_normal((3, 3, 3, 3))
        lhs, rhs = T.inner(T.apply4(A4, B), C), T.inner(B, T.apply4(T.transpose4(A4), C))
        err["transpose4"] = max(err["transpose4"], abs(lhs - rhs) / max(1.0, abs(lhs)))
    return err


def identity_suite(material, rng, n=50):
    err = identity_errors(rng, n)
    A, _, _, C = material.hessian_blocks()
    sym_ok = T.is_major_symmetric(A, rng, n) and T.is_major_symmetric(C, rng, n)
    out = [CheckResult("identities", k, float(v), IDENTITY_TOL, bool(v <= IDENTITY_TOL))
           for k, v in err.items()]
    out.append(CheckResult("identities", "major_symmetry", 0.0 if sym_ok else 1.0,
                           IDENTITY_TOL, sym_ok))
    return out


def run_validation(material, seed=0, n_states=100):
    rng = np.random.default_rng(seed)
    return (derivative_suite(material, rng, n_states) + skewness_suite()
            + rotation_suite(rng) + identity_suite(material, rng))
