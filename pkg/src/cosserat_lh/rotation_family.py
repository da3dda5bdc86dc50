"""One-parameter rotation families ``Q' = W(eps) Q``, ``Q(0) = R``.

Integrated with the classical fourth-order Runge-Kutta scheme. Derivatives at
``eps = 0`` are estimated from central differences over a short symmetric
integration, sharpened by Richardson extrapolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensors as T
from .errors import DriftExceeded, NotSkew

DRIFT_TOL = 1e-8
DERIVATIVE_SPAN = 0.0625


@dataclass(frozen=True, eq=False)
class RotationTrajectory:
    eps: np.ndarray
    Q: np.ndarray
    dQ0: np.ndarray
    d2Q0: np.ndarray

    def orthogonality_drift(self):
        return float(np.max(T.norm(self.Q @ T.transpose(self.Q) - T.I3)))


def _checked(W_of_eps, strict):
    def W(e):
        We = np.asarray(W_of_eps(e), dtype=float)
        if strict and T.norm(T.sym(We)) > T.SKEW_TOL * max(T.norm(We), 1.0):
            raise NotSkew(f"W({e:g}) is not skew")
        return We
    return W


def _rk4(W, Q, e0, h, steps, strict):
    out = [Q]
    e = e0
    for _ in range(steps):
        k1 = W(e) @ Q
        Wm = W(e + 0.5 * h)
        k2 = Wm @ (Q + 0.5 * h * k1)
        k3 = Wm @ (Q + 0.5 * h * k2)
        k4 = W(e + h) @ (Q + h * k3)
        Q = Q + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        e += h
        if strict:
            drift = T.norm(Q @ Q.T - T.I3)
            if drift > DRIFT_TOL:
                raise DriftExceeded(f"|QQ^t - I| = {drift:.3e} at eps = {e:g}")
        out.append(Q)
    return out


def rotation_family_integrate(R, W_of_eps, eps_end, step, strict=True):
    """Integrate ``Q' = W Q`` from ``Q(0) = R`` to ``eps_end``.

    With ``strict`` every evaluation of ``W`` is checked for skewness
    (:class:`NotSkew`) and every step for orthogonality drift
    (:class:`DriftExceeded`).
    """
    R = np.asarray(R, dtype=float)
    if strict:
        T.check_rotation(R)
    W = _checked(W_of_eps, strict)
    steps = int(round(abs(eps_end) / step))
    h = np.copysign(step, eps_end) if steps else step
    Q = np.array(_rk4(W, R, 0.0, h, steps, strict))
    eps = h * np.arange(steps + 1)

    # central differences at spans H, H/2, H/4 (whole multiples of `step`),
    # combined by two Richardson levels
    quarter = max(1, int(round(DERIVATIVE_SPAN / step)) // 4)
    D1, D2 = [], []
    for m in (4 * quarter, 2 * quarter, quarter):
        H = m * step
        Qp = _rk4(W, R, 0.0, step, m, strict)[-1]
        Qm = _rk4(W, R, 0.0, -step, m, strict)[-1]
        D1.append((Qp - Qm) / (2 * H))
        D2.append((Qp - 2 * R + Qm) / H**2)
    dQ0 = _richardson(D1)
    d2Q0 = _richardson(D2)
    return RotationTrajectory(eps=eps, Q=Q, dQ0=dQ0, d2Q0=d2Q0)


def _richardson(D):
    """Eliminate the h^2 and h^4 terms from estimates at h, h/2, h/4."""
    first = [(4 * D[i + 1] - D[i]) / 3 for i in range(len(D) - 1)]
    return (16 * first[1] - first[0]) / 15


def det_preservation_check(trajectory):
    """max over the trajectory of ``|det Q - 1|``."""
    return float(np.max(np.abs(np.linalg.det(trajectory.Q) - 1.0)))
