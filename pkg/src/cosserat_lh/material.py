"""Strain-energy functions W(E, Gamma) and their derivatives.

The couple stress ``W_Gamma`` is called ``m`` elsewhere in the package so it
cannot be confused with the shear modulus ``mu``.
"""

from __future__ import annotations

import abc
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from . import tensors as T

FD_STEP = 1e-5
FD_STEP_SECOND = 1e-4


class Material(abc.ABC):
    """Hyperelastic Cosserat material.

    Subclasses supply the energy and its first derivatives; second-derivative
    actions default to a zero coupling block, and ``W_GammaE`` defaults to the
    transpose of ``W_EGamma``. All methods broadcast over leading axes.
    """

    @abc.abstractmethod
    def energy(self, E, Gamma): ...

    @abc.abstractmethod
    def stress_WE(self, E, Gamma=None): ...

    @abc.abstractmethod
    def couple_WGamma(self, Gamma, E=None): ...

    @abc.abstractmethod
    def action_WEE(self, B, E=None, Gamma=None): ...

    @abc.abstractmethod
    def action_WGammaGamma(self, B, E=None, Gamma=None): ...

    def action_WEGamma(self, B, E=None, Gamma=None):
        return np.zeros_like(np.asarray(B, dtype=float))

    def action_WGammaE(self, B, E=None, Gamma=None):
        Bt = T.transpose4(T.dense_from_action(lambda X: self.action_WEGamma(X, E, Gamma)))
        return T.apply4(Bt, B)

    def hessian_blocks(self, E=None, Gamma=None):
        """Dense ``(W_EE, W_EGamma, W_GammaE, W_GammaGamma)`` at one state."""
        E = T.I3 if E is None else E
        Gamma = np.zeros((3, 3)) if Gamma is None else Gamma
        return tuple(
            T.dense_from_action(lambda X, f=f: f(X, E, Gamma))
            for f in (self.action_WEE, self.action_WEGamma,
                      self.action_WGammaE, self.action_WGammaGamma)
        )

    def modulus_scale(self):
        A, B, Bt, C = self.hessian_blocks()
        return float(max(np.abs(A).max(), np.abs(B).max(), np.abs(C).max()))


@dataclass(frozen=True)
class IsotropicQuadraticMaterial(Material):
    """Quadratic isotropic energy

    ``W = mu |sym(E-I)|^2 + mu_c |skew(E-I)|^2 + lam/2 tr(E-I)^2
          + a1 |dev sym Gamma|^2 + a2 |skew Gamma|^2 + a3/3 (tr Gamma)^2``

    No sign restrictions are imposed; the Legendre-Hadamard checker judges
    the moduli.
    """

    mu: float
    mu_c: float
    lam: float
    a1: float
    a2: float
    a3: float

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        return cls(**{k: float(v) for k, v in d.items()})

    def to_dict(self):
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    def energy(self, E, Gamma):
        H = np.asarray(E, dtype=float) - T.I3
        G = np.asarray(Gamma, dtype=float)
        trG = T.tr(G)
        return (
            self.mu * T.inner(T.sym(H), T.sym(H))
            + self.mu_c * T.inner(T.skew(H), T.skew(H))
            + 0.5 * self.lam * T.tr(H) ** 2
            + self.a1 * T.inner(T.dev(T.sym(G)), T.dev(T.sym(G)))
            + self.a2 * T.inner(T.skew(G), T.skew(G))
            + self.a3 / 3.0 * trG**2
        )

    def stress_WE(self, E, Gamma=None):
        return self.action_WEE(np.asarray(E, dtype=float) - T.I3)

    def couple_WGamma(self, Gamma, E=None):
        return self.action_WGammaGamma(np.asarray(Gamma, dtype=float))

    # The energy is quadratic, so second derivatives ignore the state.
    def action_WEE(self, B, E=None, Gamma=None):
        B = np.asarray(B, dtype=float)
        return (2 * self.mu * T.sym(B) + 2 * self.mu_c * T.skew(B)
                + self.lam * T.tr(B)[..., None, None] * T.I3)

    def action_WGammaGamma(self, B, E=None, Gamma=None):
        B = np.asarray(B, dtype=float)
        return (2 * self.a1 * T.dev(T.sym(B)) + 2 * self.a2 * T.skew(B)
                + (2.0 / 3.0) * self.a3 * T.tr(B)[..., None, None] * T.I3)

    def action_WGammaE(self, B, E=None, Gamma=None):
        return np.zeros_like(np.asarray(B, dtype=float))

    def modulus_scale(self):
        return float(max(abs(v) for v in asdict(self).values()))


class FDDerivatives(NamedTuple):
    W_E: np.ndarray
    W_Gamma: np.ndarray
    W_EE: np.ndarray
    W_EGamma: np.ndarray
    W_GammaE: np.ndarray
    W_GammaGamma: np.ndarray


def fd_derivative_oracle(mat, E, Gamma, step=FD_STEP, step2=FD_STEP_SECOND):
    """Central finite differences of ``mat.energy`` only.

    First derivatives use ``h = step * (1 + |arg|)``; the Hessian uses the
    four-point mixed formula with ``h = step2 * (1 + |arg|)``, which is exact
    for quadratic energies and keeps the rounding error near 1e-9.
    """
    E = np.asarray(E, dtype=float)
    Gamma = np.asarray(Gamma, dtype=float)
    x0 = np.concatenate([E.ravel(), Gamma.ravel()])
    scale = np.r_[np.full(9, 1.0 + T.norm(E)), np.full(9, 1.0 + T.norm(Gamma))]
    h1 = step * scale
    h2 = step2 * scale
    eye = np.eye(18)

    def W(X):
        return mat.energy(X[..., :9].reshape(X.shape[:-1] + (3, 3)),
                          X[..., 9:].reshape(X.shape[:-1] + (3, 3)))

    d1 = h1[:, None] * eye
    grad = (W(x0 + d1) - W(x0 - d1)) / (2 * h1)

    d2 = h2[:, None] * eye
    pp = x0 + d2[:, None, :] + d2[None, :, :]
    pm = x0 + d2[:, None, :] - d2[None, :, :]
    mp = x0 - d2[:, None, :] + d2[None, :, :]
    mm = x0 - d2[:, None, :] - d2[None, :, :]
    H = (W(pp) - W(pm) - W(mp) + W(mm)) / (4 * np.outer(h2, h2))

    def block(r, c):
        # H[(i,j),(k,l)] -> A_ijkl
        return H[r, c].reshape(3, 3, 3, 3)

    e, g = slice(0, 9), slice(9, 18)
    return FDDerivatives(
        W_E=grad[:9].reshape(3, 3),
        W_Gamma=grad[9:].reshape(3, 3),
        W_EE=block(e, e),
        W_EGamma=block(e, g),
        W_GammaE=block(g, e),
        W_GammaGamma=block(g, g),
    )
