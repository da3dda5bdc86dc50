"""Deformation and rotation fields sampled on a uniform box grid.

Gradients use second-order central differences in the interior and
second-order one-sided differences on the boundary (``numpy.gradient`` with
``edge_order=2``). Field arrays carry the node axes first: vectors have shape
``(n, n, n, 3)`` and tensors ``(n, n, n, 3, 3)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import tensors as T
from .errors import GridTooCoarse, InvalidFace, SkewnessViolated

FACES = ("x-", "x+", "y-", "y+", "z-", "z+")

# Relative bound on |sym(R^t dR)| / |dR| accepted by `wryness`. Finite
# differences leave an O(h^2) symmetric part for non-uniform rotations, so
# this only catches gross violations.
WRYNESS_SKEW_TOL = 0.1


def face_axis_side(face):
    if face not in FACES:
        raise InvalidFace(f"unknown face {face!r}; expected one of {FACES}")
    axis = "xyz".index(face[0])
    return axis, (0 if face[1] == "-" else -1)


def face_normal(face):
    axis, side = face_axis_side(face)
    nu = np.zeros(3)
    nu[axis] = -1.0 if side == 0 else 1.0
    return nu


def face_values(arr, face):
    """Restrict a node field to the nodes of one face."""
    axis, side = face_axis_side(face)
    return np.take(arr, 0 if side == 0 else arr.shape[axis] - 1, axis=axis)


def grad(field_, h):
    """Referential gradient ``(grad f)_{..., A} = df/dX_A`` of a node field."""
    parts = np.gradient(field_, *h, axis=(0, 1, 2), edge_order=2)
    return np.stack(parts, axis=-1)


def div(tensor_field, h):
    """``(Div P)_i = P_{iA,A}`` for a node field of tensors."""
    return sum(
        np.gradient(tensor_field[..., A], h[A], axis=A, edge_order=2)
        for A in range(3)
    )


def trapezoid_weights(n, h):
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Deformation ``chi`` and rotation ``R`` sampled on a box grid.

    Rotations are validated at construction; nothing is projected.
    """

    chi: np.ndarray
    R: np.ndarray
    lo: np.ndarray = field(default_factory=lambda: np.zeros(3))
    hi: np.ndarray = field(default_factory=lambda: np.ones(3))

    def __post_init__(self):
        chi = np.asarray(self.chi, dtype=float)
        R = np.asarray(self.R, dtype=float)
        n = chi.shape[0]
        if chi.shape != (n, n, n, 3) or R.shape != (n, n, n, 3, 3):
            raise ValueError(f"field shapes {chi.shape}, {R.shape} do not match a cubic grid")
        if n < 3:
            raise GridTooCoarse(f"need at least 3 points per axis, got {n}")
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if np.any(hi <= lo):
            raise ValueError("empty domain box")
        T.check_rotation(R)
        for name, val in (("chi", chi), ("R", R), ("lo", lo), ("hi", hi)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @classmethod
    def from_functions(cls, chi_fn, R_fn, n, lo=(0, 0, 0), hi=(1, 1, 1)):
        """Sample ``chi_fn(X)`` and ``R_fn(X)`` (vectorised over ``X[..., 3]``)."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if n < 3:
            raise GridTooCoarse(f"need at least 3 points per axis, got {n}")
        X = node_positions(n, lo, hi)
        return cls(chi_fn(X), R_fn(X), lo, hi)

    @property
    def n(self):
        return self.chi.shape[0]

    @property
    def h(self):
        return (self.hi - self.lo) / (self.n - 1)

    @cached_property
    def X(self):
        return node_positions(self.n, self.lo, self.hi)

    @cached_property
    def volume_weights(self):
        w = [trapezoid_weights(self.n, hA) for hA in self.h]
        return np.einsum("i,j,k->ijk", *w)

    def face_weights(self, face):
        axis, _ = face_axis_side(face)
        others = [trapezoid_weights(self.n, self.h[A]) for A in range(3) if A != axis]
        return np.outer(*others)

    def integrate(self, density):
        return float(np.sum(self.volume_weights * density))

    def integrate_face(self, face, density):
        return float(np.sum(self.face_weights(face) * density))

    @property
    def volume(self):
        return float(np.prod(self.hi - self.lo))

    @cached_property
    def F(self):
        return grad(self.chi, self.h)

    @cached_property
    def dR(self):
        """``dR[..., i, A, C] = R_iA,C``."""
        return grad(self.R, self.h)

    @cached_property
    def E(self):
        return strain_E(self.F, self.R, check=False)

    @cached_property
    def Gamma(self):
        return wryness_from(self.R, self.dR)

    def skewness_residual(self):
        """max over nodes and C of ``|sym(R^t R_,C)|``."""
        K = rotation_gradient_frames(self.R, self.dR)
        return float(T.norm(T.sym(K)).max())


def node_positions(n, lo, hi):
    axes = [np.linspace(lo[A], hi[A], n) for A in range(3)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


@dataclass(frozen=True, eq=False)
class CosseratState:
    """Pointwise kinematic state (F, R, E, Gamma)."""

    F: np.ndarray
    R: np.ndarray
    E: np.ndarray
    Gamma: np.ndarray

    @classmethod
    def at(cls, grid, node):
        node = tuple(node)
        return cls(grid.F[node], grid.R[node], grid.E[node], grid.Gamma[node])

    def check(self, tol=1e-12):
        T.check_rotation(self.R)
        err = T.norm(self.E - T.transpose(self.R) @ self.F)
        return bool(err <= tol * max(1.0, T.norm(self.F)))


def deformation_gradient(grid, node=None):
    """``F_iA = chi_i,A``; the whole field when ``node`` is None."""
    return grid.F if node is None else grid.F[tuple(node)]


def strain_E(F, R, check=True):
    if check:
        T.check_rotation(R)
    return T.transpose(R) @ F


def rotation_gradient_frames(R, dR):
    """``K[..., C, A, B] = R_iA R_iB,C``: one 3x3 matrix per direction C."""
    return np.einsum("...iA,...iBC->...CAB", R, dR)


def wryness_from(R, dR):
    """``Gamma_DC = 1/2 e_BAD R_iA R_iB,C`` by direct contraction."""
    return 0.5 * np.einsum("BAD,...iA,...iBC->...DC", T.LEVI_CIVITA, R, dR)


def wryness_from_axial(R, dR):
    """``Gamma = gamma_C (x) E_C`` with ``gamma_C = axl skew(R^t R_,C)``."""
    K = rotation_gradient_frames(R, dR)
    gammas = T.axl(T.skew(K), tol=None)  # [..., C, D]
    return np.swapaxes(gammas, -1, -2)


def wryness(grid, node=None, skew_tol=WRYNESS_SKEW_TOL):
    K = rotation_gradient_frames(grid.R, grid.dR)
    if node is not None:
        K = K[tuple(node)]
    dR = grid.dR if node is None else grid.dR[tuple(node)]
    # compare against the largest rotation gradient at the node so that
    # directions along which R is constant do not divide roundoff by roundoff
    num = T.norm(T.sym(K)).max(axis=-1)
    den = T.norm(np.moveaxis(dR, -1, -3)).max(axis=-1)
    if np.any(num > skew_tol * den + 1e-300):
        raise SkewnessViolated(
            f"sym(R^t dR) exceeds {skew_tol:g} relative; grid too coarse or R not a rotation field"
        )
    return grid.Gamma if node is None else grid.Gamma[tuple(node)]


def equilibrium_residuals(grid, material):
    """Body force and couple needed for equilibrium:

    ``g = -Div(R sigma)``, ``pi = -Div(R m) - 2 axl[R skew(sigma E^t) R^t]``.
    """
    E, Gamma, R = grid.E, grid.Gamma, grid.R
    sigma = material.stress_WE(E, Gamma)
    m = material.couple_WGamma(Gamma, E)
    g = -div(R @ sigma, grid.h)
    coupling = R @ T.skew(sigma @ T.transpose(E)) @ T.transpose(R)
    pi = -div(R @ m, grid.h) - 2.0 * T.axl(coupling, tol=None)
    return g, pi


def tractions(grid, material, face):
    """Force ``(R sigma) nu`` and couple ``(R m) nu`` on the nodes of a face."""
    nu = face_normal(face)
    E = face_values(grid.E, face)
    Gamma = face_values(grid.Gamma, face)
    R = face_values(grid.R, face)
    t = (R @ material.stress_WE(E, Gamma)) @ nu
    c = (R @ material.couple_WGamma(Gamma, E)) @ nu
    return t, c


# ---------------------------------------------------------------------------
# closed-form field catalog


def identity_field(n, lo=(0, 0, 0), hi=(1, 1, 1)):
    return FieldGrid.from_functions(lambda X: X.copy(),
                                    lambda X: np.broadcast_to(T.I3, X.shape[:-1] + (3, 3)).copy(),
                                    n, lo, hi)


def uniform_stretch_field(n, stretch=0.1, lo=(0, 0, 0), hi=(1, 1, 1), rotation=None):
    """``chi = Q diag(1 + stretch) X``, ``R = Q`` (Q = I by default)."""
    Q = T.I3 if rotation is None else np.asarray(rotation, dtype=float)
    U = np.diag(1.0 + np.broadcast_to(np.asarray(stretch, dtype=float), (3,)))
    return FieldGrid.from_functions(
        lambda X: X @ (Q @ U).T,
        lambda X: np.broadcast_to(Q, X.shape[:-1] + (3, 3)).copy(),
        n, lo, hi,
    )


def axis_twist_field(n, rate=1.0, axis=(0, 0, 1), direction=(1, 0, 0),
                     lo=(0, 0, 0), hi=(1, 1, 1)):
    """``chi = X`` and ``R`` a rotation about ``axis`` by ``rate * (direction . X)``."""
    d = np.asarray(direction, dtype=float)
    return FieldGrid.from_functions(
        lambda X: X.copy(),
        lambda X: T.rotation_from_axis_angle(axis, rate * (X @ d)),
        n, lo, hi,
    )


def sinusoidal_field(n, amplitude=0.1, wavevector=(np.pi, 0, 0), direction=(0, 1, 0),
                     rot_amplitude=0.0, rot_axis=(0, 0, 1), lo=(0, 0, 0), hi=(1, 1, 1)):
    """``chi = X + A sin(k.X) d``; ``R`` rotates about ``rot_axis`` by ``B sin(k.X)``."""
    k = np.asarray(wavevector, dtype=float)
    d = np.asarray(direction, dtype=float)
    return FieldGrid.from_functions(
        lambda X: X + amplitude * np.sin(X @ k)[..., None] * d,
        lambda X: T.rotation_from_axis_angle(rot_axis, rot_amplitude * np.sin(X @ k)),
        n, lo, hi,
    )


CATALOG = {
    "identity": identity_field,
    "uniform_stretch": uniform_stretch_field,
    "axis_twist": axis_twist_field,
    "sinusoidal": sinusoidal_field,
}
