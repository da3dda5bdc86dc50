"""Small-tensor algebra on 3-vectors, 3x3 and 3x3x3x3 arrays.

Everything operates on plain ``numpy`` arrays with the tensor indices in the
trailing axes, so a field of tensors on a grid (shape ``(..., 3, 3)``) goes
through the same functions as a single tensor.

Conventions
-----------
* ``inner(A, B) = tr(A B^t) = A_ij B_ij``
* ``apply4(A, B)_ij = A_ijkl B_kl``
* ``transpose4(A)_ijkl = A_klij`` so that ``B . A^t[C] = C . A[B]``
* ``axl(W) ^ v = W v``, i.e. ``W_32 = w_1``
"""

from __future__ import annotations

import numpy as np

from .errors import NotRotation, NotSkew

SKEW_TOL = 1e-10

I3 = np.eye(3)

# permutation symbol e_ijk
LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0


def inner(A, B):
    return np.einsum("...ij,...ij->...", A, B)


def norm(A):
    return np.sqrt(inner(A, A))


def tr(A):
    return np.trace(A, axis1=-2, axis2=-1)


def transpose(A):
    return np.swapaxes(A, -1, -2)


def sym(A):
    return 0.5 * (A + transpose(A))


def skew(A):
    return 0.5 * (A - transpose(A))


def spherical(A):
    return (tr(A) / 3.0)[..., None, None] * I3


def dev(A):
    return A - spherical(A)


def dyad(a, b):
    """Tensor product ``a (x) b``."""
    return np.einsum("...i,...j->...ij", a, b)


def skew_from_axial(w):
    w = np.asarray(w, dtype=float)
    W = np.zeros(w.shape[:-1] + (3, 3))
    W[..., 0, 1] = -w[..., 2]
    W[..., 0, 2] = w[..., 1]
    W[..., 1, 0] = w[..., 2]
    W[..., 1, 2] = -w[..., 0]
    W[..., 2, 0] = -w[..., 1]
    W[..., 2, 1] = w[..., 0]
    return W


def axl(W, tol=SKEW_TOL):
    """Axial vector of a skew tensor.

    Raises :class:`NotSkew` when ``|sym W| > tol |W|`` anywhere in the
    (possibly batched) input. Pass ``tol=None`` to skip the check and take
    the axial vector of the skew part.
    """
    W = np.asarray(W, dtype=float)
    if tol is not None:
        bad = norm(sym(W)) > tol * norm(W)
        if np.any(bad):
            raise NotSkew(f"tensor is not skew to relative tolerance {tol:g}")
    # w_i = -1/2 e_ijk W_jk
    return -0.5 * np.einsum("ijk,...jk->...i", LEVI_CIVITA, W)


def apply4(A, B):
    """Linear action ``A[B]`` of a fourth-order tensor."""
    return np.einsum("ijkl,...kl->...ij", A, B)


def transpose4(A):
    return np.transpose(A, (2, 3, 0, 1))


def identity4():
    return np.einsum("ik,jl->ijkl", I3, I3)


def dense_from_action(action):
    """Dense 81-component tensor of a linear map on 3x3 tensors."""
    A = np.zeros((3, 3, 3, 3))
    for k in range(3):
        for l in range(3):
            E_kl = np.zeros((3, 3))
            E_kl[k, l] = 1.0
            A[:, :, k, l] = action(E_kl)
    return A


def is_major_symmetric(A, rng=None, n_pairs=20, rtol=1e-12):
    """Random-pair test of ``B . A[C] == C . A[B]``."""
    rng = np.random.default_rng(rng)
    scale = max(np.abs(A).max(), 1e-300)
    for _ in range(n_pairs):
        B = rng.standard_normal((3, 3))
        C = rng.standard_normal((3, 3))
        lhs = inner(B, apply4(A, C))
        rhs = inner(C, apply4(A, B))
        if abs(lhs - rhs) > rtol * scale * norm(B) * norm(C):
            return False
    return True


def rotation_from_axis_angle(axis, angle):
    """Rodrigues formula; broadcasts over ``angle``."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    K = skew_from_axial(axis)
    angle = np.asarray(angle, dtype=float)[..., None, None]
    return I3 + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def expm_skew(W):
    """``exp(W)`` for a skew tensor ``W`` (Rodrigues)."""
    w = axl(W, tol=None)
    theta = np.linalg.norm(w, axis=-1)[..., None, None]
    small = theta < 1e-8
    safe = np.where(small, 1.0, theta)
    c1 = np.where(small, 1.0 - theta**2 / 6.0, np.sin(safe) / safe)
    c2 = np.where(small, 0.5 - theta**2 / 24.0, (1.0 - np.cos(safe)) / safe**2)
    return I3 + c1 * W + c2 * (W @ W)


def random_rotation(rng=None):
    rng = np.random.default_rng(rng)
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def check_rotation(R, tol=1e-10):
    """Raise :class:`NotRotation` unless every ``R`` is proper orthogonal."""
    R = np.asarray(R, dtype=float)
    drift = norm(transpose(R) @ R - I3)
    if np.any(drift > tol) or np.any(np.linalg.det(R) <= 0.0):
        raise NotRotation(
            f"rotation check failed (max |R^tR - I| = {np.max(drift):.3e})"
        )
    return R
