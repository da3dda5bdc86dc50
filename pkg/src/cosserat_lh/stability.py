"""Legendre-Hadamard (rank-one) check for Cosserat energies.

At a material point the second derivatives ``A = W_EE``, ``B = W_EGamma``,
``Bt = W_GammaE`` and ``C = W_GammaGamma`` define, for every direction ``n``,
a quadratic form in ``(a, b)``:

    a(x)n . A[a(x)n] + a(x)n . B[b(x)n] + b(x)n . Bt[a(x)n] + b(x)n . C[b(x)n]

which is represented by a symmetric 6x6 acoustic block matrix ``M(n)``. The
condition holds when the smallest eigenvalue of ``M(n)`` is non-negative for
every unit ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import tensors as T
from .errors import ZeroDirection

DEFAULT_RESOLUTION = 2048
MIN_RESOLUTION = 64
REFINE_ITERATIONS = 20
REFINE_CANDIDATES = 5
REFINE_ROUNDS = 3
JACOBI_TOL = 1e-12
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# eigenvalues


def jacobi_eigh(M, tol=JACOBI_TOL, max_sweeps=60):
    """Cyclic Jacobi eigen-decomposition of symmetric matrices.

    Works on a stack ``(..., n, n)``; every matrix in the stack is rotated
    together. Sweeps stop once the off-diagonal Frobenius norm of each matrix
    is below ``tol * |M|_F``. Returns ``(w, V)`` with ascending eigenvalues
    and eigenvectors in the columns of ``V``.
    """
    A = np.array(M, dtype=float, copy=True)
    squeeze = A.ndim == 2
    if squeeze:
        A = A[None]
    nb, n, _ = A.shape
    V = np.broadcast_to(np.eye(n), A.shape).copy()
    target = tol * np.sqrt(np.sum(A * A, axis=(-2, -1)))
    offmask = ~np.eye(n, dtype=bool)

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(A[:, offmask] ** 2, axis=-1))
        if np.all(off <= target):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                active = apq != 0.0
                if not np.any(active):
                    continue
                app = A[:, p, p]
                aqq = A[:, q, q]
                safe = np.where(active, apq, 1.0)
                theta = (aqq - app) / (2.0 * safe)
                t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(theta == 0.0, 1.0, t)
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                c_ = c[:, None]
                s_ = s[:, None]
                Ap = A[:, :, p].copy()
                Aq = A[:, :, q]
                A[:, :, p] = c_ * Ap - s_ * Aq
                A[:, :, q] = s_ * Ap + c_ * Aq
                Ap = A[:, p, :].copy()
                Aq = A[:, q, :]
                A[:, p, :] = c_ * Ap - s_ * Aq
                A[:, q, :] = s_ * Ap + c_ * Aq
                A[:, p, q] = 0.0
                A[:, q, p] = 0.0
                Vp = V[:, :, p].copy()
                Vq = V[:, :, q]
                V[:, :, p] = c_ * Vp - s_ * Vq
                V[:, :, q] = s_ * Vp + c_ * Vq

    w = np.diagonal(A, axis1=-2, axis2=-1)
    order = np.argsort(w, axis=-1)
    w = np.take_along_axis(w, order, axis=-1)
    V = np.take_along_axis(V, order[:, None, :], axis=-1)
    if squeeze:
        return w[0], V[0]
    return w, V


def min_eigenvalue(M):
    return jacobi_eigh(M)[0][..., 0]


# ---------------------------------------------------------------------------
# quadratic form


@dataclass(frozen=True, eq=False)
class LHQuadraticForm:
    """Second-derivative blocks of ``W`` at one material point.

    ``Bt`` defaults to ``transpose4(B)``. It is kept separate so a material
    whose ``W_GammaE`` is inconsistent with ``W_EGamma`` can be diagnosed
    with :meth:`transpose_defect`.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    Bt: np.ndarray = None

    def __post_init__(self):
        if self.Bt is None:
            object.__setattr__(self, "Bt", T.transpose4(np.asarray(self.B, dtype=float)))

    @classmethod
    def from_material(cls, material, E=None, Gamma=None):
        A, B, Bt, C = material.hessian_blocks(E, Gamma)
        return cls(A=A, B=B, C=C, Bt=Bt)

    def transpose_defect(self):
        return float(np.abs(self.Bt - T.transpose4(self.B)).max())

    def scale(self):
        return float(max(np.abs(self.A).max(), np.abs(self.B).max(),
                         np.abs(self.Bt).max(), np.abs(self.C).max()))

    def rotated(self, Q):
        """The form seen in a frame rotated by ``Q`` (all four slots)."""
        def rot(X):
            return np.einsum("ia,jb,kc,ld,abcd->ijkl", Q, Q, Q, Q, X)
        return LHQuadraticForm(rot(self.A), rot(self.B), rot(self.C), rot(self.Bt))


def lh_form(form, a, b, n):
    an = T.dyad(a, n)
    bn = T.dyad(b, n)
    return float(
        T.inner(an, T.apply4(form.A, an)) + T.inner(an, T.apply4(form.B, bn))
        + T.inner(bn, T.apply4(form.Bt, an)) + T.inner(bn, T.apply4(form.C, bn))
    )


def necessary_subconditions(form, vec, n, block="a"):
    """``a(x)n . A[a(x)n]`` (block "a") or ``b(x)n . C[b(x)n]`` (block "b")."""
    zero = np.zeros(3)
    if block == "a":
        return lh_form(form, vec, zero, n)
    if block == "b":
        return lh_form(form, zero, vec, n)
    raise ValueError(f"block must be 'a' or 'b', got {block!r}")


def acoustic_block_matrix(form, n):
    """6x6 matrix ``M(n)`` with ``(a, b) . M (a, b) = lh_form(a, b, n)``.

    ``n`` may be a stack ``(..., 3)``. The matrix is returned as assembled;
    it is symmetric whenever ``A``, ``C`` are major-symmetric and
    ``Bt = transpose4(B)``.
    """
    n = np.asarray(n, dtype=float)
    if np.any(np.linalg.norm(n, axis=-1) == 0.0):
        raise ZeroDirection("direction n must be non-zero")
    blocks = [
        [np.einsum("iAkB,...A,...B->...ik", X, n, n) for X in row]
        for row in ((form.A, form.B), (form.Bt, form.C))
    ]
    return np.block(blocks)


def _sym_acoustic(form, n):
    M = acoustic_block_matrix(form, n)
    return 0.5 * (M + np.swapaxes(M, -1, -2))


# ---------------------------------------------------------------------------
# direction scan


def fibonacci_sphere(count):
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def _tangent_frame(n):
    """Two unit tangents orthogonal to each unit row of ``n``."""
    helper = np.where(np.abs(n[:, :1]) < 0.9, [[1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0]])
    t1 = np.cross(n, helper)
    t1 /= np.linalg.norm(t1, axis=-1, keepdims=True)
    t2 = np.cross(n, t1)
    return t1, t2


def _golden_line_search(f, n0, t, radius, iterations):
    """Minimise ``f`` along the great circles ``cos(s) n0 + sin(s) t``, |s| <= radius.

    ``f`` maps a stack of directions to values; all rows are searched at once.
    """
    a = np.full(len(n0), -radius)
    b = np.full(len(n0), radius)

    def point(s):
        return np.cos(s)[:, None] * n0 + np.sin(s)[:, None] * t

    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc = f(point(c))
    fd = f(point(d))
    for _ in range(iterations):
        left = fc < fd
        a, b = np.where(left, a, c), np.where(left, d, b)
        c_new = np.where(left, b - GOLDEN * (b - a), d)
        d_new = np.where(left, c, a + GOLDEN * (b - a))
        fp = f(point(np.where(left, c_new, d_new)))
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        c, d = c_new, d_new
    return point(0.5 * (a + b))


@dataclass
class LHReport:
    verdict: str
    min_eigenvalue: float
    worst_n: np.ndarray
    worst_ab: np.ndarray
    eig_tol: float
    margins: dict | None = None
    resolution: dict = field(default_factory=dict)

    def to_dict(self):
        d = {
            "verdict": self.verdict,
            "min_eigenvalue": float(self.min_eigenvalue),
            "worst_n": [float(x) for x in self.worst_n],
            "worst_ab": [float(x) for x in self.worst_ab],
            "eig_tol": float(self.eig_tol),
            "resolution": dict(self.resolution),
        }
        if self.margins is not None:
            d["margins"] = {k: dict(v) for k, v in self.margins.items()}
        return d


def classify(min_eig, eig_tol):
    if abs(min_eig) <= eig_tol:
        return "marginal"
    return "satisfied" if min_eig > 0 else "violated"


def default_eig_tol(scale):
    return 1e-9 * (1.0 + scale)


def scan_lh(form, resolution=DEFAULT_RESOLUTION, refine_iterations=REFINE_ITERATIONS,
            refine_candidates=REFINE_CANDIDATES, eig_tol=None, margins=None):
    """Minimise the smallest eigenvalue of ``M(n)`` over unit directions.

    A Fibonacci lattice of ``resolution`` points is evaluated first; the best
    ``refine_candidates`` points are then polished by golden-section searches
    along two tangent great circles, starting inside a cap of twice the
    lattice spacing and shrinking the cap tenfold per round.
    """
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be >= {MIN_RESOLUTION}, got {resolution}")
    if eig_tol is None:
        eig_tol = default_eig_tol(form.scale())

    def objective(ns):
        return min_eigenvalue(_sym_acoustic(form, ns))

    dirs = fibonacci_sphere(resolution)
    vals = objective(dirs)
    best = np.argsort(vals, kind="stable")[:refine_candidates]
    cand = dirs[best]
    cand_vals = vals[best]

    if refine_iterations > 0 and np.ptp(vals) > 0.0:
        radius = 2.0 * math.sqrt(4.0 * math.pi / resolution)
        refined = cand
        for _ in range(REFINE_ROUNDS):
            for axis in (0, 1):
                t = _tangent_frame(refined)[axis]
                refined = _golden_line_search(objective, refined, t, radius, refine_iterations)
                refined /= np.linalg.norm(refined, axis=-1, keepdims=True)
            radius *= 0.1
        ref_vals = objective(refined)
        better = ref_vals < cand_vals
        cand = np.where(better[:, None], refined, cand)
        cand_vals = np.where(better, ref_vals, cand_vals)

    k = int(np.argmin(cand_vals))
    worst_n = cand[k] / np.linalg.norm(cand[k])
    w, V = jacobi_eigh(_sym_acoustic(form, worst_n))
    min_eig = float(w[0])
    return LHReport(
        verdict=classify(min_eig, eig_tol),
        min_eigenvalue=min_eig,
        worst_n=worst_n,
        worst_ab=V[:, 0],
        eig_tol=float(eig_tol),
        margins=margins,
        resolution={
            "directions": int(resolution),
            "refine_iterations": int(refine_iterations),
            "refine_candidates": int(refine_candidates),
        },
    )


# ---------------------------------------------------------------------------
# closed-form conditions for the isotropic quadratic energy


def isotropic_conditions(mat, tol=0.0):
    """The four closed-form margins; each passes when ``value >= -tol``."""
    values = (
        ("2mu+lambda", 2 * mat.mu + mat.lam),
        ("mu+mu_c", mat.mu + mat.mu_c),
        ("2a1+a3", 2 * mat.a1 + mat.a3),
        ("a1+a2", mat.a1 + mat.a2),
    )
    return [(name, float(v), bool(v >= -tol)) for name, v in values]


def isotropic_min_eigenvalue(mat):
    """Smallest eigenvalue of ``M(n)`` for the isotropic energy (any unit n)."""
    return min(2 * mat.mu + mat.lam, mat.mu + mat.mu_c,
               (2.0 / 3.0) * (2 * mat.a1 + mat.a3), mat.a1 + mat.a2)


def check_material(mat, resolution=DEFAULT_RESOLUTION, eig_tol=None, **scan_kw):
    """Scan the isotropic material at its natural state and attach margins."""
    form = LHQuadraticForm.from_material(mat)
    if eig_tol is None:
        eig_tol = default_eig_tol(mat.modulus_scale())
    conds = isotropic_conditions(mat, tol=eig_tol)
    margins = {name: {"value": v, "pass": ok} for name, v, ok in conds}
    return scan_lh(form, resolution=resolution, eig_tol=eig_tol, margins=margins, **scan_kw)
