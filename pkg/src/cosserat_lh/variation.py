"""First and second variations of the dead-load potential energy on a grid.

Volume and face integrals use the trapezoidal rule on the node grid.
Variation gradients come from the grid stencil unless a pair carries exact
gradients (the oscillatory probe does, since its wavelengths are far below
the grid spacing).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import tensors as T
from .errors import InadmissiblePair, NotEquilibratedWarning, ProbeOutsideDomain
from .kinematics import FACES, face_axis_side, face_values, grad
from .stability import LHQuadraticForm, lh_form

EQUILIBRIUM_GATE_PAIRS = 12
EQUILIBRIUM_GATE_TOL = 1e-6
ADMISSIBILITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class VariationPair:
    """Variations ``u`` (of chi) and ``omega = axl(Rdot R^t)`` on the nodes.

    ``u`` must vanish on every face outside ``traction_faces`` and ``omega``
    on every face outside ``couple_faces``.
    """

    u: np.ndarray
    omega: np.ndarray
    traction_faces: tuple = FACES
    couple_faces: tuple = FACES
    grad_u: np.ndarray | None = None
    grad_omega: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "traction_faces", tuple(self.traction_faces))
        object.__setattr__(self, "couple_faces", tuple(self.couple_faces))
        for face in self.traction_faces + self.couple_faces:
            face_axis_side(face)
        for name, arr, free in (("u", self.u, self.traction_faces),
                                ("omega", self.omega, self.couple_faces)):
            scale = max(1.0, float(np.abs(arr).max(initial=0.0)))
            for face in FACES:
                if face in free:
                    continue
                if np.abs(face_values(arr, face)).max() > ADMISSIBILITY_TOL * scale:
                    raise InadmissiblePair(f"{name} does not vanish on constrained face {face}")

    @classmethod
    def zero(cls, grid, **kw):
        z = np.zeros(grid.chi.shape)
        return cls(z, z.copy(), **kw)

    def gradients(self, grid):
        gu = grad(self.u, grid.h) if self.grad_u is None else self.grad_u
        gw = grad(self.omega, grid.h) if self.grad_omega is None else self.grad_omega
        return gu, gw

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def _combine(self, other, sign):
        def mix(x, y):
            if x is None or y is None:
                return None
            return x + sign * y
        return VariationPair(
            self.u + sign * other.u, self.omega + sign * other.omega,
            tuple(f for f in self.traction_faces if f in other.traction_faces),
            tuple(f for f in self.couple_faces if f in other.couple_faces),
            mix(self.grad_u, other.grad_u), mix(self.grad_omega, other.grad_omega),
        )


@dataclass(frozen=True, eq=False)
class DeadLoad:
    """Configuration-independent force ``t`` and couple tensor ``M`` per face.

    ``t[face]`` has shape ``(n, n, 3)``, ``M[face]`` shape ``(n, n, 3, 3)``.
    Faces absent from a dict carry no load.
    """

    t: dict = field(default_factory=dict)
    M: dict = field(default_factory=dict)


def couple_traction(M, R):
    """``c = 2 axl[skew(M R^t)]``."""
    return 2.0 * T.axl(T.skew(M @ T.transpose(R)), tol=None)


def strain_rates(grid, pair, node=None):
    """``Edot = R^t(grad u - Omega F)`` and ``Gammadot = R^t grad omega``."""
    gu, gw = pair.gradients(grid)
    Omega = T.skew_from_axial(pair.omega)
    Rt = T.transpose(grid.R)
    Edot = Rt @ (gu - Omega @ grid.F)
    Gdot = Rt @ gw
    if node is not None:
        node = tuple(node)
        return Edot[node], Gdot[node]
    return Edot, Gdot


def _load_terms(grid, pair, loads, u, omega):
    """``int_t t.u da + int_c c.omega da`` over the free faces."""
    if loads is None:
        return 0.0
    total = 0.0
    for face in pair.traction_faces:
        if face in loads.t:
            total += grid.integrate_face(face, np.einsum("...i,...i", loads.t[face], face_values(u, face)))
    for face in pair.couple_faces:
        if face in loads.M:
            c = couple_traction(loads.M[face], face_values(grid.R, face))
            total += grid.integrate_face(face, np.einsum("...i,...i", c, face_values(omega, face)))
    return total


def first_variation(grid, material, pair, loads=None):
    """``int (R W_G . grad w + R W_E . grad u - R W_E F^t . Omega) dv - loads``."""
    gu, gw = pair.gradients(grid)
    E, Gamma, R = grid.E, grid.Gamma, grid.R
    Rsigma = R @ material.stress_WE(E, Gamma)
    Rm = R @ material.couple_WGamma(Gamma, E)
    Omega = T.skew_from_axial(pair.omega)
    density = (T.inner(Rm, gw) + T.inner(Rsigma, gu)
               - T.inner(Rsigma @ T.transpose(grid.F), Omega))
    return grid.integrate(density) - _load_terms(grid, pair, loads, pair.u, pair.omega)


def second_variation_densities(grid, material, pair):
    """Pointwise Hessian-bearing integrand and the geometric term ``F``.

    Returns ``(leading, f_density)``; their sum is the volume integrand of the
    second variation at an equilibrium state.
    """
    gu, gw = pair.gradients(grid)
    E, Gamma, R, Fdef = grid.E, grid.Gamma, grid.R, grid.F
    Rt = T.transpose(R)
    sigma = material.stress_WE(E, Gamma)
    m = material.couple_WGamma(Gamma, E)
    Omega = T.skew_from_axial(pair.omega)

    A = lambda X: material.action_WEE(X, E, Gamma)  # noqa: E731
    B = lambda X: material.action_WEGamma(X, E, Gamma)  # noqa: E731
    Bt = lambda X: material.action_WGammaE(X, E, Gamma)  # noqa: E731
    C = lambda X: material.action_WGammaGamma(X, E, Gamma)  # noqa: E731

    Gu = Rt @ gu
    Gw = Rt @ gw
    leading = (T.inner(Gu, A(Gu)) + T.inner(Gu, B(Gw))
               + T.inner(Gw, Bt(Gu)) + T.inner(Gw, C(Gw)))

    ORs = Omega @ R @ sigma
    ROF = Rt @ Omega @ Fdef
    A_ROF = A(ROF)
    f_density = (
        2.0 * T.inner(ORs, gu)
        + T.inner(Omega @ R @ m, gw)
        - T.inner(ORs @ T.transpose(Fdef), Omega)
        + T.inner(ROF, A_ROF)
        - 2.0 * T.inner(Gu, A_ROF)
        - T.inner(Gw, Bt(ROF))
        - T.inner(ROF, B(Gw))
    )
    return leading, f_density


def f_term(grid, material, pair, node=None):
    """Geometric term ``F(grad u, grad omega, Omega)`` (field or one node)."""
    f = second_variation_densities(grid, material, pair)[1]
    return f if node is None else float(f[tuple(node)])


def _couple_boundary_term(grid, pair, loads):
    """``int_{couple faces} M R^t . Omega^2 da``."""
    if loads is None:
        return 0.0
    total = 0.0
    for face in pair.couple_faces:
        if face not in loads.M:
            continue
        Om = T.skew_from_axial(face_values(pair.omega, face))
        MRt = loads.M[face] @ T.transpose(face_values(grid.R, face))
        total += grid.integrate_face(face, T.inner(MRt, Om @ Om))
    return total


def second_variation_parts(grid, material, pair, loads=None, second_pair=None):
    leading, f_density = second_variation_densities(grid, material, pair)
    parts = {
        "leading": grid.integrate(leading),
        "f_term": grid.integrate(f_density),
        "boundary": -_couple_boundary_term(grid, pair, loads),
        "first_line": 0.0,
    }
    if second_pair is not None:
        parts["first_line"] = first_variation(grid, material, second_pair, loads)
    return parts


def second_variation(grid, material, pair, loads=None, second_pair=None,
                     check_equilibrium=True, seed=0):
    """Second variation of the potential energy for the variation ``pair``.

    ``second_pair`` holds the second-order fields ``(v, phi)``; their
    contribution vanishes at equilibrium and is evaluated only when given.
    With ``check_equilibrium`` the state is first tested with
    :func:`equilibrium_gate`; a failure emits :class:`NotEquilibratedWarning`.
    """
    if check_equilibrium:
        ok, worst = equilibrium_gate(grid, material, pair.traction_faces,
                                     pair.couple_faces, loads, seed=seed)
        if not ok:
            warnings.warn(
                f"state is not equilibrated (|first variation| up to {worst:.3e}); "
                "second variation is not a stability measure",
                NotEquilibratedWarning, stacklevel=2,
            )
    return float(sum(second_variation_parts(grid, material, pair, loads, second_pair).values()))


# ---------------------------------------------------------------------------
# admissible test pairs and the equilibrium gate


def _axis_profile(s, lo_fixed, hi_fixed, r1, r2):
    """Quadratic in s in [0, 1] vanishing on the fixed ends, with its derivative."""
    if lo_fixed and hi_fixed:
        return s * (1 - s), 1 - 2 * s
    if lo_fixed:
        return s * (1 + r1 * s), 1 + 2 * r1 * s
    if hi_fixed:
        q = 1 - s
        return q * (1 + r1 * q), -(1 + 2 * r1 * q)
    return 1 + r1 * s + r2 * s * s, r1 + 2 * r2 * s


def _polynomial_field(grid, free_faces, rng):
    """Random vector field, quadratic per coordinate, zero on fixed faces.

    The grid stencil differentiates such fields exactly and trapezoidal
    quadrature integrates their derivatives exactly, so the discrete
    divergence theorem holds to rounding.
    """
    s = (grid.X - grid.lo) / (grid.hi - grid.lo)
    values = np.empty(grid.X.shape)
    grads = np.empty(grid.X.shape + (3,))
    for i in range(3):
        prof, dprof = [], []
        for A in range(3):
            axis = "xyz"[A]
            r1, r2 = rng.uniform(-1, 1, size=2)
            p, dp = _axis_profile(s[..., A], axis + "-" not in free_faces,
                                  axis + "+" not in free_faces, r1, r2)
            prof.append(p)
            dprof.append(dp / (grid.hi[A] - grid.lo[A]))
        amp = rng.uniform(-1, 1)
        values[..., i] = amp * prof[0] * prof[1] * prof[2]
        for A in range(3):
            others = [prof[B] for B in range(3) if B != A]
            grads[..., i, A] = amp * dprof[A] * others[0] * others[1]
    return values, grads


def random_admissible_pair(grid, traction_faces=FACES, couple_faces=FACES, rng=None):
    rng = np.random.default_rng(rng)
    u, gu = _polynomial_field(grid, traction_faces, rng)
    w, gw = _polynomial_field(grid, couple_faces, rng)
    return VariationPair(u, w, traction_faces, couple_faces, gu, gw)


def energy_scale(grid, material):
    return material.modulus_scale() * grid.volume


def equilibrium_gate(grid, material, traction_faces=FACES, couple_faces=FACES,
                     loads=None, n_pairs=EQUILIBRIUM_GATE_PAIRS,
                     tol=EQUILIBRIUM_GATE_TOL, seed=0):
    """First variation on random admissible pairs against ``tol * energy scale``.

    Returns ``(passed, max |first variation|)``.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_pairs):
        pair = random_admissible_pair(grid, traction_faces, couple_faces, rng)
        worst = max(worst, abs(first_variation(grid, material, pair, loads)))
    return worst <= tol * max(energy_scale(grid, material), 1e-300), worst


# ---------------------------------------------------------------------------
# oscillatory probe


def cos2_bump(Y):
    """``f(Y) = prod cos^2(pi Y_i / 2)`` on ``[-1, 1]^3``, zero outside; returns (f, grad f)."""
    inside = np.all(np.abs(Y) <= 1.0, axis=-1)
    c2 = np.cos(0.5 * np.pi * Y) ** 2
    dc2 = -0.5 * np.pi * np.sin(np.pi * Y)
    f = np.prod(c2, axis=-1)
    g = np.stack([dc2[..., A] * np.prod(np.delete(c2, A, axis=-1), axis=-1)
                  for A in range(3)], axis=-1)
    return np.where(inside, f, 0.0), np.where(inside[..., None], g, 0.0)


BUMPS = {
    # name: (function, closed-form integral of f^2 over R^3)
    "cos2": (cos2_bump, 0.75**3),
}


@dataclass(frozen=True)
class ProbeSpec:
    x0: tuple
    a: tuple
    b: tuple
    n: tuple
    k_list: tuple = (8.0, 16.0, 32.0)
    eps_list: tuple = (0.25,)
    bump: str = "cos2"

    def __post_init__(self):
        if self.bump not in BUMPS:
            raise ValueError(f"unknown bump {self.bump!r}; known: {sorted(BUMPS)}")
        if any(k <= 0 for k in self.k_list) or any(e <= 0 for e in self.eps_list):
            raise ValueError("k and epsilon values must be positive")


PROBE_COLUMNS = ("epsilon", "k", "value", "limit", "residual", "f_term")


def _check_probe_support(grid, spec):
    x0 = np.asarray(spec.x0, dtype=float)
    for eps in spec.eps_list:
        if np.any(x0 - eps <= grid.lo) or np.any(x0 + eps >= grid.hi):
            raise ProbeOutsideDomain(
                f"support of the probe at x0={x0.tolist()} with epsilon={eps:g} "
                "is not strictly inside the domain"
            )


def _probe_pairs(grid, spec, eps, k, alpha, beta):
    """Real and imaginary parts of ``alpha exp(i k n.Y) f(Y)`` (and beta)."""
    bump = BUMPS[spec.bump][0]
    n = np.asarray(spec.n, dtype=float)
    Y = (grid.X - np.asarray(spec.x0, dtype=float)) / eps
    f, gf = bump(Y)
    phase = k * (Y @ n)
    for trig, dtrig in ((np.cos, lambda p: -np.sin(p)), (np.sin, np.cos)):
        g = trig(phase) * f
        # gradient with respect to Y equals the X-gradient of eps * g
        dg = trig(phase)[..., None] * gf + (k * dtrig(phase) * f)[..., None] * n
        yield VariationPair(
            eps * g[..., None] * alpha, eps * g[..., None] * beta, (), (),
            T.dyad(alpha, dg), T.dyad(beta, dg),
        )


def oscillatory_probe(grid, material, spec):
    """Scaled second variation for the rapidly oscillating variation family.

    For every ``(epsilon, k)`` the fields ``u = eps xi(Y)``, ``omega = eps eta(Y)``
    with ``Y = (X - x0)/eps``, ``xi = alpha exp(i k n.Y) f``, ``eta = beta exp(i k n.Y) f``
    are evaluated through their real and imaginary parts, whose second
    variations add up to the Hermitian form. Rows report

    * ``value``: total / (eps^3 k^2)
    * ``limit``: the rank-one form at ``(a, b, n)`` times ``int f^2``
    * ``residual``: value - limit, which decays like k^-2
    * ``f_term``: the contribution of ``F`` to ``value``
    * ``f_term_abs``: the same with ``|F|`` in place of ``F`` (not in the CSV)
    """
    _check_probe_support(grid, spec)
    x0 = np.asarray(spec.x0, dtype=float)
    node = tuple(np.clip(np.rint((x0 - grid.lo) / grid.h).astype(int), 0, grid.n - 1))
    R0 = grid.R[node]
    a = np.asarray(spec.a, dtype=float)
    b = np.asarray(spec.b, dtype=float)
    n = np.asarray(spec.n, dtype=float)
    alpha, beta = R0 @ a, R0 @ b

    form = LHQuadraticForm.from_material(material, grid.E[node], grid.Gamma[node])
    limit = lh_form(form, a, b, n) * BUMPS[spec.bump][1]

    rows = []
    for eps in spec.eps_list:
        for k in spec.k_list:
            lead = fterm = 0.0
            fabs = 0.0
            for pair in _probe_pairs(grid, spec, eps, k, alpha, beta):
                leading, f_density = second_variation_densities(grid, material, pair)
                lead += grid.integrate(leading)
                fterm += grid.integrate(f_density)
                fabs += grid.integrate(np.abs(f_density))
            norm_ = eps**3 * k**2
            value = (lead + fterm) / norm_
            rows.append({
                "epsilon": float(eps), "k": float(k), "value": value,
                "limit": limit, "residual": value - limit, "f_term": fterm / norm_,
                "f_term_abs": fabs / norm_,
            })
    return rows


def probe_table_csv(rows):
    lines = [",".join(PROBE_COLUMNS)]
    for r in rows:
        lines.append(",".join(repr(float(r[c])) for c in PROBE_COLUMNS))
    return "\n".join(lines) + "\n"
