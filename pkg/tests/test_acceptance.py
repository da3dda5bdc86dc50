"""End-to-end acceptance criteria, each at its stated tolerance.

Every test prints a single PASS/FAIL line; the lines are repeated in the
pytest terminal summary under "acceptance criteria".
"""

import time

import numpy as np

from cosserat_lh import kinematics as K
from cosserat_lh import tensors as T
from cosserat_lh import variation as V
from cosserat_lh.checks import derivative_suite, identity_errors, skewness_orders
from cosserat_lh.material import IsotropicQuadraticMaterial
from cosserat_lh.rotation_family import det_preservation_check, rotation_family_integrate
from cosserat_lh.stability import check_material

SEED = 20240611
STABLE = IsotropicQuadraticMaterial(mu=1.0, mu_c=0.5, lam=0.0, a1=1.0, a2=1.0, a3=1.0)


def test_c1_condition_recovery(acceptance):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    verdict_mismatch = margin_mismatch = 0
    worst = 0.0
    for _ in range(200):
        mu, mu_c, lam, a1, a2, a3 = rng.uniform(-2, 2, size=6)
        mat = IsotropicQuadraticMaterial(mu, mu_c, lam, a1, a2, a3)
        rep = check_material(mat, eig_tol=1e-8)
        margins = {"2mu+lambda": 2 * mu + lam, "mu+mu_c": mu + mu_c,
                   "2a1+a3": 2 * a1 + a3, "a1+a2": a1 + a2}
        conj = all(v >= -1e-8 for v in margins.values())
        verdict_mismatch += (rep.verdict != "violated") != conj
        margin_mismatch += any(abs(rep.margins[k]["value"] - v) > 1e-8
                               or rep.margins[k]["pass"] != (v >= -1e-8)
                               for k, v in margins.items())
        closed = min(2 * mu + lam, mu + mu_c, (2 / 3) * (2 * a1 + a3), a1 + a2)
        worst = max(worst, abs(rep.min_eigenvalue - closed))
    elapsed = time.perf_counter() - start
    ok = verdict_mismatch == 0 and margin_mismatch == 0 and worst <= 1e-8 and elapsed <= 60
    acceptance("C1 condition recovery", ok,
               f"200 tuples, verdict mismatches {verdict_mismatch}, margin mismatches "
               f"{margin_mismatch}, max |min eig - closed form| {worst:.2e} (tol 1e-8), "
               f"{elapsed:.1f} s (limit 60 s)")


def test_c2_derivative_oracle(acceptance):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    results = derivative_suite(STABLE, rng, n_states=100)
    elapsed = time.perf_counter() - start
    ok = all(r.passed for r in results) and elapsed <= 10
    detail = ", ".join(f"{r.check} {r.value:.1e}" for r in results)
    acceptance("C2 derivative oracle", ok,
               f"100 states, {detail} (rel tol 1e-6, W_EGamma abs tol 1e-8), "
               f"{elapsed:.1f} s (limit 10 s)")


def test_c3_kinematic_invariants(acceptance):
    res, orders = skewness_orders((9, 17, 33))
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(5):
        g = K.sinusoidal_field(17, amplitude=0.1, wavevector=(np.pi, 2.0, 1.0),
                               rot_amplitude=0.4, rot_axis=rng.standard_normal(3))
        Q = T.random_rotation(rng)
        moved = K.FieldGrid(g.chi @ Q.T + rng.standard_normal(3), Q @ g.R)
        worst = max(worst, np.abs(moved.E - g.E).max(), np.abs(moved.Gamma - g.Gamma).max())
    ok = min(orders) >= 1.9 and worst <= 1e-10
    acceptance("C3 kinematic invariants", ok,
               f"skewness residuals {', '.join(f'{r:.2e}' for r in res)}, observed orders "
               f"{', '.join(f'{o:.2f}' for o in orders)} (min 1.9); Galilean defect "
               f"{worst:.1e} (tol 1e-10)")


def test_c4_equilibrium_identities(acceptance):
    rng = np.random.default_rng(SEED)
    mat = IsotropicQuadraticMaterial(1.3, 0.4, 0.7, 0.9, 0.6, 1.1)
    scale = mat.modulus_scale()
    grids = [K.identity_field(9),
             K.uniform_stretch_field(9, stretch=(0.1, -0.05, 0.2), rotation=T.random_rotation(rng))]
    residual = 0.0
    for g in grids:
        gb, pi = K.equilibrium_residuals(g, mat)
        interior = (slice(1, -1),) * 3
        residual = max(residual, np.abs(gb[interior]).max(), np.abs(pi[interior]).max())

    g = grids[1]
    loads = V.DeadLoad(t={f: K.tractions(g, mat, f)[0] for f in K.FACES})
    escale = V.energy_scale(g, mat)
    fv = 0.0
    for _ in range(20):
        free = tuple(f for f in K.FACES if rng.random() < 0.5)
        p = V.random_admissible_pair(g, free, K.FACES, rng)
        fv = max(fv, abs(V.first_variation(g, mat, p, loads)))
    ok = residual <= 1e-10 * scale and fv <= 1e-8 * escale
    acceptance("C4 equilibrium identities", ok,
               f"interior |g|, |pi| max {residual:.1e} (tol {1e-10 * scale:.1e}); "
               f"first variation with matched loads {fv:.1e} (tol {1e-8 * escale:.1e})")


def test_c5_theorem_probe(acceptance):
    start = time.perf_counter()
    grid = K.identity_field(33)
    x0 = (0.5, 0.5, 0.5)
    spec = V.ProbeSpec(x0=x0, a=(1.0, 0.3, -0.2), b=(0.2, -0.5, 0.7), n=(0.6, 0.8, 0.0),
                       k_list=(8.0, 16.0, 32.0), eps_list=(0.4, 0.2, 0.1))
    rows = V.oscillatory_probe(grid, STABLE, spec)
    table = {(r["epsilon"], r["k"]): r for r in rows}

    # residual decay per k-doubling, at every epsilon
    k_ratios = [table[(e, k)]["residual"] / table[(e, 2 * k)]["residual"]
                for e in spec.eps_list for k in (8.0, 16.0)]
    k_ok = all(3 <= q <= 5 for q in k_ratios)

    # signed F-term contribution per epsilon-halving, at every k
    f_ratios = [table[(e, k)]["f_term"] / table[(e / 2, k)]["f_term"]
                for k in spec.k_list for e in (0.4, 0.2)]
    f_ok = all(1.6 <= q <= 2.4 for q in f_ratios)
    abs_ratios = [table[(e, 8.0)]["f_term_abs"] / table[(e / 2, 8.0)]["f_term_abs"]
                  for e in (0.4, 0.2)]

    n = np.array([0.6, 0.8, 0.0])
    par = V.ProbeSpec(x0=x0, a=tuple(n), b=(0.0, 0.0, 0.0), n=tuple(n), k_list=(32.0,),
                      eps_list=(0.25,))
    value = V.oscillatory_probe(grid, STABLE, par)[0]["value"]
    target = (2 * STABLE.mu + STABLE.lam) * V.BUMPS["cos2"][1]
    lim_err = abs(value / target - 1)
    lim_ok = lim_err <= 0.02

    elapsed = time.perf_counter() - start
    ok = k_ok and f_ok and lim_ok and elapsed <= 300
    acceptance("C5 theorem probe", ok,
               f"k-doubling residual ratios {', '.join(f'{q:.3f}' for q in k_ratios)} "
               f"({'ok' if k_ok else 'outside [3, 5]'}); signed F-term ratios per "
               f"eps-halving {', '.join(f'{q:.3f}' for q in f_ratios)} "
               f"({'ok' if f_ok else 'outside [1.6, 2.4]'}; |F| ratios at k=8 "
               f"{', '.join(f'{q:.2f}' for q in abs_ratios)}); a||n limit error "
               f"{100 * lim_err:.2f}% ({'ok' if lim_ok else 'above 2%'}); grid 33^3, "
               f"{elapsed:.1f} s (limit 300 s)")


def test_c6_rotation_integrator(acceptance):
    rng = np.random.default_rng(SEED)
    R = T.random_rotation(rng)
    w = rng.standard_normal(3)
    Om = T.skew_from_axial(w)
    traj = rotation_family_integrate(R, lambda e: Om, 1.0, 1e-3)
    closed = np.abs(traj.Q[-1] - T.rotation_from_axis_angle(w, np.linalg.norm(w)) @ R).max()
    drift = traj.orthogonality_drift()
    det = det_preservation_check(traj)

    Phi = T.skew_from_axial(rng.standard_normal(3))
    traj2 = rotation_family_integrate(R, lambda e: Om + e * Phi, 0.1, 1e-3)
    d1 = np.abs(traj2.dQ0 - Om @ R).max()
    d2 = np.abs(traj2.d2Q0 - (Phi @ R + Om @ Om @ R)).max()
    ok = closed <= 1e-10 and drift <= 1e-10 and det <= 1e-10 and d1 <= 1e-6 and d2 <= 1e-6
    acceptance("C6 rotation integrator", ok,
               f"Rodrigues error {closed:.1e}, |QQ^t - I| {drift:.1e}, |det Q - 1| {det:.1e} "
               f"(tol 1e-10); Q'(0) error {d1:.1e}, Q''(0) error {d2:.1e} (tol 1e-6)")


def test_c7_structural_identities(acceptance):
    rng = np.random.default_rng(SEED)
    errs = identity_errors(rng, n=50)

    mat = IsotropicQuadraticMaterial(1.3, 0.4, 0.7, 0.9, 0.6, 1.1)
    g = K.sinusoidal_field(7, amplitude=0.1, rot_amplitude=0.3)
    para = 0.0
    for _ in range(50):
        p = V.random_admissible_pair(g, rng=rng)
        q = V.random_admissible_pair(g, rng=rng)

        def s(x):
            return V.second_variation(g, mat, x, check_equilibrium=False)

        lhs = s(p + q) + s(p - q)
        rhs = 2 * s(p) + 2 * s(q)
        para = max(para, abs(lhs - rhs) / max(1.0, abs(rhs)))
    ok = all(v <= 1e-12 for v in errs.values()) and para <= 1e-8
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errs.items())
    acceptance("C7 structural identities", ok,
               f"50 instances each: {detail} (tol 1e-12); parallelogram law {para:.1e} "
               f"(tol 1e-8)")
