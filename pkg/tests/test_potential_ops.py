import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riesz_gauss import DiracMeasure, DiscreteMeasure, RieszParams, assemble, build_set
from riesz_gauss.errors import ConfigurationError, DomainError, PreconditionError
from riesz_gauss.kernel import energy, kernel
from riesz_gauss.potential_ops import (
    balayage,
    balayage_rest_check,
    balayage_symmetry_check,
    classify_solvability,
    domination_excess,
    dual_field_check,
    equilibrium,
    harmonic_measure,
    idempotence_gap,
    kelvin_equilibrium_check,
    kelvin_potential_error,
    kelvin_transform,
    representation_check,
    restrict_context,
    series_verdict,
    sign_trichotomy_check,
    solve_gauss,
    support_report,
    wiener_series,
)
from riesz_gauss.qp import QpProblem, oracle_solve

from conftest import NEWTON, RIESZ, cloud

SPHERE = {"type": "sphere", "center": [0, 0, 0], "radius": 1.0}
BALL = {"type": "ball", "center": [0, 0, 0], "radius": 1.0}


def rel_norm(ctx, a, b):
    d = np.asarray(a) - np.asarray(b)
    return np.sqrt(max(energy(ctx, d), 0.0)) / np.sqrt(energy(ctx, a))


# ----------------------------------------------------------------- equilibrium


@pytest.mark.parametrize("dim,alpha", [(2, 1.0), (3, 2.0), (3, 0.7)])
def test_two_point_equilibrium_is_symmetric(dim, alpha):
    pts = np.zeros((2, dim))
    pts[1, 0] = 0.7
    eq = equilibrium(assemble(RieszParams(dim, alpha), cloud(pts)))
    np.testing.assert_allclose(eq.robin.weights, [0.5, 0.5], rtol=1e-14)


def test_equilibrium_identities(sphere_ctx):
    eq = equilibrium(sphere_ctx)
    assert eq.triple_gap <= 1e-6
    on = eq.gamma.weights > 0
    assert np.all(eq.potential_on_set > 0)
    assert np.all(eq.potential_on_set <= 1 + eq.potential_tol)
    np.testing.assert_allclose(eq.potential_on_set[on], 1.0, atol=eq.potential_tol)


# -------------------------------------------------------------------- balayage


def test_sweep_of_grid_measure_is_itself(ball_ctx, rng):
    w = rng.random(ball_ctx.n_points)
    bal = balayage(ball_ctx, DiscreteMeasure(ball_ctx.set, w))
    np.testing.assert_allclose(bal.swept.weights, w, atol=1e-8 * w.max())


def test_sphere_sweep_mass_tends_to_poisson_value():
    d = 2.5
    errs = []
    for res in (8, 16):
        ctx = assemble(NEWTON, build_set(SPHERE, res))
        errs.append(abs(harmonic_measure(ctx, [d, 0.3, 0.0]).mass_after - 1.0 / np.hypot(d, 0.3)))
    # first-order convergence in the mesh width
    assert errs[1] <= 0.6 * errs[0]
    assert errs[1] <= 0.03 / np.hypot(d, 0.3)


@settings(max_examples=15)
@given(st.integers(0, 2**31 - 1))
def test_mass_never_increases(seed):
    rng = np.random.default_rng(seed)
    A = build_set(SPHERE, 5)
    ctx = assemble(NEWTON, A)
    src = cloud(rng.uniform(-3, 3, (6, 3)) * 1.0 + np.array([4.0, 0, 0]))
    zeta = DiscreteMeasure(src, rng.random(6))
    bal = balayage(ctx, zeta, rng=rng)
    assert bal.mass_after <= bal.mass_before + 1e-10
    on = bal.swept.weights > 0
    assert np.all(np.abs(bal.potential_gap[on]) <= bal.solution.kkt_tol)
    assert bal.min_energy_ok
    assert idempotence_gap(ctx, bal) <= 1e-6


def test_domination_off_the_grid(sphere_ctx, rng):
    z = DiracMeasure((2.0, 0.5, 0.0))
    bal = balayage(sphere_ctx, z)
    dirs = rng.standard_normal((100, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    r = np.concatenate([rng.uniform(0, 0.6, 50), rng.uniform(1.5, 4, 50)])
    probes = dirs * r[:, None]
    probes = probes[np.linalg.norm(probes - np.array(z.location), axis=1) > 0.3]
    assert domination_excess(sphere_ctx, z, bal.swept, probes).max() <= 0.1


def test_domination_excess_shrinks_with_refinement():
    z = DiracMeasure((2.0, 0.5, 0.0))
    probes = np.array([[0.0, 0.0, 0.0], [0.2, -0.1, 0.3], [-0.3, 0.2, 0.0]])
    ex = []
    for res in (10, 20):
        ctx = assemble(NEWTON, build_set(SPHERE, res))
        ex.append(domination_excess(ctx, z, balayage(ctx, z).swept, probes).max())
    assert ex[1] < 0.6 * ex[0]


def test_symmetry_examples(sphere_ctx, rng):
    z = DiracMeasure((2.0, 0.0, 0.5))
    assert balayage_symmetry_check(sphere_ctx, z, z) <= 1e-10
    a = DiscreteMeasure(sphere_ctx.set, rng.random(sphere_ctx.n_points))
    b = DiscreteMeasure(sphere_ctx.set, rng.random(sphere_ctx.n_points))
    assert balayage_symmetry_check(sphere_ctx, a, b) <= 1e-10
    s = DiracMeasure((-0.5, 3.0, 0.2), 2.0)
    assert balayage_symmetry_check(sphere_ctx, z, s) <= 1e-3


def test_rest_examples(sphere_ctx, rng):
    z = DiracMeasure((2.5, 0.2, 0.0))
    assert balayage_rest_check(sphere_ctx, sphere_ctx, z) <= 1e-12
    half = np.sort(rng.choice(sphere_ctx.n_points, sphere_ctx.n_points // 2, replace=False))
    sub = restrict_context(sphere_ctx, half)
    assert balayage_rest_check(sub, sphere_ctx, z) <= 1e-6
    on_a = DiscreteMeasure(sub.set, rng.random(sub.n_points))
    assert balayage_rest_check(sub, sphere_ctx, on_a) <= 1e-6


def test_rest_not_a_subset(sphere_ctx, ball_ctx):
    with pytest.raises(DomainError):
        balayage_rest_check(sphere_ctx, ball_ctx, DiracMeasure((2.5, 0.0, 0.0)))


# ------------------------------------------------------------ harmonic measure


def test_node_dirac_sweeps_to_itself(ball_ctx):
    i = int(np.argmin(np.linalg.norm(ball_ctx.points, axis=1)))
    h = harmonic_measure(ball_ctx, ball_ctx.points[i])
    assert h.mass_after == pytest.approx(1.0, rel=1e-8)
    assert h.coincident


@pytest.mark.xfail(strict=True, reason="diagonal rule underestimates cell self-potential; "
                   "off-node interior harmonic mass overshoots 1 and does not settle under refinement")
def test_off_node_interior_harmonic_mass():
    ctx = assemble(NEWTON, build_set(BALL, 4))
    assert harmonic_measure(ctx, [0.13, 0.07, 0.05]).mass_after == pytest.approx(1.0, rel=0.02)


def test_exterior_mass_identity_and_decay(ball_ctx):
    eq = equilibrium(ball_ctx)
    masses = []
    for d in (1.5, 3.0, 6.0, 12.0):
        z = np.array([d, 0.2, -0.1])
        m = harmonic_measure(ball_ctx, z).mass_after
        u = float((kernel(NEWTON, z[None], ball_ctx.points) @ eq.gamma.weights)[0])
        assert abs(m - u) <= 0.02 * u
        masses.append(m)
    assert all(b < a for a, b in zip(masses, masses[1:]))


# ----------------------------------------------------------------------- gauss


def test_gauss_without_field_is_robin(sphere_ctx):
    g, eq = solve_gauss(sphere_ctx), equilibrium(sphere_ctx)
    assert rel_norm(sphere_ctx, g.lam.weights, eq.robin.weights) <= 1e-8
    assert g.c_const == pytest.approx(eq.robin_energy, rel=1e-8)
    bal = balayage(sphere_ctx, None)
    assert representation_check(g, bal, eq) <= 1e-6


def test_gauss_kkt(sphere_ctx):
    g = solve_gauss(sphere_ctx, DiracMeasure((2.0, 0.0, 0.0), 0.5))
    rep = g.kkt_report()
    assert rep["lower_ok"] and rep["support_ok"] and rep["estimates_agree"]
    assert g.cc_residual <= g.kkt_tol


def test_gauss_matches_oracle_on_eight_points(rng):
    A = cloud(rng.uniform(-1, 1, (8, 3)))
    ctx = assemble(RIESZ, A)
    om = DiracMeasure((2.0, 0.0, 0.0), 1.3)
    g = solve_gauss(ctx, om)
    o = oracle_solve(QpProblem(ctx.K, g.field_potential, 1.0))
    assert g.solution.objective == pytest.approx(o.objective, rel=1e-8)


def test_unit_swept_mass_gives_sweep_and_zero_constant(ball_ctx):
    unit = harmonic_measure(ball_ctx, [2.5, 0, 0])
    q = 1.0 / unit.mass_after
    g = solve_gauss(ball_ctx, DiracMeasure((2.5, 0, 0), q))
    bal = balayage(ball_ctx, DiracMeasure((2.5, 0, 0), q))
    eq = equilibrium(ball_ctx)
    assert representation_check(g, bal, eq, infinite_capacity=True) <= 1e-6
    assert abs(g.c_const) <= 1e-6 * g.field_scale


def test_representation_precondition(ball_ctx):
    g = solve_gauss(ball_ctx, DiracMeasure((1.2, 0, 0), 5.0))
    bal = balayage(ball_ctx, DiracMeasure((1.2, 0, 0), 5.0))
    with pytest.raises(PreconditionError):
        representation_check(g, bal, equilibrium(ball_ctx))


def test_compact_positive_constant(ball_ctx):
    om = DiracMeasure((2.5, 0, 0), 1.0)
    g, bal = solve_gauss(ball_ctx, om), balayage(ball_ctx, om)
    assert bal.mass_after < 0.5
    v = sign_trichotomy_check(g, bal.mass_after)
    assert v.passed and v.values["expected"] == "positive"
    assert representation_check(g, bal, equilibrium(ball_ctx)) <= 1e-3


def test_trichotomy_inconclusive_band(ball_ctx):
    g = solve_gauss(ball_ctx, DiracMeasure((2.5, 0, 0), 1.0))
    v = sign_trichotomy_check(g, 1.03, tol_c=abs(g.c_const) * 2)
    assert v.status == "inconclusive"
    assert sign_trichotomy_check(g, 1.5).status == "fail"


def test_solvability_on_compact_ball():
    ctxs = [assemble(NEWTON, build_set(BALL, r)) for r in (3, 4, 5)]
    sv = classify_solvability(ctxs, DiracMeasure((2.0, 0, 0), 0.3))
    assert sv.verdict == "solvable" and sv.branch == "finite_capacity"
    with pytest.raises(ConfigurationError):
        classify_solvability(ctxs[:2], None)


def test_dual_field_examples(sphere_ctx, rng):
    om = DiracMeasure((2.0, 0.4, 0.0))
    bal = balayage(sphere_ctx, om)
    idx = np.flatnonzero(bal.swept.weights > 0)
    samples = []
    for _ in range(10):
        w = np.zeros(sphere_ctx.n_points)
        w[idx] = rng.random(idx.size)
        samples.append(w / w.sum())
    rep = dual_field_check(sphere_ctx, om, samples, rng=rng, bal=bal)
    assert rep.max_gap <= 1e-6 and rep.at_swept_gap <= 1e-10 and rep.minimiser_ok
    on_a = DiscreteMeasure(sphere_ctx.set, rng.random(sphere_ctx.n_points))
    rep = dual_field_check(sphere_ctx, on_a, [rng.random(sphere_ctx.n_points) for _ in range(5)], rng=rng)
    assert rep.max_gap <= 1e-10


# ---------------------------------------------------------------------- kelvin


def test_kelvin_fixed_point_and_involution(rng):
    c = np.array([0.1, 0.2, -0.3])
    mu = DiscreteMeasure(cloud([c + [0.6, 0.8, 0.0]]), [1.0])
    np.testing.assert_allclose(kelvin_transform(mu, c, NEWTON).weights, [1.0])
    A = cloud(rng.uniform(-1, 1, (12, 3)) + [3, 0, 0])
    mu = DiscreteMeasure(A, rng.random(12))
    back = kelvin_transform(kelvin_transform(mu, c, RIESZ), c, RIESZ)
    np.testing.assert_allclose(back.points, mu.points, rtol=1e-12)
    np.testing.assert_allclose(back.weights, mu.weights, rtol=1e-10)
    probes = rng.uniform(-4, 4, (20, 3))
    assert kelvin_potential_error(mu, c, RIESZ, probes) <= 1e-10


def test_kelvin_pole_in_support():
    A = cloud([[0.0, 0, 0], [1.0, 0, 0]])
    with pytest.raises(DomainError):
        kelvin_transform(DiscreteMeasure(A, [1.0, 1.0]), [0, 0, 0], NEWTON)
    assert kelvin_transform(DiscreteMeasure(A, [0.0, 1.0]), [0, 0, 0], NEWTON).set.n_points == 1


def test_kelvin_equilibrium_on_sphere_and_ball():
    z = [2.0, 0.3, 0.1]
    r = kelvin_equilibrium_check(build_set(SPHERE, 8), z, NEWTON)
    assert r.distance <= 5e-2 and r.mass_gap <= 0.02
    d = [kelvin_equilibrium_check(build_set(BALL, res), z, NEWTON).distance for res in (3, 6)]
    assert d[1] <= 0.6 * d[0]


# ---------------------------------------------------------------------- wiener


def test_single_point_series_converges():
    rep = wiener_series(cloud([[0.3, 0, 0], [0.31, 0, 0]]), [0, 0, 0], "irregular_point", 0.5, NEWTON)
    assert rep.verdict == "convergent"
    assert all(b >= a for a, b in zip(rep.partial_sums, rep.partial_sums[1:]))


def test_half_space_is_not_thin_at_infinity():
    A = build_set({"type": "half_space_slab", "grading": 0.3}, 3, 256.0)
    rep = wiener_series(A, [0, 0, 0], "thin_at_infinity", 2.0, NEWTON)
    assert rep.verdict == "divergent" and rep.shells_used >= 6


def test_series_verdict_rules():
    assert series_verdict([1, 0.5, 0.2, 0.1]) == "convergent"
    assert series_verdict([1, 1, 1, 1]) == "divergent"
    assert series_verdict([1, 1]) == "inconclusive"
    assert series_verdict([]) == "convergent"
    assert series_verdict([1, 0.9, 0.01, 0.009]) == "inconclusive"


def test_wiener_mode_validation():
    A = cloud([[0.3, 0, 0], [0.6, 0, 0]])
    with pytest.raises(ConfigurationError):
        wiener_series(A, [0, 0, 0], "nonsense", 0.5, NEWTON)
    with pytest.raises(ConfigurationError):
        wiener_series(A, [0, 0, 0], "irregular_point", 0.5, NEWTON, via_inversion=True)


# --------------------------------------------------------------------- support


def test_support_dichotomy_on_ball():
    om = DiracMeasure((2.5, 0, 0))
    newton = support_report(solve_gauss(assemble(NEWTON, build_set(BALL, 4)), om))
    assert newton.classification == "boundary_concentrated"
    riesz = support_report(solve_gauss(assemble(RIESZ, build_set(BALL, 4)), om))
    assert riesz.classification == "full_support"
