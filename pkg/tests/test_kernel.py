import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riesz_gauss import DiscreteMeasure, RieszParams, assemble
from riesz_gauss.errors import AssemblyError, ConfigurationError, ResourceError
from riesz_gauss.kernel import (
    energy,
    gauss_functional,
    mutual_energy,
    potential,
)

from conftest import cloud


def test_params_validation():
    for dim, alpha in ((3, 0.0), (3, 2.5), (2, 2.0), (1, 0.5), (2.5, 1.0)):
        with pytest.raises(ConfigurationError):
            RieszParams(dim, alpha)
    RieszParams(2, 1.0)


@pytest.mark.parametrize("dim,alpha", [(2, 1.0), (3, 2.0), (3, 0.5), (4, 2.0)])
def test_unit_distance_gives_one(dim, alpha):
    pts = np.zeros((2, dim))
    pts[1, 0] = 1.0
    K = assemble(RieszParams(dim, alpha), cloud(pts)).K
    assert K[0, 1] == K[1, 0] == 1.0


def test_newton_distance_two():
    K = assemble(RieszParams(3, 2.0), cloud([[0, 0, 0], [2, 0, 0]])).K
    assert K[0, 1] == 0.5


@given(st.integers(0, 2**31 - 1), st.sampled_from([0.5, 1.0, 1.5, 2.0]))
def test_matrix_matches_brute_force(seed, alpha):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, (8, 3))
    p = RieszParams(3, alpha)
    ctx = assemble(p, cloud(pts))
    for i in range(8):
        for j in range(8):
            if i != j:
                d = np.sqrt(sum((pts[i, k] - pts[j, k]) ** 2 for k in range(3)))
                assert ctx.K[i, j] == pytest.approx(d ** (alpha - 3), rel=1e-14)
    assert np.array_equal(ctx.K, ctx.K.T)
    assert np.linalg.eigvalsh(ctx.K).min() > 0


def test_threads_do_not_change_the_matrix(ball_ctx):
    other = assemble(ball_ctx.params, ball_ctx.set, threads=4)
    assert np.array_equal(other.K, ball_ctx.K)


def test_assembly_errors():
    p = RieszParams(3, 2.0)
    with pytest.raises(AssemblyError):
        assemble(p, cloud([[0, 0, 0]]))
    with pytest.raises(AssemblyError):
        assemble(p, cloud([[0, 0, 0], [1, 0, 0]]), spacing=[1.0, -1.0])
    with pytest.raises(ResourceError):
        assemble(p, cloud(np.eye(3)), max_points=2)
    with pytest.raises(ConfigurationError):
        assemble(RieszParams(2, 1.0), cloud(np.eye(3)))
    ctx = assemble(p, cloud([[0, 0, 0]]), spacing=[0.2])
    assert ctx.K[0, 0] == pytest.approx(10.0)


def test_potential_examples(rng):
    p = RieszParams(3, 2.0)
    A = cloud(rng.uniform(-1, 1, (5, 3)))
    ctx = assemble(p, A)
    single = assemble(p, cloud([[0.0, 0.0, 0.0]]), spacing=[0.1])
    assert potential(single, [1.0], [[0.0, 1.0, 0.0]])[0] == pytest.approx(1.0)
    assert np.all(potential(ctx, DiscreteMeasure.zero(A), rng.uniform(2, 3, (3, 3))) == 0)
    w = rng.random(5)
    x = rng.uniform(2, 3, (3, 3))
    want = [sum(w[i] / np.linalg.norm(x[k] - A.points[i]) for i in range(5)) for k in range(3)]
    np.testing.assert_allclose(potential(ctx, DiscreteMeasure(A, w), x), want, rtol=1e-13)


@given(st.integers(0, 2**31 - 1))
def test_energy_bilinearity(seed):
    rng = np.random.default_rng(seed)
    A = cloud(rng.uniform(-1, 1, (7, 3)))
    ctx = assemble(RieszParams(3, 1.5), A)
    mu, nu = DiscreteMeasure(A, rng.random(7)), DiscreteMeasure(A, rng.random(7))
    assert mutual_energy(ctx, mu, nu) == pytest.approx(mutual_energy(ctx, nu, mu), rel=1e-14)
    s = DiscreteMeasure(A, mu.weights + nu.weights)
    lhs, rhs = energy(ctx, s), energy(ctx, mu) + 2 * mutual_energy(ctx, mu, nu) + energy(ctx, nu)
    assert lhs == pytest.approx(rhs, rel=1e-12)
    assert energy(ctx, DiscreteMeasure.zero(A)) == 0.0


def test_gauss_functional_oracle(rng):
    p = RieszParams(3, 2.0)
    A = cloud(rng.uniform(-1, 1, (6, 3)))
    B = cloud(rng.uniform(2, 3, (2, 3)))
    ctx = assemble(p, A)
    mu, om = DiscreteMeasure(A, rng.random(6)), DiscreteMeasure(B, rng.random(2))
    assert gauss_functional(ctx, DiscreteMeasure.zero(A), om) == 0.0
    assert gauss_functional(ctx, mu, DiscreteMeasure.zero(B)) == pytest.approx(energy(ctx, mu))
    e = sum(mu.weights[i] * mu.weights[j] * ctx.K[i, j] for i in range(6) for j in range(6))
    f = sum(mu.weights[i] * om.weights[k] / np.linalg.norm(A.points[i] - B.points[k])
            for i in range(6) for k in range(2))
    assert gauss_functional(ctx, mu, om) == pytest.approx(e - 2 * f, rel=1e-12)
