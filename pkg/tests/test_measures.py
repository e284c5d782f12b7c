import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riesz_gauss.errors import DomainError
from riesz_gauss.measures import (
    DiracMeasure,
    DiscreteMeasure,
    combine,
    normalize,
    read_measure_csv,
    restrict,
    scale,
    snap_dirac,
    support_points,
)

from conftest import cloud

A = cloud(np.random.default_rng(0).uniform(-1, 1, (10, 3)))
weights = st.lists(st.floats(0, 10, allow_subnormal=False), min_size=10, max_size=10)


def test_validation():
    with pytest.raises(DomainError):
        DiscreteMeasure(A, -np.ones(10))
    with pytest.raises(DomainError):
        DiscreteMeasure(A, np.ones(3))
    with pytest.raises(DomainError):
        DiracMeasure((0, 0, 0), 0.0)
    mu = DiscreteMeasure(A, np.ones(10))
    with pytest.raises(ValueError):
        mu.weights[0] = 2.0


@given(weights)
def test_restrict(w):
    mu = DiscreteMeasure(A, w)
    assert np.array_equal(restrict(mu, np.ones(10, bool)).weights, mu.weights)
    assert restrict(mu, np.zeros(10, bool)).mass == 0.0
    mask = np.zeros(10, bool)
    mask[support_points(mu, 0.0)] = True
    assert np.array_equal(restrict(mu, mask).weights, mu.weights)


@given(weights, weights, st.floats(0, 3), st.floats(0, 3))
def test_combine(w1, w2, a1, a2):
    mu, nu = DiscreteMeasure(A, w1), DiscreteMeasure(A, w2)
    assert np.array_equal(combine(1.0, mu, 0.0, nu).weights, mu.weights)
    np.testing.assert_allclose(combine(0.5, mu, 0.5, mu).weights, mu.weights, rtol=1e-15)
    c = combine(a1, mu, a2, nu)
    assert c.mass == pytest.approx(a1 * mu.mass + a2 * nu.mass, rel=1e-14, abs=1e-300)
    with pytest.raises(DomainError):
        combine(-1.0, mu, 1.0, nu)


def test_combine_needs_one_set():
    with pytest.raises(DomainError):
        combine(1, DiscreteMeasure(A, np.ones(10)), 1, DiscreteMeasure(cloud(np.eye(3)), np.ones(3)))


@given(weights)
def test_normalize(w):
    mu = DiscreteMeasure(A, w)
    if mu.mass == 0:
        with pytest.raises(DomainError):
            normalize(mu)
        return
    n1 = normalize(mu)
    assert n1.mass == pytest.approx(1.0, rel=1e-14)
    np.testing.assert_allclose(normalize(n1).weights, n1.weights, rtol=1e-14)


def test_normalize_halves_mass_two():
    mu = DiscreteMeasure(A, np.full(10, 0.2))
    np.testing.assert_allclose(normalize(mu).weights, np.full(10, 0.1))


@given(weights, st.floats(0, 1), st.floats(0, 1))
def test_support_monotone_in_tol(w, t1, t2):
    mu = DiscreteMeasure(A, w)
    lo, hi = sorted((t1, t2))
    assert set(support_points(mu, hi)) <= set(support_points(mu, lo))


def test_support_examples():
    w = np.zeros(10)
    w[3] = 1.0
    assert list(support_points(DiscreteMeasure(A, w))) == [3]
    assert support_points(DiscreteMeasure.zero(A)).size == 0


def test_csv_round_trip(tmp_path):
    mu = scale(DiscreteMeasure(A, np.linspace(0, 1, 10)), 3.0)
    path = tmp_path / "mu.csv"
    path.write_text(mu.to_csv())
    back = read_measure_csv(path, 3)
    np.testing.assert_array_equal(back.points, mu.points)
    np.testing.assert_array_equal(back.weights, mu.weights)
    assert "\r" not in path.read_text()


def test_snap_dirac():
    d = DiracMeasure(tuple(A.points[4]))
    assert snap_dirac(d, A) == 4
    assert snap_dirac(DiracMeasure((9.0, 9.0, 9.0)), A) is None


def test_from_solver_clamps_roundoff():
    w = np.ones(10)
    w[0] = -1e-15
    assert DiscreteMeasure.from_solver(A, w).weights[0] == 0.0
    w[0] = -0.1
    with pytest.raises(DomainError):
        DiscreteMeasure.from_solver(A, w)
