import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.distance import pdist, squareform

from riesz_gauss.errors import ConfigurationError, DomainError
from riesz_gauss.geometry import (
    RotationBody,
    build_set,
    invert_point,
    invert_set,
    parse_shape,
    shell_decompose,
    union_parts,
)

from conftest import cloud

SHAPES = [
    {"type": "ball", "center": [0, 0, 0], "radius": 1.0},
    {"type": "sphere", "center": [0.5, 0, 0], "radius": 2.0},
    {"type": "annulus", "center": [0, 0, 0], "inner": 1.0, "outer": 2.0},
    {"type": "box", "lower": [0, 0, 0], "upper": [1, 2, 1]},
    {"type": "box", "lower": [0, 0], "upper": [1, 1]},
]


@pytest.mark.parametrize("spec", SHAPES, ids=lambda s: s["type"])
def test_set_invariants(spec):
    A = build_set(spec, 4)
    D = squareform(pdist(A.points))
    np.fill_diagonal(D, np.inf)
    assert D.min() > 0
    assert np.all(A.quad_weights > 0)
    assert A.mesh_size == pytest.approx(D.min(axis=1).max(), rel=1e-14)
    assert A.ambient_dim == len(spec.get("center", spec.get("lower")))
    assert np.any(A.boundary)


def test_ball_containment():
    A = build_set({"type": "ball", "center": [0, 0, 0], "radius": 1.0}, 3)
    assert np.all(np.linalg.norm(A.points, axis=1) <= 1.0 + 1e-12)
    assert A.mesh_size > 0


def test_rotation_body_profile():
    A = build_set({"type": "rotation_body", "rho": 2.0}, 6)
    x1, rr = A.points[:, 0], np.sum(A.points[:, 1:] ** 2, axis=1)
    assert np.all((x1 >= 0) & (x1 <= 1))
    assert np.all(rr <= np.exp(-2.0 * x1 ** -2.0) * (1 + 1e-9))
    assert x1.min() >= RotationBody(2.0).cut


def test_union_counts_and_truncation():
    parts = [{"type": "rotation_body", "rho": 2.0},
             {"type": "half_space_slab", "offset": 1.0, "axis": 0, "dim": 3}]
    A = build_set({"type": "union", "parts": parts}, 3, 8.0)
    shapes = [parse_shape(p) for p in parts]
    sizes = [build_set(p, 3, None if s.bounded else 8.0).n_points for p, s in zip(parts, shapes)]
    _, _, _, counts = union_parts(shapes, 3, 8.0)
    dups = sum(c[1] for c in counts)
    assert [c[0] for c in counts] == sizes
    assert A.n_points == sum(sizes) - dups
    assert A.truncated and A.truncation_radius == 8.0


def test_unbounded_needs_truncation():
    with pytest.raises(ConfigurationError):
        build_set({"type": "half_space_slab"}, 3)
    with pytest.raises(ConfigurationError):
        build_set({"type": "nonsense"}, 3)
    with pytest.raises(ConfigurationError):
        build_set({"type": "ball", "center": [0, 0, 0]}, 3)


def test_invert_point_examples():
    z = np.array([0.2, -0.1, 0.4])
    u = np.array([0.6, 0.0, 0.8])
    np.testing.assert_allclose(invert_point(z + u, z), z + u, rtol=1e-15)
    x = z + 2.0 * u
    assert np.linalg.norm(invert_point(x, z) - z) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        invert_point(z, z)


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3), st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_inversion_is_an_involution(x, z):
    x, z = np.array(x), np.array(z)
    if np.linalg.norm(x - z) < 1e-3:
        return
    np.testing.assert_allclose(invert_point(invert_point(x, z), z), x, rtol=1e-12, atol=1e-12)


def test_invert_sphere_is_itself():
    z = np.array([1.0, 0.0, 0.0])
    A = build_set({"type": "sphere", "center": list(z), "radius": 1.0}, 6)
    B = invert_set(A, z)
    np.testing.assert_allclose(np.sort(B.points, axis=0), np.sort(A.points, axis=0), atol=1e-12)


def test_invert_punctured_ball():
    A = build_set({"type": "ball", "center": [0, 0, 0], "radius": 0.5}, 8)
    A = A.subset(np.linalg.norm(A.points, axis=1) > 0)
    B = invert_set(A, [0, 0, 0])
    assert np.all(np.linalg.norm(B.points, axis=1) >= 2.0 - 1e-12)


def test_invert_annulus_volume():
    A = build_set({"type": "annulus", "center": [0, 0, 0], "inner": 1.0, "outer": 2.0}, 8)
    B = invert_set(A, [0, 0, 0])
    r = np.linalg.norm(B.points, axis=1)
    assert r.min() >= 0.5 - 1e-12 and r.max() <= 1.0 + 1e-12
    exact = 4.0 / 3.0 * math.pi * (1.0 - 0.125)
    assert B.quad_weights.sum() == pytest.approx(exact, rel=0.05)


def test_shell_examples():
    A = cloud([[0.3, 0, 0], [0.6, 0, 0]])
    sh = shell_decompose(A, [0, 0, 0], 0.5, "inward").indices()
    assert list(sh[1]) == [0] and list(sh[0]) == [1]
    A = cloud([[1.5, 0, 0], [0, 5, 0]])
    sh = shell_decompose(A, [0, 0, 0], 2.0, "outward").indices()
    assert list(sh[0]) == [0] and list(sh[2]) == [1]


@given(st.integers(0, 2**31 - 1), st.sampled_from([("inward", 0.5), ("inward", 0.85), ("outward", 2.0)]))
def test_shells_partition_and_bracket(seed, mode_ratio):
    mode, r = mode_ratio
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((40, 3)) * rng.uniform(0.01, 3, (40, 1))
    A = cloud(pts)
    sh = shell_decompose(A, [0, 0, 0], r, mode)
    allidx = np.sort(np.concatenate([i for _, i in sh.shells]))
    assert list(allidx) == list(range(40))
    t = np.linalg.norm(pts, axis=1)
    for j, idx in sh.shells:
        if mode == "inward":
            assert np.all((t[idx] > r ** (j + 1)) & (t[idx] <= r ** j))
        else:
            assert np.all((t[idx] >= r ** j) & (t[idx] < r ** (j + 1)))


def test_shell_ratio_validation():
    A = cloud([[1.0, 0, 0], [2.0, 0, 0]])
    with pytest.raises(ConfigurationError):
        shell_decompose(A, [0, 0, 0], 1.0, "inward")
    with pytest.raises(ConfigurationError):
        shell_decompose(A, [0, 0, 0], 2.0, "inward")
