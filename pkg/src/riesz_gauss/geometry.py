"""Point-cloud discretisations of the sets used by the solvers.

Every shape knows how to sample itself at a given resolution and how deep a
point lies inside it.  Sampling is deterministic: the same shape and
resolution always give the same points in the same order.  Boundary tags are
metric: a point is tagged ``boundary`` when its depth is at most half its
nearest-neighbour distance, i.e. its own mesh cell touches the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigurationError, DomainError

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True, eq=False)
class DiscretizedSet:
    """Finite point cloud standing in for a closed set in R^n."""

    points: np.ndarray
    quad_weights: np.ndarray
    boundary: np.ndarray
    ambient_dim: int
    truncation_radius: float | None = None
    intrinsic_dim: int | None = None
    label: str = ""
    nn_dist: np.ndarray = field(init=False, repr=False)
    mesh_size: float = field(init=False)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.ambient_dim:
            raise ConfigurationError(f"points must have shape (N, {self.ambient_dim})")
        if self.ambient_dim < 2:
            raise ConfigurationError("ambient dimension must be at least 2")
        if pts.shape[0] < 1:
            raise ConfigurationError("a discretised set needs at least one point")
        qw = np.asarray(self.quad_weights, dtype=float).reshape(-1)
        bd = np.asarray(self.boundary, dtype=bool).reshape(-1)
        if qw.size != pts.shape[0] or bd.size != pts.shape[0]:
            raise ConfigurationError("quad_weights and tags must match the point count")
        if np.any(qw <= 0):
            raise ConfigurationError("quadrature weights must be positive")
        nn = nearest_neighbour_distances(pts)
        for name, arr in (("points", pts), ("quad_weights", qw), ("boundary", bd), ("nn_dist", nn)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "mesh_size", float(nn.max()) if nn.size else 0.0)
        if self.intrinsic_dim is None:
            object.__setattr__(self, "intrinsic_dim", self.ambient_dim)

    def __len__(self):
        return self.points.shape[0]

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def tags(self) -> list[str]:
        return ["boundary" if b else "interior" for b in self.boundary]

    @property
    def truncated(self) -> bool:
        return self.truncation_radius is not None

    def subset(self, mask_or_index, label: str | None = None) -> "DiscretizedSet":
        """Sub-cloud with the given points; tags and weights are inherited."""
        idx = np.asarray(mask_or_index)
        if idx.dtype == bool:
            idx = np.flatnonzero(idx)
        return DiscretizedSet(self.points[idx], self.quad_weights[idx], self.boundary[idx],
                              self.ambient_dim, self.truncation_radius, self.intrinsic_dim,
                              label if label is not None else self.label)


def nearest_neighbour_distances(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.shape[0] < 2:
        return np.full(points.shape[0], np.inf)
    d, _ = cKDTree(points).query(points, k=2)
    return d[:, 1]


# ---------------------------------------------------------------- samplers


def sphere_directions(dim: int, count: int) -> np.ndarray:
    """Quasi-uniform unit vectors in R^dim (deterministic)."""
    count = max(int(count), 1)
    if dim == 2:
        t = 2.0 * math.pi * (np.arange(count) + 0.5) / count
        return np.column_stack([np.cos(t), np.sin(t)])
    if dim == 3:
        if count == 1:
            return np.array([[0.0, 0.0, 1.0]])
        k = np.arange(count) + 0.5
        z = 1.0 - 2.0 * k / count
        r = np.sqrt(1.0 - z * z)
        phi = GOLDEN_ANGLE * k
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    # higher dimensions: grid on the cube surface, projected radially
    per_side = max(2, int(round((count / (2 * dim)) ** (1.0 / (dim - 1)))))
    g = (np.arange(per_side) + 0.5) / per_side * 2.0 - 1.0
    mesh = np.stack(np.meshgrid(*([g] * (dim - 1)), indexing="ij"), -1).reshape(-1, dim - 1)
    faces = []
    for axis in range(dim):
        for sign in (-1.0, 1.0):
            f = np.insert(mesh, axis, sign, axis=1)
            faces.append(f)
    v = np.concatenate(faces)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sphere_area(dim: int, radius: float) -> float:
    """Surface measure of the (dim-1)-sphere of the given radius."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0) * radius ** (dim - 1)


def ball_volume(dim: int, radius: float) -> float:
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0) * radius ** dim


def _shell_count(dim: int, radius: float, spacing: float) -> int:
    # hexagonal-type packing density on the sphere
    cell = spacing ** (dim - 1) * (math.sqrt(3.0) / 2.0 if dim == 3 else 1.0)
    return max(1, int(round(sphere_area(dim, radius) / cell)))


def _layers(center, radii, spacing, dim, shell_volumes):
    pts, qw = [], []
    for r, vol in zip(radii, shell_volumes):
        if r == 0.0:
            pts.append(np.asarray(center, dtype=float)[None, :])
            qw.append(np.array([vol]))
            continue
        m = _shell_count(dim, r, spacing)
        pts.append(center + r * sphere_directions(dim, m))
        qw.append(np.full(m, vol / m))
    return np.concatenate(pts), np.concatenate(qw)


def _radial_cells(radii, lo, hi, dim):
    """Volume of the spherical shell of each layer's radial cell, clipped to [lo, hi]."""
    radii = np.asarray(radii, dtype=float)
    edges = np.concatenate([[lo], 0.5 * (radii[1:] + radii[:-1]), [hi]])
    c = math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)
    return c * (edges[1:] ** dim - edges[:-1] ** dim)


# ------------------------------------------------------------------ shapes


class Shape:
    """Base class; subclasses implement ``_sample`` and ``depth``."""

    kind = "shape"
    bounded = True
    dim: int

    def sample(self, resolution: int, truncation_radius: float | None = None):
        raise NotImplementedError

    def depth(self, x: np.ndarray) -> np.ndarray:
        """Distance-like depth inside the shape (<= 0 on or outside the boundary)."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Ball(Shape):
    center: tuple
    radius: float
    kind = "ball"

    @property
    def dim(self):
        return len(self.center)

    def sample(self, resolution, truncation_radius=None):
        c = np.asarray(self.center, dtype=float)
        h = self.radius / resolution
        radii = self.radius * np.arange(resolution + 1) / resolution
        vols = _radial_cells(radii, 0.0, self.radius, self.dim)
        pts, qw = _layers(c, radii, h, self.dim, vols)
        return pts, qw, self.dim

    def depth(self, x):
        return self.radius - np.linalg.norm(x - np.asarray(self.center), axis=1)

    def to_dict(self):
        return {"type": "ball", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Sphere(Shape):
    center: tuple
    radius: float
    kind = "sphere"

    @property
    def dim(self):
        return len(self.center)

    def sample(self, resolution, truncation_radius=None):
        c = np.asarray(self.center, dtype=float)
        h = math.pi * self.radius / resolution
        m = _shell_count(self.dim, self.radius, h)
        pts = c + self.radius * sphere_directions(self.dim, m)
        qw = np.full(m, sphere_area(self.dim, self.radius) / m)
        return pts, qw, self.dim - 1

    def depth(self, x):
        return -np.abs(np.linalg.norm(x - np.asarray(self.center), axis=1) - self.radius)

    def to_dict(self):
        return {"type": "sphere", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Annulus(Shape):
    center: tuple
    inner: float
    outer: float
    kind = "annulus"

    def __post_init__(self):
        if not 0.0 < self.inner < self.outer:
            raise ConfigurationError("annulus needs 0 < inner < outer")

    @property
    def dim(self):
        return len(self.center)

    def sample(self, resolution, truncation_radius=None):
        c = np.asarray(self.center, dtype=float)
        h = (self.outer - self.inner) / resolution
        radii = self.inner + h * np.arange(resolution + 1)
        vols = _radial_cells(radii, self.inner, self.outer, self.dim)
        pts, qw = _layers(c, radii, h, self.dim, vols)
        return pts, qw, self.dim

    def depth(self, x):
        r = np.linalg.norm(x - np.asarray(self.center), axis=1)
        return np.minimum(r - self.inner, self.outer - r)

    def to_dict(self):
        return {"type": "annulus", "center": list(self.center),
                "inner": self.inner, "outer": self.outer}


@dataclass(frozen=True)
class Box(Shape):
    lower: tuple
    upper: tuple
    kind = "box"

    def __post_init__(self):
        if len(self.lower) != len(self.upper) or any(a >= b for a, b in zip(self.lower, self.upper)):
            raise ConfigurationError("box needs lower < upper componentwise")

    @property
    def dim(self):
        return len(self.lower)

    def sample(self, resolution, truncation_radius=None):
        lo, hi = np.asarray(self.lower, float), np.asarray(self.upper, float)
        side = float(np.max(hi - lo))
        axes = []
        for a, b in zip(lo, hi):
            m = max(2, int(round(resolution * (b - a) / side)) + 1)
            axes.append(np.linspace(a, b, m))
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, self.dim)
        widths = []
        for ax in axes:
            gaps = np.diff(ax)
            widths.append(0.5 * (np.append(gaps, 0.0) + np.insert(gaps, 0, 0.0)))
        cell = np.prod(np.stack(np.meshgrid(*widths, indexing="ij"), -1).reshape(-1, self.dim), axis=1)
        return pts, cell, self.dim

    def depth(self, x):
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        return np.min(np.minimum(x - lo, hi - x), axis=1)

    def to_dict(self):
        return {"type": "box", "lower": list(self.lower), "upper": list(self.upper)}


def _graded_radii(h0: float, grading: float, rmax: float) -> np.ndarray:
    """Uniform steps of ``h0`` until ``grading * r`` exceeds ``h0``, geometric after."""
    radii = [h0]
    while radii[-1] < rmax:
        r = radii[-1]
        radii.append(r + max(h0, grading * r))
    radii = np.asarray(radii)
    radii = radii[radii < rmax - 0.25 * max(h0, grading * rmax)]
    return np.append(radii, rmax)


@dataclass(frozen=True)
class HalfSpaceSlab(Shape):
    """``{x : x[axis] >= offset}`` clipped to the ball of radius R about its anchor.

    The anchor is the point ``offset * e_axis`` on the bounding hyperplane.
    The mesh is uniform (spacing ``1/resolution``) near the anchor and graded
    geometrically with ratio ``1 + grading`` further out.
    """

    offset: float = 0.0
    axis: int = 0
    ambient: int = 3
    grading: float = 0.3
    kind = "half_space_slab"
    bounded = False

    @property
    def dim(self):
        return self.ambient

    @property
    def anchor(self):
        a = np.zeros(self.ambient)
        a[self.axis] = self.offset
        return a

    def sample(self, resolution, truncation_radius=None):
        if truncation_radius is None:
            raise ConfigurationError("half_space_slab is unbounded: truncation_radius required")
        if self.ambient not in (2, 3):
            raise ConfigurationError("half_space_slab is implemented for n = 2 and n = 3")
        h0 = 1.0 / resolution
        radii = _graded_radii(h0, self.grading, truncation_radius)
        pts, qw = [self.anchor[None, :]], [np.array([0.5 * ball_volume(self.dim, 0.5 * h0)])]
        shell_vol = 0.5 * _radial_cells(radii, 0.5 * h0, truncation_radius, self.dim)
        for r, vol in zip(radii, shell_vol):
            h = max(h0, self.grading * r)
            local = _hemisphere(self.dim, r, h)
            pts.append(self._to_global(local))
            qw.append(np.full(local.shape[0], vol / local.shape[0]))
        return np.concatenate(pts), np.concatenate(qw), self.dim

    def _to_global(self, local):
        # local coordinate 0 is the inward normal direction
        out = np.array(local)
        if self.axis != 0:
            out[:, [0, self.axis]] = out[:, [self.axis, 0]]
        return out + self.anchor

    def depth(self, x, truncation_radius=None):
        d = x[:, self.axis] - self.offset
        if truncation_radius is not None:
            d = np.minimum(d, truncation_radius - np.linalg.norm(x - self.anchor, axis=1))
        return d

    def to_dict(self):
        return {"type": "half_space_slab", "offset": self.offset, "axis": self.axis,
                "dim": self.ambient, "grading": self.grading}


def _hemisphere(dim, r, h):
    """Points on ``{|y| = r, y_0 >= 0}`` with the rim ring exactly on ``y_0 = 0``."""
    if dim == 2:
        m = max(2, int(math.ceil(math.pi * r / h)))
        t = np.linspace(-math.pi / 2, math.pi / 2, m + 1)
        return r * np.column_stack([np.cos(t), np.sin(t)])
    rings = max(1, int(math.ceil(0.5 * math.pi * r / h)))
    out = [np.array([[r, 0.0, 0.0]])]
    for j in range(1, rings + 1):
        th = 0.5 * math.pi * j / rings
        m = max(3, int(round(2.0 * math.pi * r * math.sin(th) / h)))
        phi = 2.0 * math.pi * (np.arange(m) + 0.5 * (j % 2)) / m
        ring = np.column_stack([np.full(m, r * math.cos(th)),
                                r * math.sin(th) * np.cos(phi),
                                r * math.sin(th) * np.sin(phi)])
        out.append(ring)
    pts = np.concatenate(out)
    pts[np.abs(pts[:, 0]) < 1e-12 * r, 0] = 0.0
    return pts


@dataclass(frozen=True)
class HyperplanePatch(Shape):
    """Disc ``{x[axis] = offset, |x - anchor| <= R}`` (lower-dimensional set)."""

    offset: float = 0.0
    axis: int = 0
    ambient: int = 3
    radius: float | None = None
    grading: float = 0.0
    kind = "hyperplane_patch"

    @property
    def bounded(self):
        return self.radius is not None

    @property
    def dim(self):
        return self.ambient

    def sample(self, resolution, truncation_radius=None):
        R = self.radius if self.radius is not None else truncation_radius
        if R is None:
            raise ConfigurationError("unbounded hyperplane_patch needs truncation_radius")
        if self.ambient not in (2, 3):
            raise ConfigurationError("hyperplane_patch is implemented for n = 2 and n = 3")
        h0 = R / resolution if self.grading <= 0 else 1.0 / resolution
        radii = (_graded_radii(h0, self.grading, R) if self.grading > 0
                 else h0 * np.arange(1, resolution + 1))
        anchor = np.zeros(self.ambient)
        anchor[self.axis] = self.offset
        pts, qw = [anchor[None, :]], []
        edges = np.concatenate([[0.5 * radii[0]], 0.5 * (radii[1:] + radii[:-1]), [R]])
        if self.ambient == 2:
            qw.append(np.array([radii[0]]))
            tangent = np.zeros(2)
            tangent[1 - self.axis] = 1.0
            for r, lo, hi in zip(radii, edges[:-1], edges[1:]):
                pts.append(anchor + np.outer([r, -r], tangent))
                qw.append(np.full(2, hi - lo))
        else:
            qw.append(np.array([math.pi * (0.5 * radii[0]) ** 2]))
            for r, lo, hi in zip(radii, edges[:-1], edges[1:]):
                h = max(h0, self.grading * r)
                m = max(3, int(round(2.0 * math.pi * r / h)))
                phi = 2.0 * math.pi * np.arange(m) / m
                loc = np.column_stack([np.zeros(m), r * np.cos(phi), r * np.sin(phi)])
                if self.axis != 0:
                    loc[:, [0, self.axis]] = loc[:, [self.axis, 0]]
                pts.append(loc + anchor)
                qw.append(np.full(m, math.pi * (hi * hi - lo * lo) / m))
        return np.concatenate(pts), np.concatenate(qw), self.ambient - 1

    def depth(self, x, truncation_radius=None):
        return -np.abs(x[:, self.axis] - self.offset)

    def to_dict(self):
        return {"type": "hyperplane_patch", "offset": self.offset, "axis": self.axis,
                "dim": self.ambient, "radius": self.radius, "grading": self.grading}


@dataclass(frozen=True)
class RotationBody(Shape):
    """``{0 <= x1 <= length, x2^2 + x3^2 <= exp(-2 x1^-rho)}`` in R^3.

    The profile radius ``a(x1) = exp(-x1^-rho)`` is exponentially small near
    the cusp at the origin.  Axial stations are spaced at most
    ``min(length/resolution, grading * x1, a(x1))`` so both the cusp and the
    local cross-section are resolved; the part where ``a(x1) < min_radius``
    cannot be resolved and is left out (``cut`` gives its axial extent).
    """

    rho: float
    length: float = 1.0
    min_radius: float = 5e-5
    grading: float = 0.12
    ring_points: int = 6
    kind = "rotation_body"
    dim = 3

    def __post_init__(self):
        if self.rho <= 0:
            raise ConfigurationError("rotation_body needs rho > 0")

    def profile(self, x1):
        x1 = np.asarray(x1, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(x1 > 0, np.exp(-np.power(np.maximum(x1, 1e-300), -self.rho)), 0.0)

    @property
    def cut(self) -> float:
        """Axial coordinate below which the profile is thinner than ``min_radius``."""
        return (-math.log(self.min_radius)) ** (-1.0 / self.rho)

    def stations(self, resolution):
        x = self.length
        out = [x]
        lo = self.cut
        h_ax = self.length / resolution
        while True:
            a = float(self.profile(x))
            step = min(h_ax, self.grading * x, a)
            x -= step
            if x <= lo:
                break
            out.append(x)
        return np.asarray(out[::-1])

    def sample(self, resolution, truncation_radius=None):
        xs = self.stations(resolution)
        edges = np.concatenate([[self.cut], 0.5 * (xs[1:] + xs[:-1]), [xs[-1]]])
        pts, qw = [], []
        for k, x in enumerate(xs):
            a = float(self.profile(x))
            dx = edges[k + 1] - edges[k] if k + 1 < edges.size else xs[-1] - xs[-2]
            dx = max(dx, 1e-300)
            step = max(min(self.length / resolution, self.grading * x, a), 1e-300)
            nrings = max(1, int(math.floor(a / step)))
            station = [np.array([[x, 0.0, 0.0]])]
            for j in range(1, nrings + 1):
                rr = a * j / nrings
                m = max(self.ring_points, int(round(2.0 * math.pi * rr / step)))
                phi = 2.0 * math.pi * (np.arange(m) + 0.5 * (k % 2)) / m
                station.append(np.column_stack([np.full(m, x), rr * np.cos(phi), rr * np.sin(phi)]))
            sp = np.concatenate(station)
            pts.append(sp)
            qw.append(np.full(sp.shape[0], math.pi * a * a * dx / sp.shape[0]))
        return np.concatenate(pts), np.concatenate(qw), 3

    def depth(self, x):
        r = np.hypot(x[:, 1], x[:, 2])
        return np.minimum.reduce([self.profile(x[:, 0]) - r, x[:, 0], self.length - x[:, 0]])

    def to_dict(self):
        return {"type": "rotation_body", "rho": self.rho, "length": self.length,
                "min_radius": self.min_radius, "grading": self.grading}


@dataclass(frozen=True)
class Union(Shape):
    parts: tuple
    kind = "union"

    def __post_init__(self):
        if len(self.parts) < 1:
            raise ConfigurationError("union needs at least one part")
        dims = {p.dim for p in self.parts}
        if len(dims) != 1:
            raise ConfigurationError("union parts must share the ambient dimension")

    @property
    def dim(self):
        return self.parts[0].dim

    @property
    def bounded(self):
        return all(p.bounded for p in self.parts)

    def sample(self, resolution, truncation_radius=None):
        return union_parts(self.parts, resolution, truncation_radius)[:3]

    def depth(self, x, truncation_radius=None):
        return np.max([_depth(p, x, truncation_radius) for p in self.parts], axis=0)

    def to_dict(self):
        return {"type": "union", "parts": [p.to_dict() for p in self.parts]}


def _depth(shape, x, truncation_radius):
    if isinstance(shape, (HalfSpaceSlab, HyperplanePatch, Union)):
        return shape.depth(x, truncation_radius)
    return shape.depth(x)


def duplicate_mask(kept: np.ndarray, candidates: np.ndarray, cand_nn: np.ndarray) -> np.ndarray:
    """Candidates lying within half their own spacing of an already kept point."""
    if kept.shape[0] == 0 or candidates.shape[0] == 0:
        return np.zeros(candidates.shape[0], dtype=bool)
    d, _ = cKDTree(kept).query(candidates, k=1)
    return d <= 0.5 * cand_nn


def union_parts(parts, resolution, truncation_radius):
    """Sample each part and drop points duplicating an earlier part's point."""
    pts, qw, dims, counts = [], [], [], []
    kept = np.zeros((0, parts[0].dim))
    for part in parts:
        p, w, d = part.sample(resolution, truncation_radius if not part.bounded else None)
        dup = duplicate_mask(kept, p, nearest_neighbour_distances(p))
        pts.append(p[~dup])
        qw.append(w[~dup])
        dims.append(d)
        counts.append((p.shape[0], int(dup.sum())))
        kept = np.concatenate([kept, p[~dup]])
    return np.concatenate(pts), np.concatenate(qw), max(dims), counts


# ------------------------------------------------------------ construction


def parse_shape(spec) -> Shape:
    """Build a :class:`Shape` from its dictionary description."""
    if isinstance(spec, Shape):
        return spec
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigurationError("shape description must be a mapping with a 'type' key")
    kind = spec["type"]
    try:
        if kind == "ball":
            return Ball(tuple(float(c) for c in spec["center"]), float(spec["radius"]))
        if kind == "sphere":
            return Sphere(tuple(float(c) for c in spec["center"]), float(spec["radius"]))
        if kind == "annulus":
            return Annulus(tuple(float(c) for c in spec["center"]),
                           float(spec["inner"]), float(spec["outer"]))
        if kind == "box":
            return Box(tuple(float(c) for c in spec["lower"]), tuple(float(c) for c in spec["upper"]))
        if kind == "half_space_slab":
            return HalfSpaceSlab(float(spec.get("offset", 0.0)), int(spec.get("axis", 0)),
                                 int(spec.get("dim", 3)), float(spec.get("grading", 0.3)))
        if kind == "hyperplane_patch":
            r = spec.get("radius")
            return HyperplanePatch(float(spec.get("offset", 0.0)), int(spec.get("axis", 0)),
                                   int(spec.get("dim", 3)), None if r is None else float(r),
                                   float(spec.get("grading", 0.0)))
        if kind == "rotation_body":
            return RotationBody(float(spec["rho"]), float(spec.get("length", 1.0)),
                                float(spec.get("min_radius", 5e-5)),
                                float(spec.get("grading", 0.12)))
        if kind == "union":
            return Union(tuple(parse_shape(p) for p in spec["parts"]))
    except KeyError as exc:
        raise ConfigurationError(f"shape '{kind}' is missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"shape '{kind}': {exc}") from None
    raise ConfigurationError(f"unknown shape type {kind!r}")


def build_set(shape_spec, resolution: int, truncation_radius: float | None = None) -> DiscretizedSet:
    """Sample ``shape_spec`` into a :class:`DiscretizedSet`."""
    shape = parse_shape(shape_spec)
    if int(resolution) != resolution or resolution < 2:
        raise ConfigurationError(f"resolution must be an integer >= 2, got {resolution}")
    if not shape.bounded and truncation_radius is None:
        raise ConfigurationError(f"{shape.kind} is unbounded: truncation_radius required")
    if truncation_radius is not None and not truncation_radius > 0:
        raise ConfigurationError("truncation_radius must be positive")
    pts, qw, idim = shape.sample(int(resolution), truncation_radius)
    if pts.shape[0] < 2:
        raise ConfigurationError("resolution produces fewer than 2 points")
    nn = nearest_neighbour_distances(pts)
    depth = _depth(shape, pts, truncation_radius)
    boundary = depth <= 0.5 * nn * (1.0 + 1e-9)
    trunc = None if shape.bounded else float(truncation_radius)
    return DiscretizedSet(pts, qw, boundary, shape.dim, trunc, idim, shape.kind)


# --------------------------------------------------------------- inversion


def pole_tolerance(A: DiscretizedSet) -> float:
    """Distance under which a node counts as coincident with a point."""
    return A.mesh_size * 1e-6 if math.isfinite(A.mesh_size) else 1e-12


def invert_point(x, center) -> np.ndarray:
    """Inversion in the unit sphere about ``center``: ``c + (x - c)/|x - c|^2``."""
    x = np.asarray(x, dtype=float)
    c = np.asarray(center, dtype=float)
    d = x - c
    r2 = np.sum(d * d, axis=-1, keepdims=True)
    if np.any(r2 == 0.0):
        raise DomainError("cannot invert the inversion centre itself")
    return c + d / r2


def invert_set(A: DiscretizedSet, center) -> DiscretizedSet:
    """Pointwise inversion; quadrature weights pick up the Jacobian.

    The Jacobian of inversion on a k-dimensional piece is ``|x - c|^(-2k)``,
    with ``k`` the intrinsic dimension of the set (``n`` for solids).
    """
    c = np.asarray(center, dtype=float)
    r = np.linalg.norm(A.points - c, axis=1)
    if np.any(r <= pole_tolerance(A)):
        raise DomainError("inversion centre lies on the discretised set")
    pts = invert_point(A.points, c)
    qw = A.quad_weights * r ** (-2.0 * A.intrinsic_dim)
    trunc = None
    return DiscretizedSet(pts, qw, A.boundary, A.ambient_dim, trunc, A.intrinsic_dim,
                          f"inverted({A.label})")


# ------------------------------------------------------------------ shells


@dataclass(frozen=True)
class ShellDecomposition:
    center: np.ndarray
    ratio: float
    mode: str
    shells: tuple  # of (j, index array)

    def indices(self) -> dict:
        return {j: idx for j, idx in self.shells}


def shell_index(radii: np.ndarray, ratio: float, mode: str) -> np.ndarray:
    """Shell number of each radius: inward ``r^(j+1) < t <= r^j``, outward ``r^j <= t < r^(j+1)``."""
    radii = np.asarray(radii, dtype=float)
    lr = math.log(ratio)
    j = np.floor(np.log(radii) / lr).astype(int)
    # the float estimate can be off by one at the bracket edges; fix it exactly
    if mode == "inward":
        j = np.where(radii > ratio ** j, j - 1, j)
        j = np.where(radii <= ratio ** (j + 1), j + 1, j)
    else:
        j = np.where(radii < ratio ** j, j - 1, j)
        j = np.where(radii >= ratio ** (j + 1), j + 1, j)
    return j


def shell_decompose(A: DiscretizedSet, center, ratio: float, mode: str = "inward") -> ShellDecomposition:
    """Split A into the Wiener shells about ``center``; empty shells are omitted."""
    if mode not in ("inward", "outward"):
        raise ConfigurationError(f"mode must be 'inward' or 'outward', got {mode!r}")
    if ratio == 1.0:
        raise ConfigurationError("shell ratio must differ from 1")
    if mode == "inward" and not 0.0 < ratio < 1.0:
        raise ConfigurationError("inward shells need 0 < ratio < 1")
    if mode == "outward" and not ratio > 1.0:
        raise ConfigurationError("outward shells need ratio > 1")
    c = np.asarray(center, dtype=float)
    t = np.linalg.norm(A.points - c, axis=1)
    off = np.flatnonzero(t > 0)
    j = shell_index(t[off], ratio, mode)
    shells = tuple((int(k), off[j == k]) for k in np.unique(j))
    return ShellDecomposition(c, float(ratio), mode, shells)

