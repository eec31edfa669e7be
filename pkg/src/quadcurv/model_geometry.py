"""Analytic model geometries: comparison angles, distances, midpoints, sampling.

Points are plain numpy arrays whose last axis holds the coordinates, so every
method broadcasts over leading batch axes.

* Euclidean(dim): ``dim`` Cartesian coordinates.
* Sphere(R): a 3-vector of norm ``R``.
* Hyperbolic(kappa): hyperboloid 3-vector with Minkowski norm ``-1/|kappa|``.
* EuclideanCone(theta): ``(s, phi)`` with ``s >= 0`` and ``0 <= phi < theta``.
* Product(left, right): left coordinates followed by right coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metric_core import LabeledQuadruple

CLAMP_TOL = 1e-9
TRIANGLE_TOL = 1e-9
PERIMETER_TOL = 1e-9


class GeometryError(ValueError):
    pass


class DegenerateSide(GeometryError):
    pass


class DomainError(GeometryError):
    pass


class NotATriangle(GeometryError):
    pass


class MismatchedSpace(GeometryError):
    pass


class AntipodalPoints(GeometryError):
    pass


class NoUniqueMidpoint(GeometryError):
    pass


def _clamp(v, lo, hi, what):
    v = np.asarray(v, dtype=float)
    if np.any(v < lo - CLAMP_TOL) or np.any(v > hi + CLAMP_TOL):
        raise DomainError(f"{what} argument outside [{lo}, {hi}] beyond rounding")
    return np.clip(v, lo, hi)


def _scalar_or_array(v):
    return float(v) if np.ndim(v) == 0 else v


def comparison_angle(a, b, c, kappa: float = 0.0):
    """Angle opposite to side ``c`` in the model plane of curvature ``kappa``.

    Accepts scalars or broadcastable arrays; any invalid entry raises.
    """
    a, b, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, c)))
    kappa = float(kappa)
    if not math.isfinite(kappa):
        raise DomainError("kappa must be finite")
    if np.any(a <= 0) or np.any(b <= 0):
        raise DegenerateSide("sides adjacent to the vertex must be positive")
    if np.any(c < 0):
        raise NotATriangle("opposite side is negative")
    scale = np.maximum(1.0, a + b + c)
    if np.any(c > a + b + TRIANGLE_TOL * scale) or np.any(
        c < np.abs(a - b) - TRIANGLE_TOL * scale
    ):
        raise NotATriangle("side lengths violate the triangle inequality")

    if kappa == 0:
        cos_angle = (a * a + b * b - c * c) / (2 * a * b)
    elif kappa > 0:
        k = math.sqrt(kappa)
        diam = math.pi / k
        if np.any(np.maximum(np.maximum(a, b), c) > diam + PERIMETER_TOL):
            raise DomainError(f"side exceeds pi/sqrt(kappa) = {diam}")
        if np.any(a + b + c > 2 * diam + PERIMETER_TOL):
            raise DomainError(f"perimeter exceeds 2*pi/sqrt(kappa) = {2 * diam}")
        sa, sb = np.sin(k * a), np.sin(k * b)
        if np.any(sa * sb <= 0):
            raise DegenerateSide("a side adjacent to the vertex has length pi/sqrt(kappa)")
        cos_angle = (np.cos(k * c) - np.cos(k * a) * np.cos(k * b)) / (sa * sb)
    else:
        k = math.sqrt(-kappa)
        cos_angle = (np.cosh(k * a) * np.cosh(k * b) - np.cosh(k * c)) / (
            np.sinh(k * a) * np.sinh(k * b)
        )
    return _scalar_or_array(np.arccos(_clamp(cos_angle, -1.0, 1.0, "arccos")))


def _minkowski(u, v):
    return -u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] + u[..., 2] * v[..., 2]


class ModelSpace:
    """Common interface; concrete geometries below."""

    coord_dim: int
    nonnegatively_curved: bool

    def check_point(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.coord_dim:
            raise MismatchedSpace(
                f"{type(self).__name__} expects {self.coord_dim} coordinates, got {u.shape[-1]}"
            )
        return u

    def distance(self, u, v):
        raise NotImplementedError

    def interpolate(self, u, v, t: float):
        """Point at fraction ``t`` of the way from ``u`` to ``v`` along the geodesic."""
        raise NotImplementedError

    def midpoint(self, u, v):
        return self.interpolate(u, v, 0.5)

    def sample(self, rng: np.random.Generator, count: int, radius_bound: float | None):
        raise NotImplementedError

    def constraint_error(self, u) -> np.ndarray:
        return np.zeros(np.shape(u)[:-1])


@dataclass(frozen=True)
class Euclidean(ModelSpace):
    dim: int = 2

    nonnegatively_curved = True

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    @property
    def coord_dim(self) -> int:
        return self.dim

    def distance(self, u, v):
        u, v = self.check_point(u), self.check_point(v)
        return _scalar_or_array(np.linalg.norm(u - v, axis=-1))

    def interpolate(self, u, v, t):
        u, v = self.check_point(u), self.check_point(v)
        return u + t * (v - u)

    def sample(self, rng, count, radius_bound=1.0):
        radius_bound = 1.0 if radius_bound is None else radius_bound
        g = rng.standard_normal((count, self.dim))
        g /= np.linalg.norm(g, axis=-1, keepdims=True)
        r = rng.uniform(0.0, radius_bound, size=(count, 1))
        return g * r


@dataclass(frozen=True)
class Sphere(ModelSpace):
    radius: float = 1.0

    coord_dim = 3
    nonnegatively_curved = True

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("sphere radius must be positive")

    def _project(self, u):
        return self.radius * u / np.linalg.norm(u, axis=-1, keepdims=True)

    def distance(self, u, v):
        u, v = self.check_point(u), self.check_point(v)
        # atan2 form is accurate for both tiny and near-antipodal separations
        cross = np.linalg.norm(np.cross(u, v), axis=-1)
        dot = np.sum(u * v, axis=-1)
        return _scalar_or_array(self.radius * np.arctan2(cross, dot))

    def interpolate(self, u, v, t):
        u, v = self.check_point(u), self.check_point(v)
        R = self.radius
        ang = np.asarray(self.distance(u, v)) / R
        if np.any(np.abs(ang - math.pi) < 1e-12) or np.any(
            np.linalg.norm(u / R + v / R, axis=-1) < 1e-12
        ):
            raise AntipodalPoints("antipodal points have no unique geodesic")
        ang = ang[..., None]
        with np.errstate(invalid="ignore", divide="ignore"):
            s = np.sin(ang)
            wu = np.where(ang < 1e-15, 1.0 - t, np.sin((1 - t) * ang) / s)
            wv = np.where(ang < 1e-15, t, np.sin(t * ang) / s)
        return self._project(wu * u + wv * v)

    def sample(self, rng, count, radius_bound=None):
        g = rng.standard_normal((count, 3))
        return self._project(g)

    def constraint_error(self, u):
        return np.abs(np.linalg.norm(u, axis=-1) - self.radius)


@dataclass(frozen=True)
class Hyperbolic(ModelSpace):
    kappa: float = -1.0

    coord_dim = 3
    nonnegatively_curved = False

    def __post_init__(self):
        if not self.kappa < 0:
            raise ValueError("hyperbolic curvature must be negative")

    @property
    def _k(self) -> float:
        return math.sqrt(-self.kappa)

    @property
    def basepoint(self) -> np.ndarray:
        return np.array([1.0 / self._k, 0.0, 0.0])

    def _project(self, u):
        u = np.asarray(u, dtype=float)
        norm = np.sqrt(np.maximum(-_minkowski(u, u), 1e-300))[..., None]
        return u / (norm * self._k)

    def point(self, r: float, angle: float) -> np.ndarray:
        """Point at distance ``r`` from the basepoint in direction ``angle``."""
        k = self._k
        return np.array(
            [math.cosh(k * r), math.sinh(k * r) * math.cos(angle), math.sinh(k * r) * math.sin(angle)]
        ) / k

    def distance(self, u, v):
        u, v = self.check_point(u), self.check_point(v)
        k = self._k
        ch = -_minkowski(u, v) * k * k
        w = u - v
        # chord form is accurate for short distances; arcosh for long ones
        chord = np.sqrt(np.maximum(_minkowski(w, w), 0.0))
        short = 2.0 * np.arcsinh(0.5 * k * chord) / k
        long_ = np.arccosh(np.maximum(ch, 1.0)) / k
        return _scalar_or_array(np.where(ch < 2.0, short, long_))

    def interpolate(self, u, v, t):
        u, v = self.check_point(u), self.check_point(v)
        d = np.asarray(self.distance(u, v))[..., None] * self._k
        with np.errstate(invalid="ignore", divide="ignore"):
            s = np.sinh(d)
            wu = np.where(d < 1e-15, 1.0 - t, np.sinh((1 - t) * d) / s)
            wv = np.where(d < 1e-15, t, np.sinh(t * d) / s)
        return self._project(wu * u + wv * v)

    def sample(self, rng, count, radius_bound=None):
        if radius_bound is None:
            raise ValueError("hyperbolic sampling needs a radius bound")
        k = self._k
        theta = rng.uniform(0.0, 2 * math.pi, size=count)
        r = rng.uniform(0.0, radius_bound, size=count)
        return np.stack(
            [np.cosh(k * r), np.sinh(k * r) * np.cos(theta), np.sinh(k * r) * np.sin(theta)],
            axis=-1,
        ) / k

    def constraint_error(self, u):
        return np.abs(_minkowski(u, u) - 1.0 / self.kappa)


@dataclass(frozen=True)
class EuclideanCone(ModelSpace):
    """Flat cone of total angle ``theta``; points are ``(s, phi)``."""

    theta: float = 2 * math.pi

    coord_dim = 2

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError("cone angle must be positive")

    @property
    def nonnegatively_curved(self) -> bool:
        return self.theta <= 2 * math.pi

    def _gap(self, u, v):
        raw = np.abs(u[..., 1] - v[..., 1]) % self.theta
        return np.minimum(raw, self.theta - raw)

    def distance(self, u, v):
        u, v = self.check_point(u), self.check_point(v)
        su, sv = u[..., 0], v[..., 0]
        gap = self._gap(u, v)
        flat = np.sqrt(np.maximum(su * su + sv * sv - 2 * su * sv * np.cos(gap), 0.0))
        return _scalar_or_array(np.where(gap >= math.pi, su + sv, flat))

    def interpolate(self, u, v, t):
        u, v = self.check_point(u), self.check_point(v)
        if u.ndim > 1:
            return np.stack([self.interpolate(a, b, t) for a, b in zip(u, v)])
        su, pu = float(u[0]), float(u[1])
        sv, pv = float(v[0]), float(v[1])
        if su == 0 or sv == 0:
            # one endpoint is the apex: the geodesic is a ray
            if su == 0:
                return np.array([t * sv, pv])
            return np.array([(1 - t) * su, pu])
        delta = (pv - pu) % self.theta
        if delta == self.theta - delta and delta < math.pi:
            raise NoUniqueMidpoint("two minimal geodesics wind opposite ways around the apex")
        signed = delta if delta <= self.theta - delta else delta - self.theta
        if abs(signed) >= math.pi:
            total = su + sv
            walked = t * total
            if walked <= su:
                return np.array([su - walked, pu])
            return np.array([walked - su, pv])
        # unroll: u on the ray at angle 0, v at angle ``signed``
        a = np.array([su, 0.0])
        b = np.array([sv * math.cos(signed), sv * math.sin(signed)])
        m = a + t * (b - a)
        s = math.hypot(*m)
        phi = (pu + math.atan2(m[1], m[0])) % self.theta if s > 0 else 0.0
        return np.array([s, phi])

    def sample(self, rng, count, radius_bound=1.0):
        radius_bound = 1.0 if radius_bound is None else radius_bound
        s = rng.uniform(0.0, radius_bound, size=count)
        phi = rng.uniform(0.0, self.theta, size=count)
        return np.stack([s, phi], axis=-1)


@dataclass(frozen=True)
class Product(ModelSpace):
    left: ModelSpace
    right: ModelSpace

    @property
    def coord_dim(self) -> int:
        return self.left.coord_dim + self.right.coord_dim

    @property
    def nonnegatively_curved(self) -> bool:
        return self.left.nonnegatively_curved and self.right.nonnegatively_curved

    def split(self, u):
        u = self.check_point(u)
        k = self.left.coord_dim
        return u[..., :k], u[..., k:]

    def distance(self, u, v):
        ul, ur = self.split(u)
        vl, vr = self.split(v)
        dl = np.asarray(self.left.distance(ul, vl))
        dr = np.asarray(self.right.distance(ur, vr))
        return _scalar_or_array(np.hypot(dl, dr))

    def interpolate(self, u, v, t):
        ul, ur = self.split(u)
        vl, vr = self.split(v)
        return np.concatenate(
            [self.left.interpolate(ul, vl, t), self.right.interpolate(ur, vr, t)], axis=-1
        )

    def sample(self, rng, count, radius_bound=1.0):
        return np.concatenate(
            [self.left.sample(rng, count, radius_bound), self.right.sample(rng, count, radius_bound)],
            axis=-1,
        )

    def constraint_error(self, u):
        ul, ur = self.split(u)
        return np.maximum(self.left.constraint_error(ul), self.right.constraint_error(ur))


def distance(space: ModelSpace, u, v):
    return space.distance(u, v)


def midpoint(space: ModelSpace, u, v):
    return space.midpoint(u, v)


def interpolate(space: ModelSpace, u, v, t: float):
    return space.interpolate(u, v, t)


def sample(space: ModelSpace, rng_seed, count: int, radius_bound: float | None = None):
    """Draw ``count`` points, reproducibly for a fixed seed."""
    if count < 0:
        raise ValueError("count must be non-negative")
    if radius_bound is not None and not radius_bound > 0:
        raise ValueError("radius_bound must be positive")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    return space.sample(rng, count, radius_bound)


def pairwise_quadruple_distances(space: ModelSpace, pts) -> np.ndarray:
    """Distances among points ``pts[..., 4, :]`` as an array ``[..., 4, 4]``."""
    pts = np.asarray(pts, dtype=float)
    out = np.zeros(pts.shape[:-2] + (4, 4))
    for i in range(4):
        for j in range(i + 1, 4):
            d = np.asarray(space.distance(pts[..., i, :], pts[..., j, :]))
            out[..., i, j] = d
            out[..., j, i] = d
    return out


def quadruple_from_points(space: ModelSpace, p, x, y, z) -> LabeledQuadruple:
    d = pairwise_quadruple_distances(space, np.stack([np.asarray(a, float) for a in (p, x, y, z)]))
    return LabeledQuadruple.from_matrix(d, 0, 1, 2, 3)


def median_intersection(space: ModelSpace, a, b, c) -> np.ndarray:
    """Common point of the medians from ``a`` and ``b``, found numerically.

    Solves ``median_a(s) = median_b(t)`` in ambient coordinates, where
    ``median_a`` runs from ``a`` to the midpoint of ``[bc]``.
    """
    from scipy.optimize import least_squares

    ma = space.midpoint(b, c)
    mb = space.midpoint(a, c)

    def gap(st):
        return space.interpolate(a, ma, st[0]) - space.interpolate(b, mb, st[1])

    sol = least_squares(gap, x0=[2 / 3, 2 / 3], bounds=([0, 0], [1, 1]), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return space.interpolate(a, ma, sol.x[0])


def equilateral_triangle(space: Sphere | Hyperbolic | Euclidean, side: float) -> np.ndarray:
    """Vertices of an equilateral triangle centred at the space's basepoint."""
    third = 2 * math.pi / 3
    if isinstance(space, Hyperbolic):
        k = math.sqrt(-space.kappa)
        # cosh(side) = cosh(r)^2 + sinh(r)^2 / 2 for circumradius r (unit curvature)
        r = math.acosh(math.sqrt((math.cosh(k * side) + 0.5) / 1.5)) / k
        return np.stack([space.point(r, i * third) for i in range(3)])
    if isinstance(space, Sphere):
        R = space.radius
        # cos(side) = cos(r)^2 - sin(r)^2 / 2 in units of R
        cr2 = (math.cos(side / R) + 0.5) / 1.5
        r = math.acos(math.sqrt(cr2))
        return np.stack(
            [R * np.array([math.sin(r) * math.cos(i * third), math.sin(r) * math.sin(i * third), math.cos(r)])
             for i in range(3)]
        )
    if isinstance(space, Euclidean) and space.dim == 2:
        r = side / math.sqrt(3)
        return np.stack([r * np.array([math.cos(i * third), math.sin(i * third)]) for i in range(3)])
    raise ValueError(f"no equilateral construction for {space!r}")
