"""Trace of the thirds-sequence toward a midpoint and the alpha recursion.

Given ``p, q, x`` in a model space, ``z`` is the midpoint of ``[pq]`` and
``x_0 = x``, ``x_{n+1}`` is the point of ``[x_n z]`` with
``|x_{n+1} z| = |x_n z| / 3``.  ``alpha_n`` is defined by

    alpha_n * |x_n z|^2 = |x_n p|^2 + |x_n q|^2 - |pq|^2 / 2.

The numerator cancels to O(|x_n z|^2) against O(1) terms, so traces are
computed in extended precision with mpmath and rounded at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .model_geometry import (
    AntipodalPoints,
    Euclidean,
    EuclideanCone,
    Hyperbolic,
    ModelSpace,
    NoUniqueMidpoint,
    Sphere,
)

DEFAULT_N_MAX = 12
X_EQUALS_Z_TOL = 1e-8
RECURSION_TOL = 1e-6
WORKING_DPS = 50


class XEqualsZ(ValueError):
    pass


class UnsupportedSpace(ValueError):
    pass


@dataclass
class IterationStep:
    n: int
    point: np.ndarray
    dist_to_z: float
    alpha: float
    # (*) residual of the quadruple with apex x_n and base p, q, x_{n-1}
    star_audit: float | None = None


@dataclass
class IterationTrace:
    space: ModelSpace
    p: np.ndarray
    q: np.ndarray
    x: np.ndarray
    z: np.ndarray
    pq: float
    steps: list[IterationStep] = field(default_factory=list)

    @property
    def alphas(self) -> list[float]:
        return [s.alpha for s in self.steps]

    @property
    def recursion_slack(self) -> list[float]:
        a = self.alphas
        return [a[n + 1] - (3 * a[n] - 4) for n in range(len(a) - 1)]

    def midpoint_residuals(self, n: int = 0) -> tuple[float, float]:
        """(**) and (***) residuals for ``x_n``, read off ``alpha_n``."""
        s = self.steps[n]
        d2 = s.dist_to_z**2
        return (2 - s.alpha) * d2, (3 - s.alpha) * d2

    def to_dict(self) -> dict:
        return {
            "space": repr(self.space),
            "p": self.p.tolist(),
            "q": self.q.tolist(),
            "x": self.x.tolist(),
            "z": self.z.tolist(),
            "steps": [
                {
                    "n": s.n,
                    "point": s.point.tolist(),
                    "dist_to_z": s.dist_to_z,
                    "alpha": s.alpha,
                    "star_audit": s.star_audit,
                }
                for s in self.steps
            ],
            "recursion_slack": self.recursion_slack,
        }


class _MpGeometry:
    """Distance and geodesic interpolation in mpmath for one model space."""

    def __init__(self, space: ModelSpace):
        self.space = space
        if isinstance(space, Euclidean):
            self.kind = "euclidean"
        elif isinstance(space, Sphere):
            self.kind = "sphere"
            self.R = mpmath.mpf(space.radius)
        elif isinstance(space, Hyperbolic):
            self.kind = "hyperbolic"
            self.k = mpmath.sqrt(-mpmath.mpf(space.kappa))
        elif isinstance(space, EuclideanCone):
            self.kind = "cone"
            self.theta = mpmath.mpf(space.theta)
        else:
            raise UnsupportedSpace(f"no closed-form geodesics for {type(space).__name__}")

    def point(self, u) -> list:
        v = [mpmath.mpf(float(c)) for c in np.asarray(u, dtype=float)]
        if self.kind == "sphere":
            n = mpmath.sqrt(mpmath.fsum(c * c for c in v))
            v = [self.R * c / n for c in v]
        elif self.kind == "hyperbolic":
            n = mpmath.sqrt(-self._mink(v, v))
            v = [c / (n * self.k) for c in v]
        elif self.kind == "cone":
            v[1] = v[1] % self.theta
        return v

    @staticmethod
    def _mink(u, v):
        return -u[0] * v[0] + u[1] * v[1] + u[2] * v[2]

    def distance(self, u, v):
        if self.kind == "euclidean":
            return mpmath.sqrt(mpmath.fsum((a - b) ** 2 for a, b in zip(u, v)))
        if self.kind == "sphere":
            chord = mpmath.sqrt(mpmath.fsum((a - b) ** 2 for a, b in zip(u, v)))
            return 2 * self.R * mpmath.asin(min(chord / (2 * self.R), mpmath.mpf(1)))
        if self.kind == "hyperbolic":
            w = [a - b for a, b in zip(u, v)]
            chord = mpmath.sqrt(max(self._mink(w, w), mpmath.mpf(0)))
            return 2 * mpmath.asinh(self.k * chord / 2) / self.k
        su, sv = u[0], v[0]
        raw = abs(u[1] - v[1]) % self.theta
        gap = min(raw, self.theta - raw)
        if gap >= mpmath.pi:
            return su + sv
        return mpmath.sqrt(max(su * su + sv * sv - 2 * su * sv * mpmath.cos(gap), mpmath.mpf(0)))

    def interpolate(self, u, v, t):
        """Point at fraction ``t`` from ``u`` toward ``v``."""
        t = mpmath.mpf(t)
        if self.kind == "euclidean":
            return [a + t * (b - a) for a, b in zip(u, v)]
        if self.kind in ("sphere", "hyperbolic"):
            d = self.distance(u, v)
            if self.kind == "sphere":
                ang = d / self.R
                if mpmath.pi - ang < mpmath.mpf("1e-12"):
                    raise AntipodalPoints("antipodal points have no unique geodesic")
                if ang == 0:
                    return list(u)
                wu = mpmath.sin((1 - t) * ang) / mpmath.sin(ang)
                wv = mpmath.sin(t * ang) / mpmath.sin(ang)
            else:
                ang = d * self.k
                if ang == 0:
                    return list(u)
                wu = mpmath.sinh((1 - t) * ang) / mpmath.sinh(ang)
                wv = mpmath.sinh(t * ang) / mpmath.sinh(ang)
            return self.point_raw([wu * a + wv * b for a, b in zip(u, v)])
        return self._cone_interpolate(u, v, t)

    def point_raw(self, v):
        if self.kind == "sphere":
            n = mpmath.sqrt(mpmath.fsum(c * c for c in v))
            return [self.R * c / n for c in v]
        n = mpmath.sqrt(-self._mink(v, v))
        return [c / (n * self.k) for c in v]

    def _cone_interpolate(self, u, v, t):
        su, pu = u
        sv, pv = v
        if su == 0:
            return [t * sv, pv]
        if sv == 0:
            return [(1 - t) * su, pu]
        delta = (pv - pu) % self.theta
        if delta == self.theta - delta and delta < mpmath.pi:
            raise NoUniqueMidpoint("two minimal geodesics wind opposite ways around the apex")
        signed = delta if delta <= self.theta - delta else delta - self.theta
        if abs(signed) >= mpmath.pi:
            walked = t * (su + sv)
            return [su - walked, pu] if walked <= su else [walked - su, pv]
        ax, ay = su, mpmath.mpf(0)
        bx, by = sv * mpmath.cos(signed), sv * mpmath.sin(signed)
        mx, my = ax + t * (bx - ax), ay + t * (by - ay)
        return [mpmath.hypot(mx, my), (pu + mpmath.atan2(my, mx)) % self.theta]


def _alpha(geo, xn, p, q, pq2, dz):
    num = mpmath.fsum([geo.distance(xn, p) ** 2, geo.distance(xn, q) ** 2, -pq2 / 2])
    return num / (dz * dz)


def run_iteration(space: ModelSpace, p, q, x, n_max: int = DEFAULT_N_MAX) -> IterationTrace:
    """Build ``x_0, ..., x_{n_max}`` and their ``alpha_n``.

    Each step records, for audit, the (*) residual of the quadruple with apex
    ``x_{n+1}`` and base ``p, q, x_n``; dividing it by ``|x_{n+1} z|^2`` gives
    exactly the recursion slack ``alpha_{n+1} - (3 alpha_n - 4)``.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    geo = _MpGeometry(space)
    with mpmath.workdps(WORKING_DPS):
        mp_p, mp_q, mp_x = geo.point(p), geo.point(q), geo.point(x)
        z = geo.interpolate(mp_p, mp_q, mpmath.mpf(1) / 2)
        pq = geo.distance(mp_p, mp_q)
        pq2 = pq * pq
        d0 = geo.distance(mp_x, z)
        if d0 < X_EQUALS_Z_TOL:
            raise XEqualsZ(f"|xz| = {float(d0):.3g} is below {X_EQUALS_Z_TOL}")

        to_np = lambda v: np.array([float(c) for c in v])  # noqa: E731
        trace = IterationTrace(space, to_np(mp_p), to_np(mp_q), to_np(mp_x), to_np(z), float(pq))
        xn, prev = mp_x, None
        for n in range(n_max + 1):
            if n > 0:
                prev, xn = xn, geo.interpolate(z, xn, mpmath.mpf(1) / 3)
            dz = geo.distance(xn, z)
            audit = None
            if prev is not None:
                audit = mpmath.fsum(
                    [
                        geo.distance(xn, mp_p) ** 2,
                        geo.distance(xn, mp_q) ** 2,
                        geo.distance(xn, prev) ** 2,
                        -(geo.distance(prev, mp_p) ** 2 + geo.distance(prev, mp_q) ** 2 + pq2) / 3,
                    ]
                )
            trace.steps.append(
                IterationStep(
                    n,
                    to_np(xn),
                    float(dz),
                    float(_alpha(geo, xn, mp_p, mp_q, pq2, dz)),
                    None if audit is None else float(audit),
                )
            )
    return trace


def verify_recursion(trace: IterationTrace, tol: float = RECURSION_TOL) -> list[bool]:
    """Per step ``n``: does ``alpha_{n+1} >= 3 alpha_n - 4 - tol`` hold?"""
    if len(trace.steps) < 2:
        raise ValueError("need at least two steps")
    return [s >= -tol for s in trace.recursion_slack]


def schedule_error(trace: IterationTrace) -> float:
    """Largest relative deviation of ``|x_n z|`` from ``3^-n |xz|``."""
    d0 = trace.steps[0].dist_to_z
    return max(abs(s.dist_to_z - d0 / 3**s.n) / (d0 / 3**s.n) for s in trace.steps)


def random_trace_points(space: ModelSpace, rng: np.random.Generator, radius_bound=None):
    """Three points ``p, q, x`` suitable for :func:`run_iteration`."""
    while True:
        p, q, x = space.sample(rng, 3, radius_bound)
        try:
            z = space.midpoint(p, q)
        except (AntipodalPoints, NoUniqueMidpoint):
            continue
        dz = float(space.distance(x, z))
        if isinstance(space, Sphere) and math.pi * space.radius - dz < 1e-6:
            continue
        if dz > 1e-6:
            return p, q, x
