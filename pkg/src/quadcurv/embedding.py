"""Isometric embedding of 4-point metrics into the plane or a round 2-sphere."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .metric_core import FiniteMetricSpace
from .model_geometry import Euclidean, Sphere

PSD_TOL = 1e-10
RANK_TOL = 1e-8
MAX_DISTANCE_ERROR = 1e-8
N_PROBES = 64
N_SCAN = 4096
R_MAX_FACTOR = 1e3

PLANE = "plane"
SPHERE = "sphere"


@dataclass
class EmbeddingResult:
    target: str | None
    radius: float | None = None
    coordinates: np.ndarray | None = None
    max_distance_error: float | None = None
    certificate: dict | None = None
    profile: list[tuple[float, float]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.target is not None

    def to_dict(self) -> dict:
        out: dict = {"target": self.target}
        if self.radius is not None:
            out["radius"] = self.radius
        if self.coordinates is not None:
            out["coordinates"] = self.coordinates.tolist()
            out["max_distance_error"] = self.max_distance_error
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.profile:
            out["eigenvalue_profile"] = [list(p) for p in self.profile]
        return out


def _require_four(space: FiniteMetricSpace) -> np.ndarray:
    if space.n != 4:
        raise ValueError(f"embedding is implemented for 4-point spaces, got {space.n}")
    return np.asarray(space.dist, dtype=float)


def _realized_error(model, coords, d) -> float:
    err = 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            err = max(err, abs(float(model.distance(coords[i], coords[j])) - d[i, j]))
    return err


def plane_gram(d: np.ndarray) -> np.ndarray:
    """Centered Gram matrix ``-J D^2 J / 2`` of a distance matrix."""
    n = len(d)
    j = np.eye(n) - np.ones((n, n)) / n
    return -0.5 * j @ (d * d) @ j


def sphere_gram(d: np.ndarray, radius: float) -> np.ndarray:
    return np.cos(d / radius)


def embed_plane(space: FiniteMetricSpace) -> EmbeddingResult:
    """Classical MDS in two dimensions, accepted only if exact."""
    d = _require_four(space)
    b = plane_gram(d)
    evals, evecs = np.linalg.eigh(b)
    scale = max(float(np.max(np.abs(b))), 1e-300)
    if evals[0] < -PSD_TOL * scale:
        return EmbeddingResult(
            None,
            certificate={
                "kind": "NotEmbeddable",
                "target": PLANE,
                "reason": "negative eigenvalue of the centered Gram matrix",
                "eigenvalue": float(evals[0]),
                "eigenvalues": evals.tolist(),
            },
        )
    rank = int(np.sum(evals > RANK_TOL * scale))
    if rank > 2:
        return EmbeddingResult(
            None,
            certificate={
                "kind": "NotEmbeddable",
                "target": PLANE,
                "reason": "rank excess: centered Gram matrix has rank > 2",
                "rank": rank,
                "eigenvalue": float(evals[-3]),
                "eigenvalues": evals.tolist(),
            },
        )
    top = evecs[:, [-1, -2]] * np.sqrt(np.maximum(evals[[-1, -2]], 0.0))
    err = _realized_error(Euclidean(2), top, d)
    if err > MAX_DISTANCE_ERROR:
        return EmbeddingResult(
            None,
            certificate={
                "kind": "NotEmbeddable",
                "target": PLANE,
                "reason": "realized distances off by more than tolerance",
                "max_distance_error": err,
                "eigenvalues": evals.tolist(),
            },
        )
    return EmbeddingResult(PLANE, coordinates=top, max_distance_error=err)


def embed_sphere(space: FiniteMetricSpace, radius: float) -> EmbeddingResult:
    """Embed into the sphere of the given radius, or explain why not."""
    d = _require_four(space)
    if not radius > 0:
        raise ValueError("radius must be positive")
    if np.max(d) > math.pi * radius:
        return EmbeddingResult(
            None,
            radius=radius,
            certificate={
                "kind": "DistanceExceedsDiameter",
                "radius": radius,
                "max_distance": float(np.max(d)),
            },
        )
    c = sphere_gram(d, radius)
    evals, evecs = np.linalg.eigh(c)
    scale = float(np.max(np.abs(c)))
    if evals[0] < -PSD_TOL * scale or evals[0] > RANK_TOL * scale:
        return EmbeddingResult(
            None,
            radius=radius,
            certificate={
                "kind": "NotEmbeddable",
                "target": SPHERE,
                "radius": radius,
                "reason": "negative eigenvalue" if evals[0] < 0 else "rank excess: rank 4",
                "eigenvalue": float(evals[0]),
            },
        )
    x = evecs[:, 1:] * np.sqrt(np.maximum(evals[1:], 0.0))
    x = radius * x / np.linalg.norm(x, axis=1, keepdims=True)
    err = _realized_error(Sphere(radius), x, d)
    if err > MAX_DISTANCE_ERROR:
        return EmbeddingResult(
            None,
            radius=radius,
            certificate={
                "kind": "NotEmbeddable",
                "target": SPHERE,
                "radius": radius,
                "reason": "realized distances off by more than tolerance",
                "max_distance_error": err,
                "eigenvalue": float(evals[0]),
            },
        )
    return EmbeddingResult(SPHERE, radius=radius, coordinates=x, max_distance_error=err)


def min_sphere_eigenvalue(d: np.ndarray, radius) -> float | np.ndarray:
    """Smallest eigenvalue of ``cos(D / R)``; ``radius`` may be an array of radii."""
    r = np.asarray(radius, dtype=float)
    if r.ndim == 0:
        return float(np.linalg.eigvalsh(sphere_gram(d, float(r)))[0])
    return np.linalg.eigvalsh(np.cos(d[None, :, :] / r[:, None, None]))[:, 0]


def _bisect(f, lo, hi, flo):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def candidate_radii(d: np.ndarray, lo: float, hi: float, n_scan: int = N_SCAN) -> list[float]:
    """Radii in ``[lo, hi]`` where the smallest eigenvalue of ``cos(D / R)`` vanishes.

    Sign changes on a dense log grid are refined by bisection.  Interior local
    maxima that stay negative on the grid are maximised, since a narrow positive
    bump between two close roots can hide between grid points.
    """
    f = lambda r: min_sphere_eigenvalue(d, r)  # noqa: E731
    radii = np.geomspace(lo, hi, n_scan)
    vals = f(radii)
    out: list[float] = [float(r) for r in radii[vals == 0]]
    neg = vals < 0
    for k in np.flatnonzero((neg[:-1] != neg[1:]) & (vals[:-1] != 0) & (vals[1:] != 0)):
        out.append(_bisect(f, float(radii[k]), float(radii[k + 1]), float(vals[k])))
    inner = vals[1:-1]
    peaks = np.flatnonzero((inner > vals[:-2]) & (inner >= vals[2:]) & (inner < 0)) + 1
    for k in peaks:
        a, b = float(radii[k - 1]), float(radii[k + 1])
        res = minimize_scalar(
            lambda r: -f(r), bounds=(a, b), method="bounded", options={"xatol": 1e-15 * b}
        )
        peak, vpeak = float(res.x), -float(res.fun)
        if vpeak > 0:
            out.append(_bisect(f, a, peak, float(vals[k - 1])))
            out.append(_bisect(f, peak, b, vpeak))
        elif vpeak >= -PSD_TOL:
            out.append(peak)
    return sorted(out)


def embed_any(space: FiniteMetricSpace, r_max_factor: float = R_MAX_FACTOR) -> EmbeddingResult:
    """Try the plane, then search radii for a sphere embedding.

    Candidate radii come from :func:`candidate_radii` over
    ``[max_d / pi, r_max_factor * max_d]``; the smallest one that embeds is
    returned.  The result carries a coarse eigenvalue profile over the bracket.
    """
    d = _require_four(space)
    plane = embed_plane(space)
    if plane.ok:
        return plane
    max_d = float(np.max(d))
    lo, hi = max_d / math.pi, r_max_factor * max_d
    coarse = np.geomspace(lo, hi, N_PROBES)
    profile = [(float(r), float(v)) for r, v in zip(coarse, min_sphere_eigenvalue(d, coarse))]

    candidates = candidate_radii(d, lo, hi)
    for r in candidates:
        res = embed_sphere(space, r)
        if res.ok:
            res.profile = profile
            return res
    return EmbeddingResult(
        None,
        certificate={
            "kind": "NoEmbeddingFound",
            "plane": plane.certificate,
            "bracket": [lo, hi],
            "samples": N_SCAN,
            "candidates_tried": candidates,
        },
        profile=profile,
    )
