"""Monte Carlo campaigns over model spaces and random 4-point metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import conditions as cond
from .embedding import embed_any
from .metric_core import COUNTEREXAMPLE_STAR_EPS_MAX, counterexample_F, validate
from .model_geometry import (
    Euclidean,
    EuclideanCone,
    Hyperbolic,
    ModelSpace,
    Product,
    Sphere,
    pairwise_quadruple_distances,
)

CHUNK = 10_000

PASS = "PASS"
FALSIFYING = "FALSIFYING"
VIOLATIONS_FOUND = "VIOLATIONS_FOUND"

# index triples (p, x, y, z) for the four apex labelings of a 4-subset
APEX_LABELINGS = ((0, 1, 2, 3), (1, 0, 2, 3), (2, 0, 1, 3), (3, 0, 1, 2))


def space_to_dict(space: ModelSpace) -> dict:
    if isinstance(space, Euclidean):
        return {"type": "euclidean", "dim": space.dim}
    if isinstance(space, Sphere):
        return {"type": "sphere", "radius": space.radius}
    if isinstance(space, Hyperbolic):
        return {"type": "hyperbolic", "kappa": space.kappa}
    if isinstance(space, EuclideanCone):
        return {"type": "cone", "theta": space.theta}
    if isinstance(space, Product):
        return {"type": "product", "left": space_to_dict(space.left), "right": space_to_dict(space.right)}
    raise TypeError(f"unknown space {space!r}")


def space_from_dict(d: dict) -> ModelSpace:
    kind = d["type"]
    if kind == "euclidean":
        return Euclidean(int(d.get("dim", 2)))
    if kind == "sphere":
        return Sphere(float(d.get("radius", 1.0)))
    if kind == "hyperbolic":
        return Hyperbolic(float(d.get("kappa", -1.0)))
    if kind == "cone":
        return EuclideanCone(float(d["theta"]))
    if kind == "product":
        return Product(space_from_dict(d["left"]), space_from_dict(d["right"]))
    raise ValueError(f"unknown space type {kind!r}")


def six_distances(dmat: np.ndarray, labeling) -> tuple[np.ndarray, ...]:
    """``px, py, pz, xy, yz, zx`` columns from a batch of 4x4 matrices."""
    p, x, y, z = labeling
    return (
        dmat[..., p, x], dmat[..., p, y], dmat[..., p, z],
        dmat[..., x, y], dmat[..., y, z], dmat[..., z, x],
    )


def _evaluate(condition: str, six, kappa: float = 0.0) -> np.ndarray:
    if condition == cond.STAR:
        return np.asarray(cond.star(*six))
    if condition == cond.ONE_PLUS_THREE:
        return np.asarray(cond.one_plus_three(*six, kappa=kappa))
    if condition == cond.STAR_PLUS:
        return np.asarray(cond.star_plus(*six))
    if condition == cond.STAR_MINUS:
        return np.asarray(cond.star_minus(*six))
    raise ValueError(f"unknown condition {condition!r}")


@dataclass
class ConditionStats:
    min_residual: float = math.inf
    violations: int = 0
    evaluated: int = 0
    worst: dict | None = None

    def to_dict(self) -> dict:
        return {
            "min_residual": None if self.evaluated == 0 else self.min_residual,
            "violations": self.violations,
            "evaluated": self.evaluated,
            "worst": self.worst,
        }


@dataclass
class Campaign:
    kind: str
    space: dict | None
    count: int
    seed: int
    conditions: tuple[str, ...]
    tol: float = cond.DEFAULT_TOL
    radius_bound: float | None = None
    expect_violations: bool = False
    stats: dict[str, ConditionStats] = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    residuals: dict[str, list[np.ndarray]] | None = None

    @property
    def total_violations(self) -> int:
        return sum(s.violations for s in self.stats.values())

    @property
    def status(self) -> str:
        if self.total_violations == 0:
            return PASS
        return VIOLATIONS_FOUND if self.expect_violations else FALSIFYING

    def worst_space(self, condition: str):
        """The worst quadruple for ``condition`` as a metric space, for replay."""
        w = self.stats[condition].worst
        return None if w is None else validate(w["distances"], ["p", "x", "y", "z"])

    def residual_array(self, condition: str) -> np.ndarray:
        if not self.residuals:
            return np.empty(0)
        parts = self.residuals.get(condition, [])
        return np.concatenate(parts) if parts else np.empty(0)

    def update(self, condition: str, res: np.ndarray, dmats: np.ndarray, offset: int, points=None):
        """Fold a ``(batch, 4)`` block of residuals into the streaming statistics."""
        st = self.stats[condition]
        st.evaluated += res.size
        st.violations += int(np.sum(res < -self.tol))
        if self.residuals is not None:
            self.residuals.setdefault(condition, []).append(res.ravel().copy())
        if res.size == 0:
            return
        flat = int(np.argmin(res))
        i, a = divmod(flat, res.shape[1])
        if res[i, a] < st.min_residual:
            st.min_residual = float(res[i, a])
            labeling = APEX_LABELINGS[a]
            worst = {
                "sample": offset + i,
                "residual": float(res[i, a]),
                "distances": dmats[i][np.ix_(labeling, labeling)].tolist(),
            }
            if points is not None:
                worst["points"] = points[i][list(labeling)].tolist()
            st.worst = worst

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "space": self.space,
            "count": self.count,
            "seed": self.seed,
            "tol": self.tol,
            "radius_bound": self.radius_bound,
            "status": self.status,
            "conditions": {c: self.stats[c].to_dict() for c in self.conditions},
            **({"extra": self.extra} if self.extra else {}),
        }


def applicable_conditions(space: ModelSpace) -> tuple[str, ...]:
    """Conditions that must hold on every quadruple of ``space``."""
    out = []
    if space.nonnegatively_curved:
        out += [cond.STAR, cond.ONE_PLUS_THREE]
    if isinstance(space, Sphere) and space.radius <= 1:
        out.append(cond.STAR_PLUS)
    if space.nonnegatively_curved or (isinstance(space, Hyperbolic) and space.kappa >= -1):
        out.append(cond.STAR_MINUS)
    return tuple(out)


def _batch_residuals(condition, dmats, kappa=0.0) -> np.ndarray:
    return np.stack(
        [_evaluate(condition, six_distances(dmats, lab), kappa) for lab in APEX_LABELINGS], axis=1
    )


def _sample_campaign(camp: Campaign, space: ModelSpace, rng: np.random.Generator, chunk: int):
    done = 0
    while done < camp.count:
        b = min(chunk, camp.count - done)
        pts = space.sample(rng, 4 * b, camp.radius_bound).reshape(b, 4, -1)
        dmats = pairwise_quadruple_distances(space, pts)
        for c in camp.conditions:
            camp.update(c, _batch_residuals(c, dmats), dmats, done, pts)
        done += b


def run_positivity(
    space: ModelSpace,
    count: int,
    seed: int,
    conditions=None,
    radius_bound: float | None = None,
    tol: float = cond.DEFAULT_TOL,
    keep_residuals: bool = False,
    chunk: int = CHUNK,
) -> Campaign:
    """Sample ``count`` quadruples and evaluate every apex labeling.

    Any violation of a listed condition marks the campaign FALSIFYING.
    """
    conds = tuple(conditions) if conditions else applicable_conditions(space)
    camp = Campaign(
        "positivity", space_to_dict(space), int(count), int(seed), conds, tol, radius_bound,
        stats={c: ConditionStats() for c in conds},
        residuals={} if keep_residuals else None,
    )
    _sample_campaign(camp, space, np.random.default_rng(seed), chunk)
    return camp


def run_violation_search(
    space: Hyperbolic,
    count: int,
    seed: int,
    radius_bound: float = 10.0,
    tol: float = cond.DEFAULT_TOL,
    keep_residuals: bool = False,
    chunk: int = CHUNK,
) -> Campaign:
    """Look for (*) failures among quadruples sampled within ``radius_bound``."""
    if not isinstance(space, Hyperbolic):
        raise ValueError("violation search runs on hyperbolic spaces")
    camp = Campaign(
        "violation_search", space_to_dict(space), int(count), int(seed), (cond.STAR,), tol,
        radius_bound, expect_violations=True,
        stats={cond.STAR: ConditionStats()},
        residuals={} if keep_residuals else None,
    )
    _sample_campaign(camp, space, np.random.default_rng(seed), chunk)
    return camp


def random_metrics(count: int, rng: np.random.Generator, chunk: int = CHUNK) -> np.ndarray:
    """``count`` 4-point metrics with i.i.d. uniform (0, 1] distances, by rejection."""
    iu = np.triu_indices(4, 1)
    out = []
    have = 0
    while have < count:
        six = 1.0 - rng.random((chunk, 6))
        d = np.zeros((chunk, 4, 4))
        d[:, iu[0], iu[1]] = six
        d = d + d.transpose(0, 2, 1)
        # d[i,k] <= d[i,j] + d[j,k] for all i, j, k
        ok = np.all(d[:, :, None, :] <= d[:, :, :, None] + d[:, None, :, :], axis=(1, 2, 3))
        good = d[ok][: count - have]
        out.append(good)
        have += len(good)
    return np.concatenate(out) if out else np.zeros((0, 4, 4))


def run_implication_test(
    count: int,
    seed: int,
    tol: float = cond.DEFAULT_TOL,
    embed_check: bool = False,
    chunk: int = CHUNK,
) -> Campaign:
    """Among random metrics satisfying (1+3) at every apex, check (*) at every apex.

    With ``embed_check`` the premise-passing metrics are also fed to
    :func:`embed_any`; failures are listed under ``extra`` for inspection and do
    not change the campaign status.
    """
    camp = Campaign(
        "implication", None, int(count), int(seed), (cond.STAR,), tol,
        stats={cond.STAR: ConditionStats()},
    )
    rng = np.random.default_rng(seed)
    metrics = random_metrics(int(count), rng, chunk) if count > 0 else np.zeros((0, 4, 4))
    premise = np.ones(len(metrics), dtype=bool)
    if len(metrics):
        opt = _batch_residuals(cond.ONE_PLUS_THREE, metrics)
        premise = np.all(opt >= -tol, axis=1)
    kept = metrics[premise]
    idx = np.flatnonzero(premise)
    camp.extra["premise_passing"] = int(len(kept))
    if len(kept):
        st = _batch_residuals(cond.STAR, kept)
        camp.update(cond.STAR, st, kept, 0)
        if camp.stats[cond.STAR].worst is not None:
            camp.stats[cond.STAR].worst["sample"] = int(idx[camp.stats[cond.STAR].worst["sample"]])
    if embed_check:
        failures = []
        for i, d in zip(idx, kept):
            res = embed_any(validate(d))
            if not res.ok:
                failures.append({"sample": int(i), "distances": d.tolist(), "certificate": res.certificate})
        camp.extra["embedding_checked"] = int(len(kept))
        camp.extra["embedding_falsifications"] = failures
    return camp


def reproduce_counterexample(eps_list, tol: float = cond.DEFAULT_TOL) -> list[dict]:
    """Evaluate the four-point counterexample for each ``eps``.

    ``expected`` records whether the three claimed behaviours all occur:
    (*) at every apex, (1+3) failing at apex p, and no plane/sphere embedding.
    Entries with ``eps`` above the admissible bound are reported but flagged.
    """
    rows = []
    for eps in eps_list:
        space = counterexample_F(eps)
        rep = cond.check_all_labelings(space, 0.0, tol)
        at_p = next(r for r in rep.results[cond.ONE_PLUS_THREE] if r.labeling[0] == 0)
        emb = embed_any(space)
        star_ok = rep.verdict(cond.STAR) == cond.PASS
        opt_fails_at_p = at_p.residual is not None and at_p.residual < -tol
        rows.append(
            {
                "eps": float(eps),
                "in_admissible_range": float(eps) <= COUNTEREXAMPLE_STAR_EPS_MAX,
                "star_verdict": rep.verdict(cond.STAR),
                "star_min_residual": rep.worst(cond.STAR).residual,
                "one_plus_three_residual_at_p": at_p.residual,
                "angle_excess_at_p": None if at_p.residual is None else -at_p.residual,
                "one_plus_three_verdict": rep.verdict(cond.ONE_PLUS_THREE),
                "embedding": emb.certificate["kind"] if not emb.ok else emb.target,
                "expected": star_ok and opt_fails_at_p and not emb.ok,
            }
        )
    return rows


def hyperbolic_center_quadruple(side: float = 10.0, kappa: float = -1.0):
    """Equilateral triangle of the given side with the apex at its centre."""
    from .model_geometry import equilateral_triangle, quadruple_from_points

    h = Hyperbolic(kappa)
    tri = equilateral_triangle(h, side)
    return quadruple_from_points(h, h.basepoint, *tri)
