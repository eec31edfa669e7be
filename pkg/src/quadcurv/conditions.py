"""Quadruple inequalities as residuals: each condition holds iff its residual >= 0.

The vectorised cores (``star``, ``one_plus_three``, ...) take the six distances
``px, py, pz, xy, yz, zx`` as scalars or broadcastable arrays; the
``*_residual`` wrappers take a :class:`LabeledQuadruple`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .metric_core import FiniteMetricSpace, LabeledQuadruple, quadruples
from .model_geometry import DomainError, GeometryError, comparison_angle

DEFAULT_TOL = 1e-9

STAR = "star"
ONE_PLUS_THREE = "one_plus_three"
STAR_PLUS = "star_plus"
STAR_MINUS = "star_minus"
CONDITIONS = (STAR, ONE_PLUS_THREE, STAR_PLUS, STAR_MINUS)

PASS, FAIL, NOT_APPLICABLE = "PASS", "FAIL", "N/A"


class AngleDomainError(GeometryError):
    """A comparison angle at the apex could not be formed."""

    def __init__(self, pair: str, cause: Exception):
        self.pair = pair
        self.cause = cause
        super().__init__(f"model angle at apex between {pair}: {cause}")


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def star(px, py, pz, xy, yz, zx):
    px, py, pz, xy, yz, zx = (np.asarray(v, dtype=float) for v in (px, py, pz, xy, yz, zx))
    return _out(px * px + py * py + pz * pz - (xy * xy + yz * yz + zx * zx) / 3.0)


def one_plus_three(px, py, pz, xy, yz, zx, kappa: float = 0.0):
    angles = []
    for pair, (a, b, c) in (("x,y", (px, py, xy)), ("y,z", (py, pz, yz)), ("z,x", (pz, px, zx))):
        try:
            angles.append(np.asarray(comparison_angle(a, b, c, kappa)))
        except GeometryError as exc:
            raise AngleDomainError(pair, exc) from exc
    return _out(2 * math.pi - (angles[0] + angles[1] + angles[2]))


def _double_sum(f, xy, yz, zx):
    # i, j run independently over 1..3: three diagonal terms f(0) = 1 and
    # each off-diagonal pair twice
    return 3.0 + 2.0 * (f(xy) + f(yz) + f(zx))


def star_plus(px, py, pz, xy, yz, zx):
    """Curvature >= 1 analogue, divided by 3.

    The 1/3 factor makes the residual agree with :func:`star` to second order
    for small quadruples; it does not change the sign.
    """
    vals = [np.asarray(v, dtype=float) for v in (px, py, pz, xy, yz, zx)]
    if any(np.any(v > math.pi) for v in vals):
        raise DomainError("star_plus needs every distance <= pi")
    px, py, pz, xy, yz, zx = vals
    apex = np.cos(px) + np.cos(py) + np.cos(pz)
    return _out((_double_sum(np.cos, xy, yz, zx) - apex * apex) / 3.0)


def star_minus(px, py, pz, xy, yz, zx):
    """Curvature >= -1 analogue, divided by 3 (same normalisation as star_plus)."""
    px, py, pz, xy, yz, zx = (np.asarray(v, dtype=float) for v in (px, py, pz, xy, yz, zx))
    apex = np.cosh(px) + np.cosh(py) + np.cosh(pz)
    return _out((apex * apex - _double_sum(np.cosh, xy, yz, zx)) / 3.0)


def star_residual(q: LabeledQuadruple) -> float:
    return star(*q.apex_to, *q.base)


def one_plus_three_residual(q: LabeledQuadruple, kappa: float = 0.0) -> float:
    """``2*pi`` minus the sum of the three model angles at the apex."""
    return one_plus_three(*q.apex_to, *q.base, kappa=kappa)


def star_plus_residual(q: LabeledQuadruple) -> float:
    return star_plus(*q.apex_to, *q.base)


def star_minus_residual(q: LabeledQuadruple) -> float:
    return star_minus(*q.apex_to, *q.base)


def midpoint_residual(xp: float, xq: float, pq: float, xz: float) -> tuple[float, float]:
    """Residuals of the midpoint inequality and its factor-3 weakening.

    ``z`` must be a midpoint of ``[pq]``.  Returns
    ``(2 xz^2 - m, 3 xz^2 - m)`` with ``m = xp^2 + xq^2 - pq^2 / 2``.
    """
    m = math.fsum([xp * xp, xq * xq, -0.5 * pq * pq])
    return 2 * xz * xz - m, 3 * xz * xz - m


@dataclass
class LabelingResult:
    labeling: tuple[int, int, int, int]
    residual: float | None
    error: str | None = None

    def to_dict(self, labels) -> dict:
        out = {"labeling": [labels[i] for i in self.labeling], "residual": self.residual}
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass
class ConditionReport:
    labels: tuple[str, ...]
    kappa: float
    tol: float
    results: dict[str, list[LabelingResult]] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)

    def worst(self, condition: str) -> LabelingResult | None:
        ok = [r for r in self.results.get(condition, []) if r.residual is not None]
        return min(ok, key=lambda r: r.residual) if ok else None

    def verdict(self, condition: str) -> str:
        w = self.worst(condition)
        if w is None:
            return NOT_APPLICABLE
        return PASS if w.residual >= -self.tol else FAIL

    @property
    def verdicts(self) -> dict[str, str]:
        return {c: self.verdict(c) for c in CONDITIONS}

    @property
    def passed(self) -> bool:
        return all(v != FAIL for v in self.verdicts.values())

    def failing_labelings(self, condition: str) -> list[LabelingResult]:
        return [
            r
            for r in self.results.get(condition, [])
            if r.residual is not None and r.residual < -self.tol
        ]

    def to_dict(self) -> dict:
        out = {"kappa": self.kappa, "tol": self.tol, "conditions": {}}
        for c in CONDITIONS:
            w = self.worst(c)
            entry = {
                "verdict": self.verdict(c),
                "worst_residual": None if w is None else w.residual,
                "worst_labeling": None if w is None else [self.labels[i] for i in w.labeling],
                "labelings": [r.to_dict(self.labels) for r in self.results.get(c, [])],
            }
            if c in self.notes:
                entry["note"] = self.notes[c]
            out["conditions"][c] = entry
        return out


def _assert_base_symmetry(space: FiniteMetricSpace, kappa: float) -> None:
    ref = {}
    for idx, q in quadruples(space, all_labelings=True):
        key = (idx[0], frozenset(idx[1:]))
        vals = [star_residual(q), star_minus_residual(q)]
        try:
            vals.append(one_plus_three_residual(q, kappa))
        except AngleDomainError:
            vals.append(math.nan)
        if key not in ref:
            ref[key] = vals
        elif not np.allclose(vals, ref[key], rtol=1e-12, atol=1e-12, equal_nan=True):
            raise AssertionError(f"labeling {idx} disagrees with its base permutations")


def check_all_labelings(
    space: FiniteMetricSpace, kappa: float = 0.0, tol: float = DEFAULT_TOL, debug: bool = False
) -> ConditionReport:
    """Evaluate every condition on every apex labeling of every 4-subset.

    Model-angle domain failures are recorded per labeling.  ``star_plus`` is
    reported as not applicable when some distance exceeds pi.  With ``debug``
    all 24 orderings are also evaluated and must agree with the apex-only sweep.
    """
    if debug:
        _assert_base_symmetry(space, kappa)
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    report = ConditionReport(space.labels, float(kappa), float(tol), {c: [] for c in CONDITIONS})
    plus_ok = bool(np.all(space.dist <= math.pi))
    if not plus_ok:
        report.notes[STAR_PLUS] = "not applicable: some distance exceeds pi"
    for idx, q in quadruples(space):
        report.results[STAR].append(LabelingResult(idx, star_residual(q)))
        report.results[STAR_MINUS].append(LabelingResult(idx, star_minus_residual(q)))
        if plus_ok:
            report.results[STAR_PLUS].append(LabelingResult(idx, star_plus_residual(q)))
        try:
            r = one_plus_three_residual(q, kappa)
            report.results[ONE_PLUS_THREE].append(LabelingResult(idx, r))
        except AngleDomainError as exc:
            report.results[ONE_PLUS_THREE].append(LabelingResult(idx, None, str(exc)))
    return report
