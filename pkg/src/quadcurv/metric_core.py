"""Finite metric spaces and labeled quadruples."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np


class MetricError(ValueError):
    """Base class for invalid metric input."""


class NonFiniteDistance(MetricError):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"distance ({i}, {j}) is not finite")


class NegativeDistance(MetricError):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"distance ({i}, {j}) is negative")


class NonzeroDiagonal(MetricError):
    def __init__(self, i: int):
        self.i = i
        super().__init__(f"diagonal entry ({i}, {i}) is not zero")


class Asymmetric(MetricError):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"dist[{i}][{j}] != dist[{j}][{i}]")


class ZeroOffDiagonal(MetricError):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"distinct points {i} and {j} are at distance 0")


class TriangleViolation(MetricError):
    """``dist[i][k] > dist[i][j] + dist[j][k]``; stored as ``(i, k, j)``."""

    def __init__(self, i: int, k: int, j: int):
        self.i, self.k, self.j = i, k, j
        super().__init__(
            f"triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})"
        )


class ShapeError(MetricError):
    pass


class TooFewPoints(MetricError):
    def __init__(self, n: int):
        self.n = n
        super().__init__(f"need at least 4 points, got {n}")


class InvalidEps(MetricError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    labels: tuple[str, ...]
    dist: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])

    def subspace(self, idx: Sequence[int]) -> "FiniteMetricSpace":
        idx = list(idx)
        return validate(
            self.dist[np.ix_(idx, idx)], [self.labels[i] for i in idx]
        )

    def to_dict(self) -> dict:
        return {
            "format": 1,
            "labels": list(self.labels),
            "distances": self.dist.tolist(),
        }


def validate(matrix, labels: Sequence[str] | None = None) -> FiniteMetricSpace:
    """Check the metric axioms exactly and freeze the matrix.

    Raises the first violated axiom, checked in the order: shape, finiteness,
    sign, diagonal, symmetry, distinctness, triangle inequality.
    """
    d = np.array(matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 1:
        raise ShapeError(f"expected a non-empty square matrix, got shape {d.shape}")
    n = d.shape[0]
    if labels is None:
        labels = [str(i) for i in range(n)]
    labels = tuple(str(s) for s in labels)
    if len(labels) != n:
        raise ShapeError(f"{len(labels)} labels for a {n}x{n} matrix")
    if len(set(labels)) != n:
        raise ShapeError("labels must be distinct")

    bad = np.argwhere(~np.isfinite(d))
    if len(bad):
        raise NonFiniteDistance(*map(int, bad[0]))
    bad = np.argwhere(d < 0)
    if len(bad):
        raise NegativeDistance(*map(int, bad[0]))
    for i in range(n):
        if d[i, i] != 0:
            raise NonzeroDiagonal(i)
    for i, j in itertools.combinations(range(n), 2):
        if d[i, j] != d[j, i]:
            raise Asymmetric(i, j)
    for i, j in itertools.combinations(range(n), 2):
        if d[i, j] == 0:
            raise ZeroOffDiagonal(i, j)
    for i, k in itertools.combinations(range(n), 2):
        for j in range(n):
            if d[i, k] > d[i, j] + d[j, k]:
                raise TriangleViolation(i, k, j)

    d.setflags(write=False)
    return FiniteMetricSpace(labels, d)


@dataclass(frozen=True)
class LabeledQuadruple:
    """Six distances among ``p, x, y, z`` with ``p`` as the apex.

    ``apex_to`` is ``(|px|, |py|, |pz|)``; ``base`` is ``(|xy|, |yz|, |zx|)``.
    """

    apex_to: tuple[float, float, float]
    base: tuple[float, float, float]

    @classmethod
    def from_matrix(cls, d, p: int, x: int, y: int, z: int) -> "LabeledQuadruple":
        d = np.asarray(d)
        return cls(
            (float(d[p, x]), float(d[p, y]), float(d[p, z])),
            (float(d[x, y]), float(d[y, z]), float(d[z, x])),
        )

    def matrix(self) -> np.ndarray:
        """4x4 distance matrix in the order ``p, x, y, z``."""
        px, py, pz = self.apex_to
        xy, yz, zx = self.base
        return np.array(
            [
                [0.0, px, py, pz],
                [px, 0.0, xy, zx],
                [py, xy, 0.0, yz],
                [pz, zx, yz, 0.0],
            ]
        )

    def permuted(self, perm: Sequence[int]) -> "LabeledQuadruple":
        """Relabel the base points: new base point ``k`` is old base point ``perm[k]``."""
        m = self.matrix()
        a, b, c = (1 + i for i in perm)
        return LabeledQuadruple.from_matrix(m, 0, a, b, c)

    def scaled(self, t: float) -> "LabeledQuadruple":
        return LabeledQuadruple(
            tuple(t * v for v in self.apex_to), tuple(t * v for v in self.base)
        )

    def as_space(self, labels: Sequence[str] = ("p", "x", "y", "z")) -> FiniteMetricSpace:
        return validate(self.matrix(), labels)


def quadruples(
    space: FiniteMetricSpace, all_labelings: bool = False
) -> Iterator[tuple[tuple[int, int, int, int], LabeledQuadruple]]:
    """Yield ``((p, x, y, z), quadruple)`` for every 4-subset and apex choice.

    The conditions are symmetric in the base points, so by default only the
    apex varies (4 labelings per subset).  ``all_labelings=True`` yields all 24
    orderings instead.
    """
    if space.n < 4:
        raise TooFewPoints(space.n)
    for subset in itertools.combinations(range(space.n), 4):
        if all_labelings:
            for idx in itertools.permutations(subset):
                yield idx, LabeledQuadruple.from_matrix(space.dist, *idx)
        else:
            for p in subset:
                rest = tuple(i for i in subset if i != p)
                idx = (p, *rest)
                yield idx, LabeledQuadruple.from_matrix(space.dist, *idx)


# (*) holds under every relabeling of F exactly when eps <= 1: the apex-p
# residual is (1 - eps^2) / 3, the other three apexes are always positive.
COUNTEREXAMPLE_STAR_EPS_MAX = 1.0


def counterexample_F(eps: float) -> FiniteMetricSpace:
    """Four points with |px|=|py|=|pz|=1, |xy|=|xz|=2 and |yz|=eps."""
    eps = float(eps)
    if not (0 < eps <= 2):
        raise InvalidEps(f"eps must lie in (0, 2], got {eps}")
    d = [
        [0, 1, 1, 1],
        [1, 0, 2, 2],
        [1, 2, 0, eps],
        [1, 2, eps, 0],
    ]
    return validate(d, ["p", "x", "y", "z"])
