import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadcurv.metric_core import (
    COUNTEREXAMPLE_STAR_EPS_MAX,
    Asymmetric,
    InvalidEps,
    LabeledQuadruple,
    NegativeDistance,
    NonFiniteDistance,
    NonzeroDiagonal,
    ShapeError,
    TooFewPoints,
    TriangleViolation,
    ZeroOffDiagonal,
    counterexample_F,
    quadruples,
    validate,
)
from quadcurv.model_geometry import Euclidean, Hyperbolic, Sphere, pairwise_quadruple_distances


def test_single_point():
    s = validate([[0]])
    assert s.n == 1


def test_two_points():
    s = validate([[0, 1], [1, 0]], ["a", "b"])
    assert s.labels == ("a", "b")
    assert s.d(0, 1) == 1.0


def test_triangle_violation_names_indices():
    with pytest.raises(TriangleViolation) as info:
        validate([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    e = info.value
    assert (e.i, e.k, e.j) == (0, 2, 1)


@pytest.mark.parametrize(
    "matrix, exc",
    [
        ([[0, -1], [-1, 0]], NegativeDistance),
        ([[1, 1], [1, 0]], NonzeroDiagonal),
        ([[0, 1], [2, 0]], Asymmetric),
        ([[0, 0], [0, 0]], ZeroOffDiagonal),
        ([[0, float("nan")], [float("nan"), 0]], NonFiniteDistance),
        ([[0, 1, 2], [1, 0, 1]], ShapeError),
        ([], ShapeError),
    ],
)
def test_axiom_errors(matrix, exc):
    with pytest.raises(exc):
        validate(matrix)


def test_validated_matrix_is_read_only():
    s = validate([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        s.dist[0, 1] = 5


def test_label_count_mismatch():
    with pytest.raises(ShapeError):
        validate([[0, 1], [1, 0]], ["a"])


@pytest.mark.parametrize("n, expected", [(4, 4), (5, 20), (6, 60)])
def test_quadruple_counts(n, expected):
    pts = np.arange(n, dtype=float)
    d = np.abs(pts[:, None] - pts[None, :])
    assert len(list(quadruples(validate(d)))) == expected


def test_quadruples_all_labelings_count():
    pts = np.arange(5, dtype=float)
    d = np.abs(pts[:, None] - pts[None, :])
    assert len(list(quadruples(validate(d), all_labelings=True))) == 5 * 24


def test_too_few_points():
    with pytest.raises(TooFewPoints):
        list(quadruples(validate([[0, 1, 1], [1, 0, 1], [1, 1, 0]])))


def test_quadruple_layout():
    d = counterexample_F(0.1).dist
    q = LabeledQuadruple.from_matrix(d, 0, 1, 2, 3)
    assert q.apex_to == (1.0, 1.0, 1.0)
    assert q.base == (2.0, 0.1, 2.0)
    np.testing.assert_array_equal(q.matrix(), d)


def test_counterexample_distances():
    f = counterexample_F(0.1)
    assert f.labels == ("p", "x", "y", "z")
    assert f.d(2, 3) == 0.1
    assert f.d(1, 2) == 2.0
    assert f.d(1, 3) == 2.0
    assert all(f.d(0, i) == 1.0 for i in (1, 2, 3))


@pytest.mark.parametrize("eps", [0.0, -1.0, 2.5])
def test_counterexample_invalid_eps(eps):
    with pytest.raises(InvalidEps):
        counterexample_F(eps)


@given(st.floats(min_value=1e-6, max_value=2.0))
def test_counterexample_valid_on_whole_range(eps):
    assert counterexample_F(eps).n == 4


def test_admissible_bound_is_where_apex_p_residual_vanishes():
    # apex-p residual of (*) is 3 - (8 + eps^2) / 3 = (1 - eps^2) / 3
    e = COUNTEREXAMPLE_STAR_EPS_MAX
    assert 3 - (8 + e * e) / 3 == 0


@pytest.mark.parametrize(
    "space, bound",
    [(Euclidean(2), None), (Euclidean(3), 5.0), (Sphere(1.0), None), (Hyperbolic(-1.0), 3.0)],
)
def test_model_samples_validate(space, bound):
    rng = np.random.default_rng(0)
    pts = space.sample(rng, 4 * 50, bound).reshape(50, 4, -1)
    for d in pairwise_quadruple_distances(space, pts):
        validate(d)


def test_permuted_is_consistent():
    q = LabeledQuadruple((1.0, 2.0, 2.5), (1.5, 3.0, 2.0))
    for perm in itertools.permutations(range(3)):
        m = q.permuted(perm).matrix()
        assert sorted(m[0, 1:]) == sorted(q.apex_to)
