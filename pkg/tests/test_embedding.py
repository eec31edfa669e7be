import math

import numpy as np
import pytest

from quadcurv import conditions as cond
from quadcurv.embedding import (
    MAX_DISTANCE_ERROR,
    N_PROBES,
    candidate_radii,
    embed_any,
    embed_plane,
    embed_sphere,
    min_sphere_eigenvalue,
)
from quadcurv.metric_core import counterexample_F, validate
from quadcurv.model_geometry import Euclidean, Sphere, pairwise_quadruple_distances

SQUARE = validate(
    [[0, 1, math.sqrt(2), 1], [1, 0, 1, math.sqrt(2)], [math.sqrt(2), 1, 0, 1], [1, math.sqrt(2), 1, 0]]
)
TETRA = validate(np.ones((4, 4)) - np.eye(4))


def realized(coords, model):
    return np.array([[model.distance(a, b) for b in coords] for a in coords])


def octant_space():
    pts = np.vstack([np.ones(3) / math.sqrt(3), np.eye(3)])
    return validate(pairwise_quadruple_distances(Sphere(1.0), pts))


def test_square_embeds_in_plane():
    res = embed_plane(SQUARE)
    assert res.ok and res.target == "plane"
    assert np.max(np.abs(realized(res.coordinates, Euclidean(2)) - SQUARE.dist)) <= 1e-10


def test_tetrahedron_not_planar():
    res = embed_plane(TETRA)
    assert not res.ok
    assert res.certificate["kind"] == "NotEmbeddable"
    assert "rank" in res.certificate["reason"]


def test_counterexample_not_planar():
    d = counterexample_F(0.1).dist
    # |xy| = |xp| + |py| and |xz| = |xp| + |pz| put y and z at the same point of the ray from x through p
    assert d[1, 2] == d[1, 0] + d[0, 2] and d[1, 3] == d[1, 0] + d[0, 3]
    res = embed_plane(counterexample_F(0.1))
    assert not res.ok
    assert res.certificate["eigenvalue"] < 0


def test_octant_embeds_in_unit_sphere():
    res = embed_sphere(octant_space(), 1.0)
    assert res.ok
    assert res.max_distance_error <= 1e-10
    np.testing.assert_allclose(np.linalg.norm(res.coordinates, axis=1), 1.0, rtol=1e-14)


def test_square_near_flat_sphere():
    res = embed_sphere(SQUARE, 1000.0)
    assert not res.ok  # rank 4 at R = 1000: the square does not lie on that sphere exactly
    res = embed_any(SQUARE)
    assert res.target == "plane"


def test_small_square_on_large_sphere():
    S = Sphere(1000.0)
    pts = np.array([[0, 0, 1000.0], [1, 0, 1000], [1, 1, 1000], [0, 1, 1000]])
    pts = S._project(pts)
    space = validate(pairwise_quadruple_distances(S, pts))
    res = embed_sphere(space, 1000.0)
    assert res.ok
    assert res.max_distance_error <= 1e-8


def test_distance_exceeds_diameter():
    res = embed_sphere(validate(4.0 * (np.ones((4, 4)) - np.eye(4))), 1.0)
    assert res.certificate["kind"] == "DistanceExceedsDiameter"


def test_embed_any_planar_skips_sphere():
    res = embed_any(SQUARE)
    assert res.target == "plane" and not res.profile


def test_embed_any_sphere_recovers_radius():
    rng = np.random.default_rng(11)
    S = Sphere(2.0)
    for _ in range(20):
        space = validate(pairwise_quadruple_distances(S, S.sample(rng, 4)))
        res = embed_any(space)
        assert res.target == "sphere"
        assert res.max_distance_error <= MAX_DISTANCE_ERROR
        assert len(res.profile) == N_PROBES


def test_tetrahedron_embeds_on_some_sphere():
    res = embed_any(TETRA)
    assert res.target == "sphere"
    # regular tetrahedron inscribed in a sphere: cos(1/R) = -1/3
    assert res.radius == pytest.approx(1 / math.acos(-1 / 3), rel=1e-10)


@pytest.mark.parametrize("eps", [0.01, 0.1])
def test_counterexample_no_embedding(eps):
    res = embed_any(counterexample_F(eps))
    assert not res.ok
    assert res.certificate["kind"] == "NoEmbeddingFound"
    assert res.certificate["bracket"][0] == pytest.approx(2 / math.pi)


def test_candidate_radii_finds_narrow_bump():
    # this quadruple has two roots 1.97 and 2.0 that a 64-point grid straddles
    rng = np.random.default_rng(1)
    S = Sphere(2.0)
    found = 0
    for _ in range(30):
        d = pairwise_quadruple_distances(S, S.sample(rng, 4))
        roots = candidate_radii(d, d.max() / math.pi, 1e3 * d.max())
        found += any(abs(r - 2.0) < 1e-9 for r in roots)
        assert all(abs(min_sphere_eigenvalue(d, r)) < 1e-12 for r in roots)
    assert found == 30


def test_embed_plane_implies_conditions():
    rng = np.random.default_rng(2)
    for _ in range(50):
        d = pairwise_quadruple_distances(Euclidean(2), Euclidean(2).sample(rng, 4))
        space = validate(d)
        assert embed_plane(space).ok
        rep = cond.check_all_labelings(space)
        assert rep.verdict(cond.STAR) == cond.PASS
        assert rep.verdict(cond.ONE_PLUS_THREE) == cond.PASS


def test_requires_four_points():
    with pytest.raises(ValueError):
        embed_any(validate([[0, 1], [1, 0]]))
