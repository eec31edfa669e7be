import numpy as np
import pytest

from quadcurv.metric_core import LabeledQuadruple


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_quadruple(rng, dim=2, scale=1.0):
    pts = rng.standard_normal((4, dim)) * scale
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    return pts, LabeledQuadruple.from_matrix(d, 0, 1, 2, 3)


def exp_map_points(v, t):
    """Exponential map at the north pole of the unit sphere, tangent vectors scaled by t."""
    r = np.linalg.norm(v, axis=-1, keepdims=True)
    return np.concatenate([np.sin(t * r) * v / r, np.cos(t * r)], axis=-1)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
