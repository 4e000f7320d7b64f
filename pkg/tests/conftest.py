import json
import math

import numpy as np
import pytest

from pondera.cli import recipe_text
from pondera.dynamics import sideband_squeeze_matrix, beamsplitter_mix
from pondera.params import config_from_dict


@pytest.fixture(scope="session")
def table1_doc():
    return json.loads(recipe_text("table1.json"))


@pytest.fixture(scope="session")
def table1_cfg(table1_doc):
    return config_from_dict(table1_doc)


@pytest.fixture(scope="session")
def fig3_cfg():
    return config_from_dict(json.loads(recipe_text("fig3.json")))


def make_tmsv(s: float) -> np.ndarray:
    """TMSV covariance from two squeezed vacua (angles 0, pi/2) on a 50:50."""
    s0 = sideband_squeeze_matrix(s, 0.0)
    s1 = sideband_squeeze_matrix(s, math.pi / 2)
    v = np.zeros((4, 4))
    v[:2, :2] = s0 @ s0.T / 2.0
    v[2:, 2:] = s1 @ s1.T / 2.0
    return beamsplitter_mix(v, 0.5)


def random_physical_cov(rng: np.random.Generator, dim: int = 4,
                        scale: float = 1.0) -> np.ndarray:
    """Random physical covariance: V = I/2 + M M^T is above the vacuum floor."""
    m = rng.standard_normal((dim, dim)) * scale
    return np.eye(dim) / 2.0 + m @ m.T


def random_single_mode_cov(rng: np.random.Generator) -> np.ndarray:
    """Random physical single-mode covariance: rotated squeezed thermal state."""
    nu = 0.5 + rng.exponential(1.0)
    s = rng.uniform(0.0, 1.0)
    phi = rng.uniform(0.0, 2 * math.pi)
    rot = np.array([[math.cos(phi), math.sin(phi)],
                    [-math.sin(phi), math.cos(phi)]])
    return nu * rot @ np.diag([math.exp(2 * s), math.exp(-2 * s)]) @ rot.T
