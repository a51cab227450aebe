import numpy as np
import pytest

from linkrover.model import RobotSpec


@pytest.fixture
def arm3():
    """Three 10 cm links, 1 cm thick, one carriage."""
    return RobotSpec(n_links=3, link_length=0.1, thickness=0.01)


@pytest.fixture
def snake10():
    """Ten 5 cm links, 1 cm thick, one carriage."""
    return RobotSpec(n_links=10, link_length=0.05, thickness=0.01)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def fk_chain_oracle(spec, theta):
    """Independent forward kinematics: walk the chain one link at a time."""
    pts = []
    heading = 0.0
    x = y = 0.0
    for th in theta:
        heading += th
        x += spec.link_length * np.cos(heading)
        y += spec.link_length * np.sin(heading)
        pts.append((x, y))
    return np.array(pts)
