import numpy as np
import pytest

from curvcap import MetricLengths, fixtures


@pytest.fixture(scope="session")
def fixture_meshes():
    """Name -> (mesh, metric) for all bundled fixtures."""
    return {name: fixtures.load(name) for name in fixtures.FIXTURE_NAMES}


def perturbed_metric(mesh, metric, rng, scale=0.05):
    """Random valid multiplicative perturbation of a metric (resampled with a
    shrinking scale until the triangle inequalities hold)."""
    s = scale
    for _ in range(60):
        values = metric.values * np.exp(rng.uniform(-s, s, mesh.num_edges))
        candidate = MetricLengths(mesh, values)
        if candidate.is_valid():
            return candidate
        s *= 0.5
    raise AssertionError("could not draw a valid perturbation")
