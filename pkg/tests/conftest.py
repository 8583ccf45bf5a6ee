import numpy as np
import pytest

from pulselab import ModelParams, SimSystem, SpectralGrid


PROXY_EPS_QUAD = 2e-5    # near-point source for quadrature-only checks
PROXY_EPS_SIM = 1e-3     # near-point source for simulation checks


@pytest.fixture(scope="session")
def proxy_params():
    return ModelParams(eta=5.0, epsilon=PROXY_EPS_SIM)


@pytest.fixture(scope="session")
def coarse_system(proxy_params):
    """Small grid for fast dynamics tests (truncation-limited accuracy)."""
    return SimSystem(SpectralGrid(40.0, 4096), proxy_params)


@pytest.fixture(scope="session")
def medium_system(proxy_params):
    return SimSystem(SpectralGrid(40.0, 8192), proxy_params)


@pytest.fixture(scope="session")
def resolved_system():
    """Grid that fully resolves a smooth source (spectrally exact regime)."""
    return SimSystem(SpectralGrid(40.0, 2048), ModelParams(eta=5.0, epsilon=0.5))
