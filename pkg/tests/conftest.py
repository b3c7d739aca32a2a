import pytest

from raycut.maxflow import warmup_solver
from raycut.phantom import make_ellipsoid_phantom, make_shifted_phantom, make_sphere_phantom


@pytest.fixture(scope="session", autouse=True)
def jit_warm():
    # Compile (or load the cached) solver kernel once so no test's timing
    # window includes JIT work.
    warmup_solver()


@pytest.fixture(scope="session")
def sphere_case():
    return make_sphere_phantom(sigma=10.0, rng_seed=0)


@pytest.fixture(scope="session")
def sphere_clean_case():
    return make_sphere_phantom(sigma=0.0)


@pytest.fixture(scope="session")
def ellipsoid_case():
    return make_ellipsoid_phantom(sigma=10.0, rng_seed=0)


@pytest.fixture(scope="session")
def shifted_case():
    return make_shifted_phantom(sigma=10.0, rng_seed=0)
