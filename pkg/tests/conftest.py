"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from quinturb.lattice import Profile, RegimeParams


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260823)


@pytest.fixture
def smooth_profile() -> Profile:
    return Profile("smooth_bump", radius=0.5, height=1.0)


@pytest.fixture
def poly_profile() -> Profile:
    return Profile("poly_bump", radius=1.0, height=1.0)


@pytest.fixture
def small_params() -> RegimeParams:
    return RegimeParams(lattice_size=2, rho=1.0, mu=4, nu=4)


def rel_close(a: complex, b: complex, tol: float, floor: float = 0.0) -> bool:
    """Relative comparison with an absolute floor for near-cancelled values."""
    scale = max(abs(a), abs(b), floor)
    if scale == 0.0:
        return True
    return abs(a - b) <= tol * scale
