"""Shared constants and builders for the test suite.

The experimental parameter set (rad/s) used throughout: a lossy cavity mode
at 1.02e10 coupled to a mechanical mode at 1.59e7 with decay rates 3.26e5
and 3.00e2, probed at three couplings (strong, balanced-loss, weak).
"""
import numpy as np
import pytest

from ptdimer import SystemParams

OMEGA_A = 1.02e10
OMEGA_B = 1.59e7
GAMMA_A = 3.26e5
GAMMA_B = 3.00e2

G_STRONG = 1.33e-2 * OMEGA_B        # 2.1147e5, oscillatory regime
G_BALANCED = (GAMMA_A - GAMMA_B) / 4.0   # 8.1425e4, degeneracy point
G_WEAK = 1.33e-3 * OMEGA_B          # 2.1147e4, overdamped regime

ROOM_T = 293.0


def make_params(g=G_STRONG, temperature=0.0, **overrides):
    kwargs = dict(omega_a=OMEGA_A, omega_b=OMEGA_B, gamma_a=GAMMA_A,
                  gamma_b=GAMMA_B, g=g, temperature=temperature)
    kwargs.update(overrides)
    return SystemParams(**kwargs)


def random_density(rng, dim):
    """Random positive unit-trace Hermitian matrix."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def exp_params():
    return make_params()
