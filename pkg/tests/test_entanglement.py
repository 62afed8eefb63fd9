import math

import numpy as np
import pytest

from src.logic.dynamics import evolve
from src.logic.entanglement import linear_entropy_closed, linear_entropy_from_state, probe_density_matrix
from src.models.network import NetworkConfig


@pytest.fixture
def n2_config():
    return NetworkConfig(n_nodes=2, lambda_=1.0, lambda_prime=0.0, couplings=(0.1, 0.1), drivings=(0.0, 0.0))


def test_closed_form_at_pi(n2_config):
    value = linear_entropy_closed(n2_config, math.pi)
    assert value == pytest.approx(0.5 * (1 - math.exp(-0.08)), abs=1e-14)
    assert value == pytest.approx(0.038445, abs=5e-6)


@pytest.mark.parametrize("q", [1, 2, 5])
def test_vanishes_at_stroboscopic_times(n2_config, q):
    assert linear_entropy_closed(n2_config, 2 * math.pi * q) == pytest.approx(0.0, abs=1e-15)


def test_gram_path_matches_closed_form():
    config = NetworkConfig(
        n_nodes=3, lambda_=1.0, lambda_prime=0.0, couplings=(0.4, 0.7, 1.1), drivings=(0.1, 0.0, -0.2), alpha=0.3j
    )
    for tau in (0.5, math.pi, 5.0):
        gram = linear_entropy_from_state(evolve(config, tau))
        assert gram == pytest.approx(linear_entropy_closed(config, tau), abs=1e-10)


def test_initial_state_is_pure(n2_config):
    assert linear_entropy_from_state(evolve(n2_config, 0.0)) == pytest.approx(0.0, abs=1e-15)


def test_density_matrix_is_a_state():
    config = NetworkConfig(n_nodes=4, lambda_=2.0, lambda_prime=0.5, couplings=(1.0, 2.0, 0.5, 1.5), drivings=(0.0,) * 4)
    rho = probe_density_matrix(evolve(config, 2.0))
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.allclose(rho, rho.conj().T)
    assert np.min(np.linalg.eigvalsh(rho)) > -1e-12


def test_large_displacements_do_not_overflow():
    config = NetworkConfig(n_nodes=3, lambda_=50.0, lambda_prime=0.0, couplings=(10.0,) * 3, drivings=(0.0,) * 3)
    value = linear_entropy_from_state(evolve(config, math.pi))
    assert value == pytest.approx(1 - 1 / 3, abs=1e-12)
