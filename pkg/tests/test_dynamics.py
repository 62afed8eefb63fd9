import cmath
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.exceptions import IndexOutOfRange
from src.logic.dynamics import TWO_PI, coherent_amplitude, evolve, stroboscopic_state, xi_phase
from src.logic.probe import build_initial_state
from src.models.network import NetworkConfig


def test_identical_nodes_carry_no_relative_phase():
    config = NetworkConfig(
        n_nodes=3, lambda_=1.0, lambda_prime=0.0, couplings=(0.3,) * 3, drivings=(0.2,) * 3, alpha=0.7
    )
    for tau in np.linspace(0, 3 * math.pi, 7):
        for j in (2, 3):
            assert xi_phase(config, j, tau) == 0


def test_xi_is_purely_imaginary_for_complex_alpha():
    config = NetworkConfig(
        n_nodes=3, lambda_=1.0, lambda_prime=-0.5, couplings=(0.1, 0.3, 0.2),
        drivings=(0.05, -0.1, 0.0), alpha=0.4 - 1.2j,
    )
    for tau in (0.3, 1.7, 4.0):
        assert xi_phase(config, 3, tau).real == 0.0


def test_xi_index_range(oracle_config):
    with pytest.raises(IndexOutOfRange):
        xi_phase(oracle_config, 1, 1.0)
    with pytest.raises(IndexOutOfRange):
        xi_phase(oracle_config, 3, 1.0)


def test_coherent_amplitude_examples():
    config = NetworkConfig(n_nodes=2, lambda_=1.0, lambda_prime=0.0, couplings=(1.0, 1.0), drivings=(0.0, 0.0))
    assert coherent_amplitude(config, 1, 1, math.pi) == pytest.approx(2.0)
    assert coherent_amplitude(config, 1, 2, math.pi) == pytest.approx(0.0)
    shifted = config.model_copy(update={"alpha": 0.5 + 0.5j})
    assert coherent_amplitude(shifted, 2, 1, 0.0) == pytest.approx(0.5 + 0.5j)
    with pytest.raises(IndexOutOfRange):
        coherent_amplitude(config, 3, 1, 0.0)


def test_evolve_at_zero_is_initial_state(oracle_config):
    state = evolve(oracle_config, 0.0)
    initial = build_initial_state(oracle_config)
    assert_allclose(state.coefficients, initial.coefficients, atol=1e-15)
    assert_allclose(state.amplitudes, initial.amplitudes, atol=1e-15)


def test_evolve_at_two_pi_returns_mechanics(oracle_config):
    state = evolve(oracle_config, TWO_PI)
    assert np.all(state.amplitudes == oracle_config.alpha)


def test_stroboscopic_case1_phases(case1_config):
    phases, state = stroboscopic_state(case1_config, 1)
    expected = [cmath.exp(4j * math.pi * 0.3), cmath.exp(4j * math.pi * 0.4)]
    assert_allclose(state.coefficients[1:] * math.sqrt(3), expected, atol=1e-12)


def test_stroboscopic_case2_phase(case2_config):
    phases, state = stroboscopic_state(case2_config, 2)
    assert state.coefficients[1] * math.sqrt(3) == pytest.approx(cmath.exp(1j * -3.6 * math.pi * 0.2), abs=1e-12)


def test_equal_nodes_give_w_state():
    config = NetworkConfig(n_nodes=4, lambda_=2.0, lambda_prime=0.0, couplings=(0.5,) * 4, drivings=(0.1,) * 4)
    _, state = stroboscopic_state(config, 1)
    assert_allclose(state.coefficients, [0.5] * 4, atol=1e-15)
