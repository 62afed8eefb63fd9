import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.exceptions import CaseConditionViolated, ConfigInvalid, SingularBeta
from src.logic.probe import branch_coefficients, build_initial_state, case_phases
from src.models.network import CaseId, NetworkConfig


def _config(**overrides):
    base = dict(n_nodes=2, lambda_=1.0, lambda_prime=0.0, couplings=(1.0, 1.0), drivings=(0.0, 0.0))
    base.update(overrides)
    return NetworkConfig(**base)


def test_vacuum_initial_state():
    state = build_initial_state(_config())
    assert_allclose(state.coefficients, [1 / math.sqrt(2)] * 2)
    assert np.all(state.amplitudes == 0)


def test_coherent_initial_state_three_nodes(case1_config):
    config = case1_config.model_copy(update={"alpha": 1 + 0j})
    state = build_initial_state(config)
    assert_allclose(state.coefficients, [1 / math.sqrt(3)] * 3)
    assert np.all(state.amplitudes == 1.0)
    assert np.sum(np.abs(state.coefficients) ** 2) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize(
    "overrides",
    [
        dict(n_nodes=1, couplings=(1.0,), drivings=(0.0,)),
        dict(couplings=(1.0, 1.0, 1.0)),
        dict(drivings=(0.0,)),
        dict(lambda_prime=1.0),
    ],
)
def test_invalid_configs_are_rejected(overrides):
    with pytest.raises(ConfigInvalid):
        _config(**overrides)


def test_case1_phases(case1_config):
    phases = case_phases(case1_config, CaseId.CASE1)
    assert_allclose(phases.betas, [4 * math.pi] * 2)
    assert_allclose(phases.phis, [0.3, 0.4])
    assert phases.k_plus is None


def test_case2_phases(case2_config):
    phases = case_phases(case2_config, "2")
    assert phases.betas[0] == pytest.approx(-3.6 * math.pi)
    assert phases.phis[0] == pytest.approx(0.2)
    assert_allclose(phases.k_plus, [1.8, 1.6])


def test_case2_singular_for_symmetric_spin():
    config = _config(lambda_=0.5, lambda_prime=-0.5, couplings=(1.0, 0.8))
    with pytest.raises(SingularBeta):
        case_phases(config, CaseId.CASE2)


def test_case_conditions(case1_config, case2_config):
    with pytest.raises(CaseConditionViolated):
        case_phases(case2_config.model_copy(update={"drivings": (0.0, 0.1, 0.0)}), 2)
    with pytest.raises(CaseConditionViolated):
        case_phases(case2_config, 1)
    with pytest.raises(ConfigInvalid):
        case_phases(case1_config, 3)


def test_branch_coefficients_are_normalized(case1_config):
    psi = branch_coefficients(case_phases(case1_config, 1))
    assert np.vdot(psi, psi).real == pytest.approx(1.0, abs=1e-15)
    assert psi[0] == pytest.approx(1 / math.sqrt(3))
