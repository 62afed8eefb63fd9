import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.exceptions import IndexOutOfRange, InvalidResourceCount, SingularBeta, StepTooSmall
from src.logic.estimation import (
    nuisance_degradation,
    nuisance_variance_bound,
    per_parameter_bounds,
    qfim_analytic,
    qfim_inverse,
    qfim_numeric,
    single_param_qfi,
    trace_inverse_qfim,
)
from src.logic.probe import branch_coefficients
from src.logic.validation import WIDE_BETA_RANGE, random_phase_set
from src.models.network import CaseId, NetworkConfig, PhaseSet

EQUAL_BETA_MATRIX = 64 * math.pi ** 2 / 9 * np.array([[2.0, -1.0], [-1.0, 2.0]])


def _phases(*betas, phis=None):
    phis = phis or (0.0,) * len(betas)
    return PhaseSet(case_id=CaseId.CASE2, betas=tuple(betas), phis=tuple(phis))


def test_qfim_equal_betas(equal_beta_phases):
    assert_allclose(qfim_analytic(equal_beta_phases).entries, EQUAL_BETA_MATRIX, rtol=1e-14)


def test_qfim_two_nodes():
    assert qfim_analytic(_phases(2.5)).entries[0, 0] == pytest.approx(2.5 ** 2)


def test_qfim_homogeneous_degree_two():
    q1 = qfim_analytic(_phases(1.0, -2.0, 3.0)).entries
    q2 = qfim_analytic(_phases(2.0, -4.0, 6.0)).entries
    assert_allclose(q2, 4 * q1, rtol=1e-14)


def test_qfim_is_psd_and_symmetric(rng):
    for _ in range(20):
        q = qfim_analytic(random_phase_set(rng, int(rng.integers(2, 12))))
        assert q.is_psd()
        assert_allclose(q.entries, q.entries.T)


def test_inverse_closed_form():
    beta = 1.7
    inverse = qfim_inverse(_phases(beta, beta)).entries
    assert_allclose(inverse, 3 / (4 * beta ** 2) * np.array([[2.0, 1.0], [1.0, 2.0]]), rtol=1e-14)
    assert qfim_inverse(_phases(beta)).entries[0, 0] == pytest.approx(1 / beta ** 2)


def test_sherman_morrison_identity(rng):
    for _ in range(100):
        phases = random_phase_set(rng, int(rng.integers(2, 21)), beta_range=WIDE_BETA_RANGE)
        product = qfim_analytic(phases).entries @ qfim_inverse(phases).entries
        assert_allclose(product, np.eye(phases.dim), atol=1e-10)


def test_trace_inverse(equal_beta_phases):
    assert trace_inverse_qfim(equal_beta_phases) == pytest.approx(3 / (16 * math.pi ** 2), rel=1e-14)
    assert trace_inverse_qfim(equal_beta_phases) == pytest.approx(0.018998, abs=1e-6)


def test_singular_beta():
    with pytest.raises(SingularBeta):
        _phases(1.0, 0.0)


def test_numeric_matches_analytic(case1_config):
    numeric = qfim_numeric(case1_config, CaseId.CASE1).entries
    error = np.linalg.norm(numeric - EQUAL_BETA_MATRIX) / np.linalg.norm(EQUAL_BETA_MATRIX)
    assert error < 1e-6


def test_numeric_with_richardson(case2_config):
    from src.logic.probe import case_phases

    analytic = qfim_analytic(case_phases(case2_config, 2)).entries
    numeric = qfim_numeric(case2_config, 2, richardson=True).entries
    assert_allclose(numeric, analytic, rtol=1e-7)


def test_numeric_is_gauge_invariant(case1_config):
    plain = qfim_numeric(case1_config, 1).entries

    def shifted(phases):
        return np.exp(1j * (0.7 + 3.0 * sum(phases.phis))) * branch_coefficients(phases)

    assert_allclose(qfim_numeric(case1_config, 1, state_fn=shifted).entries, plain, rtol=1e-6)


def test_numeric_two_nodes():
    config = NetworkConfig(n_nodes=2, lambda_=1.0, lambda_prime=0.0, couplings=(0.5, 0.5), drivings=(0.1, 0.0))
    beta = 4 * math.pi * 0.5
    assert qfim_numeric(config, 1).entries[0, 0] == pytest.approx(beta ** 2, rel=1e-6)


def test_step_too_small(case1_config):
    with pytest.raises(StepTooSmall):
        qfim_numeric(case1_config, 1, epsilon=1e-12)


def test_single_parameter_qfi():
    beta = 4 * math.pi
    assert single_param_qfi(_phases(beta), 2) == pytest.approx(16 * math.pi ** 2)
    with pytest.raises(IndexOutOfRange):
        single_param_qfi(_phases(beta), 3)
    with pytest.raises(IndexOutOfRange):
        single_param_qfi(_phases(beta), 1)


def test_nuisance_bound():
    beta = 4 * math.pi
    phases = _phases(*([beta] * 9))
    assert nuisance_variance_bound(phases, 5, 10_000) == pytest.approx(10 / (2 * 16 * math.pi ** 2 * 1e4))
    assert nuisance_variance_bound(phases, 5, 10_000) == pytest.approx(3.17e-6, rel=1e-3)
    with pytest.raises(InvalidResourceCount):
        nuisance_variance_bound(phases, 2, 0)


def test_nuisance_bound_is_inverse_qfim_diagonal(rng):
    phases = random_phase_set(rng, 6)
    inverse = qfim_inverse(phases).entries
    for j in range(2, 7):
        assert nuisance_variance_bound(phases, j, 1) == pytest.approx(inverse[j - 2, j - 2])


def test_degradation_factor():
    assert nuisance_degradation(2) == pytest.approx(1.0)
    assert nuisance_degradation(10_000) == pytest.approx(2.0, abs=1e-3)
    phases = _phases(*([1.3] * 4))
    bounds = per_parameter_bounds(phases, mu=1)
    assert bounds[3]["nuisance"] / bounds[3]["known"] == pytest.approx(nuisance_degradation(5))
