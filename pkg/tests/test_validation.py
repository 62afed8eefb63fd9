import numpy as np
import pytest

from src.logic.validation import (
    WIDE_BETA_RANGE,
    estimation_checks,
    qfim_checks,
    random_phase_set,
    run_validation_suite,
)
from src.models.network import CaseId


def test_random_phase_set_ranges(rng):
    phases = random_phase_set(rng, 8)
    assert phases.dim == 7
    assert np.all((np.abs(phases.betas) >= 0.5) & (np.abs(phases.betas) <= 10.0))
    assert np.all(np.abs(phases.phis) <= 0.1)
    equal = random_phase_set(rng, 4, CaseId.CASE1)
    assert len(set(equal.betas)) == 1


def test_wide_beta_range_spans_decades(rng):
    magnitudes = np.concatenate([
        np.abs(random_phase_set(rng, 20, beta_range=WIDE_BETA_RANGE).betas) for _ in range(20)
    ])
    assert magnitudes.min() >= 0.1 and magnitudes.max() <= 100.0
    assert magnitudes.min() < 0.5 and magnitudes.max() > 20.0


def test_qfim_checks_pass():
    rows = qfim_checks()
    assert {row["check"] for row in rows} == {
        "qfim_numeric_vs_analytic", "qfim_reference_vs_analytic", "trace_inverse_qfim",
    }
    assert all(row["passed"] for row in rows)


def test_estimation_checks_pass():
    rows = estimation_checks(seed=99)
    failed = [row["check"] for row in rows if not row["passed"]]
    assert not failed


@pytest.mark.slow
def test_full_suite():
    frame = run_validation_suite(fock_dim=30, nodes=(2, 3))
    assert set(frame["n_nodes"]) >= {2, 3}
    assert frame["passed"].all()
