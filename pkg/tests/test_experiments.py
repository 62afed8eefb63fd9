import numpy as np
import pytest

from src.logic.experiments import latest_runs, run_experiment_task, save_report_to_db
from src.logic.sampler import SaturationReport
from src.models.db_models import ExperimentRun, TrialResult


def _report(kind="saturation", trials=3, seed=100):
    rng = np.random.Generator(np.random.PCG64(seed))
    return SaturationReport(
        kind=kind, case_id="1", n_nodes=3, mu=1000, trials=trials, seed=seed,
        truth=np.array([0.3, 0.4]), estimates=0.35 + 0.01 * rng.standard_normal((trials, 2)),
        bound_trace=1e-4,
    )


def test_save_report(db):
    report = _report()
    run = save_report_to_db(db, report, {"case": "1", "mu": 1000})
    assert run.id is not None
    stored = db.get(ExperimentRun, run.id)
    assert stored.parameters_used == {"case": "1", "mu": 1000}
    assert stored.ratio == pytest.approx(report.ratio)
    trials = sorted(stored.trials_results, key=lambda t: t.trial_index)
    assert [t.seed for t in trials] == [100, 101, 102]
    assert trials[1].estimates == pytest.approx(list(report.estimates[1]))
    assert trials[2].squared_error == pytest.approx(report.squared_errors()[2])


def test_failed_save_rolls_back(db):
    with pytest.raises(Exception):
        save_report_to_db(db, _report(), {"bad": object()})
    assert db.query(ExperimentRun).count() == 0
    assert db.query(TrialResult).count() == 0


def test_latest_runs_filters_and_limits(db):
    for kind in ("saturation", "single_parameter", "saturation"):
        save_report_to_db(db, _report(kind=kind), {})
    runs = latest_runs(db, limit=2)
    assert len(runs) == 2
    assert runs[0].id > runs[1].id
    assert {r.kind for r in latest_runs(db, kind="single_parameter")} == {"single_parameter"}
    assert len(latest_runs(db, kind="saturation")) == 2


@pytest.mark.slow
def test_run_experiment_task(db, case1_config):
    report = run_experiment_task(db, case1_config, 1, mu=1000, trials=100, seed=7)
    run = latest_runs(db, limit=1)[0]
    assert run.trials == 100
    assert run.parameters_used["config"]["alpha"] == [0.0, 0.0]
    assert run.ratio == pytest.approx(report.ratio)
    assert len(run.trials_results) == 100
