import logging

from sqlalchemy import desc
from sqlalchemy.orm import Session

from ..models.db_models import ExperimentRun, TrialResult
from ..models.network import NetworkConfig
from .config_file import config_to_dict
from .sampler import SaturationReport, saturation_experiment

logger = logging.getLogger(__name__)


def save_report_to_db(db: Session, report: SaturationReport, params: dict) -> ExperimentRun:
    """実験レポートをデータベースに保存します。"""
    logger.info(f"Saving {report.kind} report with {report.trials} trials to the database...")
    try:
        # 1. 実行の記録を作成
        run = ExperimentRun(
            kind=report.kind,
            parameters_used=params,
            n_nodes=report.n_nodes,
            mu=report.mu,
            trials=report.trials,
            empirical_trace=report.empirical_trace,
            bound_trace=report.bound_trace,
            ratio=report.ratio,
        )
        db.add(run)
        db.flush()  # run.id を確定させる

        # 2. 試行ごとの推定値を紐づけて保存
        squared = report.squared_errors()
        for index, estimate in enumerate(report.estimates):
            db.add(TrialResult(
                run_id=run.id,
                trial_index=index,
                seed=report.seed + index,
                estimates=[float(x) for x in estimate],
                squared_error=float(squared[index]),
            ))

        db.commit()
        logger.info(f"Successfully saved experiment run {run.id} and {report.trials} trials.")
        return run
    except Exception as e:
        db.rollback()
        logger.error(f"Failed to save experiment report to database: {e}")
        raise


def latest_runs(db: Session, limit: int = 10, kind: str | None = None) -> list[ExperimentRun]:
    """
    保存済みの実行を新しい順に取得します。

    Args:
        db (Session): データベースセッション。
        limit (int): 取得する最大件数。
        kind (str | None): 'saturation' / 'single_parameter' で絞り込み。

    Returns:
        list: ExperimentRun のリスト。
    """
    logger.info(f"Querying latest runs: limit={limit}, kind={kind}")
    query = db.query(ExperimentRun)
    if kind:
        query = query.filter(ExperimentRun.kind == kind)
    runs = query.order_by(desc(ExperimentRun.created_at), desc(ExperimentRun.id)).limit(limit).all()
    logger.info(f"Found {len(runs)} runs.")
    return runs


def run_experiment_task(db: Session, config: NetworkConfig, case_id, mu: int, trials: int, seed: int) -> SaturationReport:
    """飽和実験を実行し、結果を保存します。

    Args:
        db (Session): データベースセッション。
        config (NetworkConfig): ネットワーク設定。
        case_id: 1 / 2 / CaseId。
        mu (int): 1 試行あたりの測定回数。
        trials (int): 試行回数。
        seed (int): 乱数シード。

    Returns:
        SaturationReport: 実験レポート。
    """
    logger.info("Starting saturation experiment task...")
    try:
        report = saturation_experiment(config, case_id, mu, trials, seed)
        params = {
            "config": config_to_dict(config),
            "case": report.case_id,
            "mu": mu,
            "trials": trials,
            "seed": seed,
        }
        save_report_to_db(db, report, params)
        logger.info("Saturation experiment task finished successfully.")
        return report
    except Exception as e:
        logger.error(f"An error occurred during the experiment task: {e}", exc_info=True)
        db.rollback()
        raise
