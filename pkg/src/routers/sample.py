import logging
from contextlib import contextmanager

import pandas as pd

from ..database import get_db, init_db
from ..exceptions import ConfigInvalid
from ..logic.experiments import latest_runs, save_report_to_db
from ..logic.probe import case_phases
from ..logic.sampler import mu_trend, saturation_experiment, single_parameter_experiment
from .base import CommandRouter, argument, emit, load_payload

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Monte Carlo"])

session_scope = contextmanager(get_db)


@router.command(
    "sample",
    argument("--config", required=True, help="network configuration file"),
    argument("--case", required=True, choices=["1", "2"], help="estimation scenario"),
    argument("--mu", type=int, required=True, help="measurements per trial (>= 1000)"),
    argument("--trials", type=int, required=True, help="independent repetitions (>= 100)"),
    argument("--seed", type=int, default=0, help="base seed; trial t uses seed + t"),
    argument("--coarse-fraction", type=float, default=None, help="share of mu spent in the coarse stage"),
    argument("--single-parameter", type=int, default=None, metavar="K",
             help="estimate only phi_K with the SLD basis (other phases known)"),
    argument("--detuning", type=float, default=0.0, help="SLD basis detuning beta*(ref - phi) in radians"),
    argument("--save", action="store_true", help="store the report in the run ledger"),
    argument("--mu-trend", type=int, nargs="+", default=None, metavar="MU",
             help="repeat the saturation experiment for each MU (one row per MU; --mu is ignored)"),
    help="Monte Carlo saturation report (two-stage adaptive MLE)",
    epilog=(
        "columns: kind, case, n_nodes, mu, trials, seed, empirical_trace, bound_trace, ratio,\n"
        "         ratio_lower_limit (1 - 3/sqrt(trials)),\n"
        "         max_abs_bias, max_standard_error"
    ),
)
def sample_command(args) -> int:
    config, payload = load_payload(args)
    if args.mu_trend:
        if args.save or args.single_parameter is not None:
            raise ConfigInvalid("--mu-trend cannot be combined with --save or --single-parameter.")
        emit(args, mu_trend(config, args.case, args.mu_trend, args.trials, args.seed), payload, x="mu", ys=["ratio"])
        return 0
    if args.single_parameter is None:
        report = saturation_experiment(config, args.case, args.mu, args.trials, args.seed, args.coarse_fraction)
    else:
        phases = case_phases(config, args.case)
        report = single_parameter_experiment(
            phases, args.single_parameter, args.mu, args.trials, args.seed, detuning=args.detuning
        )
    if args.save:
        engine = init_db()
        with session_scope(engine) as db:
            save_report_to_db(db, report, payload)
    emit(args, report.to_frame(), payload)
    return 0


@router.command(
    "runs",
    argument("--limit", type=int, default=10, help="number of runs to list"),
    argument("--kind", default=None, choices=["saturation", "single_parameter"]),
    help="list stored Monte Carlo runs, latest first",
    epilog="columns: id, created_at, kind, n_nodes, mu, trials, empirical_trace, bound_trace, ratio",
)
def runs_command(args) -> int:
    _, payload = load_payload(args)
    engine = init_db()
    with session_scope(engine) as db:
        runs = latest_runs(db, limit=args.limit, kind=args.kind)
        rows = [{
            "id": run.id,
            "created_at": str(run.created_at),
            "kind": run.kind,
            "n_nodes": run.n_nodes,
            "mu": run.mu,
            "trials": run.trials,
            "empirical_trace": run.empirical_trace,
            "bound_trace": run.bound_trace,
            "ratio": run.ratio,
        } for run in runs]
    columns = ["id", "created_at", "kind", "n_nodes", "mu", "trials", "empirical_trace", "bound_trace", "ratio"]
    emit(args, pd.DataFrame(rows, columns=columns), payload)
    return 0
