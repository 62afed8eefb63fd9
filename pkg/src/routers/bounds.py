import logging

import pandas as pd

from ..logic.estimation import (
    nuisance_degradation,
    per_parameter_bounds,
    qfim_analytic,
    qfim_numeric,
    trace_inverse_qfim,
)
from ..logic.platforms import (
    case1_gravimetry_bound,
    case2_coupling_bound,
    get_preset,
    resource_tradeoff,
    rms_error,
    single_param_qfi_scaling,
)
from ..logic.probe import case_phases
from ..models.network import CaseId
from .base import CommandRouter, argument, emit, load_payload

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Bounds"])


@router.command(
    "qfim",
    argument("--config", required=True, help="network configuration file"),
    argument("--case", required=True, choices=["1", "2"], help="estimation scenario"),
    argument("--numeric", action="store_true", help="use finite differences instead of the closed form"),
    argument("--mu", type=int, default=1, help="number of repetitions for the per-parameter bounds"),
    help="quantum Fisher information matrix, Tr[Q^-1] and per-parameter bounds",
    epilog="columns: quantity, i, j, value (i, j are node indices 2..N; 0 for scalar rows)",
)
def qfim_command(args) -> int:
    config, payload = load_payload(args)
    phases = case_phases(config, args.case)
    matrix = qfim_numeric(config, args.case) if args.numeric else qfim_analytic(phases)
    rows = []
    for a in range(phases.dim):
        for b in range(phases.dim):
            rows.append({"quantity": "qfim", "i": a + 2, "j": b + 2, "value": matrix.entries[a, b]})
    rows.append({"quantity": "trace_inverse_qfim", "i": 0, "j": 0, "value": trace_inverse_qfim(phases)})
    for node, bounds in per_parameter_bounds(phases, args.mu).items():
        rows.append({"quantity": "known_parameter_bound", "i": node, "j": node, "value": bounds["known"]})
        rows.append({"quantity": "nuisance_bound", "i": node, "j": node, "value": bounds["nuisance"]})
    rows.append({"quantity": "nuisance_degradation", "i": 0, "j": 0, "value": nuisance_degradation(phases.n_nodes)})
    emit(args, pd.DataFrame(rows), payload)
    return 0


@router.command(
    "crb",
    argument("--platform", required=True, help="fabry-perot | levitated | cold-atoms | spin-mechanical"),
    argument("--case", required=True, choices=["1", "2"], help="estimation scenario"),
    argument("--n-nodes", type=int, required=True),
    argument("--n-exc", type=int, required=True),
    argument("--mu", type=int, default=10_000),
    argument("--couplings", type=float, nargs="+", default=None,
             help="Case 2 only: all N dimensionless couplings for the exact bound"),
    help="SI Cramer-Rao bound and RMS error for a platform preset",
    epilog=(
        "columns: platform, case, n_nodes, n_exc, mu, bound, bound_unit, delta_rms, delta_rms_unit,\n"
        "         single_param_qfi (Phi_2 alone, dimensionless), min_n_exc (smallest N_exc with N(N-1)/N_exc^r <= 1)"
    ),
)
def crb_command(args) -> int:
    _, payload = load_payload(args)
    preset = get_preset(args.platform)
    case_id = CaseId.parse(args.case)
    if case_id == CaseId.CASE1:
        bound = case1_gravimetry_bound(preset, args.n_nodes, args.n_exc, args.mu)
        units = ("m^2/s^4", "m/s^2")
    else:
        bound = case2_coupling_bound(
            preset.omega, preset.coupling, args.n_nodes, args.n_exc, args.mu, couplings=args.couplings
        )
        units = ("Hz^2", "Hz")
    logger.info(f"{preset.name} {case_id.value}: bound={bound:.4e} {units[0]}")
    frame = pd.DataFrame([{
        "platform": preset.name,
        "case": case_id.value,
        "n_nodes": args.n_nodes,
        "n_exc": args.n_exc,
        "mu": args.mu,
        "bound": bound,
        "bound_unit": units[0],
        "delta_rms": rms_error(bound),
        "delta_rms_unit": units[1],
        "single_param_qfi": single_param_qfi_scaling(case_id, preset.coupling, args.n_nodes, args.n_exc),
        "min_n_exc": resource_tradeoff(case_id, args.n_nodes),
    }])
    emit(args, frame, payload)
    return 0
