import logging

import pandas as pd

from ..logic.dynamics import evolve
from ..logic.entanglement import linear_entropy_closed, linear_entropy_from_state
from ..logic.parallel import parallel_map
from .base import CommandRouter, argument, emit, load_payload, parse_grid, parse_real

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["State"])


@router.command(
    "state",
    argument("--config", required=True, help="network configuration file"),
    argument("--tau", required=True, type=parse_real, help="dimensionless time (e.g. 3.1, 2pi)"),
    help="dump the closed-form branch state at time tau",
    epilog="columns: branch, mode, coefficient_re, coefficient_im, amplitude_re, amplitude_im",
)
def state_command(args) -> int:
    config, payload = load_payload(args)
    logger.info(f"Evolving N={config.n_nodes} network to tau={args.tau}")
    state = evolve(config, args.tau)
    rows = []
    for j in range(config.n_nodes):
        c = state.coefficients[j]
        for m in range(config.n_nodes):
            a = state.amplitudes[j, m]
            rows.append({
                "branch": j + 1,
                "mode": m + 1,
                "coefficient_re": c.real,
                "coefficient_im": c.imag,
                "amplitude_re": a.real,
                "amplitude_im": a.imag,
            })
    emit(args, pd.DataFrame(rows), payload)
    return 0


@router.command(
    "entropy",
    argument("--config", required=True, help="network configuration file"),
    argument("--tau-grid", required=True, help="A:B:STEP, endpoints may use 'pi' (e.g. 0:2pi:0.1)"),
    help="linear entropy of the probe along a tau grid",
    epilog="columns: tau, S_L_closed, S_L_gram",
)
def entropy_command(args) -> int:
    config, payload = load_payload(args)
    grid = parse_grid(args.tau_grid)
    logger.info(f"Computing linear entropy on {len(grid)} tau points")

    def point(tau):
        return {
            "tau": float(tau),
            "S_L_closed": linear_entropy_closed(config, tau),
            "S_L_gram": linear_entropy_from_state(evolve(config, tau)),
        }

    emit(args, pd.DataFrame(parallel_map(point, grid)), payload, x="tau", ys=["S_L_closed", "S_L_gram"])
    return 0
