import logging

from ..logic.platforms import PRESETS, figure_sweep
from ..models.network import CaseId
from .base import CommandRouter, argument, emit, load_payload

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Figures"])

SWEEP_EPILOG = (
    "columns: panel, platform, n_nodes, n_exc, mu, resource_ratio, bound, delta_rms\n"
    "panel a: N x N_exc grid of resource_ratio = N(N-1)/N_exc^r (no platform, bound empty)\n"
    "panel b: N = 2..30 at the smallest N_exc\n"
    "panel c: N_exc grid at N = 10"
)


def _sweep(args, case_id: CaseId) -> int:
    _, payload = load_payload(args)
    frame = figure_sweep(case_id, mu=args.mu, platforms=args.platforms)
    emit(args, frame, payload, x="n_nodes", ys=["delta_rms"])
    return 0


@router.command(
    "figure2",
    argument("--mu", type=int, default=10_000),
    argument("--platforms", nargs="+", default=["fabry-perot", "levitated", "cold-atoms"], choices=list(PRESETS)),
    help="Case 1 gravimetry bounds for all optomechanical presets",
    epilog=SWEEP_EPILOG + "\nunits: bound m^2/s^4, delta_rms m/s^2",
)
def figure2_command(args) -> int:
    return _sweep(args, CaseId.CASE1)


@router.command(
    "figure3",
    argument("--mu", type=int, default=10_000),
    argument("--platforms", nargs="+", default=list(PRESETS), choices=list(PRESETS)),
    help="Case 2 coupling-strength bounds for all presets",
    epilog=SWEEP_EPILOG + "\nunits: bound Hz^2, delta_rms Hz",
)
def figure3_command(args) -> int:
    return _sweep(args, CaseId.CASE2)
