import logging

from ..exceptions import ToleranceFailure
from ..logic.validation import run_validation_suite
from ..settings import DEFAULT_PARAMS
from .base import CommandRouter, argument, emit, load_payload

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Validation"])


@router.command(
    "oracle-check",
    argument("--fock-dim", type=int, default=DEFAULT_PARAMS["fock_dim"], help="Fock levels per mode"),
    argument("--nodes", type=int, nargs="+", default=[2, 3], choices=[2, 3]),
    help="validate every closed form against the truncated-Fock oracle (N = 2, 3)",
    epilog="columns: check, n_nodes, tau, value, threshold, passed",
)
def oracle_check_command(args) -> int:
    _, payload = load_payload(args)
    frame = run_validation_suite(fock_dim=args.fock_dim, nodes=tuple(args.nodes))
    emit(args, frame, payload)
    failed = frame.loc[~frame["passed"], "check"].unique().tolist()
    if failed:
        raise ToleranceFailure(f"validation failed: {', '.join(failed)}")
    return 0
