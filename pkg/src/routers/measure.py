import logging

import pandas as pd

from ..exceptions import DimensionMismatch
from ..logic.measurement import (
    cfim,
    closed_form_probabilities_n3,
    gram_schmidt_basis,
    information_gap,
    outcome_probabilities,
)
from ..logic.probe import branch_coefficients, case_phases
from .base import CommandRouter, argument, emit, load_payload, parse_real

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Measurement"])


@router.command(
    "measure",
    argument("--config", required=True, help="network configuration file"),
    argument("--case", required=True, choices=["1", "2"], help="estimation scenario"),
    argument("--refs", required=True, nargs="+", type=parse_real, help="reference phases for nodes 2..N"),
    help="Gram-Schmidt measurement: outcome probabilities, CFIM and eigenvalues of Q - F",
    epilog="columns: quantity, i, j, value (closed_form_probability rows only for N = 3)",
)
def measure_command(args) -> int:
    config, payload = load_payload(args)
    phases = case_phases(config, args.case)
    if len(args.refs) != phases.dim:
        raise DimensionMismatch(f"--refs needs {phases.dim} values (got {len(args.refs)}).")
    basis = gram_schmidt_basis(phases.n_nodes, phases.betas, args.refs)
    probabilities = outcome_probabilities(basis, branch_coefficients(phases))
    fisher = cfim(basis, phases)
    rows = [{"quantity": "probability", "i": a, "j": 0, "value": p} for a, p in enumerate(probabilities)]
    if phases.n_nodes == 3:
        closed = closed_form_probabilities_n3(phases, args.refs)
        rows += [{"quantity": "closed_form_probability", "i": a, "j": 0, "value": p} for a, p in enumerate(closed)]
    for a in range(phases.dim):
        for b in range(phases.dim):
            rows.append({"quantity": "cfim", "i": a + 2, "j": b + 2, "value": fisher.entries[a, b]})
    for a, value in enumerate(information_gap(phases, basis)):
        rows.append({"quantity": "qfim_minus_cfim_eigenvalue", "i": a, "j": 0, "value": value})
    emit(args, pd.DataFrame(rows), payload)
    return 0
