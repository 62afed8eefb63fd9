"""閉形式と数値オラクルの相互検証スイート (oracle-check コマンドの中身)。"""
import logging
import math

import numpy as np
import pandas as pd

from ..models.network import CaseId, NetworkConfig, PhaseSet
from ..settings import DEFAULT_PARAMS
from .dynamics import TWO_PI, evolve
from .entanglement import linear_entropy_closed, linear_entropy_from_state
from .estimation import qfim_analytic, qfim_inverse, qfim_numeric, trace_inverse_qfim
from .measurement import (
    cfim,
    gram_schmidt_basis,
    information_gap,
    saturated_cfim,
    single_param_cfi,
    sld_eigenbasis,
    weak_commutativity,
)
from .oracle import (
    FockPropagator,
    energy_expectation,
    evolve_numeric,
    fidelity,
    hamiltonian_matrix,
    mechanical_return_overlap,
    purity_numeric,
)
from .parallel import parallel_map
from .platforms import loglog_slope, resource_phase_set

logger = logging.getLogger(__name__)

# Sherman–Morrison の確認では β の桁を大きく散らす
WIDE_BETA_RANGE = (0.1, 100.0)

ORACLE_CONFIGS = {
    2: NetworkConfig(
        n_nodes=2, lambda_=1.0, lambda_prime=0.0, couplings=(0.1, 0.2), drivings=(0.05, 0.0), alpha=1.0
    ),
    3: NetworkConfig(
        n_nodes=3, lambda_=1.0, lambda_prime=0.0, couplings=(0.1, 0.2, 0.15), drivings=(0.05, 0.0, 0.02), alpha=1.0
    ),
}


def _row(check: str, n_nodes: int, value: float, threshold: float, passed: bool, tau: float = float("nan")) -> dict:
    return {
        "check": check,
        "n_nodes": n_nodes,
        "tau": tau,
        "value": float(value),
        "threshold": float(threshold),
        "passed": bool(passed),
    }


def oracle_checks(config: NetworkConfig, fock_dim: int = 30, n_tau: int = 16) -> list[dict]:
    """τ 格子上でフィデリティ・純度・ノルム・エネルギー保存を確認します。"""
    n = config.n_nodes
    propagator = FockPropagator(config, fock_dim)
    hamiltonian = hamiltonian_matrix(config, fock_dim)
    taus = np.linspace(0.0, TWO_PI, n_tau)
    rows = []
    energy0 = None
    for tau in taus:
        tau = float(tau)
        numeric = evolve_numeric(config, fock_dim, tau, propagator=propagator)
        analytic = evolve(config, tau)
        f = fidelity(numeric, analytic)
        rows.append(_row("fidelity", n, f, 1 - DEFAULT_PARAMS["oracle_fidelity_tolerance"],
                         f >= 1 - DEFAULT_PARAMS["oracle_fidelity_tolerance"], tau))
        closed = linear_entropy_closed(config, tau)
        gap = abs((1.0 - purity_numeric(numeric)) - closed)
        rows.append(_row("purity_vs_closed_entropy", n, gap, DEFAULT_PARAMS["purity_tolerance"],
                         gap <= DEFAULT_PARAMS["purity_tolerance"], tau))
        energy = energy_expectation(hamiltonian, numeric)
        energy0 = energy if energy0 is None else energy0
        drift = abs(energy - energy0) / max(1.0, abs(energy0))
        rows.append(_row("energy_conservation", n, drift, 1e-8, drift <= 1e-8, tau))
        logger.debug(f"N={n} tau={tau:.4f}: fidelity={f:.12f}, tail={numeric.tail_mass:.2e}")

    final = evolve_numeric(config, fock_dim, TWO_PI, propagator=propagator)
    overlap = mechanical_return_overlap(final, config.alpha)
    rows.append(_row("mechanical_return_overlap", n, overlap, 1 - 1e-8, overlap >= 1 - 1e-8, TWO_PI))
    closed = linear_entropy_closed(config, TWO_PI)
    gram = linear_entropy_from_state(evolve(config, TWO_PI))
    worst = max(closed, gram)
    rows.append(_row("stroboscopic_disentanglement", n, worst, 1e-10, worst <= 1e-10, TWO_PI))
    return rows


def qfim_checks() -> list[dict]:
    """解析形・有限差分・N = 3 の行列表示の一致と Tr[Q⁻¹] = 3/(16π²)。"""
    config = NetworkConfig(
        n_nodes=3, lambda_=1.0, lambda_prime=0.0, couplings=(1.0, 1.0, 1.0), drivings=(0.01, -0.02, 0.03)
    )
    analytic = qfim_analytic(resource_phase_set(CaseId.CASE1, 1.0, 3, 1)).entries
    numeric = qfim_numeric(config, CaseId.CASE1).entries
    reference = 64.0 * math.pi ** 2 / 9.0 * np.array([[2.0, -1.0], [-1.0, 2.0]])
    rows = []
    for name, matrix in (("qfim_numeric_vs_analytic", numeric), ("qfim_reference_vs_analytic", reference)):
        err = np.linalg.norm(matrix - analytic) / np.linalg.norm(analytic)
        rows.append(_row(name, 3, err, 1e-6, err < 1e-6))
    trace = trace_inverse_qfim(resource_phase_set(CaseId.CASE1, 1.0, 3, 1))
    err = abs(trace - 3.0 / (16.0 * math.pi ** 2))
    rows.append(_row("trace_inverse_qfim", 3, err, 1e-12, err < 1e-12))
    return rows


def random_phase_set(
    rng: np.random.Generator,
    n_nodes: int,
    case_id=CaseId.CASE2,
    beta_range: tuple = (0.5, 10.0),
) -> PhaseSet:
    """符号付きの |β| (beta_range 内の対数一様) と Φ ∈ [−0.1, 0.1] をもつランダムな PhaseSet。"""
    dim = n_nodes - 1
    low, high = (math.log(b) for b in beta_range)
    if CaseId.parse(case_id) == CaseId.CASE1:
        betas = (float(math.exp(rng.uniform(low, high))),) * dim
    else:
        magnitudes = np.exp(rng.uniform(low, high, dim))
        betas = tuple(float(b) for b in magnitudes * rng.choice([-1.0, 1.0], dim))
    phis = tuple(float(p) for p in rng.uniform(-0.1, 0.1, dim))
    return PhaseSet(case_id=case_id, betas=betas, phis=phis)


def estimation_checks(seed: int = 1234) -> list[dict]:
    rng = np.random.Generator(np.random.PCG64(seed))
    rows = []

    worst = 0.0
    for _ in range(100):
        phases = random_phase_set(rng, int(rng.integers(2, 21)), beta_range=WIDE_BETA_RANGE)
        product = qfim_analytic(phases).entries @ qfim_inverse(phases).entries
        worst = max(worst, float(np.max(np.abs(product - np.eye(phases.dim)))))
    rows.append(_row("sherman_morrison_identity", 0, worst, 1e-10, worst <= 1e-10))

    for n in (2, 3, 4):
        phases = random_phase_set(rng, n)
        q = qfim_analytic(phases).entries
        f, _ = saturated_cfim(phases)
        err = np.linalg.norm(f.entries - q) / np.linalg.norm(q)
        rows.append(_row("cfim_saturation", n, err, 1e-4, err < 1e-4))

    lowest = np.inf
    phases = random_phase_set(rng, 3)
    scale = float(np.max(np.abs(qfim_analytic(phases).entries)))
    for _ in range(50):
        refs = np.asarray(phases.phis) + rng.uniform(-0.5, 0.5, phases.dim) / np.abs(phases.betas)
        basis = gram_schmidt_basis(phases.n_nodes, phases.betas, refs)
        lowest = min(lowest, float(np.min(information_gap(phases, basis))) / scale)
    rows.append(_row("information_gap_psd", 3, lowest, -1e-8, lowest >= -1e-8))

    worst = 0.0
    for n in range(2, 7):
        phases = random_phase_set(rng, n)
        for k in range(2, n + 1):
            for kp in range(k + 1, n + 1):
                worst = max(worst, abs(weak_commutativity(phases, k, kp)))
    rows.append(_row("weak_commutativity", 0, worst, 1e-12, worst < 1e-12))

    worst = 0.0
    for n in (2, 3, 5):
        phases = random_phase_set(rng, n)
        for detuning in (0.0, 0.2, -0.4):
            slot = phases.param_slot(2)
            ref = phases.phis[slot] + detuning / phases.betas[slot]
            refs = list(phases.phis)
            refs[slot] = ref
            basis, _ = sld_eigenbasis(phases.with_phis(refs), 2)
            numeric = cfim(basis, phases).entries[slot, slot]
            closed = single_param_cfi(phases, 2, ref, phases.phis[slot])
            worst = max(worst, abs(numeric - closed) / closed)
    rows.append(_row("sld_cfi_closed_form", 0, worst, 1e-6, worst < 1e-6))

    grid = np.arange(2, 31)
    for case_id, expected in ((CaseId.CASE1, -2.0), (CaseId.CASE2, -4.0)):
        traces = [trace_inverse_qfim(resource_phase_set(case_id, 1.0, 5, int(x))) for x in grid]
        slope = loglog_slope(grid, traces)
        rows.append(_row(f"scaling_slope_{case_id.value}", 5, slope, expected, abs(slope - expected) <= 0.01))
    return rows


def run_validation_suite(fock_dim: int = 30, nodes=(2, 3)) -> pd.DataFrame:
    """全ての検証を実行し、check ごとの行を持つ表を返します。"""
    logger.info(f"Running validation suite (fock_dim={fock_dim}, nodes={list(nodes)})")
    blocks = parallel_map(lambda n: oracle_checks(ORACLE_CONFIGS[n], fock_dim), nodes)
    rows = [row for block in blocks for row in block]
    rows += qfim_checks()
    rows += estimation_checks()
    frame = pd.DataFrame(rows)
    failed = int((~frame["passed"]).sum())
    if failed:
        logger.warning(f"Validation suite: {failed} of {len(frame)} checks failed")
    else:
        logger.info(f"Validation suite: all {len(frame)} checks passed")
    return frame
