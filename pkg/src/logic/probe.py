"""初期状態 |W_N⟩|α⟩^⊗N の構築とケースごとの位相縮約 {β_j, Φ_j}。"""
import logging
import math

import numpy as np

from ..exceptions import CaseConditionViolated, SingularBeta
from ..models.network import CaseId, NetworkConfig, PhaseSet
from ..models.states import BranchState

logger = logging.getLogger(__name__)


def build_initial_state(config: NetworkConfig) -> BranchState:
    """W 状態と全モード共通のコヒーレント状態 |α⟩ の積を返します。

    Args:
        config (NetworkConfig): ネットワーク設定。

    Returns:
        BranchState: 係数が全て 1/√N、振幅が全て α の状態。
    """
    n = config.n_nodes
    coefficients = np.full(n, 1.0 / math.sqrt(n), dtype=complex)
    amplitudes = np.full((n, n), config.alpha, dtype=complex)
    return BranchState(coefficients=coefficients, amplitudes=amplitudes, tau=0.0)


def _check_case_conditions(config: NetworkConfig, case_id: CaseId):
    if case_id == CaseId.CASE1:
        if len(set(config.couplings)) != 1:
            raise CaseConditionViolated(
                f"Case 1 requires identical couplings k_j = k (got {config.couplings})."
            )
    else:
        nonzero = [j + 1 for j, e in enumerate(config.drivings) if e != 0.0]
        if nonzero:
            raise CaseConditionViolated(
                f"Case 2 requires all drivings E_j = 0 (nonzero at nodes {nonzero})."
            )


def case_phases(config: NetworkConfig, case_id) -> PhaseSet:
    """ストロボ時刻 τ = 2π の状態の {β_j, Φ_j} を返します。

    Case 1: β_j = 4πk(λ−λ′), Φ_j = E_1 − E_j。
    Case 2: β_j = 2πk_j⁺(λ′−λ)(λ+λ′), Φ_j = k_1 − k_j。
    β_j は符号付きのまま保持します。

    Raises:
        CaseConditionViolated: ケースの前提条件を満たさない場合。
        SingularBeta: いずれかの β_j が 0 の場合。
    """
    case_id = CaseId.parse(case_id)
    _check_case_conditions(config, case_id)
    k = config.couplings
    e = config.drivings
    others = range(1, config.n_nodes)

    if case_id == CaseId.CASE1:
        beta = 4.0 * math.pi * k[0] * config.delta_lambda
        betas = tuple(beta for _ in others)
        phis = tuple(e[0] - e[j] for j in others)
        k_plus = None
    else:
        k_plus = tuple(k[0] + k[j] for j in others)
        factor = 2.0 * math.pi * (-config.delta_lambda) * config.sum_lambda
        betas = tuple(factor * kp for kp in k_plus)
        phis = tuple(k[0] - k[j] for j in others)

    if any(b == 0.0 for b in betas):
        raise SingularBeta(
            f"{case_id.value}: beta_j vanishes (lambda={config.lambda_}, "
            f"lambda'={config.lambda_prime}, k={k}); the Fisher matrix is singular."
        )
    logger.debug(f"{case_id.value} phases: betas={betas}, phis={phis}")
    return PhaseSet(case_id=case_id, betas=betas, phis=phis, k_plus=k_plus)


def branch_coefficients(phases: PhaseSet) -> np.ndarray:
    """ストロボ状態の分岐係数 (1, e^{iβ_2Φ_2}, …, e^{iβ_NΦ_N})/√N。"""
    betas = np.asarray(phases.betas)
    phis = np.asarray(phases.phis)
    psi = np.ones(phases.n_nodes, dtype=complex)
    psi[1:] = np.exp(1j * betas * phis)
    return psi / math.sqrt(phases.n_nodes)
