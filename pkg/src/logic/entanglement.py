"""{Λ̂_j} 系と力学モード間の二分割エンタングルメント (線形エントロピー)。"""
import logging
from itertools import combinations

import numpy as np

from ..models.network import NetworkConfig
from ..models.states import BranchState

logger = logging.getLogger(__name__)


def linear_entropy_closed(config: NetworkConfig, tau: float) -> float:
    """任意の N に対する閉形式の線形エントロピー S_L。

    S_L = (2/N²)[N(N−1)/2 − Σ_{i<j} exp(2(k_i² + k_j²)(λ−λ′)²(cos τ − 1))]。
    α と E_j には依存しません。
    """
    n = config.n_nodes
    k2 = np.asarray(config.couplings) ** 2
    i, j = np.triu_indices(n, k=1)
    exponents = 2.0 * (k2[i] + k2[j]) * config.delta_lambda ** 2 * (np.cos(tau) - 1.0)
    bracket = n * (n - 1) / 2.0 - float(np.sum(np.exp(exponents)))
    return max(0.0, 2.0 / n ** 2 * bracket)


def log_overlap(upsilon_1: np.ndarray, upsilon_2: np.ndarray) -> np.ndarray:
    """log⟨Υ_2|Υ_1⟩ = −½|Υ_1|² − ½|Υ_2|² + Υ_2*Υ_1 (要素ごと)。"""
    return (
        -0.5 * np.abs(upsilon_1) ** 2
        - 0.5 * np.abs(upsilon_2) ** 2
        + np.conj(upsilon_2) * upsilon_1
    )


def probe_density_matrix(state: BranchState) -> np.ndarray:
    """力学モードをトレースアウトした縮約密度行列 ρ_probe。

    ρ[j, j′] = c_j c_{j′}* Π_m ⟨A[j′, m]|A[j, m]⟩。重なりの積は対数空間で評価します。
    """
    a = state.amplitudes
    logs = log_overlap(a[:, None, :], a[None, :, :]).sum(axis=2)
    c = state.coefficients
    return np.outer(c, c.conj()) * np.exp(logs)


def linear_entropy_from_state(state: BranchState) -> float:
    """分岐データの Gram 行列から S_L = 1 − Tr[ρ_probe²] を厳密に計算します。"""
    weights = np.abs(state.coefficients) ** 2
    a = state.amplitudes
    n = state.n_nodes
    purity = float(np.sum(weights ** 2))
    for j, jp in combinations(range(n), 2):
        # |⟨a|b⟩|² = exp(2 Re log⟨a|b⟩)
        log_sq = 2.0 * float(np.sum(log_overlap(a[j], a[jp]).real))
        purity += 2.0 * weights[j] * weights[jp] * np.exp(log_sq)
    return max(0.0, 1.0 - purity)
