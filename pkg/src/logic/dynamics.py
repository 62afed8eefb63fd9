"""閉形式の時間発展 (任意の τ) とストロボ時刻 τ = 2π への縮約。

各ノードのハミルトニアン H_j/(Ωħ) = b†b − f(b† + b), f = kΞ − E (Ξ = λ or λ′) は
U = e^{iτf²} D(f) e^{−iτb†b} D(−f) と書けるので、コヒーレント状態 |α⟩ は
位相 θ(f) = f²(τ − sin τ) + f·S(τ) を伴って |αe^{−iτ} + fη(τ)⟩ に移ります。
ここで S(τ) = Re α sin τ + Im α (1 − cos τ)、η(τ) = 1 − e^{−iτ}。
"""
import logging
import math

import numpy as np

from ..exceptions import IndexOutOfRange, ToleranceFailure
from ..models.network import NetworkConfig, PhaseSet
from ..models.states import BranchState
from .probe import branch_coefficients, case_phases

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


def eta(tau: float) -> complex:
    return 1.0 - np.exp(-1j * tau)


def _alpha_drive(alpha: complex, tau: float) -> float:
    # S(τ): 実数 α では α sin τ に一致する
    return alpha.real * math.sin(tau) + alpha.imag * (1.0 - math.cos(tau))


def xi_phase(config: NetworkConfig, j: int, tau: float) -> complex:
    """ブランチ j (2 ≤ j ≤ N) の相対複素指数 ξ_j(τ)。ξ_1 ≡ 0 で大域位相を固定。

    ξ_j = i(λ−λ′)[C_j(τ − sin τ) − (k_1 − k_j)S(τ)],
    C_j = 2E_1k_1 − 2E_jk_j − (k_1 − k_j)(k_1 + k_j)(λ + λ′)。
    純虚数なので |e^{ξ_j}| = 1。
    """
    if not 2 <= j <= config.n_nodes:
        raise IndexOutOfRange(f"xi_phase: node index {j} outside 2..{config.n_nodes}.")
    k = config.couplings
    e = config.drivings
    s = j - 1
    c_j = 2.0 * e[0] * k[0] - 2.0 * e[s] * k[s] - (k[0] - k[s]) * (k[0] + k[s]) * config.sum_lambda
    phase = config.delta_lambda * (
        c_j * (tau - math.sin(tau)) - (k[0] - k[s]) * _alpha_drive(config.alpha, tau)
    )
    return 1j * phase


def coherent_amplitude(config: NetworkConfig, branch: int, mode: int, tau: float) -> complex:
    """ブランチ branch におけるモード mode のコヒーレント振幅 (1 始まり)。

    αe^{−iτ} + (k_m Ξ − E_m)η(τ), Ξ = λ (mode == branch) / λ′ (それ以外)。
    """
    if not 1 <= branch <= config.n_nodes:
        raise IndexOutOfRange(f"branch index {branch} outside 1..{config.n_nodes}.")
    m = config.node_slot(mode)
    xi = config.lambda_ if mode == branch else config.lambda_prime
    shift = config.couplings[m] * xi - config.drivings[m]
    return config.alpha * np.exp(-1j * tau) + shift * eta(tau)


def amplitude_matrix(config: NetworkConfig, tau: float) -> np.ndarray:
    """A[j, m] を一括で計算します (coherent_amplitude のベクトル版)。"""
    k = np.asarray(config.couplings)
    e = np.asarray(config.drivings)
    shifts = np.tile(k * config.lambda_prime - e, (config.n_nodes, 1))
    np.fill_diagonal(shifts, k * config.lambda_ - e)
    amplitudes = config.alpha * np.exp(-1j * tau) + shifts * eta(tau)
    if _is_stroboscopic(tau):
        # η(2πq) = 0 を厳密に反映
        amplitudes = np.full_like(amplitudes, config.alpha)
    return amplitudes


def _is_stroboscopic(tau: float) -> bool:
    q = round(tau / TWO_PI)
    return q != 0 and abs(tau - q * TWO_PI) < 1e-12 * max(1.0, abs(tau))


def evolve(config: NetworkConfig, tau: float) -> BranchState:
    """時刻 τ の閉形式ネットワーク状態を返します。"""
    n = config.n_nodes
    xis = np.array([0j] + [xi_phase(config, j, tau) for j in range(2, n + 1)])
    if np.max(np.abs(xis.real)) > 0.0:
        raise ToleranceFailure("xi_j has a nonzero real part; evolution is not unitary.")
    coefficients = np.exp(xis) / math.sqrt(n)
    return BranchState(coefficients=coefficients, amplitudes=amplitude_matrix(config, tau), tau=tau)


def stroboscopic_state(config: NetworkConfig, case_id) -> tuple[PhaseSet, BranchState]:
    """τ = 2π の {β_j, Φ_j} と分解された状態を返します。

    e^{iβ_jΦ_j} が e^{ξ_j(2π)} と 1e-12 で一致することを確認します。
    """
    phases = case_phases(config, case_id)
    coefficients = branch_coefficients(phases)
    evolved = evolve(config, TWO_PI)
    mismatch = float(np.max(np.abs(coefficients - evolved.coefficients)))
    if mismatch > 1e-12 * max(1.0, max(abs(b * p) for b, p in zip(phases.betas, phases.phis))):
        raise ToleranceFailure(
            f"stroboscopic phases disagree with xi_j(2pi) by {mismatch:.3e}."
        )
    state = BranchState(
        coefficients=coefficients,
        amplitudes=np.full((config.n_nodes, config.n_nodes), config.alpha, dtype=complex),
        tau=TWO_PI,
    )
    return phases, state
