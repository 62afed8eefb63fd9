"""量子フィッシャー情報行列 (QFIM) とクラメール・ラオ型の下界。"""
import logging
from typing import Callable, Optional

import numpy as np

from ..exceptions import InvalidResourceCount, SingularBeta, StepTooSmall
from ..models.network import NetworkConfig, PhaseSet
from ..models.states import FisherKind, FisherMatrix
from ..settings import DEFAULT_PARAMS
from .probe import branch_coefficients, case_phases

logger = logging.getLogger(__name__)


def _betas(phases: PhaseSet) -> np.ndarray:
    betas = np.asarray(phases.betas, dtype=float)
    if np.any(betas == 0.0):
        raise SingularBeta("beta_j = 0: the QFIM is singular.")
    return betas


def qfim_analytic(phases: PhaseSet) -> FisherMatrix:
    """Q = (4/N)diag(β²) − (4/N²)ββᵀ。Φ_j には依存しません。"""
    betas = _betas(phases)
    n = phases.n_nodes
    entries = 4.0 / n * np.diag(betas ** 2) - 4.0 / n ** 2 * np.outer(betas, betas)
    return FisherMatrix(entries=entries, kind=FisherKind.QUANTUM)


def qfim_inverse(phases: PhaseSet) -> FisherMatrix:
    """シャーマン・モリソン恒等式による閉形式の逆行列。

    Q = A − uvᵀ, A = (4/N)diag(β²), u = v = (2/N)β で vᵀA⁻¹u = (N−1)/N より
    [Q⁻¹]_ij = (N/4)(δ_ij/β_i² + 1/(β_iβ_j))。
    """
    betas = _betas(phases)
    n = phases.n_nodes
    inv_b = 1.0 / betas
    entries = n / 4.0 * (np.diag(inv_b ** 2) + np.outer(inv_b, inv_b))
    return FisherMatrix(entries=entries, kind=FisherKind.QUANTUM)


def trace_inverse_qfim(phases: PhaseSet) -> float:
    """スカラー下界 Tr[Q⁻¹] = (N/2)Σ_j β_j⁻²。"""
    betas = _betas(phases)
    return phases.n_nodes / 2.0 * float(np.sum(betas ** -2.0))


def pure_state_qfim(psi: np.ndarray, derivatives: np.ndarray) -> np.ndarray:
    """純粋状態の QFIM: [Q]_ij = 4Re(⟨∂_iψ|∂_jψ⟩ − ⟨∂_iψ|ψ⟩⟨ψ|∂_jψ⟩)。

    derivatives は行 i が |∂_iψ⟩ の配列。
    """
    gram = derivatives.conj() @ derivatives.T
    berry = derivatives.conj() @ psi
    q = 4.0 * np.real(gram - np.outer(berry, berry.conj()))
    return 0.5 * (q + q.T)


def finite_difference_derivatives(
    state_fn: Callable[[np.ndarray], np.ndarray],
    phis: np.ndarray,
    step: float,
    richardson: bool = False,
) -> np.ndarray:
    """中心差分による |∂_jψ⟩。richardson=True で h, h/2 の外挿を行います。"""
    phis = np.asarray(phis, dtype=float)

    def central(h):
        rows = []
        for j in range(phis.size):
            shift = np.zeros_like(phis)
            shift[j] = h
            rows.append((state_fn(phis + shift) - state_fn(phis - shift)) / (2.0 * h))
        return np.array(rows)

    coarse = central(step)
    if not richardson:
        return coarse
    fine = central(step / 2.0)
    return (4.0 * fine - coarse) / 3.0


def qfim_numeric(
    config: NetworkConfig,
    case_id,
    epsilon: Optional[float] = None,
    richardson: bool = False,
    state_fn: Optional[Callable[[PhaseSet], np.ndarray]] = None,
) -> FisherMatrix:
    """ストロボ分岐状態の Φ_j に関する有限差分から純粋状態の QFIM を組み立てます。

    刻み幅は ε/max|β_j| にスケールします。state_fn を渡すと分岐係数の
    生成関数を差し替えられます (ゲージ不変性の確認用)。

    Raises:
        StepTooSmall: ε が 1e-9 未満の場合。
    """
    epsilon = DEFAULT_PARAMS["fd_epsilon"] if epsilon is None else epsilon
    if epsilon < DEFAULT_PARAMS["fd_epsilon_floor"]:
        raise StepTooSmall(f"epsilon={epsilon:g} is below {DEFAULT_PARAMS['fd_epsilon_floor']:g}.")
    phases = case_phases(config, case_id)
    betas = _betas(phases)
    build = state_fn or branch_coefficients
    step = epsilon / float(np.max(np.abs(betas)))

    def coefficients_at(phis):
        return build(phases.with_phis(phis))

    phis = np.asarray(phases.phis)
    psi = coefficients_at(phis)
    derivatives = finite_difference_derivatives(coefficients_at, phis, step, richardson)
    logger.debug(f"Numeric QFIM with step {step:.3e} (richardson={richardson})")
    return FisherMatrix(entries=pure_state_qfim(psi, derivatives), kind=FisherKind.QUANTUM)


def single_param_qfi(phases: PhaseSet, j: int) -> float:
    """他の Φ が既知の場合の Φ_j の QFI: [Q]_jj = 4β_j²(N−1)/N²。"""
    slot = phases.param_slot(j)
    n = phases.n_nodes
    return 4.0 * phases.betas[slot] ** 2 * (n - 1) / n ** 2


def nuisance_variance_bound(phases: PhaseSet, j: int, mu: int) -> float:
    """他の Φ も未知 (ニューサンス) の場合の Var[Φ_j] ≥ (1/μ)N/(2β_j²)。"""
    if mu < 1:
        raise InvalidResourceCount(f"mu must be >= 1 (got {mu}).")
    slot = phases.param_slot(j)
    beta = phases.betas[slot]
    if beta == 0.0:
        raise SingularBeta(f"beta_{j} = 0.")
    return phases.n_nodes / (2.0 * beta ** 2) / mu


def nuisance_degradation(n_nodes: int) -> float:
    """ニューサンス下界 / 既知パラメータ下界 = 2(N−1)/N。"""
    return 2.0 * (n_nodes - 1) / n_nodes


def per_parameter_bounds(phases: PhaseSet, mu: int = 1) -> dict:
    """各 Φ_j について既知パラメータ下界とニューサンス下界をまとめて返します。"""
    bounds = {}
    for j in range(2, phases.n_nodes + 1):
        bounds[j] = {
            "known": 1.0 / (mu * single_param_qfi(phases, j)),
            "nuisance": nuisance_variance_bound(phases, j, mu),
        }
    return bounds
