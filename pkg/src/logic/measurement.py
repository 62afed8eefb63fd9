"""最適測定の構成: グラム・シュミット射影基底, 結果確率, CFIM, SLD 固有基底, 弱可換性。"""
import logging
import math
from typing import Optional, Sequence

import numpy as np

from ..exceptions import DimensionMismatch, ToleranceFailure
from ..models.network import PhaseSet
from ..models.states import FisherKind, FisherMatrix, ProjectorSet
from ..settings import DEFAULT_PARAMS
from .estimation import finite_difference_derivatives, qfim_analytic
from .probe import branch_coefficients

logger = logging.getLogger(__name__)


def gram_schmidt_basis(n_nodes: int, betas: Sequence[float], reference_phases: Sequence[float]) -> ProjectorSet:
    """参照位相 ϑ_j を持つ射影基底 {|Σ⟩, |u_1⟩, …, |u_{N−1}⟩} を構成します。

    位相付き基底 |j̃⟩ = e^{iβ_jϑ_j}|j⟩ (ϑ_1 ≡ 0) について |Σ⟩ = Σ_j|j̃⟩/√N を先頭に置き、
    差分 |j̃⟩ − |1̃⟩ (j = 2..N) をノード順に直交化します。N = 3 では
    |u_1⟩ = (−|1̃⟩ + |2̃⟩)/√2, |u_2⟩ = (−|1̃⟩ − |2̃⟩ + 2|3̃⟩)/√6 になります。

    Args:
        n_nodes (int): ノード数 N。
        betas (Sequence[float]): β_2..β_N。
        reference_phases (Sequence[float]): ϑ_2..ϑ_N。

    Returns:
        ProjectorSet: 行が測定ベクトルの正規直交基底。
    """
    if len(reference_phases) != n_nodes - 1 or len(betas) != n_nodes - 1:
        raise DimensionMismatch(
            f"expected {n_nodes - 1} betas and reference phases "
            f"(got {len(betas)} and {len(reference_phases)})."
        )
    tags = np.ones(n_nodes, dtype=complex)
    tags[1:] = np.exp(1j * np.asarray(betas, dtype=float) * np.asarray(reference_phases, dtype=float))
    tagged = np.diag(tags)

    vectors = [tags / math.sqrt(n_nodes)]
    for j in range(1, n_nodes):
        candidate = tagged[j] - tagged[0]
        # 修正グラム・シュミット
        for u in vectors:
            candidate = candidate - np.vdot(u, candidate) * u
        vectors.append(candidate / np.linalg.norm(candidate))
    return ProjectorSet(vectors=np.array(vectors), reference_phases=tuple(float(t) for t in reference_phases))


def outcome_probabilities(basis: ProjectorSet, state: np.ndarray) -> np.ndarray:
    """p_a = |⟨u_a|ψ⟩|²。"""
    state = np.asarray(state)
    if state.shape != (basis.dim,):
        raise DimensionMismatch(f"state dimension {state.shape} does not match basis dimension {basis.dim}.")
    probabilities = np.abs(basis.vectors.conj() @ state) ** 2
    total = float(probabilities.sum())
    if abs(total - 1.0) > 1e-12 and basis.is_complete():
        raise ToleranceFailure(f"outcome probabilities sum to {total!r}.")
    return probabilities


def closed_form_probabilities_n3(phases: PhaseSet, reference_phases: Sequence[float]) -> np.ndarray:
    """N = 3 の (p_0, p_1, p_2) の閉形式。x = β_2(Φ_2 − ϑ_2), y = β_3(Φ_3 − ϑ_3)。"""
    if phases.n_nodes != 3:
        raise DimensionMismatch("closed-form probabilities are only defined for N = 3.")
    x = phases.betas[0] * (phases.phis[0] - reference_phases[0])
    y = phases.betas[1] * (phases.phis[1] - reference_phases[1])
    p0 = (3.0 + 2.0 * math.cos(x) + 2.0 * math.cos(y) + 2.0 * math.cos(x - y)) / 9.0
    p1 = 2.0 / 3.0 * math.sin(0.5 * x) ** 2
    p2 = (3.0 + math.cos(x) - 2.0 * math.cos(y) - 2.0 * math.cos(x - y)) / 9.0
    return np.array([p0, p1, p2])


def classical_fisher(probabilities: np.ndarray, gradients: np.ndarray, floor: float = 1e-300) -> np.ndarray:
    """[F]_ij = Σ_x ∂_i p_x ∂_j p_x / p_x。p_x = 0 の項 (0/0) は除外します。

    gradients は形 (パラメータ数, 結果数)。
    """
    mask = probabilities > floor
    weighted = gradients[:, mask] / probabilities[mask]
    f = weighted @ gradients[:, mask].T
    return 0.5 * (f + f.T)


def cfim(basis: ProjectorSet, phases: PhaseSet, epsilon: Optional[float] = None) -> FisherMatrix:
    """射影測定 basis の CFIM を Φ に関する中心差分で計算します。"""
    epsilon = DEFAULT_PARAMS["cfim_epsilon"] if epsilon is None else epsilon
    step = epsilon / float(np.max(np.abs(phases.betas)))

    def probabilities_at(phis):
        return outcome_probabilities(basis, branch_coefficients(phases.with_phis(phis)))

    phis = np.asarray(phases.phis)
    gradients = finite_difference_derivatives(probabilities_at, phis, step)
    entries = classical_fisher(probabilities_at(phis), gradients)
    return FisherMatrix(entries=entries, kind=FisherKind.CLASSICAL)


def saturated_cfim(phases: PhaseSet, deltas: Optional[Sequence[float]] = None) -> tuple[FisherMatrix, list]:
    """ϑ → Φ の極限 CFIM を δ 列の外挿で評価します。

    ϑ = Φ + δ/max|β| (全成分同じ δ) で CFIM を計算し、F(δ) = F_0 + cδ² を仮定して
    末尾 2 点からリチャードソン外挿します。δ = 0 では 2 つの結果が p = 0 となり
    0/0 になるため直接は評価しません。

    Returns:
        tuple: (外挿した CFIM, 各 δ の (δ, CFIM) リスト)。
    """
    deltas = tuple(DEFAULT_PARAMS["saturation_deltas"] if deltas is None else deltas)
    scale = float(np.max(np.abs(phases.betas)))
    phis = np.asarray(phases.phis)
    sequence = []
    for delta in deltas:
        refs = phis + delta / scale
        basis = gram_schmidt_basis(phases.n_nodes, phases.betas, refs)
        sequence.append((delta, cfim(basis, phases)))
    if len(sequence) < 2:
        return sequence[-1][1], sequence
    (d1, f1), (d2, f2) = sequence[-2], sequence[-1]
    ratio = (d1 / d2) ** 2
    extrapolated = (ratio * f2.entries - f1.entries) / (ratio - 1.0)
    return FisherMatrix(entries=extrapolated, kind=FisherKind.CLASSICAL), sequence


def information_gap(phases: PhaseSet, basis: ProjectorSet) -> np.ndarray:
    """Q − F の固有値 (全て ≥ 0 が情報不等式)。"""
    gap = qfim_analytic(phases).entries - cfim(basis, phases).entries
    return np.linalg.eigvalsh(0.5 * (gap + gap.T))


def state_derivative(phases: PhaseSet, k: int) -> np.ndarray:
    """|∂_kψ⟩ = (iβ_k/√N) e^{iβ_kΦ_k}|k⟩。"""
    slot = phases.param_slot(k)
    d = np.zeros(phases.n_nodes, dtype=complex)
    beta = phases.betas[slot]
    d[k - 1] = 1j * beta * np.exp(1j * beta * phases.phis[slot]) / math.sqrt(phases.n_nodes)
    return d


def sld_operator(phases: PhaseSet, k: int) -> np.ndarray:
    """純粋状態の SLD: L_k = 2(|∂_kψ⟩⟨ψ| + |ψ⟩⟨∂_kψ|)。

    成分表示では (2iβ_k/N)[e^{iβ_kΦ_k}|k⟩⟨1| + Σ_j e^{i(β_kΦ_k − β_jΦ_j)}|k⟩⟨j| − h.c.] に一致します。
    """
    psi = branch_coefficients(phases)
    d = state_derivative(phases, k)
    return 2.0 * (np.outer(d, psi.conj()) + np.outer(psi, d.conj()))


def weak_commutativity(phases: PhaseSet, k: int, k_prime: int) -> complex:
    """⟨ψ|[L_k, L_k′]|ψ⟩ を返します (0 なら SLD 下界が漸近的に達成可能)。"""
    for index in (k, k_prime):
        phases.param_slot(index)
    if k == k_prime:
        return 0j
    psi = branch_coefficients(phases)
    l_k = sld_operator(phases, k)
    l_kp = sld_operator(phases, k_prime)
    commutator = l_k @ l_kp - l_kp @ l_k
    return complex(np.vdot(psi, commutator @ psi))


def sld_eigenbasis(phases: PhaseSet, k: int) -> tuple[ProjectorSet, tuple[float, float]]:
    """Φ_k 推定用の SLD 固有基底 {|v_k^+⟩, |v_k^−⟩} と固有値 ±2β_k√(N−1)/N。

    |v_k^±⟩ = (1/√2)[(1 ∓ i/√(N−1))|ψ⟩ ± i√(N/(N−1)) e^{iβ_kΦ_k}|k⟩]。
    L_k|v_±⟩ = λ_±|v_±⟩ を 1e-10 で検証します。
    """
    slot = phases.param_slot(k)
    n = phases.n_nodes
    beta = phases.betas[slot]
    psi = branch_coefficients(phases)
    site = np.zeros(n, dtype=complex)
    site[k - 1] = np.exp(1j * beta * phases.phis[slot])
    root = math.sqrt(n - 1)

    vectors = []
    for sign in (1.0, -1.0):
        v = ((1.0 - sign * 1j / root) * psi + sign * 1j * math.sqrt(n / (n - 1)) * site) / math.sqrt(2.0)
        vectors.append(v)
    eigenvalues = (2.0 * beta * root / n, -2.0 * beta * root / n)

    l_k = sld_operator(phases, k)
    for v, value in zip(vectors, eigenvalues):
        residual = np.max(np.abs(l_k @ v - value * v))
        if residual > 1e-10 * max(1.0, abs(value)):
            raise ToleranceFailure(f"SLD eigenvector check failed for k={k} (residual {residual:.3e}).")
    return ProjectorSet(vectors=np.array(vectors), reference_phases=tuple(phases.phis)), eigenvalues


def sld_probability_plus(n_nodes: int, beta: float, phi_true: float, phi_ref: float) -> float:
    """SLD 基底 (Φ̃ = phi_ref で構成) の結果 + の確率 ½ + (√(N−1)/N) sin(β(Φ − Φ̃))。"""
    return 0.5 + math.sqrt(n_nodes - 1) / n_nodes * math.sin(beta * (phi_true - phi_ref))


def sld_phase_estimate(n_nodes: int, beta: float, phi_ref: float, fraction_plus: float) -> float:
    """観測頻度 p̂_+ から p_+ を解析的に反転した Φ の推定値 (識別窓 |β(Φ − Φ̃)| < π/2)。"""
    s = (fraction_plus - 0.5) * n_nodes / math.sqrt(n_nodes - 1)
    return phi_ref + math.asin(min(1.0, max(-1.0, s))) / beta


def single_param_cfi(phases: PhaseSet, k: int, phi_ref: float, phi_true: float) -> float:
    """SLD 基底の単一パラメータ CFI の閉形式。

    4β_k²(N−1)cos²[β_k(Φ̃−Φ)] / (N² − 4(N−1)sin²[β_k(Φ̃−Φ)])。Φ̃ = Φ で QFI に一致。
    N = 2 では分母が 4cos² となり、どの Φ̃ でも β_k² です。
    """
    slot = phases.param_slot(k)
    n = phases.n_nodes
    beta = phases.betas[slot]
    if n == 2:
        # β(Φ̃−Φ) = π/2 で 0/0 になるため極限値を返す
        return beta ** 2
    detuning = beta * (phi_ref - phi_true)
    return 4.0 * beta ** 2 * (n - 1) * math.cos(detuning) ** 2 / (n ** 2 - 4.0 * (n - 1) * math.sin(detuning) ** 2)
