"""切断 Fock 空間による数値オラクル。

状態空間はブランチ番号 j (N 個) ⊗ N 個の力学モード (各 D 準位)。ベクトルの
インデックスは branch·D^N + (n_1, …, n_N) (モード 1 が最上位桁) です。
ハミルトニアンはブランチごとにブロック対角で、各ブロックは単一モード
ハミルトニアンのクロネッカー和になります。
"""
import logging
import math
from functools import reduce

import numpy as np
from scipy import sparse
from scipy.linalg import eigh
from scipy.special import gammaln

from ..exceptions import ConfigInvalid, DimensionMismatch, DimensionTooLarge, ToleranceFailure, TruncationInsufficient
from ..models.network import NetworkConfig
from ..models.states import BranchState, FockState
from ..settings import DEFAULT_PARAMS

logger = logging.getLogger(__name__)


def _check_dimensions(n_nodes: int, fock_dim: int) -> int:
    if fock_dim < DEFAULT_PARAMS["min_fock_dim"]:
        raise ConfigInvalid(f"fock_dim must be >= {DEFAULT_PARAMS['min_fock_dim']} (got {fock_dim}).")
    size = n_nodes * fock_dim ** n_nodes
    if size > DEFAULT_PARAMS["max_fock_entries"]:
        raise DimensionTooLarge(
            f"N*D^N = {size} exceeds the cap of {DEFAULT_PARAMS['max_fock_entries']} entries."
        )
    return size


def branch_shifts(config: NetworkConfig) -> np.ndarray:
    """f[j, m] = k_m Ξ − E_m (Ξ = λ if m == j else λ′)。"""
    k = np.asarray(config.couplings)
    e = np.asarray(config.drivings)
    f = np.tile(k * config.lambda_prime - e, (config.n_nodes, 1))
    np.fill_diagonal(f, k * config.lambda_ - e)
    return f


def mode_hamiltonian(shift: float, fock_dim: int) -> np.ndarray:
    """単一モードの b†b − f(b + b†) (D×D 実対称)。"""
    off = -shift * np.sqrt(np.arange(1, fock_dim))
    return np.diag(np.arange(fock_dim, dtype=float)) + np.diag(off, 1) + np.diag(off, -1)


def hamiltonian_matrix(config: NetworkConfig, fock_dim: int) -> sparse.csr_matrix:
    """Σ_j H_j/(Ωħ) をブランチ ⊗ Fock 積基底の疎行列として返します。

    Raises:
        ConfigInvalid: D < 4 の場合。
        DimensionTooLarge: N·D^N が上限を超える場合。
        ToleranceFailure: エルミート性が 1e-14 で成り立たない場合。
    """
    n = config.n_nodes
    _check_dimensions(n, fock_dim)
    shifts = branch_shifts(config)
    blocks = []
    for j in range(n):
        block = None
        for m in range(n):
            term = sparse.csr_matrix(mode_hamiltonian(shifts[j, m], fock_dim))
            left = sparse.identity(fock_dim ** m, format="csr")
            right = sparse.identity(fock_dim ** (n - m - 1), format="csr")
            term = sparse.kron(sparse.kron(left, term), right, format="csr")
            block = term if block is None else block + term
        blocks.append(block)
    h = sparse.block_diag(blocks, format="csr")
    asym = abs(h - h.conj().T)
    if asym.nnz and asym.max() > 1e-14:
        raise ToleranceFailure("Hamiltonian matrix is not Hermitian.")
    return h


def coherent_vector(alpha: complex, fock_dim: int, normalize: bool = True) -> np.ndarray:
    """|α⟩ を D 準位に展開します。係数は対数階乗で評価します。"""
    levels = np.arange(fock_dim)
    if alpha == 0:
        vec = np.zeros(fock_dim, dtype=complex)
        vec[0] = 1.0
        return vec
    log_mag = -0.5 * abs(alpha) ** 2 + levels * math.log(abs(alpha)) - 0.5 * gammaln(levels + 1)
    vec = np.exp(log_mag) * np.exp(1j * levels * np.angle(alpha))
    if normalize:
        vec = vec / np.linalg.norm(vec)
    return vec


class FockPropagator:
    """単一モードハミルトニアンのスペクトルをシフト値ごとにキャッシュする伝搬器。

    ブロック内の初期状態は積状態なので、各モードを独立に
    V diag(e^{−iEτ}) V†|α⟩ で時間発展させてからクロネッカー積で組み立てます。
    """

    def __init__(self, config: NetworkConfig, fock_dim: int):
        self.config = config
        self.fock_dim = fock_dim
        self.size = _check_dimensions(config.n_nodes, fock_dim)
        self.shifts = branch_shifts(config)
        self.initial_mode = coherent_vector(config.alpha, fock_dim)
        self._spectra = {}

    def _spectrum(self, shift: float):
        key = float(shift)
        if key not in self._spectra:
            energies, vectors = eigh(mode_hamiltonian(key, self.fock_dim))
            self._spectra[key] = (energies, vectors, vectors.conj().T @ self.initial_mode)
        return self._spectra[key]

    def mode_vector(self, branch: int, mode: int, tau: float) -> np.ndarray:
        energies, vectors, weights = self._spectrum(self.shifts[branch, mode])
        return vectors @ (np.exp(-1j * energies * tau) * weights)

    def evolve(self, tau: float) -> np.ndarray:
        n = self.config.n_nodes
        blocks = []
        for j in range(n):
            modes = [self.mode_vector(j, m, tau) for m in range(n)]
            blocks.append(reduce(np.kron, modes) / math.sqrt(n))
        return np.concatenate(blocks)


def tail_mass(vector: np.ndarray, n_nodes: int, fock_dim: int) -> float:
    """各モードの周辺分布における上位 2 準位の重みの最大値。"""
    probs = (np.abs(vector) ** 2).reshape((n_nodes,) + (fock_dim,) * n_nodes)
    worst = 0.0
    for m in range(n_nodes):
        axes = tuple(a for a in range(n_nodes + 1) if a != m + 1)
        marginal = probs.sum(axis=axes)
        worst = max(worst, float(marginal[-2:].sum()))
    return worst


def evolve_numeric(
    config: NetworkConfig,
    fock_dim: int,
    tau: float,
    propagator: FockPropagator | None = None,
    check_truncation: bool = True,
) -> FockState:
    """切断空間で exp(−iHτ)|ψ(0)⟩ を計算します。

    Args:
        config (NetworkConfig): ネットワーク設定。
        fock_dim (int): モードあたりの Fock 準位数 D。
        tau (float): 無次元時間 Ωt。
        propagator (FockPropagator | None): τ 掃引で使い回す伝搬器。
        check_truncation (bool): False なら tail_mass が大きくても例外にしない。

    Returns:
        FockState: 時間発展後の状態と tail_mass。

    Raises:
        TruncationInsufficient: tail_mass ≥ 1e-8 の場合。
        ToleranceFailure: ノルムが 1e-10 を超えて変化した場合。
    """
    propagator = propagator or FockPropagator(config, fock_dim)
    vector = propagator.evolve(tau)
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > 1e-10:
        raise ToleranceFailure(f"norm drifted to {norm!r} at tau={tau:.6f}.")
    mass = tail_mass(vector, config.n_nodes, fock_dim)
    state = FockState(n_nodes=config.n_nodes, fock_dim=fock_dim, vector=vector, tail_mass=mass, tau=tau)
    if not state.is_valid:
        if check_truncation:
            raise TruncationInsufficient(
                f"tail mass {mass:.3e} >= {DEFAULT_PARAMS['tail_mass_limit']:g} at D={fock_dim}; increase fock_dim."
            )
        logger.warning(f"Truncation flag: tail mass {mass:.3e} at D={fock_dim}, tau={tau:.4f}")
    return state


def project_branch_state(analytic: BranchState, fock_dim: int) -> np.ndarray:
    """閉形式の状態を切断 Fock 基底に射影します (再規格化なし)。"""
    n = analytic.n_nodes
    blocks = []
    for j in range(n):
        modes = [coherent_vector(a, fock_dim, normalize=False) for a in analytic.amplitudes[j]]
        blocks.append(analytic.coefficients[j] * reduce(np.kron, modes))
    return np.concatenate(blocks)


def fidelity(numeric: FockState, analytic: BranchState) -> float:
    """|⟨ψ_num|ψ_branch⟩|²。"""
    if numeric.n_nodes != analytic.n_nodes:
        raise DimensionMismatch(
            f"numeric state has {numeric.n_nodes} nodes, analytic state has {analytic.n_nodes}."
        )
    if abs(numeric.tau - analytic.tau) > 1e-12 * max(1.0, abs(numeric.tau)):
        raise DimensionMismatch(f"states are at different times ({numeric.tau} vs {analytic.tau}).")
    projected = project_branch_state(analytic, numeric.fock_dim)
    value = abs(np.vdot(numeric.vector, projected)) ** 2
    return float(min(1.0, max(0.0, value)))


def purity_numeric(state: FockState) -> float:
    """全ての力学モードをトレースアウトした Tr[ρ_probe²]。"""
    blocks = state.branch_blocks()
    rho = blocks @ blocks.conj().T
    trace = float(np.real(np.trace(rho)))
    return float(np.real(np.sum(np.abs(rho) ** 2))) / trace ** 2


def mechanical_return_overlap(state: FockState, alpha: complex) -> float:
    """各モードの縮約状態と |α⟩ の重なり ⟨α|ρ_m|α⟩ の最小値。"""
    n, d = state.n_nodes, state.fock_dim
    target = coherent_vector(alpha, d).conj()
    tensor = state.vector.reshape((n,) + (d,) * n)
    overlaps = []
    for m in range(n):
        moved = np.moveaxis(tensor, m + 1, -1).reshape(-1, d)
        overlaps.append(float(np.sum(np.abs(moved @ target) ** 2)))
    return min(overlaps)


def energy_expectation(hamiltonian: sparse.spmatrix, state: FockState) -> float:
    """⟨ψ|H|ψ⟩ (実部)。"""
    return float(np.real(np.vdot(state.vector, hamiltonian @ state.vector)))
