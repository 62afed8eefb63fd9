"""数値状態のコンテナ (numpy 配列を保持する不変データクラス)。"""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..exceptions import DimensionMismatch, ToleranceFailure
from ..settings import DEFAULT_PARAMS


@dataclass(frozen=True)
class BranchState:
    """N 個のコヒーレント積ブランチの重ね合わせとしてのネットワーク状態。

    coefficients[j] はブランチ j の係数 c_j、amplitudes[j, m] はブランチ j
    における力学モード m のコヒーレント振幅。
    """
    coefficients: np.ndarray
    amplitudes: np.ndarray
    tau: float = 0.0

    def __post_init__(self):
        n = self.coefficients.shape[0]
        if self.amplitudes.shape != (n, n):
            raise DimensionMismatch(
                f"amplitudes must be {n}x{n} (got {self.amplitudes.shape})."
            )
        norm = float(np.sum(np.abs(self.coefficients) ** 2))
        if abs(norm - 1.0) > DEFAULT_PARAMS["norm_tolerance"]:
            raise ToleranceFailure(f"branch state norm {norm!r} deviates from 1.")

    @property
    def n_nodes(self) -> int:
        return self.coefficients.shape[0]


class FisherKind(str, Enum):
    QUANTUM = "quantum"
    CLASSICAL = "classical"


@dataclass(frozen=True)
class FisherMatrix:
    """対称半正定値な (N−1)×(N−1) フィッシャー情報行列。"""
    entries: np.ndarray
    kind: FisherKind

    def __post_init__(self):
        m = self.entries
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"Fisher matrix must be square (got {m.shape}).")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.T)) > 1e-12 * scale:
            raise ToleranceFailure(f"{self.kind.value} Fisher matrix is not symmetric.")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def is_psd(self, tolerance: float | None = None) -> bool:
        tol = DEFAULT_PARAMS["psd_tolerance"] if tolerance is None else tolerance
        scale = max(1.0, float(np.max(np.abs(self.entries))))
        return bool(np.min(self.eigenvalues()) >= -tol * scale)


@dataclass(frozen=True)
class ProjectorSet:
    """ブランチ基底 {|j⟩} 上の階数 1 射影測定。

    vectors の各行が正規化された測定ベクトル |u_a⟩。
    """
    vectors: np.ndarray
    reference_phases: tuple = field(default=())

    def __post_init__(self):
        v = self.vectors
        gram = v.conj() @ v.T
        if np.max(np.abs(gram - np.eye(v.shape[0]))) > 1e-12:
            raise ToleranceFailure("measurement vectors are not orthonormal.")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def n_outcomes(self) -> int:
        return self.vectors.shape[0]

    def projectors(self) -> np.ndarray:
        return np.einsum("ai,aj->aij", self.vectors, self.vectors.conj())

    def is_complete(self, tolerance: float = 1e-12) -> bool:
        total = self.projectors().sum(axis=0)
        return bool(np.max(np.abs(total - np.eye(self.dim))) <= tolerance)


@dataclass(frozen=True)
class FockState:
    """分岐空間 ⊗ (Fock 次元 D)^⊗N 上の切断数値状態 (オラクル専用)。"""
    n_nodes: int
    fock_dim: int
    vector: np.ndarray
    tail_mass: float
    tau: float = 0.0

    def __post_init__(self):
        expected = self.n_nodes * self.fock_dim ** self.n_nodes
        if self.vector.shape != (expected,):
            raise DimensionMismatch(
                f"Fock vector must have length {expected} (got {self.vector.shape})."
            )

    @property
    def is_valid(self) -> bool:
        return self.tail_mass < DEFAULT_PARAMS["tail_mass_limit"]

    def branch_blocks(self) -> np.ndarray:
        """(N, D^N) 形に整形したビュー。行がブランチ。"""
        return self.vector.reshape(self.n_nodes, self.fock_dim ** self.n_nodes)
