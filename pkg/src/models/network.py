from enum import Enum
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..exceptions import ConfigInvalid, IndexOutOfRange, NonPositiveInput, SingularBeta


class CaseId(str, Enum):
    """推定シナリオ (駆動振幅差の推定 / 結合強度差の推定)。"""
    CASE1 = "case1"
    CASE2 = "case2"

    @classmethod
    def parse(cls, value) -> "CaseId":
        if isinstance(value, CaseId):
            return value
        text = str(value).strip().lower()
        aliases = {"1": cls.CASE1, "case1": cls.CASE1, "2": cls.CASE2, "case2": cls.CASE2}
        if text not in aliases:
            raise ConfigInvalid(f"Unknown case id '{value}' (expected 1 or 2).")
        return aliases[text]


class NetworkConfig(BaseModel):
    """N ノードのネットワーク設定 (全て無次元量)。

    couplings は k_j = k̃_j/Ω、drivings は E_j = Ẽ_j/Ω。
    lambda_ / lambda_prime は Λ̂_j の固有値 λ, λ′。
    """
    model_config = ConfigDict(frozen=True)

    n_nodes: int
    lambda_: float
    lambda_prime: float
    couplings: Tuple[float, ...]
    drivings: Tuple[float, ...]
    alpha: complex = 0j

    @field_validator("alpha", mode="before")
    @classmethod
    def _coerce_alpha(cls, value):
        return complex(value)

    @model_validator(mode="after")
    def _check_invariants(self):
        if self.n_nodes < 2:
            raise ConfigInvalid(f"n_nodes must be >= 2 (got {self.n_nodes}).")
        if len(self.couplings) != self.n_nodes or len(self.drivings) != self.n_nodes:
            raise ConfigInvalid(
                f"couplings/drivings must have n_nodes={self.n_nodes} entries "
                f"(got {len(self.couplings)} and {len(self.drivings)})."
            )
        if self.lambda_ == self.lambda_prime:
            raise ConfigInvalid("lambda must differ from lambda_prime (QFIM would be singular).")
        return self

    @property
    def delta_lambda(self) -> float:
        return self.lambda_ - self.lambda_prime

    @property
    def sum_lambda(self) -> float:
        return self.lambda_ + self.lambda_prime

    def node_slot(self, node: int) -> int:
        """1 始まりのノード番号を配列インデックスに変換します。"""
        if not 1 <= node <= self.n_nodes:
            raise IndexOutOfRange(f"node index {node} outside 1..{self.n_nodes}.")
        return node - 1


class PhaseSet(BaseModel):
    """ストロボ時刻の状態を推定理論的に縮約した {β_j, Φ_j} (j = 2..N)。"""
    model_config = ConfigDict(frozen=True)

    case_id: CaseId
    betas: Tuple[float, ...]
    phis: Tuple[float, ...]
    # Case 2 のみ: k_j⁺ = k_1 + k_j (ニューサンス量)
    k_plus: Optional[Tuple[float, ...]] = None

    @model_validator(mode="after")
    def _check_invariants(self):
        if len(self.betas) == 0:
            raise ConfigInvalid("PhaseSet needs at least one parameter (N >= 2).")
        if len(self.betas) != len(self.phis):
            raise ConfigInvalid(
                f"betas and phis length mismatch ({len(self.betas)} vs {len(self.phis)})."
            )
        zero = [j + 2 for j, beta in enumerate(self.betas) if beta == 0.0]
        if zero:
            raise SingularBeta(f"beta_j = 0 for nodes {zero}; the Fisher matrix is singular.")
        if self.case_id == CaseId.CASE1 and len(set(self.betas)) > 1:
            raise ConfigInvalid("Case 1 requires a node-independent beta.")
        return self

    @property
    def n_nodes(self) -> int:
        return len(self.betas) + 1

    @property
    def dim(self) -> int:
        return len(self.betas)

    def param_slot(self, node: int) -> int:
        """パラメータ Φ_node (node = 2..N) の行列インデックス。"""
        if not 2 <= node <= self.n_nodes:
            raise IndexOutOfRange(f"parameter index {node} outside 2..{self.n_nodes}.")
        return node - 2

    def with_phis(self, phis) -> "PhaseSet":
        return self.model_copy(update={"phis": tuple(float(p) for p in phis)})


class PlatformPreset(BaseModel):
    """実験プラットフォームのパラメータ (SI 単位)。"""
    model_config = ConfigDict(frozen=True)

    name: str
    omega: float  # rad/s
    mass: float  # kg
    coupling: float  # 無次元 k

    @model_validator(mode="after")
    def _check_positive(self):
        for field in ("omega", "mass", "coupling"):
            if getattr(self, field) <= 0:
                raise NonPositiveInput(f"{self.name}: {field} must be > 0.")
        return self
