"""モンテカルロによるクラメール・ラオ下界の達成度の検証。

射影測定の結果を多項分布からサンプリングし、最尤推定 (Nelder-Mead) で位相を
推定します。乱数は PCG64 (numpy.random.Generator) を seed + 試行番号で初期化します。
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy.optimize import minimize

from ..exceptions import (
    AmbiguousLikelihood,
    InvalidDistribution,
    InvalidResourceCount,
    NotConverged,
    ToleranceFailure,
)
from ..models.network import CaseId, NetworkConfig, PhaseSet
from ..models.states import ProjectorSet
from ..settings import DEFAULT_PARAMS
from .estimation import qfim_analytic, single_param_qfi, trace_inverse_qfim
from .measurement import gram_schmidt_basis, sld_eigenbasis, sld_phase_estimate, sld_probability_plus
from .parallel import parallel_map
from .probe import branch_coefficients, case_phases

logger = logging.getLogger(__name__)

MIN_MU = 1_000
MIN_TRIALS = 100


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def sample_outcomes(
    probabilities: Sequence[float],
    shots: int,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """多項分布から結果のカウントを生成します。

    Raises:
        InvalidDistribution: 負の確率、合計が 1 でない、または shots < 1 の場合。
    """
    p = np.asarray(probabilities, dtype=float)
    if shots < 1:
        raise InvalidDistribution(f"shots must be >= 1 (got {shots}).")
    if p.ndim != 1 or p.size == 0 or np.any(~np.isfinite(p)):
        raise InvalidDistribution("probabilities must be a non-empty finite vector.")
    if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise InvalidDistribution(f"not a probability distribution (sum={p.sum()!r}, min={p.min()!r}).")
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    rng = rng if rng is not None else make_rng(0 if seed is None else seed)
    return rng.multinomial(shots, p)


def _negative_log_likelihood(settings, template: PhaseSet, phis: np.ndarray) -> float:
    psi = branch_coefficients(template.with_phis(phis))
    total = 0.0
    for basis, counts in settings:
        p = np.abs(basis.vectors.conj() @ psi) ** 2
        # 空のセルは寄与しない
        observed = counts > 0
        total -= float(np.sum(counts[observed] * np.log(np.maximum(p[observed], 1e-300))))
    return total


def _local_search(objective, start: np.ndarray, scale: np.ndarray):
    # fatol は対数尤度の大きさに対する相対値
    fatol = DEFAULT_PARAMS["mle_fatol"] * max(1.0, abs(objective(start)))
    dim = start.size
    simplex = np.vstack([start] + [start + 0.1 * scale[i] * np.eye(dim)[i] for i in range(dim)])
    result = minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": DEFAULT_PARAMS["mle_xatol"],
            "fatol": fatol,
            "maxiter": DEFAULT_PARAMS["mle_maxiter"],
            "maxfev": 4 * DEFAULT_PARAMS["mle_maxiter"],
        },
    )
    if not result.success:
        raise NotConverged(f"MLE did not converge: {result.message}")
    return result


def mle_estimate(
    settings: Sequence[tuple[ProjectorSet, np.ndarray]],
    template: PhaseSet,
    init: Sequence[float],
    free: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """多項対数尤度を最大化する Φ を init からの局所探索で求めます。

    Args:
        settings: (測定基底, カウント) の組のリスト。
        template (PhaseSet): β の構造。
        init (Sequence[float]): 初期値 (識別窓 |β_j(Φ_j − init_j)| < π/2 の内側)。
        free (Optional[Sequence[int]]): 推定するパラメータのノード番号 (省略時は全て)。
            それ以外の成分は init の値に固定します。

    Returns:
        np.ndarray: 全成分の推定値 Φ̂_2..Φ̂_N。

    Raises:
        NotConverged: 反復上限に達した場合。
        AmbiguousLikelihood: 参照位相に関する鏡映点からの探索が、異なる点で
            1e-9 以内の同じ尤度に到達した場合。
    """
    init = np.asarray(init, dtype=float)
    slots = [template.param_slot(j) for j in free] if free is not None else list(range(template.dim))
    betas = np.abs(np.asarray(template.betas))[slots]
    settings = [(basis, np.asarray(counts)) for basis, counts in settings]

    def full(u):
        phis = init.copy()
        phis[slots] = u / betas
        return phis

    def objective(u):
        return _negative_log_likelihood(settings, template, full(u))

    start = init[slots] * betas
    best = _local_search(objective, start, np.ones_like(start))

    # 参照位相の平均に関する鏡映点から再探索
    refs = np.mean([np.asarray(b.reference_phases, dtype=float) for b, _ in settings], axis=0)
    mirrored_start = 2.0 * refs[slots] * betas - best.x
    mirrored = _local_search(objective, mirrored_start, np.ones_like(start))
    tolerance = DEFAULT_PARAMS["ambiguity_tolerance"] * max(1.0, abs(best.fun))
    distinct = np.max(np.abs(mirrored.x - best.x)) > 1e-4
    if distinct and abs(mirrored.fun - best.fun) <= tolerance:
        raise AmbiguousLikelihood(
            f"two likelihood maxima score within {tolerance:.1e}: {full(best.x)} and {full(mirrored.x)}."
        )
    if mirrored.fun < best.fun:
        best = mirrored
    return full(best.x)


@dataclass
class SaturationReport:
    """二段階適応実験の結果。"""
    kind: str
    case_id: str
    n_nodes: int
    mu: int
    trials: int
    seed: int
    truth: np.ndarray
    estimates: np.ndarray
    bound_trace: float
    extra: dict = field(default_factory=dict)

    @property
    def covariance(self) -> np.ndarray:
        return np.atleast_2d(np.cov(self.estimates, rowvar=False, ddof=1))

    @property
    def empirical_trace(self) -> float:
        return float(np.trace(self.covariance))

    @property
    def ratio(self) -> float:
        return self.empirical_trace / self.bound_trace

    @property
    def bias(self) -> np.ndarray:
        return self.estimates.mean(axis=0) - self.truth

    @property
    def standard_error(self) -> np.ndarray:
        return np.sqrt(np.diag(self.covariance) / self.trials)

    def squared_errors(self) -> np.ndarray:
        return np.sum((self.estimates - self.truth) ** 2, axis=1)

    def to_frame(self) -> pd.DataFrame:
        rows = [{
            "kind": self.kind,
            "case": self.case_id,
            "n_nodes": self.n_nodes,
            "mu": self.mu,
            "trials": self.trials,
            "seed": self.seed,
            "empirical_trace": self.empirical_trace,
            "bound_trace": self.bound_trace,
            "ratio": self.ratio,
            "ratio_lower_limit": standard_error_bound(self.trials),
            "max_abs_bias": float(np.max(np.abs(self.bias))),
            "max_standard_error": float(np.max(self.standard_error)),
        }]
        return pd.DataFrame(rows)


def _check_budget(mu: int, trials: int):
    if mu < MIN_MU:
        raise InvalidResourceCount(f"mu must be >= {MIN_MU} for the asymptotic regime (got {mu}).")
    if trials < MIN_TRIALS:
        raise InvalidResourceCount(f"trials must be >= {MIN_TRIALS} (got {trials}).")


def _detuned_pair(phases: PhaseSet, center: np.ndarray, detuning: float) -> list[ProjectorSet]:
    shift = detuning / float(np.max(np.abs(phases.betas)))
    return [gram_schmidt_basis(phases.n_nodes, phases.betas, center + sign * shift) for sign in (1.0, -1.0)]


def _measure(bases, psi, shots_each, rng):
    settings = []
    for basis in bases:
        p = np.abs(basis.vectors.conj() @ psi) ** 2
        settings.append((basis, sample_outcomes(p, shots_each, rng=rng)))
    return settings


def two_stage_trial(
    phases: PhaseSet,
    mu: int,
    seed: int,
    init: Optional[Sequence[float]] = None,
    coarse_fraction: Optional[float] = None,
    detuning: Optional[float] = None,
) -> np.ndarray:
    """1 試行分の二段階推定。

    第 1 段: init ± δ の 2 つの基底に coarse_fraction·μ ショットを等分。
    第 2 段: 第 1 段の推定値 ± δ に残りを等分し、全カウントで同時最尤推定。
    """
    coarse_fraction = DEFAULT_PARAMS["coarse_fraction"] if coarse_fraction is None else coarse_fraction
    detuning = DEFAULT_PARAMS["coarse_detuning"] if detuning is None else detuning
    truth = np.asarray(phases.phis, dtype=float)
    init = truth if init is None else np.asarray(init, dtype=float)
    rng = make_rng(seed)
    psi = branch_coefficients(phases)

    coarse_shots = int(round(coarse_fraction * mu))
    stage1 = _measure(_detuned_pair(phases, init, detuning), psi, coarse_shots // 2, rng)
    coarse = mle_estimate(stage1, phases, init)

    fine_shots = mu - 2 * (coarse_shots // 2)
    stage2 = _measure(_detuned_pair(phases, coarse, detuning), psi, fine_shots // 2, rng)
    return mle_estimate(stage1 + stage2, phases, coarse)


def saturation_experiment(
    config: NetworkConfig,
    case_id,
    mu: int,
    trials: int,
    seed: int,
    coarse_fraction: Optional[float] = None,
) -> SaturationReport:
    """二段階適応測定を trials 回繰り返し、Tr[Cov] と (1/μ)Tr[Q⁻¹] を比較します。"""
    _check_budget(mu, trials)
    phases = case_phases(config, case_id)
    logger.info(f"Saturation experiment: N={phases.n_nodes}, mu={mu}, trials={trials}, seed={seed}")

    def run_trial(trial):
        return two_stage_trial(phases, mu, seed + trial, coarse_fraction=coarse_fraction)

    estimates = np.array(parallel_map(run_trial, range(trials)))
    report = SaturationReport(
        kind="saturation",
        case_id=CaseId.parse(case_id).value,
        n_nodes=phases.n_nodes,
        mu=mu,
        trials=trials,
        seed=seed,
        truth=np.asarray(phases.phis, dtype=float),
        estimates=estimates,
        bound_trace=trace_inverse_qfim(phases) / mu,
        extra={"qfim": qfim_analytic(phases).entries},
    )
    logger.info(f"Saturation experiment finished: ratio={report.ratio:.4f}")
    return report


def single_parameter_experiment(
    phases: PhaseSet,
    k: int,
    mu: int,
    trials: int,
    seed: int,
    detuning: float = 0.0,
    use_mle: bool = False,
) -> SaturationReport:
    """他の位相を既知として Φ_k のみを SLD 固有基底で推定します。

    基底は Φ̃_k = Φ_k + detuning/β_k で構成し、p̂_+ の解析的反転
    (use_mle=True なら最尤推定) で推定値を得ます。
    """
    _check_budget(mu, trials)
    slot = phases.param_slot(k)
    beta = phases.betas[slot]
    truth = np.asarray(phases.phis, dtype=float)
    ref_phis = truth.copy()
    ref_phis[slot] += detuning / beta
    basis, _ = sld_eigenbasis(phases.with_phis(ref_phis), k)
    psi = branch_coefficients(phases)
    probabilities = np.abs(basis.vectors.conj() @ psi) ** 2
    p_plus = sld_probability_plus(phases.n_nodes, beta, truth[slot], ref_phis[slot])
    if abs(probabilities[0] - p_plus) > 1e-10:
        raise ToleranceFailure(f"SLD outcome probability {probabilities[0]!r} differs from closed form {p_plus!r}.")

    def run_trial(trial):
        counts = sample_outcomes(probabilities, mu, rng=make_rng(seed + trial))
        if use_mle:
            return mle_estimate([(basis, counts)], phases, ref_phis, free=[k])[slot]
        return sld_phase_estimate(phases.n_nodes, beta, ref_phis[slot], counts[0] / mu)

    estimates = np.array(parallel_map(run_trial, range(trials)))[:, None]
    return SaturationReport(
        kind="single_parameter",
        case_id=phases.case_id.value,
        n_nodes=phases.n_nodes,
        mu=mu,
        trials=trials,
        seed=seed,
        truth=truth[[slot]],
        estimates=estimates,
        bound_trace=1.0 / (mu * single_param_qfi(phases, k)),
        extra={"parameter": k, "detuning": detuning, "p_plus": p_plus},
    )


def mu_trend(config: NetworkConfig, case_id, mus: Sequence[int], trials: int, seed: int) -> pd.DataFrame:
    """複数の μ について saturation_experiment を実行し、比の推移を返します。"""
    frames = [saturation_experiment(config, case_id, mu, trials, seed).to_frame() for mu in mus]
    return pd.concat(frames, ignore_index=True)


def standard_error_bound(trials: int) -> float:
    """比が統計的揺らぎの範囲で下回ってよい下限 1 − 3/√trials。"""
    return 1.0 - 3.0 / math.sqrt(trials)
