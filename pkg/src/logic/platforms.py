"""物理単位への換算: プラットフォームのプリセット、零点振幅、SI 単位の下界。

周波数 Ω は角周波数 (rad/s) として扱います (settings.FREQUENCY_INTERPRETATION)。
"""
import logging
import math
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from ..exceptions import InvalidResourceCount, NonPositiveInput, UnknownPlatform
from ..models.network import CaseId, PhaseSet, PlatformPreset
from ..settings import HBAR
from .estimation import single_param_qfi, trace_inverse_qfim
from .parallel import parallel_map

logger = logging.getLogger(__name__)

PRESETS = {
    "fabry-perot": PlatformPreset(name="fabry-perot", omega=1e3, mass=1e-6, coupling=2.3),
    "levitated": PlatformPreset(name="levitated", omega=1e2, mass=1e-14, coupling=1963.0),
    "cold-atoms": PlatformPreset(name="cold-atoms", omega=1e2, mass=1e-25, coupling=2.3e6),
    # 結合の大きさは文献値がないため 1 とする
    "spin-mechanical": PlatformPreset(name="spin-mechanical", omega=1e3, mass=1e-15, coupling=1.0),
}

OPTOMECHANICAL = ("fabry-perot", "levitated", "cold-atoms")


def get_preset(name: str) -> PlatformPreset:
    key = name.strip().lower()
    if key not in PRESETS:
        raise UnknownPlatform(f"Unknown platform '{name}' (known: {', '.join(PRESETS)}).")
    return PRESETS[key]


def zero_point(mass: float, omega: float) -> float:
    """零点揺らぎ振幅 x_0 = √(ħ/(2MΩ)) [m]。"""
    if mass <= 0 or omega <= 0:
        raise NonPositiveInput(f"mass and omega must be > 0 (got mass={mass}, omega={omega}).")
    return math.sqrt(HBAR / (2.0 * mass * omega))


def acceleration_scale(preset: PlatformPreset) -> float:
    """無次元駆動 E から加速度への換算係数 Ωħ/(x_0M) [m/s²]。"""
    return preset.omega * HBAR / (zero_point(preset.mass, preset.omega) * preset.mass)


def _check_resources(n_nodes: int, n_exc: int, mu: int, min_exc: int = 1):
    if n_nodes < 2:
        raise InvalidResourceCount(f"n_nodes must be >= 2 (got {n_nodes}).")
    if n_exc < min_exc:
        raise InvalidResourceCount(f"n_exc must be >= {min_exc} (got {n_exc}).")
    if mu < 1:
        raise InvalidResourceCount(f"mu must be >= 1 (got {mu}).")


def resource_phase_set(
    case_id,
    coupling: float,
    n_nodes: int,
    n_exc: int,
    couplings: Optional[Sequence[float]] = None,
) -> PhaseSet:
    """励起数 N_exc に対応する {β_j} を組み立てます (Φ_j は 0)。

    Case 1 は λ = N_exc, λ′ = 0 で β = 4πkN_exc。
    Case 2 は λ = N_exc/2, λ′ = 0 で β_j = −(π/2)N_exc²k_j⁺。
    couplings を省略すると k_j⁺ = 2k とします。
    """
    case_id = CaseId.parse(case_id)
    others = n_nodes - 1
    if case_id == CaseId.CASE1:
        beta = 4.0 * math.pi * coupling * n_exc
        return PhaseSet(case_id=case_id, betas=(beta,) * others, phis=(0.0,) * others)
    if couplings is None:
        k_plus = (2.0 * coupling,) * others
    else:
        if len(couplings) != n_nodes:
            raise InvalidResourceCount(f"expected {n_nodes} couplings (got {len(couplings)}).")
        k_plus = tuple(couplings[0] + k for k in couplings[1:])
    half = 0.5 * n_exc
    betas = tuple(2.0 * math.pi * (-half) * half * kp for kp in k_plus)
    return PhaseSet(case_id=case_id, betas=betas, phis=(0.0,) * others, k_plus=k_plus)


def platform_phase_set(preset: PlatformPreset, case_id, n_nodes: int, n_exc: int) -> PhaseSet:
    return resource_phase_set(case_id, preset.coupling, n_nodes, n_exc)


def case1_gravimetry_bound(preset: PlatformPreset, n_nodes: int, n_exc: int, mu: int) -> float:
    """Σ_j Var[g_j⁻] の下界 [m²/s⁴]。

    (1/μ)Tr[Q⁻¹](Ωħ/(x_0M))², Tr[Q⁻¹] = N(N−1)/(32π²k²N_exc²)。
    """
    _check_resources(n_nodes, n_exc, mu)
    phases = platform_phase_set(preset, CaseId.CASE1, n_nodes, n_exc)
    return trace_inverse_qfim(phases) * acceleration_scale(preset) ** 2 / mu


def case2_coupling_bound(
    omega: float,
    coupling_scale: float,
    n_nodes: int,
    n_exc: int,
    mu: int,
    couplings: Optional[Sequence[float]] = None,
) -> float:
    """Σ_j Var[k̃_j⁻] の下界 [Hz²] (k̃ = kΩ)。

    couplings を全て与えると厳密形 (2Ω²N/(π²N_exc⁴))Σ(k_j⁺)⁻²/μ、
    省略すると k_j⁺ ∼ 2k の近似 Ω²N(N−1)/(2π²k²N_exc⁴)/μ を返します。

    Raises:
        InvalidResourceCount: n_exc < 2 (λ′ = −λ で QFIM が特異), n_nodes < 2, mu < 1。
    """
    _check_resources(n_nodes, n_exc, mu, min_exc=2)
    if omega <= 0 or coupling_scale <= 0:
        raise NonPositiveInput(f"omega and coupling must be > 0 (got {omega}, {coupling_scale}).")
    phases = resource_phase_set(CaseId.CASE2, coupling_scale, n_nodes, n_exc, couplings)
    return trace_inverse_qfim(phases) * omega ** 2 / mu


def rms_error(bound: float) -> float:
    """Δ_RMS = √(Tr Cov)。"""
    return math.sqrt(bound)


def _excitation_power(case_id: CaseId) -> int:
    return 2 if case_id == CaseId.CASE1 else 4


def resource_ratio(case_id, n_nodes: int, n_exc: int) -> float:
    """ネットワーク規模と励起数の競合 N(N−1)/N_exc^r (r = 2: Case 1, r = 4: Case 2)。"""
    case_id = CaseId.parse(case_id)
    _check_resources(n_nodes, n_exc, 1)
    return n_nodes * (n_nodes - 1) / n_exc ** _excitation_power(case_id)


def resource_tradeoff(case_id, n_nodes: int) -> int:
    """N(N−1)/N_exc^r ≤ 1 を満たす最小の N_exc (r = 2: Case 1, r = 4: Case 2)。"""
    case_id = CaseId.parse(case_id)
    if n_nodes < 2:
        raise InvalidResourceCount(f"n_nodes must be >= 2 (got {n_nodes}).")
    power = _excitation_power(case_id)
    target = n_nodes * (n_nodes - 1)
    n_exc = 1
    while target > n_exc ** power:
        n_exc += 1
    return n_exc


def single_param_qfi_scaling(case_id, coupling: float, n_nodes: int, n_exc: int) -> float:
    """他のパラメータを既知とした Φ_2 の QFI 4β²(N−1)/N²。

    Case 1 では N_exc², Case 2 では N_exc⁴ に比例します。
    """
    phases = resource_phase_set(case_id, coupling, n_nodes, n_exc)
    return single_param_qfi(phases, 2)


def _bound_row(point: tuple) -> dict:
    panel, case_id, name, n_nodes, n_exc, mu = point
    row = {
        "panel": panel,
        "platform": name,
        "n_nodes": n_nodes,
        "n_exc": n_exc,
        "mu": mu,
        "resource_ratio": resource_ratio(case_id, n_nodes, n_exc),
        "bound": math.nan,
        "delta_rms": math.nan,
    }
    # パネル a はプラットフォームに依存しない
    if not name:
        return row
    preset = get_preset(name)
    if case_id == CaseId.CASE1:
        bound = case1_gravimetry_bound(preset, n_nodes, n_exc, mu)
    else:
        bound = case2_coupling_bound(preset.omega, preset.coupling, n_nodes, n_exc, mu)
    row["bound"] = bound
    row["delta_rms"] = rms_error(bound)
    return row


def figure_sweep(
    case_id,
    mu: int = 10_000,
    platforms: Sequence[str] = OPTOMECHANICAL,
    n_grid: Sequence[int] = tuple(range(2, 31)),
    n_exc_grid: Sequence[int] = tuple(range(1, 31)),
    fixed_n_exc: Optional[int] = None,
    fixed_n_nodes: int = 10,
) -> pd.DataFrame:
    """感度マップの 3 パネルを 1 つの表で返します。

    - a: N × N_exc 格子上の resource_ratio (platform は空, bound は NaN)
    - b: N_exc = fixed_n_exc での N 掃引
    - c: N = fixed_n_nodes での N_exc 掃引

    Case 2 では N_exc < 2 の格子点を除外します。結果は (panel, platform, n_nodes, n_exc) 順。
    """
    case_id = CaseId.parse(case_id)
    min_exc = 1 if case_id == CaseId.CASE1 else 2
    fixed_n_exc = fixed_n_exc or min_exc
    excitations = [x for x in n_exc_grid if x >= min_exc]
    points = [("a", case_id, "", n, x, mu) for n in n_grid for x in excitations]
    for name in platforms:
        points += [("b", case_id, name, n, fixed_n_exc, mu) for n in n_grid]
        points += [("c", case_id, name, fixed_n_nodes, x, mu) for x in excitations]
    logger.info(f"Running {case_id.value} sweep over {len(points)} grid points")
    rows = parallel_map(_bound_row, points)
    frame = pd.DataFrame(rows)
    return frame.sort_values(["panel", "platform", "n_nodes", "n_exc"], kind="mergesort").reset_index(drop=True)


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """log y = a log x + b の最小二乗傾き a。"""
    slope, _ = np.polyfit(np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float)), 1)
    return float(slope)
