import os

__version__ = "0.3.0"

LOG_DIR = os.environ.get("SENSORNET_LOG_DIR", "data/logs")
LOG_LEVEL = os.environ.get("SENSORNET_LOG_LEVEL", "INFO")
THREADS = max(1, int(os.environ.get("SENSORNET_THREADS", "1")))

# 換算定数 (CODATA)
HBAR = 1.054571817e-34
# 周波数 Ω は角周波数 (rad/s) として解釈する
FREQUENCY_INTERPRETATION = "angular"

DEFAULT_PARAMS = {
    # 有限差分
    "fd_epsilon": 1e-5,
    "fd_epsilon_floor": 1e-9,
    "cfim_epsilon": 1e-6,
    # 飽和極限の δ 列 (1/max|β| でスケール)
    "saturation_deltas": (1e-2, 1e-3, 1e-4),
    # Fock オラクル
    "fock_dim": 30,
    "min_fock_dim": 4,
    "max_fock_entries": 2_000_000,
    "tail_mass_limit": 1e-8,
    # 許容誤差
    "norm_tolerance": 1e-12,
    "oracle_fidelity_tolerance": 1e-8,
    "purity_tolerance": 1e-7,
    "psd_tolerance": 1e-10,
    # モンテカルロ
    "coarse_fraction": 0.5,
    "coarse_detuning": 0.05,
    "mle_fatol": 1e-12,
    "mle_xatol": 1e-9,
    "mle_maxiter": 20_000,
    "ambiguity_tolerance": 1e-9,
}
