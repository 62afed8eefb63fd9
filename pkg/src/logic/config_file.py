"""ネットワーク設定ファイル (key = value 形式) の読み込み。

例:
    n_nodes = 2
    lambda = 1
    lambda_prime = 0
    couplings = [0.1, 0.1]
    drivings = [0.05, 0.0]
    alpha_re = 1.0
    alpha_im = 0.0
"""
import hashlib
import json
import logging
import re
from pathlib import Path

from pydantic import ValidationError

from ..exceptions import ConfigInvalid
from ..models.network import NetworkConfig

logger = logging.getLogger(__name__)

_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.+?)\s*$")
_LIST = re.compile(r"^\[(.*)\]$")

SCALAR_KEYS = {"n_nodes", "lambda", "lambda_prime", "alpha_re", "alpha_im"}
LIST_KEYS = {"couplings", "drivings"}


def _number(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigInvalid(f"{key}: '{text}' is not a number.") from None


def parse_config_text(text: str) -> dict:
    """設定テキストを辞書に変換します。未知のキーや重複はエラーにします。"""
    values = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _LINE.match(line)
        if not match:
            raise ConfigInvalid(f"line {number}: expected 'key = value' (got '{raw.strip()}').")
        key, value = match.group(1).lower(), match.group(2)
        if key in values:
            raise ConfigInvalid(f"line {number}: duplicate key '{key}'.")
        if key in LIST_KEYS:
            items = _LIST.match(value)
            if not items:
                raise ConfigInvalid(f"line {number}: {key} must be a bracketed list.")
            body = items.group(1).strip()
            values[key] = [_number(key, item.strip()) for item in body.split(",")] if body else []
        elif key in SCALAR_KEYS:
            values[key] = _number(key, value)
        else:
            raise ConfigInvalid(f"line {number}: unknown key '{key}'.")
    return values


def build_config(values: dict) -> NetworkConfig:
    """辞書から NetworkConfig を作ります。pydantic の ValidationError は ConfigInvalid に変換します。"""
    missing = sorted({"n_nodes", "lambda", "lambda_prime", "couplings", "drivings"} - set(values))
    if missing:
        raise ConfigInvalid(f"missing keys: {', '.join(missing)}.")
    n_nodes = values["n_nodes"]
    if n_nodes != int(n_nodes):
        raise ConfigInvalid(f"n_nodes must be an integer (got {n_nodes}).")
    try:
        return NetworkConfig(
            n_nodes=int(n_nodes),
            lambda_=values["lambda"],
            lambda_prime=values["lambda_prime"],
            couplings=tuple(values["couplings"]),
            drivings=tuple(values["drivings"]),
            alpha=complex(values.get("alpha_re", 0.0), values.get("alpha_im", 0.0)),
        )
    except ValidationError as e:
        raise ConfigInvalid(f"invalid network configuration: {e}") from e


def load_config(path) -> NetworkConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigInvalid(f"config file not found: {path}")
    logger.info(f"Loading network configuration from {path}")
    return build_config(parse_config_text(path.read_text(encoding="utf-8")))


def config_to_dict(config: NetworkConfig) -> dict:
    """JSON 化可能な辞書 (α は [実部, 虚部])。"""
    return {
        "n_nodes": config.n_nodes,
        "lambda": config.lambda_,
        "lambda_prime": config.lambda_prime,
        "couplings": list(config.couplings),
        "drivings": list(config.drivings),
        "alpha": [config.alpha.real, config.alpha.imag],
    }


def config_hash(payload: dict | None) -> str:
    """正規化した JSON の sha256 先頭 12 桁。"""
    text = json.dumps(payload or {}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]
