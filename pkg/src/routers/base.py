import argparse
import logging
import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..exceptions import ConfigInvalid
from ..logic.config_file import config_to_dict, load_config
from ..logic.csv_output import write_csv, write_plot_script

logger = logging.getLogger(__name__)


class CommandParser(argparse.ArgumentParser):
    """引数エラーを終了コード 1 の ConfigInvalid として扱うパーサ。"""

    def error(self, message):
        raise ConfigInvalid(f"{self.prog}: {message}")


def argument(*flags, **kwargs) -> tuple:
    return flags, kwargs


@dataclass
class Command:
    name: str
    handler: Callable
    arguments: tuple
    help: str
    epilog: str | None = None


@dataclass
class CommandRouter:
    """サブコマンドをまとめるルーター (main.ROUTERS に並べて登録)。"""
    tags: list = field(default_factory=list)
    commands: list = field(default_factory=list)

    def command(self, name: str, *arguments, help: str = "", epilog: str | None = None):
        def decorator(fn):
            self.commands.append(Command(name, fn, arguments, help, epilog))
            return fn
        return decorator

    def register(self, subparsers):
        for cmd in self.commands:
            parser = subparsers.add_parser(
                cmd.name,
                help=cmd.help,
                description=cmd.help,
                epilog=cmd.epilog,
                formatter_class=argparse.RawDescriptionHelpFormatter,
            )
            for flags, kwargs in cmd.arguments:
                parser.add_argument(*flags, **kwargs)
            parser.add_argument("--output", "-o", default=None, help="CSV output path (default: stdout)")
            parser.add_argument("--plot-script", default=None, help="write a matplotlib script for the CSV")
            parser.set_defaults(handler=cmd.handler, command=cmd.name)

    def help_section(self) -> str:
        """トップレベル --help 用の 'タグ: コマンド, ...' 行。"""
        title = ", ".join(self.tags) or "Other"
        return f"{title}: {', '.join(cmd.name for cmd in self.commands)}"


_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*(pi)?\s*$", re.IGNORECASE)


def parse_real(text: str) -> float:
    """'1.5', '2pi', 'pi', '-0.5pi' を実数に変換します。"""
    match = _NUMBER.match(text)
    if not match or (match.group(1) is None and match.group(2) is None):
        raise ConfigInvalid(f"'{text}' is not a real number.")
    value = float(match.group(1)) if match.group(1) is not None else 1.0
    return value * math.pi if match.group(2) else value


def parse_grid(text: str) -> np.ndarray:
    """'A:B:STEP' を終点を含む格子に変換します。"""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigInvalid(f"grid must be A:B:STEP (got '{text}').")
    start, stop, step = (parse_real(p) for p in parts)
    if step <= 0 or stop < start:
        raise ConfigInvalid(f"grid needs STEP > 0 and B >= A (got '{text}').")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    grid = start + step * np.arange(count)
    if abs(grid[-1] - stop) <= 1e-9 * step:
        grid[-1] = stop
    return grid


def load_payload(args) -> tuple:
    """--config を読み込み、(NetworkConfig, メタデータ用の辞書) を返します。"""
    config = load_config(args.config) if getattr(args, "config", None) else None
    payload = {
        key: value for key, value in vars(args).items()
        if key not in {"handler", "output", "plot_script", "config"}
    }
    if config is not None:
        payload["config"] = config_to_dict(config)
    return config, payload


def emit(args, frame, payload: dict, x: str | None = None, ys=()) -> str:
    text = write_csv(frame, args.output, payload)
    if args.plot_script:
        if args.output is None:
            logger.warning("--plot-script needs --output to reference the CSV; skipping.")
        else:
            write_plot_script(args.plot_script, [args.output], x or frame.columns[0], ys or frame.columns[1:2])
    return text
