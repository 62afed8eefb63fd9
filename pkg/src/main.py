import argparse
import logging
import os
import sys
from logging.handlers import RotatingFileHandler

from src.exceptions import SensorNetError
from src.routers import bounds, figures, measure, oracle_check, sample, state
from src.routers.base import CommandParser
from src import settings
from src.settings import __version__

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

ROUTERS = [state.router, bounds.router, measure.router, sample.router, figures.router, oracle_check.router]


def setup_logging(log_dir: str | None = None, level: str | None = None):
    """ルートロガーにファイル (ローテーション) と stderr のハンドラを設定します。"""
    log_dir = log_dir or settings.LOG_DIR
    # ログディレクトリが存在しない場合は作成
    os.makedirs(log_dir, exist_ok=True)

    root = logging.getLogger()
    root.setLevel(level or settings.LOG_LEVEL)

    # 既存のハンドラをクリア
    if root.hasHandlers():
        root.handlers.clear()

    file_handler = RotatingFileHandler(
        os.path.join(log_dir, "app.log"), maxBytes=10 * 1024 * 1024, backupCount=5, encoding='utf-8'
    )
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(file_handler)

    # CSV を stdout に出すため、コンソールには stderr を使う
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(console_handler)


def build_parser() -> CommandParser:
    parser = CommandParser(
        prog="sensornet",
        description="Stroboscopic distributed quantum sensing toolkit.",
        epilog="command groups:\n" + "\n".join(f"  {router.help_section()}" for router in ROUTERS),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"sensornet {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for router in ROUTERS:
        router.register(subparsers)
    return parser


def run(argv=None) -> int:
    """CLI のエントリポイント。終了コードを返します。

    0: 成功, 1: 設定エラー, 2: 数値許容誤差エラー, 3: ケース条件違反。
    """
    setup_logging()
    try:
        args = build_parser().parse_args(argv)
        logger.info(f"Running command '{args.command}'")
        return args.handler(args)
    except SensorNetError as e:
        logger.error(f"{type(e).__name__}: {e}", exc_info=True)
        return e.exit_code
    except SystemExit as e:
        # --help / --version
        return e.code if isinstance(e.code, int) else 0


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
