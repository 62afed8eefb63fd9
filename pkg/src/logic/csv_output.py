import io
import logging
import sys
from pathlib import Path
from typing import Sequence

import pandas as pd

from ..settings import FREQUENCY_INTERPRETATION, HBAR, __version__
from .config_file import config_hash

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12e"


def metadata_line(payload: dict | None) -> str:
    return (
        f"# sensornet {__version__} config_hash={config_hash(payload)} "
        f"hbar={HBAR!r} frequency={FREQUENCY_INTERPRETATION}\n"
    )


def render_csv(frame: pd.DataFrame, payload: dict | None = None) -> str:
    """メタデータ行 + ヘッダ行 + データ行の CSV テキストを返します。"""
    buffer = io.StringIO()
    buffer.write(metadata_line(payload))
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def write_csv(frame: pd.DataFrame, path=None, payload: dict | None = None) -> str:
    """CSV を path (省略時は stdout) に書き出し、テキストを返します。"""
    text = render_csv(frame, payload)
    if path is None:
        sys.stdout.write(text)
    else:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {len(frame)} rows to {path}")
    return text


def read_csv(path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


PLOT_TEMPLATE = '''"""sensornet が生成したプロットスクリプト。"""
import matplotlib.pyplot as plt
import pandas as pd

CSV_FILES = {files!r}
X_COLUMN = {x!r}
Y_COLUMNS = {ys!r}

for path in CSV_FILES:
    frame = pd.read_csv(path, comment="#")
    fig, ax = plt.subplots()
    groups = frame.groupby(["panel", "platform"]) if {{"panel", "platform"}} <= set(frame.columns) else [(path, frame)]
    for label, group in groups:
        for column in Y_COLUMNS:
            ax.plot(group[X_COLUMN], group[column], marker="o", label=f"{{label}} {{column}}")
    ax.set_xlabel(X_COLUMN)
    ax.set_yscale({yscale!r})
    ax.legend(fontsize="small")
    fig.savefig(str(path).rsplit(".", 1)[0] + ".png", dpi=150)
'''


def write_plot_script(path, csv_files: Sequence[str], x: str, ys: Sequence[str], yscale: str = "log") -> Path:
    """CSV を描画する matplotlib スクリプトを書き出します (実行はしません)。"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        PLOT_TEMPLATE.format(files=[str(f) for f in csv_files], x=x, ys=list(ys), yscale=yscale),
        encoding="utf-8",
    )
    logger.info(f"Wrote plot script to {path}")
    return path
