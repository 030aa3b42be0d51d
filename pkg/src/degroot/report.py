"""Module to write report tables to CSV, plot data and SVG charts and to read them back"""
import io

import pandas as pd

from .dynamics import TIMING_OPTIONS
from .exceptions import OutputError
from .harness import ReportRow, ReportTable
from .logger import LOGGER

FLOAT_FORMAT = "%.17g"
PROVENANCE_KEYS = ("config_hash", "base_seed", "swept_factor")


def _provenance_lines(table):
    lines = []
    for key in PROVENANCE_KEYS:
        value = getattr(table, key)
        if value is not None:
            lines.append("# {0}={1}\n".format(key, value))
    return lines


def emit_csv(table, path):
    """
    Provenance comment lines (when known), a header row, then one row per
    cell with floats at 17 significant digits.
    """
    try:
        with open(path, "w", newline="") as handle:
            handle.writelines(_provenance_lines(table))
            table.to_frame().to_csv(
                handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as exc:
        raise OutputError("Failed writing report to {0}: {1}".format(path, exc))

    log = "Successfully wrote {0} rows to {1}".format(len(table.rows), path)
    LOGGER.info(log)


def _parse_provenance(lines):
    provenance = {}
    for line in lines:
        key, _, value = line[1:].strip().partition("=")
        provenance[key] = int(value) if key == "base_seed" else value
    return provenance


def _plain(value):
    """numpy scalars back to python numbers"""
    if hasattr(value, "item"):
        return value.item()
    return value


def read_csv(path):
    """Parse a file written by emit_csv back into a ReportTable"""
    try:
        with open(path, "r", newline="") as handle:
            content = handle.read()
    except OSError as exc:
        raise OutputError("Failed reading report from {0}: {1}".format(path, exc))

    lines = content.splitlines(True)
    comments = [line for line in lines if line.startswith("#")]
    body = "".join(line for line in lines if not line.startswith("#"))
    frame = pd.read_csv(io.StringIO(body), float_precision="round_trip")

    rows = []
    for record in frame.to_dict(orient="records"):
        rows.append(ReportRow(**dict((key, _plain(value)) for key, value in record.items())))

    provenance = _parse_provenance(comments)
    return ReportTable(
        rows=rows, config_hash=provenance.get("config_hash"),
        base_seed=provenance.get("base_seed"), swept_factor=provenance.get("swept_factor"))


def emit_plot_data(table, path):
    """
    One block per timing option in consensus, start, uniform order: a
    '# series: <timing>' line, a swept_value,mean,std_dev header and its rows,
    blocks separated by a blank line.
    """
    try:
        with open(path, "w", newline="") as handle:
            for index, timing in enumerate(t for t in TIMING_OPTIONS
                                           if t in table.timing_options()):
                if index:
                    handle.write("\n")
                handle.write("# series: {0}\n".format(timing))
                frame = pd.DataFrame(
                    [(row.swept_value, row.mean_influence, row.std_dev)
                     for row in table.series(timing)],
                    columns=["swept_value", "mean", "std_dev"])
                frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as exc:
        raise OutputError("Failed writing plot data to {0}: {1}".format(path, exc))

    log = "Successfully wrote plot data to {0}".format(path)
    LOGGER.info(log)


def render_plot(table, path):
    """Line chart of mean influence against the swept value, saved as SVG"""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    figure, axes = plt.subplots(figsize=(6, 4))
    for timing in TIMING_OPTIONS:
        series = table.series(timing)
        if not series:
            continue
        axes.plot([row.swept_value for row in series],
                  [row.mean_influence for row in series], marker="o", label=timing)
    axes.set_xlabel(table.swept_factor or "swept value")
    axes.set_ylabel("average social influence")
    axes.set_ylim(0.0, 1.0)
    axes.legend()

    try:
        figure.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OutputError("Failed writing chart to {0}: {1}".format(path, exc))
    finally:
        plt.close(figure)

    log = "Successfully rendered chart to {0}".format(path)
    LOGGER.info(log)
