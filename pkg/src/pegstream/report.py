"""Report files for a finished parse: delimited trace plus figures.

write_report produces, inside the chosen directory:

    trace.csv        one row per consumed symbol (end marker included):
                     position, symbol, stored table columns after the
                     symbol, bits emitted for it, total resolved cells
    summary.csv      the stats record as two delimited rows
    table_size.png   stored-columns-per-symbol figure, the memory shape
                     of the whole run
"""

from __future__ import annotations

import csv
import os

TRACE_FIELDS = ("position", "symbol", "stored_cols", "bits", "resolved_total")


def write_report(directory, trace_rows, stats, verdict, code, depth):
    os.makedirs(directory, exist_ok=True)
    trace_path = os.path.join(directory, "trace.csv")
    with open(trace_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_FIELDS)
        w.writerows(trace_rows)

    summary_path = os.path.join(directory, "summary.csv")
    with open(summary_path, "w", newline="") as fh:
        w = csv.writer(fh)
        keys = ["max_cols", "resolved_entries", "non_immediate_entries",
                "speculation_steps", "visited_entries", "expansion_steps",
                "verdict", "input_len", "code_bits", "spec_depth"]
        values = [stats.max_cols, stats.resolved_entries,
                  stats.non_immediate_entries, stats.speculation_steps,
                  stats.visited_entries, stats.expansion_steps,
                  verdict, len(trace_rows) - 1 if trace_rows else 0,
                  len(code), depth]
        w.writerow(keys)
        w.writerow(values)

    figure_path = os.path.join(directory, "table_size.png")
    _plot_table_size(figure_path, trace_rows, stats, verdict)
    return trace_path, summary_path, figure_path


def _plot_table_size(path, trace_rows, stats, verdict):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    positions = [r[0] for r in trace_rows]
    sizes = [r[2] for r in trace_rows]
    fig, ax = plt.subplots(figsize=(8, 3.2))
    ax.step(positions, sizes, where="post", lw=1.2)
    ax.set_xlabel("input position")
    ax.set_ylabel("stored columns")
    ax.set_title(f"parse table occupancy ({verdict}, peak {stats.max_cols})")
    ax.set_ylim(bottom=0)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
