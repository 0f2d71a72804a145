"""Tabular bound reports: CSV rows, gnuplot data files and SVG figures.

CSV layout (fixed order)::

    # base: bits
    r,epsilon,<bound>...,ok_<bound>...,<lower>_pos...,best_lower,best_upper,best_lower_pos

Every bound value is written raw, applicable or not; ``ok_*`` holds 1/0.
``U0`` is only defined at epsilon = 0 and is blank elsewhere.  ``_pos``
columns are max(0, value) for the lower bounds.
"""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np

from .bounds import THEOREM1_TO_2, Quantities, theorem1_from_quantities, theorem2_from_quantities, u0
from .info import JointDistribution

LOWER = ("L0", "L1", "L2", "L1p", "L3", "L4", "L3p")
UPPER = ("U_S", "U_X", "U0")
BOUNDS = LOWER + UPPER
COLUMNS = (("r", "epsilon") + BOUNDS + tuple(f"ok_{b}" for b in BOUNDS)
           + tuple(f"{b}_pos" for b in LOWER) + ("best_lower", "best_upper", "best_lower_pos"))


class ReportError(ValueError):
    pass


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    return repr(float(v))


def bound_row(q: Quantities, r: float, eps: float, u0_value: float | None = None) -> dict:
    """One CSV row; at eps = 0 the perfect-parity family supplies shared bounds and U0."""
    rep = theorem2_from_quantities(q, r, eps, warn=False)
    vals = {k: (e.value, e.applicable) for k, e in rep.entries.items()}
    if eps == 0 and u0_value is not None:
        t1 = theorem1_from_quantities(q, r, u0_value, warn=False)
        for k1, k2 in THEOREM1_TO_2.items():
            vals[k2] = (t1[k1], t1.applicable(k1))
        vals["U0"] = (t1["U0"], True)
    row = {"r": r, "epsilon": eps}
    for b in BOUNDS:
        v, ok = vals.get(b, (None, None))
        row[b] = v
        row[f"ok_{b}"] = ok
    for b in LOWER:
        row[f"{b}_pos"] = max(0.0, row[b])
    lows = [vals[b][0] for b in LOWER if vals[b][1]]
    ups = [vals[b][0] for b in UPPER if b in vals and vals[b][1]]
    row["best_lower"] = max(lows) if lows else -math.inf
    row["best_upper"] = min(ups) if ups else math.inf
    row["best_lower_pos"] = max(0.0, row["best_lower"])
    return row


def bound_rows(j: JointDistribution, rs, epss) -> list[dict]:
    """Rows over the grid rs x epss, r-major."""
    q = Quantities.from_joint(j)
    u0v = u0(j) if any(float(e) == 0.0 for e in epss) else None
    return [bound_row(q, float(r), float(e), u0v) for r in rs for e in epss]


def format_csv(rows, base: str, comments=()) -> str:
    buf = io.StringIO()
    buf.write(f"# base: {base}\n")
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in COLUMNS])
    return buf.getvalue()


def parse_csv(text: str):
    """Returns (base, columns dict of float arrays with nan for blanks)."""
    base = None
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].partition(":")
            if key.strip() == "base":
                base = val.strip()
            continue
        if line.strip():
            body.append(line)
    if base is None:
        raise ReportError("missing '# base:' header line")
    if not body:
        raise ReportError("no CSV header row")
    reader = csv.reader(body)
    header = next(reader)
    missing = [c for c in ("r", "epsilon") if c not in header]
    if missing:
        raise ReportError(f"CSV lacks columns {missing}")
    cols: dict[str, list[float]] = {h: [] for h in header}
    for lineno, rec in enumerate(reader, start=2):
        if len(rec) != len(header):
            raise ReportError(f"data row {lineno}: {len(rec)} fields, header has {len(header)}")
        for h, v in zip(header, rec):
            try:
                cols[h].append(float(v) if v != "" else math.nan)
            except ValueError:
                raise ReportError(f"data row {lineno}: bad number {v!r} in column {h}") from None
    if not cols["r"]:
        raise ReportError("CSV has no data rows")
    return base, {h: np.array(v) for h, v in cols.items()}


def format_dat(base: str, cols: dict) -> str:
    names = list(cols)
    lines = [f"# base: {base}", "# " + " ".join(names)]
    n = len(cols[names[0]])
    for i in range(n):
        lines.append(" ".join("nan" if math.isnan(cols[h][i]) else repr(float(cols[h][i])) for h in names))
    return "\n".join(lines) + "\n"


def parse_dat(text: str):
    lines = text.splitlines()
    base = lines[0].partition(":")[2].strip()
    names = lines[1][1:].split()
    data = [[float(v) for v in ln.split()] for ln in lines[2:] if ln.strip()]
    arr = np.array(data).reshape(-1, len(names))
    return base, {h: arr[:, k] for k, h in enumerate(names)}


def _sweep_axis(cols):
    for ax in ("r", "epsilon"):
        if len(np.unique(cols[ax])) > 1:
            return ax
    return "r"


def plot_csv(csv_path, out_path) -> tuple[Path, Path]:
    """Render the CSV to an SVG at ``out_path`` and a gnuplot table next to it."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    base, cols = parse_csv(Path(csv_path).read_text())
    out = Path(out_path)
    dat = out.with_suffix(".dat")
    dat.write_text(format_dat(base, cols))

    ax_name = _sweep_axis(cols)
    other = "epsilon" if ax_name == "r" else "r"
    keep = cols[other] == cols[other][0]
    x = cols[ax_name][keep]
    order = np.argsort(x, kind="stable")
    x = x[order]
    single = len(x) == 1
    style = {"marker": "o"} if single else {}

    plt.rcParams["svg.hashsalt"] = "fairbound"
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for b in BOUNDS:
        if b not in cols or np.all(np.isnan(cols[b])):
            continue
        raw = cols[b][keep][order]
        if b in LOWER:
            raw = np.maximum(raw, 0.0)
            label, ls = f"[{b}]+", "-"
        else:
            label, ls = b, "--"
        ok = cols.get(f"ok_{b}")
        y = np.where(ok[keep][order] == 1, raw, np.nan) if ok is not None else raw
        # outside its regime a formula is drawn faint and dotted
        line = ax.plot(x, y, ls, label=label, gid=f"bound-{b}", **style)[0]
        if not single and np.any(np.isnan(y)):
            ax.plot(x, raw, ":", color=line.get_color(), alpha=0.35, linewidth=0.8)
    xl = "r" if ax_name == "r" else "epsilon"
    ax.set_xlabel(f"{xl} ({base})")
    ax.set_ylabel(f"I(Y;T) ({base})")
    ax.set_title(f"{other} = {cols[other][0]:g}")
    ax.legend(fontsize=8, ncol=2)
    fig.tight_layout()
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)
    return out, dat
