"""Byte-stable CSV / JSON-lines output of runs and reports.

Floats are written with 17 significant digits (``repr``-exact round trip)
and data files never carry timestamps; those live in ``meta.json`` only.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .dynamics import RunRecord
from .radial_grid import make_grid
from .spinor_model import SpinorField
from .virial import REPORT_FIELDS, VirialReport

TIMESERIES_COLUMNS = (
    "t", "mass", "energy", "j1", "k1t", "j2", "k2t", "j_total", "h_total",
    "n1", "n2", "n3", "n4", "dj_rhs", "dh_rhs", "linf", "l2_rdr", "e_delta",
)
# virial report fields not in the main table, kept in virial_extra.csv
EXTRA_COLUMNS = ("t",) + tuple(f for f in REPORT_FIELDS if f not in TIMESERIES_COLUMNS)


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _parse(s: str) -> float:
    return float(s) if s else math.nan


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def timeseries_header(radii) -> list[str]:
    return list(TIMESERIES_COLUMNS) + [f"local_l2@{R:g}" for R in radii]


def timeseries_rows(run: RunRecord):
    for k, t in enumerate(run.times):
        v = run.virial_series[k]
        row = [t, run.mass_series[k], run.energy_series[k], v.j1, v.k1t, v.j2, v.k2t, v.j_total, v.h_total,
               v.n1, v.n2, v.n3, v.n4, v.dj_rhs, v.dh_rhs, run.linf_series[k], run.l2_series[k],
               run.e_delta_series[k]]
        row += [run.local_l2_series[R][k] for R in run.radii]
        yield row


def write_run_tables(run: RunRecord, outdir) -> None:
    outdir = Path(outdir)
    write_csv(outdir / "timeseries.csv", timeseries_header(run.radii), timeseries_rows(run))
    write_csv(outdir / "virial_extra.csv", EXTRA_COLUMNS,
              ([t] + [getattr(v, f) for f in EXTRA_COLUMNS[1:]] for t, v in zip(run.times, run.virial_series)))


def snapshot_record(t: float, field: SpinorField) -> dict:
    g = field.grid
    return {
        "t": t,
        "grid": {"n": g.n, "rmax": g.rmax, "h": g.h},
        "vorticity": field.vorticity,
        **{c: getattr(field, c).tolist() for c in ("p11", "p12", "p21", "p22")},
    }


def write_snapshots(path, snapshots) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t, field in snapshots:
            # json writes floats with repr, which round-trips exactly
            fh.write(json.dumps(snapshot_record(t, field), sort_keys=True) + "\n")


def read_snapshots(path) -> list[tuple[float, SpinorField]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            g = make_grid(rec["grid"]["rmax"], rec["grid"]["n"])
            field = SpinorField(g, np.array(rec["p11"]), np.array(rec["p12"]), np.array(rec["p21"]),
                                np.array(rec["p22"]), rec["vorticity"])
            out.append((rec["t"], field))
    return out


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not JSON serializable: {type(o)!r}")


def load_run(run_dir, cfg) -> RunRecord:
    """Rebuild a :class:`RunRecord` (without snapshots) from a run directory."""
    run_dir = Path(run_dir)
    header, rows = read_csv(run_dir / "timeseries.csv")
    xheader, xrows = read_csv(run_dir / "virial_extra.csv")
    if len(rows) != len(xrows):
        raise ValueError("timeseries.csv and virial_extra.csv have different lengths")
    col = {name: i for i, name in enumerate(header)}
    xcol = {name: i for i, name in enumerate(xheader)}
    radii = tuple(float(h.split("@", 1)[1]) for h in header if h.startswith("local_l2@"))
    grid = cfg.make_grid()
    rec = RunRecord(cfg.make_model(), grid, cfg.make_weight(), cfg.dt(), radii, cfg.weight.delta)
    for row, xrow in zip(rows, xrows):
        vals = {name: _parse(row[i]) for name, i in col.items()}
        xvals = {name: _parse(xrow[i]) for name, i in xcol.items()}
        rec.times.append(vals["t"])
        rec.mass_series.append(vals["mass"])
        rec.energy_series.append(vals["energy"])
        rec.linf_series.append(vals["linf"])
        rec.l2_series.append(vals["l2_rdr"])
        rec.e_delta_series.append(vals["e_delta"])
        rec.virial_series.append(VirialReport(**{f: vals[f] if f in vals else xvals[f] for f in REPORT_FIELDS}))
        for R in radii:
            rec.local_l2_series.setdefault(R, []).append(vals[f"local_l2@{R:g}"])
    return rec
