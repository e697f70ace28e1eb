"""Command line entry point: run, verify-identities, verify-static, sweep, decay-report.

Exit codes: 0 success, 1 configuration error, 2 numerical blow-up,
3 verification failure.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config, parse_config
from .decay import C_MEASURE, SweepRow, decay_report, threshold_sweep
from .dynamics import ENERGY_CONVENTION, RK4_IMAG_LIMIT, SPECTRAL_SLACK, RunRecord, simulate
from .errors import EXIT_BLOWUP, EXIT_CONFIG, EXIT_OK, EXIT_VERIFY, ConfigurationError
from .oracles import (
    REJECTED_STATIC,
    SELECTED_STATIC,
    SWEEP_FUNCTIONS,
    BFProfile,
    bf_profile,
    bf_smallness_report,
    cl1_residual,
    int0_residual,
    select_static_convention,
    static_residual,
)
from .radial_grid import make_grid
from .serialization import load_run, write_csv, write_json, write_run_tables, write_snapshots
from .spinor_model import STRAUSS_NORMALIZATION
from .virial import verify_virial_identity
from .weights import Delta, Strong

DYNAMIC_IDENTITIES = ("J", "H", "J1", "K1t", "J2", "K2t")
IDENTITY_HEADER = ("kind", "case", "lhs", "rhs", "residual", "tolerance", "pass")


def simulate_config(cfg: RunConfig, on_record=None) -> RunRecord:
    return simulate(
        cfg.make_model(), cfg.make_grid(), cfg.make_init(), cfg.dt(), cfg.time.tmax,
        cfg.time.record_every, weight=cfg.make_weight(), radii=cfg.output.radii,
        delta=cfg.weight.delta, snapshot_every=cfg.output.snapshot_every, cfl=cfg.time.cfl,
        on_record=on_record,
    )


def _meta(command: str, cfg: RunConfig, **extra) -> dict:
    return {
        "command": command,
        "config": cfg.to_dict(),
        "config_text": cfg.to_text(),
        "conventions": {
            "energy": ENERGY_CONVENTION,
            "static_cubic_term": SELECTED_STATIC.describe(),
            "strauss_norm": STRAUSS_NORMALIZATION,
            "measures": "virial integrals dr; norms, mass and energy r dr without the 2*pi factor",
        },
        "measured_constants": {
            "c_measure": C_MEASURE,
            "rk4_imaginary_limit": RK4_IMAG_LIMIT,
            "spectral_slack": SPECTRAL_SLACK,
        },
        "versions": {
            "radial_dirac": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        **extra,
    }


def _outdir(cfg: RunConfig, override) -> Path:
    out = Path(override if override else cfg.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------- commands

def cmd_run(cfg: RunConfig, out: Path) -> int:
    run = simulate_config(cfg)
    write_run_tables(run, out)
    write_snapshots(out / "snapshots.jsonl", run.snapshots)
    write_json(out / "meta.json", _meta("run", cfg, dt=run.dt, recordings=len(run.times),
                                        blowup=run.blowup_flag, blowup_message=run.blowup_message))
    if run.blowup_flag:
        _say(f"blow-up: {run.blowup_message}")
        return EXIT_BLOWUP
    _say(f"run finished: {len(run.times)} recordings in {out}")
    return EXIT_OK


def identity_rows(cfg: RunConfig):
    """Quadrature oracle rows followed by the identities along the configured run."""
    grid = cfg.make_grid()
    v = cfg.verify
    rows = []
    weights = (Strong(), Delta(0.1), Delta(1.0))
    for i, f in enumerate(SWEEP_FUNCTIONS):
        for w in weights:
            for K in (1, 2):
                for which in ("first", "second"):
                    res = cl1_residual(f, w, K, grid, which)
                    rows.append(("cl1", f"f{i}/{w}/K={K}/{which}", res.lhs, res.rhs, res.residual,
                                 v.cl1_tol, res.residual < v.cl1_tol))
            val = int0_residual(f, w, grid)
            rows.append(("int0", f"f{i}/{w}", val, 0.0, abs(val), v.int0_tol, abs(val) < v.int0_tol))
    run = simulate_config(cfg)
    if run.blowup_flag:
        return rows, run
    for which in DYNAMIC_IDENTITIES:
        chk = verify_virial_identity(run, which)
        rows.append(("virial", which, chk.max_residual, chk.max_rhs, chk.relative,
                     v.virial_rel_tol, chk.relative < v.virial_rel_tol))
    gap = max(abs(r.prop_sum - r.dj_rhs) for r in run.virial_series)
    scale = max(abs(r.dj_rhs) for r in run.virial_series)
    rel = 0.0 if gap == 0 else gap / scale if scale > 0 else float("inf")
    rows.append(("virial", "assembled_vs_per_functional", gap, scale, rel, v.virial_rel_tol, rel < v.virial_rel_tol))
    return rows, run


def cmd_verify_identities(cfg: RunConfig, out: Path) -> int:
    rows, run = identity_rows(cfg)
    write_csv(out / "identities.csv", IDENTITY_HEADER, rows)
    failed = [r for r in rows if not r[-1]]
    write_json(out / "meta.json", _meta("verify-identities", cfg, checks=len(rows), failed=len(failed),
                                        blowup=run.blowup_flag))
    if run.blowup_flag:
        _say(f"blow-up during identity run: {run.blowup_message}")
        return EXIT_BLOWUP
    cl1_max = max(r[4] for r in rows if r[0] == "cl1")
    _say(f"{len(rows) - len(failed)}/{len(rows)} checks passed; max cl1 residual {cl1_max:.3g}")
    for r in failed:
        _say(f"FAILED {r[0]} {r[1]}: {r[4]:.3g} (tolerance {r[5]:.3g})")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_verify_static(cfg: RunConfig, out: Path) -> int:
    v = cfg.verify
    S = cfg.model.vorticity
    grid = make_grid(v.static_rmax, v.static_n)
    best, table = select_static_convention(grid, S, v.static_lambda)
    prof = bf_profile(BFProfile(S, v.static_lambda), grid)
    selected = static_residual(prof, SELECTED_STATIC)
    rejected = static_residual(prof, REJECTED_STATIC)
    rows = [(name, res, name == SELECTED_STATIC.describe()) for name, res in table.items()]
    write_csv(out / "static.csv", ("convention", "residual", "selected"), rows)
    write_csv(out / "static_smallness.csv", ("lambda", "l_inf", "l2_rdr", "l2_dr", "l_inf_x_l2_rdr"),
              ((r.lam, r.l_inf, r.l2_rdr, r.l2_dr, r.product) for r in bf_smallness_report(S, grid)))
    ok = best == SELECTED_STATIC and selected < v.static_tol and rejected > 1e-1
    write_json(out / "meta.json", _meta("verify-static", cfg, selected=SELECTED_STATIC.describe(),
                                        best=best.describe(), selected_residual=selected,
                                        rejected=REJECTED_STATIC.describe(), rejected_residual=rejected))
    _say(f"static residual {selected:.3g} with {SELECTED_STATIC.describe()}; "
         f"rejected {REJECTED_STATIC.describe()}: {rejected:.3g}")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_sweep(cfg: RunConfig, out: Path, powers, amplitudes, workers: int) -> int:
    rows = threshold_sweep(cfg, powers, amplitudes, workers)
    write_csv(out / "sweep.csv", SweepRow.HEADER, (r.as_tuple() for r in rows))
    write_json(out / "meta.json", _meta("sweep", cfg, powers=list(powers), amplitudes=list(amplitudes)))
    _say(f"sweep finished: {len(rows)} rows")
    return EXIT_OK


def cmd_decay_report(run_dir: Path, radii) -> int:
    import json

    with open(run_dir / "meta.json", encoding="utf-8") as fh:
        meta = json.load(fh)
    cfg = parse_config(meta["config_text"])
    run = load_run(run_dir, cfg)
    rep = decay_report(run, radii, cfg.weight.delta)
    write_csv(run_dir / "decay.csv",
              ("R", "terminal_over_max", "terminal_over_initial", "decays", "h_domination_ok", "h_domination_worst"),
              ((R, rep.terminal_over_max[R], rep.terminal_over_initial[R], rep.decays[R],
                rep.h_domination_ok, rep.h_domination_worst) for R in rep.radii))
    header = ["t", "e_delta", "h_total", "integrated_coercive"] + [f"local_l2@{R:g}" for R in rep.radii]
    series = zip(rep.times, rep.e_delta_series, rep.h_series, rep.integrated_coercive,
                 *(rep.local_l2_series[R] for R in rep.radii))
    write_csv(run_dir / "decay_series.csv", header, series)
    _say(f"decay report written to {run_dir}")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _floats(text: str) -> tuple:
    try:
        return tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="radial-dirac", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", help="configuration file (key = value with [sections])")
        sp.add_argument("--out", help="output directory (default: output.dir from the config)")
        return sp

    with_config("run", "integrate one configuration and write timeseries.csv, snapshots.jsonl, meta.json")
    with_config("verify-identities", "check integration-by-parts and virial identities")
    with_config("verify-static", "check stationarity of the explicit static profile")
    sp = with_config("sweep", "pure-power sweep over powers and amplitudes")
    sp.add_argument("--powers", type=_floats, default=(3.0, 5.0))
    sp.add_argument("--amplitudes", type=_floats, default=(0.0, 0.01))
    sp.add_argument("--workers", type=int, default=1)
    sp = sub.add_parser("decay-report", help="decay diagnostics of a finished run directory")
    sp.add_argument("run_dir")
    sp.add_argument("--radii", type=_floats, default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "decay-report":
            return cmd_decay_report(Path(args.run_dir), args.radii)
        cfg = load_config(args.config)
        out = _outdir(cfg, args.out)
        if args.command == "run":
            return cmd_run(cfg, out)
        if args.command == "verify-identities":
            return cmd_verify_identities(cfg, out)
        if args.command == "verify-static":
            return cmd_verify_static(cfg, out)
        return cmd_sweep(cfg, out, args.powers, args.amplitudes, args.workers)
    except ConfigurationError as exc:
        _say(f"configuration error: {exc}")
        return EXIT_CONFIG
    except (FileNotFoundError, ValueError) as exc:
        _say(f"error: {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
