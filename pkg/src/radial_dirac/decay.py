"""Post-processing of runs: local L^2 trends, H domination and power/amplitude sweeps.

"Decay" here is a desk-scale trend: the terminal local norm on a ball is
below half of its running maximum.  It is a diagnostic, not a proof of the
t -> infinity statement.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .virial import coercivity_check

DECAY_FRACTION = 0.5
# local mass on B(0,R) <= (1+R)^3 H holds node by node with this constant
C_MEASURE = 1.0
MIN_RECORDINGS = 10


@dataclass
class DecayReport:
    radii: tuple
    times: np.ndarray
    local_l2_series: dict
    e_delta_series: np.ndarray
    h_series: np.ndarray
    integrated_coercive: np.ndarray
    # per radius: terminal / running max, terminal / initial (None when not applicable)
    terminal_over_max: dict
    terminal_over_initial: dict
    decays: dict
    h_domination_ok: bool
    h_domination_worst: float
    # measured constants of the boundedness checks
    j1_bound_constant: float | None
    dh_bound_constant: float | None

    @property
    def all_decay(self) -> bool | None:
        flags = [v for v in self.decays.values() if v is not None]
        return all(flags) if flags else None


def _safe_ratio(num, den):
    return None if den == 0 else float(num / den)


def decay_report(run, radii=None, delta: float = 0.1) -> DecayReport:
    """Assemble decay diagnostics from a recorded run.

    ``radii`` must be a subset of the radii recorded by the run (all of them
    by default).  ``delta`` is accepted for symmetry with the run
    configuration and must match the run's e_delta weight.
    """
    if len(run.times) < MIN_RECORDINGS:
        raise ValueError(f"decay report needs at least {MIN_RECORDINGS} recordings, got {len(run.times)}")
    if not math.isclose(delta, run.delta):
        raise ConfigurationError(f"run recorded e_delta with delta={run.delta}, not {delta}")
    radii = tuple(run.radii if radii is None else (float(R) for R in radii))
    missing = [R for R in radii if R not in run.local_l2_series]
    if missing:
        raise ConfigurationError(f"radii {missing} were not recorded (recorded: {list(run.local_l2_series)})")
    t = np.asarray(run.times, dtype=float)
    vs = run.virial_series
    h = np.array([v.h_total for v in vs])
    coercive = np.array([v.coercive_grad + v.coercive_field for v in vs])
    integrated = np.concatenate([[0.0], np.cumsum(0.5 * (coercive[1:] + coercive[:-1]) * np.diff(t))])

    local = {R: np.asarray(run.local_l2_series[R], dtype=float) for R in radii}
    over_max, over_init, decays = {}, {}, {}
    worst = 0.0
    ok = True
    for R, series in local.items():
        peak = float(np.max(series))
        over_max[R] = _safe_ratio(series[-1], peak)
        over_init[R] = _safe_ratio(series[-1], series[0])
        decays[R] = None if over_max[R] is None else bool(over_max[R] < DECAY_FRACTION)
        bound = (1 + R) ** 3 * h * C_MEASURE
        lhs = series**2
        # tiny relative slack for the rounding of two independent sums
        ok &= bool(np.all(lhs <= bound * (1 + 1e-12) + 1e-300))
        pos = bound > 0
        if pos.any():
            worst = max(worst, float(np.max(lhs[pos] / bound[pos])))

    jb = np.array([v.j_bound for v in vs])
    j1 = np.abs([v.j1 for v in vs])
    hc = np.array([v.h_chain for v in vs])
    dh = np.abs([v.dh_rhs for v in vs])
    return DecayReport(
        radii=radii,
        times=t,
        local_l2_series=local,
        e_delta_series=np.asarray(run.e_delta_series, dtype=float),
        h_series=h,
        integrated_coercive=integrated,
        terminal_over_max=over_max,
        terminal_over_initial=over_init,
        decays=decays,
        h_domination_ok=ok,
        h_domination_worst=worst,
        j1_bound_constant=float(np.max(j1[jb > 0] / jb[jb > 0])) if np.any(jb > 0) else None,
        dh_bound_constant=float(np.max(dh[hc > 0] / hc[hc > 0])) if np.any(hc > 0) else None,
    )


# ---------------------------------------------------------------- sweeps

@dataclass(frozen=True)
class SweepRow:
    power: float
    amplitude: float
    blowup: bool
    violations: int | None
    c_estimate: float | None
    decays: bool | None
    terminal_over_max: float | None

    HEADER = ("power", "amplitude", "blowup", "violations", "c_estimate", "decays", "terminal_over_max")

    def as_tuple(self):
        return tuple(getattr(self, k) for k in self.HEADER)


def _sweep_one(args):
    from .cli import simulate_config

    cfg, p, a = args
    cfg = cfg.with_values(model={"nonlinearity": "purepower", "power": float(p)}, init={"amplitude": float(a)})
    cfg.validate()
    if a == 0:
        return SweepRow(float(p), 0.0, False, None, None, None, None)
    run = simulate_config(cfg)
    if run.blowup_flag:
        return SweepRow(float(p), float(a), run.blowup_flag, None, None, None, None)
    coer = coercivity_check(run)
    rep = decay_report(run, delta=cfg.weight.delta)
    R0 = rep.radii[0]
    return SweepRow(float(p), float(a), False, coer.violations, coer.c_estimate, rep.decays[R0], rep.terminal_over_max[R0])


def threshold_sweep(base, powers, amplitudes, workers: int = 1) -> list[SweepRow]:
    """Run every (power, amplitude) pair with the pure-power model and summarise.

    ``base`` is a :class:`~radial_dirac.config.RunConfig`; only the model power,
    nonlinearity and amplitude are overridden.  Rows come back in input order.
    """
    for p in powers:
        if p < 3:
            raise ConfigurationError(f"sweep powers must be >= 3, got {p}")
    jobs = [(base, p, a) for p in powers for a in amplitudes]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_one, jobs))
    return [_sweep_one(j) for j in jobs]
