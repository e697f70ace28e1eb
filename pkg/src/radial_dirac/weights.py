"""Virial weight families r^a (1+r)^-b with closed-form derivatives up to third order.

All three families share the shape ``phi(r) = r**a * (1+r)**(-b)``:

========  =======  ===
family    a        b
========  =======  ===
Strong    3        2
Delta     3+delta  2
HWeight   1        3
========  =======  ===

so the derivatives come from Leibniz' rule on the two factors instead of
hand-expanded quotients.  The quotient forms are kept separately in
:func:`verify_weight_identities`, where they act as the independent check.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import ConfigurationError, DomainError
from .radial_grid import RadialGrid

FAMILIES = ("Strong", "Delta", "HWeight")
DEFAULT_DELTA = 0.1


@dataclass(frozen=True)
class WeightFamily:
    tag: str
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if self.tag not in FAMILIES:
            raise ConfigurationError(f"unknown weight family {self.tag!r}; expected one of {FAMILIES}")
        # delta = 0 is accepted so the Delta family can be compared with Strong in the limit
        if not np.isfinite(self.delta) or self.delta < 0:
            raise ConfigurationError(f"weight delta must be >= 0, got {self.delta}")

    @property
    def exponents(self) -> tuple[float, float]:
        if self.tag == "Strong":
            return 3.0, 2.0
        if self.tag == "Delta":
            return 3.0 + self.delta, 2.0
        return 1.0, 3.0

    def __str__(self):
        return f"Delta({self.delta:g})" if self.tag == "Delta" else self.tag


def Strong() -> WeightFamily:
    return WeightFamily("Strong")


def Delta(delta: float = DEFAULT_DELTA) -> WeightFamily:
    return WeightFamily("Delta", float(delta))


def HWeight() -> WeightFamily:
    return WeightFamily("HWeight")


def weight_from_name(name: str, delta: float = DEFAULT_DELTA) -> WeightFamily:
    key = name.strip()
    for tag in FAMILIES:
        if key.lower() == tag.lower():
            return WeightFamily(tag, float(delta))
    raise ConfigurationError(f"unknown weight family {name!r}; expected one of {FAMILIES}")


@dataclass(frozen=True)
class WeightSample:
    phi: np.ndarray | float
    d1: np.ndarray | float
    d2: np.ndarray | float
    d3: np.ndarray | float


def _falling(x: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= x - j
    return out


def eval_weight(family: WeightFamily, r) -> WeightSample:
    """Weight and its first three derivatives at ``r`` (scalar or array, all > 0)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(~(r_arr > 0)):
        raise DomainError("weights are evaluated only at r > 0")
    a, b = family.exponents
    s = 1.0 + r_arr
    # k-th derivatives of r^a and (1+r)^-b
    u = [_falling(a, k) * r_arr ** (a - k) for k in range(4)]
    v = [_falling(-b, k) * s ** (-b - k) for k in range(4)]
    d = [sum(comb(k, j) * u[j] * v[k - j] for j in range(k + 1)) for k in range(4)]
    if np.ndim(r) == 0:
        d = [float(x) for x in d]
    return WeightSample(*d)


def combo_gradient(family: WeightFamily, r):
    """``phi' - phi/r``, the multiplier of the gradient term in the virial derivative."""
    w = eval_weight(family, r)
    return w.d1 - w.phi / np.asarray(r, dtype=float)


def combo_quadratic(family: WeightFamily, K: int, r):
    """``4 K^2 phi/r^3 - phi'/r^2 + phi''/r - phi'''`` for vorticity-like index K."""
    w = eval_weight(family, r)
    r = np.asarray(r, dtype=float)
    out = 4.0 * K * K * w.phi / r**3 - w.d1 / r**2 + w.d2 / r - w.d3
    return float(out) if out.ndim == 0 else out


def m1_coefficient(S: int, r, epsilon: float, C: float = 1.0):
    """Numerator of the Strong quadratic coefficient minus the small-data correction."""
    r = np.asarray(r, dtype=float)
    s = r + 1.0
    out = (4 * S * S - 1) * s**3 - 2.0 * s**2 + 24.0 * r - 4.0 * C * epsilon**4 * s**2
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- identity checks

def _strong_quotients(r):
    s = 1.0 + r
    return {
        "d1": r**2 * (r + 3) / s**3,
        "d1-phi/r": 2 * r**2 / s**3,
        "phi/(r(1+r))": r**2 / s**3,
        "d2-d1/r": -(r**3 + 4 * r**2 - 3 * r) / s**4,
        "quadratic(K=1)": (4 * s**3 - r**3 - 5 * r**2 + 17 * r - 3) / s**5,
        "quadratic(K=2) regrouped": (15 * s**3 - 2 * s**2 + 24 * r) / s**5,
    }


def _delta_quotients(r, d):
    s = 1.0 + r
    poly = d**2 * (r**3 - 3 * r**2 - 9 * r - 5) + d * (r**3 + 13 * r**2 + 5 * r - 7) - r**3 - 5 * r**2 + 17 * r - 3
    # half of combo_quadratic at K=1
    half_quad = (4 - d**3) * r**d / (2 * s**2) + r**d * poly / (2 * s**5)
    return {
        "d1": r ** (2 + d) * (3 + d + (1 + d) * r) / s**3,
        "d1-phi/r": r ** (2 + d) * (2 + d + d * r) / s**3,
        "phi/r": r ** (2 + d) / s**2,
        "d2-d1/r": r ** (d + 1) / s**4 * ((d**2 - 1) * r**2 + 2 * (d**2 + 2 * d - 2) * r + 3 + d**2 + 4 * d),
        "quadratic(K=1)/2": half_quad,
    }


@dataclass(frozen=True)
class WeightIdentityReport:
    family: str
    max_residual: float
    fd_residual: float
    per_identity: dict

    def __float__(self):
        return self.max_residual


def _fd_check(family: WeightFamily, r: np.ndarray, step: float) -> float:
    """Max error of closed-form d1..d3 against Richardson central differences."""
    hs = np.minimum(step, r / 4.0)

    def central(fn, h):
        return (fn(r + h) - fn(r - h)) / (2 * h)

    worst = 0.0
    getters = [lambda x: eval_weight(family, x).phi, lambda x: eval_weight(family, x).d1,
               lambda x: eval_weight(family, x).d2]
    exact = eval_weight(family, r)
    for k, fn in enumerate(getters):
        rich = (4 * central(fn, hs / 2) - central(fn, hs)) / 3
        target = (exact.d1, exact.d2, exact.d3)[k]
        worst = max(worst, float(np.max(np.abs(rich - target))))
    return worst


def verify_weight_identities(family: WeightFamily, grid: RadialGrid, fd_step: float = 1e-3) -> WeightIdentityReport:
    """Compare Leibniz derivatives with the lemma quotient forms on every grid node."""
    r = grid.nodes
    w = eval_weight(family, r)
    if family.tag == "Strong":
        quot = _strong_quotients(r)
        assembled = {
            "d1": w.d1,
            "d1-phi/r": w.d1 - w.phi / r,
            "phi/(r(1+r))": w.phi / (r * (1 + r)),
            "d2-d1/r": w.d2 - w.d1 / r,
            "quadratic(K=1)": combo_quadratic(family, 1, r),
            "quadratic(K=2) regrouped": combo_quadratic(family, 2, r),
        }
    elif family.tag == "Delta":
        quot = _delta_quotients(r, family.delta)
        assembled = {
            "d1": w.d1,
            "d1-phi/r": w.d1 - w.phi / r,
            "phi/r": w.phi / r,
            "d2-d1/r": w.d2 - w.d1 / r,
            "quadratic(K=1)/2": 0.5 * combo_quadratic(family, 1, r),
        }
    else:
        raise ConfigurationError("quotient identities exist only for the Strong and Delta families")
    per = {k: float(np.max(np.abs(assembled[k] - quot[k]))) for k in quot}
    return WeightIdentityReport(str(family), max(per.values()), _fd_check(family, r, fd_step), per)
