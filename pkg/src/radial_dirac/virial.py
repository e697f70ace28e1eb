"""Virial functionals J1, K1t, J2, K2t, J and H with their analytic time derivatives.

Every virial integral uses the measure dr; the weight enters only through
its closed-form samples.  Radial derivatives of the fields (and of the
evaluated nonlinearity, for the N4 term) come from the grid stencils with
parity ghosts when the field carries a vorticity.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigurationError
from .radial_grid import derivative, integrate_dr
from .spinor_model import ModelSpec, SpinorField, eval_nonlinearity, parity_of
from .weights import HWeight, WeightFamily, combo_gradient, combo_quadratic, eval_weight


class _Ctx:
    """Derivatives and weight samples shared by all functionals at one instant."""

    def __init__(self, field: SpinorField, model: ModelSpec, weight: WeightFamily):
        if weight.tag not in ("Strong", "Delta"):
            raise ConfigurationError("J functionals use the Strong or Delta weight")
        grid = field.grid
        S = model.vorticity
        self.field, self.model, self.weight, self.grid = field, model, weight, grid
        self.S, self.m = S, model.mass
        self.r = r = grid.nodes
        self.w = eval_weight(weight, r)
        # fields without a vorticity get one-sided stencils at the origin
        self.parity = field.vorticity is not None
        self.p = {c: getattr(field, c) for c in ("p11", "p12", "p21", "p22")}
        self.dp = {c: field.d(c) for c in self.p}
        nl = eval_nonlinearity(model, field)
        self.W = {"p11": nl.w11, "p12": nl.w12, "p21": nl.w21, "p22": nl.w22}
        self._dW = None

    @property
    def dW(self):
        if self._dW is None:
            self._dW = {c: derivative(v, self.grid, parity=parity_of(c, self.S) if self.parity else None)
                        for c, v in self.W.items()}
        return self._dW

    # continuum operators applied with the stencil derivative
    def A(self, f, df):
        return df + (self.S + 1) * f / self.r

    def B(self, f, df):
        return df - self.S * f / self.r

    def bracket(self, f, df):
        return self.w.phi * df + 0.5 * self.w.d1 * f

    def integral(self, values):
        return integrate_dr(values, self.grid)


def _j1(c: _Ctx) -> float:
    p, dp = c.p, c.dp
    X = c.A(p["p22"], dp["p22"]) - c.m * p["p12"]
    return c.integral(c.bracket(p["p11"], dp["p11"]) * X)


def _k1t(c: _Ctx) -> float:
    p, dp = c.p, c.dp
    Y = c.B(p["p11"], dp["p11"]) - c.m * p["p21"]
    return c.integral(c.bracket(p["p22"], dp["p22"]) * Y)


def _j2(c: _Ctx) -> float:
    p, dp = c.p, c.dp
    Z = c.A(p["p21"], dp["p21"]) - c.m * p["p11"]
    return c.integral(c.bracket(p["p12"], dp["p12"]) * Z)


def _k2t(c: _Ctx) -> float:
    p, dp = c.p, c.dp
    V = c.B(p["p12"], dp["p12"]) - c.m * p["p22"]
    return c.integral(c.bracket(p["p21"], dp["p21"]) * V)


def compute_j1(field: SpinorField, model: ModelSpec, weight: WeightFamily) -> float:
    return _j1(_Ctx(field, model, weight))


def compute_k1t(field: SpinorField, model: ModelSpec, weight: WeightFamily) -> float:
    return _k1t(_Ctx(field, model, weight))


def compute_j2(field: SpinorField, model: ModelSpec, weight: WeightFamily) -> float:
    return _j2(_Ctx(field, model, weight))


def compute_k2t(field: SpinorField, model: ModelSpec, weight: WeightFamily) -> float:
    return _k2t(_Ctx(field, model, weight))


def compute_j(field: SpinorField, model: ModelSpec, weight: WeightFamily) -> float:
    c = _Ctx(field, model, weight)
    return _j1(c) + _k1t(c) - _j2(c) - _k2t(c)


def _n_terms(c: _Ctx) -> tuple[float, float, float, float]:
    p, dp, W = c.p, c.dp, c.W
    w, r, S = c.w, c.r, c.S
    n1 = c.integral(w.d1 * (p["p11"] * W["p11"] + p["p12"] * W["p12"] - p["p21"] * W["p21"] - p["p22"] * W["p22"])) \
        + 2 * c.integral(w.phi * (W["p11"] * dp["p11"] + W["p12"] * dp["p12"] - W["p21"] * dp["p21"] - W["p22"] * dp["p22"]))
    d_phi_over_r = w.d1 / r - w.phi / r**2
    n2 = -(2 * S + 1) * c.integral(w.phi / r * (
        dp["p11"] * W["p21"] + dp["p21"] * W["p11"] + dp["p12"] * W["p22"] + dp["p22"] * W["p12"])) \
        - c.integral(d_phi_over_r * (
            S * W["p21"] * p["p11"] + (S + 1) * W["p11"] * p["p21"]
            + S * W["p22"] * p["p12"] + (S + 1) * W["p12"] * p["p22"]))
    n3 = 0.5 * c.integral((w.d2 - w.d1 / r) * (
        W["p21"] * p["p11"] - W["p11"] * p["p21"] + W["p22"] * p["p12"] - W["p12"] * p["p22"]))
    dW = c.dW
    n4 = -2 * c.integral(w.phi * (
        dW["p21"] * dp["p11"] - dW["p11"] * dp["p21"] + dW["p22"] * dp["p12"] - dW["p12"] * dp["p22"]))
    return n1, n2, n3, n4


def compute_n_terms(field: SpinorField, model: ModelSpec, weight: WeightFamily):
    return _n_terms(_Ctx(field, model, weight))


def _quadratic_parts(c: _Ctx):
    r = c.r
    grad = combo_gradient(c.weight, r)
    qS = combo_quadratic(c.weight, c.S, r)
    qS1 = combo_quadratic(c.weight, c.S + 1, r)
    return grad, qS, qS1


def _dj_rhs(c: _Ctx, n_terms=None) -> float:
    p, dp = c.p, c.dp
    grad, qS, qS1 = _quadratic_parts(c)
    grad_sq = sum(v**2 for v in dp.values())
    n1, n2, n3, n4 = n_terms if n_terms is not None else _n_terms(c)
    return (
        -c.integral(grad * grad_sq)
        - 0.25 * c.integral(qS1 * (p["p21"] ** 2 + p["p22"] ** 2))
        - 0.25 * c.integral(qS * (p["p11"] ** 2 + p["p12"] ** 2))
        + c.m * n1 + n2 + n3 + n4
    )


def compute_dj_rhs(field: SpinorField, model: ModelSpec, weight: WeightFamily) -> float:
    """Assembled right side of the time derivative of J."""
    return _dj_rhs(_Ctx(field, model, weight))


def _per_functional_rhs(c: _Ctx) -> tuple[float, float, float, float]:
    """Separate time derivatives of J1, K1t, J2, K2t (their signed sum is dJ/dt)."""
    p, dp, W, dW, m = c.p, c.dp, c.W, c.dW, c.m
    grad, qS, qS1 = _quadratic_parts(c)
    X = c.A(p["p22"], dp["p22"]) - m * p["p12"]
    Y = c.B(p["p11"], dp["p11"]) - m * p["p21"]
    Z = c.A(p["p21"], dp["p21"]) - m * p["p11"]
    V = c.B(p["p12"], dp["p12"]) - m * p["p22"]
    br = c.bracket
    I = c.integral
    dj1 = (I(br(W["p12"], dW["p12"]) * X)
           + I(br(p["p11"], dp["p11"]) * (-c.A(W["p21"], dW["p21"]) + m * W["p11"]))
           - I(grad * dp["p11"] ** 2) - 0.25 * I(qS * p["p11"] ** 2))
    dk1 = (-I(br(W["p21"], dW["p21"]) * Y)
           + I(br(p["p22"], dp["p22"]) * (c.B(W["p12"], dW["p12"]) - m * W["p22"]))
           - I(grad * dp["p22"] ** 2) - 0.25 * I(qS1 * p["p22"] ** 2))
    dj2 = (-I(br(W["p11"], dW["p11"]) * Z)
           - I(br(p["p12"], dp["p12"]) * (-c.A(W["p22"], dW["p22"]) + m * W["p12"]))
           + I(grad * dp["p12"] ** 2) + 0.25 * I(qS * p["p12"] ** 2))
    dk2 = (I(br(W["p22"], dW["p22"]) * V)
           - I(br(p["p21"], dp["p21"]) * (c.B(W["p11"], dW["p11"]) - m * W["p21"]))
           + I(grad * dp["p21"] ** 2) + 0.25 * I(qS1 * p["p21"] ** 2))
    return dj1, dk1, dj2, dk2


def per_functional_rhs(field: SpinorField, model: ModelSpec, weight: WeightFamily):
    return _per_functional_rhs(_Ctx(field, model, weight))


# ---------------------------------------------------------------- H functional

def compute_h(field: SpinorField) -> float:
    w = eval_weight(HWeight(), field.grid.nodes)
    return integrate_dr(w.phi * field.modulus_sq(), field.grid)


def compute_dh_rhs(field: SpinorField, model: ModelSpec) -> float:
    grid = field.grid
    w = eval_weight(HWeight(), grid.nodes)
    nl = eval_nonlinearity(model, field)
    kinetic = -2 * integrate_dr((w.d1 - w.phi / grid.nodes) * (field.p11 * field.p22 - field.p12 * field.p21), grid)
    nonlinear = 2 * integrate_dr(w.phi * (field.p11 * nl.w12 - field.p12 * nl.w11
                                          + field.p21 * nl.w22 - field.p22 * nl.w21), grid)
    return kinetic + nonlinear


# ---------------------------------------------------------------- reports

def coercive_densities(weight: WeightFamily, r):
    """Densities (gradient, field) on the right of the coercivity estimate, measure dr."""
    if weight.tag == "Strong":
        return r**2 / (1 + r) ** 3, (1 + r) ** -3.0
    d = weight.delta
    return r ** (2 + d) / (1 + r) ** 2, r**d / (1 + r) ** 2


@dataclass(frozen=True)
class VirialReport:
    j1: float
    k1t: float
    j2: float
    k2t: float
    j_total: float
    h_total: float
    n1: float
    n2: float
    n3: float
    n4: float
    dj_rhs: float
    dh_rhs: float
    coercive_grad: float
    coercive_field: float
    dj1_rhs: float
    dk1t_rhs: float
    dj2_rhs: float
    dk2t_rhs: float
    # int r/(1+r)^4 |phi|^2 dr, the density bounding |dH/dt|
    h_chain: float
    # int (|grad phi|^2 + |phi|^2) r^kappa dr with kappa = 1 (Strong) or 1 + delta
    j_bound: float

    @property
    def prop_sum(self) -> float:
        return self.dj1_rhs + self.dk1t_rhs - self.dj2_rhs - self.dk2t_rhs


def virial_report(field: SpinorField, model: ModelSpec, weight: WeightFamily) -> VirialReport:
    c = _Ctx(field, model, weight)
    j1, k1t, j2, k2t = _j1(c), _k1t(c), _j2(c), _k2t(c)
    nt = _n_terms(c)
    r = c.r
    m2 = field.modulus_sq()
    g2 = sum(v**2 for v in c.dp.values())
    dens_g, dens_f = coercive_densities(weight, r)
    kappa = 1.0 if weight.tag == "Strong" else 1.0 + weight.delta
    per = _per_functional_rhs(c)
    return VirialReport(
        j1=j1, k1t=k1t, j2=j2, k2t=k2t,
        j_total=j1 + k1t - j2 - k2t,
        h_total=compute_h(field),
        n1=nt[0], n2=nt[1], n3=nt[2], n4=nt[3],
        dj_rhs=_dj_rhs(c, nt),
        dh_rhs=compute_dh_rhs(field, model),
        coercive_grad=c.integral(dens_g * g2),
        coercive_field=c.integral(dens_f * m2),
        dj1_rhs=per[0], dk1t_rhs=per[1], dj2_rhs=per[2], dk2t_rhs=per[3],
        h_chain=c.integral(r / (1 + r) ** 4 * m2),
        j_bound=c.integral((g2 + m2) * r**kappa),
    )


REPORT_FIELDS = tuple(f.name for f in fields(VirialReport))


# ---------------------------------------------------------------- checks along runs

def _fd_weights(nodes, x0) -> np.ndarray:
    """Weights of the first derivative at ``x0`` exact for polynomials of degree len(nodes)-1."""
    d = np.asarray(nodes, dtype=float) - x0
    k = np.arange(len(d))
    V = d[None, :] ** k[:, None]
    rhs = (k == 1).astype(float)
    return np.linalg.solve(V, rhs)


def time_derivative(t, F) -> np.ndarray:
    """Derivative of sampled ``F`` at the interior samples ``t[1:-1]``.

    Five-point stencils (4th order, nonuniform spacing allowed), shifted
    inward next to the ends; with fewer than five samples the three-point
    2nd-order stencil is used.
    """
    t = np.asarray(t, dtype=float)
    F = np.asarray(F, dtype=float)
    n = len(t)
    if n < 5:
        h0 = t[1:-1] - t[:-2]
        h1 = t[2:] - t[1:-1]
        return (-h1 / (h0 * (h0 + h1)) * F[:-2] + (h1 - h0) / (h0 * h1) * F[1:-1] + h0 / (h1 * (h0 + h1)) * F[2:])
    out = np.empty(n - 2)
    for i in range(1, n - 1):
        lo = min(max(i - 2, 0), n - 5)
        # rescale by the local step so the Vandermonde solve stays well conditioned
        scale = t[lo + 4] - t[lo]
        w = _fd_weights(t[lo:lo + 5] / scale, t[i] / scale) / scale
        out[i - 1] = w @ F[lo:lo + 5]
    return out


_IDENTITIES = {
    "J": ("j_total", "dj_rhs"),
    "H": ("h_total", "dh_rhs"),
    "J1": ("j1", "dj1_rhs"),
    "K1t": ("k1t", "dk1t_rhs"),
    "J2": ("j2", "dj2_rhs"),
    "K2t": ("k2t", "dk2t_rhs"),
}


@dataclass(frozen=True)
class IdentityCheck:
    which: str
    times: np.ndarray
    fd: np.ndarray
    rhs: np.ndarray
    residuals: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.residuals.size else 0.0

    @property
    def max_rhs(self) -> float:
        return float(np.max(np.abs(self.rhs))) if self.rhs.size else 0.0

    @property
    def relative(self) -> float:
        """max residual / max |RHS| (0 when both vanish)."""
        if self.max_rhs == 0:
            return 0.0 if self.max_residual == 0 else float("inf")
        return self.max_residual / self.max_rhs


def verify_virial_identity(run, which: str = "J") -> IdentityCheck:
    """Compare finite differences of a recorded functional with its analytic derivative."""
    if which not in _IDENTITIES:
        raise ValueError(f"unknown identity {which!r}; expected one of {tuple(_IDENTITIES)}")
    if len(run.times) < 3:
        raise ValueError("identity check needs at least 3 recordings")
    fname, rname = _IDENTITIES[which]
    t = np.asarray(run.times)
    F = np.array([getattr(v, fname) for v in run.virial_series])
    R = np.array([getattr(v, rname) for v in run.virial_series])
    fd = time_derivative(t, F)
    return IdentityCheck(which, t[1:-1], fd, R[1:-1], np.abs(fd - R[1:-1]))


@dataclass(frozen=True)
class CoercivityResult:
    c_estimate: float | None
    violations: int
    ratios: np.ndarray

    @property
    def applicable(self) -> bool:
        return self.c_estimate is not None


def coercivity_check(run) -> CoercivityResult:
    """Minimal ratio of -dJ/dt (finite differences) to the coercive integrals."""
    if len(run.times) < 3:
        raise ValueError("coercivity check needs at least 3 recordings")
    t = np.asarray(run.times)
    J = np.array([v.j_total for v in run.virial_series])
    cs = np.array([v.coercive_grad + v.coercive_field for v in run.virial_series])[1:-1]
    minus_dj = -time_derivative(t, J)
    mask = cs > 0
    if not mask.any():
        return CoercivityResult(None, 0, np.array([]))
    ratios = minus_dj[mask] / cs[mask]
    return CoercivityResult(float(ratios.min()), int(np.sum(ratios <= 0)), ratios)
