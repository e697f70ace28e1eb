"""Independent analytic oracles: integration-by-parts identities and an explicit static solution.

The identity checks use test functions with closed-form derivatives so that
only quadrature error enters.  The static solution is the explicit real
excited state of the massless cubic honeycomb model; its stationarity under
the discrete right-hand side fixes the coefficient convention of the cubic
term.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import rhs
from .errors import ConfigurationError
from .radial_grid import RadialGrid, integrate_dr, integrate_rdr
from .spinor_model import Honeycomb, ModelSpec, SpinorField, norms
from .weights import WeightFamily, eval_weight


# ---------------------------------------------------------------- test functions

@dataclass(frozen=True)
class TestFunction:
    """Sum of terms ``a r^q exp(-b r)`` with ``q >= 2`` and ``b > 0``."""
    __test__ = False  # keep pytest from collecting this class
    terms: tuple = ((1.0, 2, 1.0),)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(tuple(t) for t in self.terms))
        for a, q, b in self.terms:
            if q < 2 or b <= 0:
                raise ConfigurationError(f"test-function term needs q >= 2 and b > 0, got q={q}, b={b}")

    def derivatives(self, r):
        """Return ``f, f', f''`` at ``r``."""
        r = np.asarray(r, dtype=float)
        f = np.zeros_like(r)
        f1 = np.zeros_like(r)
        f2 = np.zeros_like(r)
        for a, q, b in self.terms:
            e = a * np.exp(-b * r)
            f += e * r**q
            f1 += e * (q * r ** (q - 1) - b * r**q)
            f2 += e * (q * (q - 1) * r ** (q - 2) - 2 * b * q * r ** (q - 1) + b * b * r**q)
        return f, f1, f2


ZERO_FUNCTION = TestFunction(((0.0, 2, 1.0),))

# the three functions of the identity sweep
SWEEP_FUNCTIONS = (
    TestFunction(((1.0, 2, 1.0),)),
    TestFunction(((1.0, 3, 2.0), (-0.5, 2, 1.0))),
    TestFunction(((0.5, 4, 1.5), (0.2, 5, 3.0))),
)


@dataclass(frozen=True)
class IdentityResidual:
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.residual))


def cl1_residual(f: TestFunction, weight: WeightFamily, K: int, grid: RadialGrid, which: str = "first") -> IdentityResidual:
    """Both sides of the weighted integration-by-parts identity for the radial Laplacian.

    ``which="first"`` uses ``(d/dr + (K+1)/r)(d/dr - K/r) f = f'' + f'/r - K^2 f/r^2``,
    ``which="second"`` uses ``(d/dr - K/r)(d/dr + (K+1)/r) f = f'' + f'/r - (K+1)^2 f/r^2``.
    """
    if which not in ("first", "second"):
        raise ValueError("which must be 'first' or 'second'")
    r = grid.nodes
    w = eval_weight(weight, r)
    v, v1, v2 = f.derivatives(r)
    k_eff = K if which == "first" else K + 1
    if which == "first":
        inner = v1 - K * v / r
        inner_d = v2 - K * (v1 / r - v / r**2)
        op = inner_d + (K + 1) * inner / r
    else:
        inner = v1 + (K + 1) * v / r
        inner_d = v2 + (K + 1) * (v1 / r - v / r**2)
        op = inner_d - K * inner / r
    lhs = integrate_dr((w.phi * v1 + 0.5 * w.d1 * v) * op, grid)
    rhs_val = (-0.5 * integrate_dr((2 * w.d1 - 2 * w.phi / r) * v1**2, grid)
               - 0.5 * integrate_dr((2 * w.phi * k_eff**2 / r**3 + w.d2 / (2 * r)
                                     - w.d1 / (2 * r**2) - 0.5 * w.d3) * v**2, grid))
    return IdentityResidual(lhs, rhs_val)


def int0_residual(f: TestFunction, weight: WeightFamily, grid: RadialGrid) -> float:
    """Quadrature of ``(phi f' + phi' f / 2) f``, a total derivative that integrates to zero."""
    w = eval_weight(weight, grid.nodes)
    v, v1, _ = f.derivatives(grid.nodes)
    return integrate_dr((w.phi * v1 + 0.5 * w.d1 * v) * v, grid)


# ---------------------------------------------------------------- explicit static solution

@dataclass(frozen=True)
class BFProfile:
    S: int = 1
    lam: float = 1.0

    def __post_init__(self):
        if self.S in (0, -1):
            raise ConfigurationError(f"vorticity S={self.S} is excluded: S must lie outside {{-1, 0}}")
        if not self.lam > 0:
            raise ConfigurationError(f"lambda must be positive, got {self.lam}")

    @property
    def sigma(self) -> int:
        return 1

    @property
    def tau(self) -> int:
        return 1 if 2 * self.S + 1 > 0 else -1


def bf_components(S: int, x):
    """``V(x)`` and ``U(x) = x^(2S+1) V(x)`` of the unscaled profile.

    ``V = c x^(-(S+1)) / (x^(2S+1) + x^(-(2S+1)))`` with ``c = (2|2S+1|)^(1/2)``,
    written as ``c x^S / (1 + x^(4S+2))``, which holds for either sign of 2S+1.
    """
    x = np.asarray(x, dtype=float)
    k = 2 * S + 1
    c = np.sqrt(2.0 * abs(k))
    V = c * x**S / (1.0 + x ** (2 * k))
    U = x**k * V
    return V, U


def bf_profile(params: BFProfile, grid: RadialGrid) -> SpinorField:
    lam = params.lam
    V, U = bf_components(params.S, grid.nodes / lam)
    z = np.zeros(grid.n)
    return SpinorField(grid, params.tau * V / np.sqrt(lam), z, params.sigma * U / np.sqrt(lam), z, params.S)


@dataclass(frozen=True)
class StaticConvention:
    """How the honeycomb parameters (beta1, beta2) map onto the radial cubic term.

    ``"radial"`` uses them as is; ``"fw"`` doubles beta2 as in the complex
    two-dimensional honeycomb system.  ``g`` is the coupling in front of the
    resulting cubic term.
    """
    mapping: str
    g: float

    def model(self, S: int, beta1: float = 2.0, beta2: float = 1.0) -> ModelSpec:
        b2 = 2 * beta2 if self.mapping == "fw" else beta2
        return ModelSpec(0.0, S, Honeycomb(beta1, b2, self.g))

    def describe(self) -> str:
        return f"{self.mapping}(g={self.g:g})"


STATIC_CANDIDATES = (
    StaticConvention("radial", 1.0), StaticConvention("radial", -1.0),
    StaticConvention("fw", 1.0), StaticConvention("fw", -1.0),
    StaticConvention("fw", 0.5), StaticConvention("fw", -0.5),
)
# selected by select_static_convention and pinned by a regression test
SELECTED_STATIC = StaticConvention("fw", -0.5)
REJECTED_STATIC = StaticConvention("fw", 0.5)


def static_residual(profile: SpinorField, convention: StaticConvention = SELECTED_STATIC,
                    beta1: float = 2.0, beta2: float = 1.0) -> float:
    """L^2(r dr) norm of the time derivative of a static profile.

    Uses the 4th-order accurate right-hand side with one-sided outer stencils:
    the profile decays only algebraically, so it is not small at ``rmax``.
    """
    S = profile.vorticity
    if S is None:
        raise ConfigurationError("static profile must carry its vorticity")
    out = rhs(convention.model(S, beta1, beta2), profile, conservative=False, outer="one_sided")
    return float(np.sqrt(integrate_rdr(out.modulus_sq(), profile.grid)))


def select_static_convention(grid: RadialGrid, S: int = 1, lam: float = 1.0):
    """Residual of every candidate convention; returns ``(best, {description: residual})``."""
    prof = bf_profile(BFProfile(S, lam), grid)
    table = {c.describe(): static_residual(prof, c) for c in STATIC_CANDIDATES}
    best = min(STATIC_CANDIDATES, key=lambda c: table[c.describe()])
    return best, table


@dataclass(frozen=True)
class SmallnessRow:
    lam: float
    l_inf: float
    l2_rdr: float
    l2_dr: float

    @property
    def product(self) -> float:
        """``l_inf * l2_rdr``, invariant under the profile's scaling."""
        return self.l_inf * self.l2_rdr


BF_LAMBDAS = (0.25, 0.5, 1.0, 2.0, 4.0)


def bf_smallness_report(S: int, grid: RadialGrid, lambdas=BF_LAMBDAS) -> list[SmallnessRow]:
    """Size of the static profile across the scaling family.

    Under ``phi -> lam^(-1/2) phi(r/lam)`` the sup norm scales like
    ``lam^(-1/2)`` and the ``r dr`` norm like ``lam^(1/2)``, so neither is
    small for every lambda and their product is fixed.  The ``dr`` norm is
    scale invariant.
    """
    rows = []
    for lam in lambdas:
        prof = bf_profile(BFProfile(S, lam), grid)
        nrm = norms(prof, 0.0)
        rows.append(SmallnessRow(float(lam), nrm.l_inf, nrm.l2_rdr,
                                 float(np.sqrt(integrate_dr(prof.modulus_sq(), grid)))))
    return rows
