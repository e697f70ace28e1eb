"""Spinor field state, model parameters and the pointwise nonlinearities.

The complex radial profiles are split into real parts, ``phi1 = p11 + i p12``
and ``phi2 = p21 + i p22``.  All planar integrals drop the angular factor 2*pi,
except the Strauss ratio which reports the true planar H^1 norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ConfigurationError, DomainError
from .radial_grid import RadialGrid, derivative, integrate_rdr

COMPONENTS = ("p11", "p12", "p21", "p22")


# ---------------------------------------------------------------- nonlinearities

@dataclass(frozen=True)
class Zero:
    power = 3

    def describe(self) -> str:
        return "Zero"


@dataclass(frozen=True)
class Honeycomb:
    beta1: float = 1.0
    beta2: float = 1.0
    g: float = 1.0
    power = 3

    def describe(self) -> str:
        return f"Honeycomb(beta1={self.beta1!r}, beta2={self.beta2!r}, g={self.g!r})"


@dataclass(frozen=True)
class Soler:
    g: float = 1.0
    power = 3

    def describe(self) -> str:
        return f"Soler(g={self.g!r})"


@dataclass(frozen=True)
class PurePower:
    g: float = 1.0
    p: float = 3.0

    def __post_init__(self):
        if not self.p >= 2:
            raise ConfigurationError(f"pure-power exponent must be >= 2, got {self.p}")

    @property
    def power(self):
        return self.p

    def describe(self) -> str:
        return f"PurePower(g={self.g!r}, p={self.p!r})"


Nonlinearity = Zero | Honeycomb | Soler | PurePower


@dataclass(frozen=True)
class ModelSpec:
    mass: float = 0.0
    vorticity: int = 1
    nonlinearity: Nonlinearity = dc_field(default_factory=Zero)

    def __post_init__(self):
        if int(self.vorticity) != self.vorticity:
            raise ConfigurationError(f"vorticity must be an integer, got {self.vorticity}")
        if self.vorticity in (0, -1):
            raise ConfigurationError(
                f"vorticity S={self.vorticity} is excluded: S must lie outside {{-1, 0}}")
        if not np.isfinite(self.mass):
            raise ConfigurationError("mass must be finite")
        object.__setattr__(self, "vorticity", int(self.vorticity))

    @property
    def S(self) -> int:
        return self.vorticity


def parity_of(component: str, S: int) -> int:
    """Reflection parity through r = 0 of a component for vorticity S.

    phi1 behaves like r^|S| and phi2 like r^|S+1| near the origin, so the
    two halves of the spinor always have opposite parity.
    """
    base = 1 if S % 2 == 0 else -1
    return base if component in ("p11", "p12") else -base


# ---------------------------------------------------------------- field

@dataclass
class SpinorField:
    grid: RadialGrid
    p11: np.ndarray
    p12: np.ndarray
    p21: np.ndarray
    p22: np.ndarray
    # when set, derivatives use parity ghosts at the origin instead of one-sided stencils
    vorticity: int | None = None

    def __post_init__(self):
        for name in COMPONENTS:
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (self.grid.n,):
                raise ValueError(f"component {name} has shape {arr.shape}, expected ({self.grid.n},)")
            setattr(self, name, arr)

    @classmethod
    def zeros(cls, grid: RadialGrid, vorticity: int | None = None) -> "SpinorField":
        z = np.zeros(grid.n)
        return cls(grid, z, z, z, z, vorticity)

    @classmethod
    def from_array(cls, grid: RadialGrid, arr: np.ndarray, vorticity: int | None = None) -> "SpinorField":
        return cls(grid, arr[0], arr[1], arr[2], arr[3], vorticity)

    def as_array(self) -> np.ndarray:
        """Stack in the order (p11, p12, p21, p22)."""
        return np.stack([self.p11, self.p12, self.p21, self.p22])

    def copy(self) -> "SpinorField":
        return SpinorField.from_array(self.grid, self.as_array(), self.vorticity)

    def scaled(self, alpha: float) -> "SpinorField":
        return SpinorField.from_array(self.grid, alpha * self.as_array(), self.vorticity)

    def modulus_sq(self) -> np.ndarray:
        return self.p11**2 + self.p12**2 + self.p21**2 + self.p22**2

    def d(self, name: str, outer: str = "one_sided") -> np.ndarray:
        par = None if self.vorticity is None else parity_of(name, self.vorticity)
        return derivative(getattr(self, name), self.grid, parity=par, outer=outer)

    def gradient_sq(self) -> np.ndarray:
        return sum(self.d(c) ** 2 for c in COMPONENTS)


@dataclass
class NonlinearityValue:
    w11: np.ndarray
    w12: np.ndarray
    w21: np.ndarray
    w22: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack([self.w11, self.w12, self.w21, self.w22])


def _w_complex(nl, psi1, psi2):
    """Complex W1, W2 at arrays of complex spinor values."""
    a1 = np.abs(psi1) ** 2
    a2 = np.abs(psi2) ** 2
    if isinstance(nl, Zero):
        return np.zeros_like(psi1), np.zeros_like(psi2)
    if isinstance(nl, Honeycomb):
        return (nl.g * (nl.beta1 * a1 + nl.beta2 * a2) * psi1,
                nl.g * (nl.beta2 * a1 + nl.beta1 * a2) * psi2)
    if isinstance(nl, Soler):
        s = a1 - a2
        return -nl.g * s * psi1, nl.g * s * psi2
    if isinstance(nl, PurePower):
        amp = nl.g * (a1 + a2) ** ((nl.p - 1) / 2)
        return amp * psi1, amp * psi2
    raise ConfigurationError(f"unknown nonlinearity {nl!r}")


def eval_nonlinearity(model: ModelSpec, field: SpinorField) -> NonlinearityValue:
    w1, w2 = _w_complex(model.nonlinearity, field.p11 + 1j * field.p12, field.p21 + 1j * field.p22)
    return NonlinearityValue(w1.real.copy(), w1.imag.copy(), w2.real.copy(), w2.imag.copy())


def gauge_residual(model: ModelSpec, sample, theta: float, S: int) -> float:
    """Max deviation from equivariance under the vorticity-S phase rotation."""
    p11, p12, p21, p22 = (float(x) for x in sample)
    psi1 = np.array([p11 + 1j * p12])
    psi2 = np.array([p21 + 1j * p22])
    e1 = np.exp(1j * S * theta)
    e2 = 1j * np.exp(1j * (S + 1) * theta)
    lhs1, lhs2 = _w_complex(model.nonlinearity, e1 * psi1, e2 * psi2)
    w1, w2 = _w_complex(model.nonlinearity, psi1, psi2)
    diffs = [lhs1 - e1 * w1, lhs2 - e2 * w2]
    return float(max(max(abs(d.real[0]), abs(d.imag[0])) for d in diffs))


def power_bound_ratio(model: ModelSpec, field: SpinorField) -> float:
    """Empirical C in ``|W1| + |W2| <= C |phi|^p`` over the grid."""
    mod = np.sqrt(field.modulus_sq())
    if mod.max(initial=0.0) >= 1.0:
        raise DomainError("the power bound is only asserted where |phi| < 1")
    w = eval_nonlinearity(model, field)
    lhs = np.hypot(w.w11, w.w12) + np.hypot(w.w21, w.w22)
    mask = mod > 0
    if not mask.any():
        return 0.0
    return float(np.max(lhs[mask] / mod[mask] ** model.nonlinearity.power))


# ---------------------------------------------------------------- norms

@dataclass(frozen=True)
class Norms:
    l2_rdr: float
    h1_rdr: float
    e_delta: float
    l_inf: float


def norms(field: SpinorField, delta: float = 0.1) -> Norms:
    if delta < 0:
        raise ValueError("delta must be >= 0")
    grid = field.grid
    m2 = field.modulus_sq()
    g2 = field.gradient_sq()
    l2sq = integrate_rdr(m2, grid)
    gsq = integrate_rdr(g2, grid)
    bracket = (1.0 + grid.nodes**2) ** (delta / 2)
    e_delta = np.sqrt(integrate_rdr(bracket * g2, grid)) + np.sqrt(integrate_rdr(bracket * m2, grid))
    return Norms(
        l2_rdr=float(np.sqrt(l2sq)),
        h1_rdr=float(np.sqrt(l2sq + gsq)),
        e_delta=float(e_delta),
        l_inf=float(np.sqrt(m2.max())),
    )


def local_l2(field: SpinorField, R: float) -> float:
    """L^2(r dr) norm over the ball of radius R, restricted to nodes r < R."""
    grid = field.grid
    if not R > 0:
        raise ValueError("ball radius must be positive")
    if R > grid.rmax:
        raise ValueError(f"ball radius {R} exceeds rmax={grid.rmax}")
    m2 = np.where(grid.nodes < R, field.modulus_sq(), 0.0)
    return float(np.sqrt(integrate_rdr(m2, grid)))


STRAUSS_NORMALIZATION = "planar H^1 including the 2*pi angular factor"


def strauss_ratio(field: SpinorField) -> float:
    """sup r^(1/2)|phi| divided by the planar H^1 norm (2*pi included)."""
    grid = field.grid
    m2 = field.modulus_sq()
    if not np.any(m2 > 0):
        raise DomainError("Strauss ratio is undefined for the zero field")
    num = np.max(np.sqrt(grid.nodes * m2))
    h1 = np.sqrt(2 * np.pi * integrate_rdr(m2 + field.gradient_sq(), grid))
    return float(num / h1)


def reconstruct_cartesian(field: SpinorField, S: int, theta_samples: int):
    """Return ``(theta, psi)`` with ``psi[j, k] = (psi1, psi2)`` at ``(r_j, theta_k)``."""
    if theta_samples < 4:
        raise ValueError("need at least 4 angular samples")
    theta = 2 * np.pi * np.arange(theta_samples) / theta_samples
    phi1 = (field.p11 + 1j * field.p12)[:, None]
    phi2 = (field.p21 + 1j * field.p22)[:, None]
    psi = np.empty((field.grid.n, theta_samples, 2), dtype=complex)
    psi[..., 0] = phi1 * np.exp(1j * S * theta)[None, :]
    psi[..., 1] = 1j * phi2 * np.exp(1j * (S + 1) * theta)[None, :]
    return theta, psi
