"""Staggered radial grid on (0, rmax) with midpoint quadrature and 4th-order differences.

Nodes sit at cell midpoints ``r_j = (j + 1/2) h`` so that no node touches the
coordinate singularity at ``r = 0`` and every ``1/r**k`` factor is finite.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

MIN_NODES = 16

# 4th-order central first-derivative weights for offsets -2..2
_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
# 4th-order one-sided weights: node 0 uses offsets 0..4, node 1 uses -1..3
_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0


@dataclass(frozen=True)
class RadialGrid:
    n: int
    rmax: float
    h: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < MIN_NODES:
            raise ConfigurationError(f"grid needs n >= {MIN_NODES} nodes, got {self.n}")
        if not np.isfinite(self.rmax) or self.rmax <= 0:
            raise ConfigurationError(f"grid radius must be positive, got rmax={self.rmax}")
        h = self.rmax / self.n
        nodes = (np.arange(self.n) + 0.5) * h
        nodes.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "nodes", nodes)

    @property
    def r(self) -> np.ndarray:
        return self.nodes

    def refined(self, factor: int = 2) -> "RadialGrid":
        return RadialGrid(self.n * factor, self.rmax)


def make_grid(rmax: float, n: int) -> RadialGrid:
    return RadialGrid(int(n), float(rmax))


def _check_len(values: np.ndarray, grid: RadialGrid) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape[-1] != grid.n:
        raise ValueError(f"expected {grid.n} nodal values, got {values.shape[-1]}")
    return values


def integrate_dr(values, grid: RadialGrid) -> float:
    """Midpoint rule for the integral of ``values`` over (0, rmax) with measure dr."""
    values = _check_len(values, grid)
    return float(grid.h * np.sum(values, axis=-1))


def integrate_rdr(values, grid: RadialGrid) -> float:
    """Midpoint rule for the integral of ``values`` against the planar radial measure r dr."""
    values = _check_len(values, grid)
    return float(grid.h * np.sum(values * grid.nodes, axis=-1))


def derivative(values, grid: RadialGrid, parity: int | None = None, outer: str = "one_sided") -> np.ndarray:
    """Radial derivative with 4th-order central differences in the interior.

    Parameters
    ----------
    values:
        Nodal values, length ``grid.n``.
    parity:
        ``None`` closes the two innermost nodes with one-sided 4th-order
        stencils.  ``+1``/``-1`` instead fills the ghost points at
        ``-r_0, -r_1`` with the even/odd reflection of the data, which is
        the smooth extension of a vorticity mode through the origin.
    outer:
        ``"one_sided"`` uses mirrored one-sided stencils at the two outermost
        nodes; ``"zero"`` treats the values beyond ``rmax`` as zero
        (Dirichlet-like zero extension).
    """
    f = _check_len(values, grid)
    n = grid.n
    if outer not in ("one_sided", "zero"):
        raise ValueError(f"unknown outer closure {outer!r}")
    if parity not in (None, 1, -1):
        raise ValueError(f"parity must be None, +1 or -1, got {parity!r}")

    left = np.empty(2) if parity is None else parity * f[1::-1]
    right = np.zeros(2) if outer == "zero" else np.empty(2)
    ext = np.concatenate([left, f, right])
    out = (
        _CENTRAL[0] * ext[0:n]
        + _CENTRAL[1] * ext[1:n + 1]
        + _CENTRAL[3] * ext[3:n + 3]
        + _CENTRAL[4] * ext[4:n + 4]
    )
    if parity is None:
        out[0] = _EDGE0 @ f[0:5]
        out[1] = _EDGE1 @ f[0:5]
    if outer == "one_sided":
        out[-1] = -(_EDGE0 @ f[-1:-6:-1])
        out[-2] = -(_EDGE1 @ f[-1:-6:-1])
    return out / grid.h
