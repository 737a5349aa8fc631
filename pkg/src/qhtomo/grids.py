"""Uniform sampling grids for wave functions and phase-space densities."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Grid1D:
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("Grid1D needs at least 2 points")
        if not self.hi > self.lo:
            raise ValueError("Grid1D needs hi > lo")

    @property
    def spacing(self):
        return (self.hi - self.lo) / (self.n - 1)

    @cached_property
    def xs(self):
        return np.linspace(self.lo, self.hi, self.n)

    def covers(self, x):
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class Grid2D:
    """Product grid in (x, omega) phase space."""

    x: Grid1D
    omega: Grid1D

    @classmethod
    def square(cls, lo, hi, n):
        return cls(Grid1D(lo, hi, n), Grid1D(lo, hi, n))


@dataclass(frozen=True)
class WignerGrid:
    grid: Grid2D
    values: np.ndarray  # real, shape (grid.x.n, grid.omega.n)

    def __post_init__(self):
        if self.values.shape != (self.grid.x.n, self.grid.omega.n):
            raise ValueError("value array does not match the grid shape")

    def integral(self):
        """Trapezoid integral over the grid."""
        wx = _trapezoid_weights(self.grid.x)
        ww = _trapezoid_weights(self.grid.omega)
        return float(wx @ self.values @ ww)

    def marginal_x(self):
        """Trapezoid marginal along omega, one value per x grid point."""
        return self.values @ _trapezoid_weights(self.grid.omega)

    def marginal_omega(self):
        return _trapezoid_weights(self.grid.x) @ self.values


def _trapezoid_weights(grid: Grid1D):
    w = np.full(grid.n, grid.spacing)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


# Standard evaluation grid for wave functions.  Spacing 1/64 resolves every
# built-in state and all Wilson atoms up to Z = 8 (modulations <= 8 cycles
# per unit); the range [-28, 28] covers atoms translated out to |x| = 15
# plus their exponential tails.
STD_LO = -28.0
STD_HI = 28.0
STD_SPACING = 1.0 / 64.0
STD_N = int(round((STD_HI - STD_LO) / STD_SPACING)) + 1
STD_GRID = Grid1D(STD_LO, STD_HI, STD_N)

DEFAULT_WIGNER_GRID = Grid2D.square(-8.0, 8.0, 1024)
