"""Wave functions, mixed states and the Wigner transform.

All built-in pure states are analytically normalized in L2(R).  The vacuum
window is g(x) = 2^(1/4) exp(-pi x^2), so |g|^2 is the N(0, 1/(4 pi))
density and the vacuum quadrature has variance 1/(4 pi) at every phase.
"""

import numpy as np

from . import chirp
from .errors import GridTooNarrow
from .grids import Grid1D, Grid2D, STD_GRID, WignerGrid

# Normalization of the Gaussian window.  2^(1/4) makes ||g||_2 = 1; kept as
# a module attribute so the diagnostics mutation check can perturb it.
_VACUUM_NORM = 2.0 ** 0.25

_BOUNDARY_DECAY = 1e-10


def gaussian_window(x):
    """Unit-norm Gaussian window g(x) = 2^(1/4) exp(-pi x^2)."""
    x = np.asarray(x, dtype=float)
    return _VACUUM_NORM * np.exp(-np.pi * x * x)


class WaveFunction:
    """Base class: a unit-norm complex function on the line."""

    label = "abstract"

    def values_on(self, xs):
        raise NotImplementedError

    def ft_values_on(self, nus):
        """Fourier transform (convention exp(-2 pi i x nu)) at points."""
        nus = np.asarray(nus, dtype=float)
        vals = self.std_samples()
        return chirp.nudft(vals, STD_GRID.lo, STD_GRID.spacing, nus.ravel()
                           ).reshape(nus.shape)

    def std_samples(self):
        """Cached tabulation on the standard grid."""
        cached = getattr(self, "_std_cache", None)
        if cached is None:
            cached = np.asarray(self.values_on(STD_GRID.xs), dtype=complex)
            self._std_cache = cached
        return cached

    def ft_table(self, pad_factor=4):
        """Cached sampled Fourier transform, (nu0, dnu, values)."""
        key = "_ft_cache_%d" % pad_factor
        cached = getattr(self, key, None)
        if cached is None:
            cached = chirp.fourier_table(self.std_samples(), STD_GRID.lo,
                                         STD_GRID.spacing, pad_factor)
            setattr(self, key, cached)
        return cached

    # Conservative extents used to size quadrature grids.
    def x_extent(self):
        return 8.0

    def freq_extent(self):
        return 16.0

    def descriptor(self):
        return {"kind": self.label}


class Vacuum(WaveFunction):
    label = "vacuum"
    theta_invariant = True  # quadrature law is the same at every phase

    def values_on(self, xs):
        return gaussian_window(xs).astype(complex)

    def ft_values_on(self, nus):
        return gaussian_window(nus).astype(complex)

    def x_extent(self):
        return 6.0

    def freq_extent(self):
        return 6.0


class Coherent(WaveFunction):
    """Time-frequency shifted window exp(i phase) T_x0 M_w0 g."""

    label = "coherent"

    def __init__(self, x0, w0, phase=0.0):
        self.x0 = float(x0)
        self.w0 = float(w0)
        self.phase = float(phase)

    def values_on(self, xs):
        xs = np.asarray(xs, dtype=float)
        shifted = xs - self.x0
        return (np.exp(1j * (self.phase + 2.0 * np.pi * self.w0 * shifted))
                * gaussian_window(shifted))

    def ft_values_on(self, nus):
        nus = np.asarray(nus, dtype=float)
        shifted = nus - self.w0
        return (np.exp(1j * (self.phase - 2.0 * np.pi * self.x0 * nus))
                * gaussian_window(shifted))

    def x_extent(self):
        return abs(self.x0) + 6.0

    def freq_extent(self):
        return abs(self.w0) + 6.0

    def descriptor(self):
        return {"kind": self.label, "x0": self.x0, "w0": self.w0,
                "phase": self.phase}


class Cat(WaveFunction):
    """Even superposition of two Gaussians at +-x0 (Schroedinger cat)."""

    label = "cat"

    def __init__(self, x0):
        self.x0 = float(x0)

    def _norm(self):
        return 2.0 ** 0.25 * np.sqrt(1.0 + np.exp(-2.0 * np.pi * self.x0 ** 2))

    def values_on(self, xs):
        xs = np.asarray(xs, dtype=float)
        num = (np.exp(-np.pi * (xs - self.x0) ** 2)
               + np.exp(-np.pi * (xs + self.x0) ** 2))
        return (num / self._norm()).astype(complex)

    def ft_values_on(self, nus):
        nus = np.asarray(nus, dtype=float)
        num = 2.0 * np.exp(-np.pi * nus ** 2) * np.cos(2.0 * np.pi * nus * self.x0)
        return (num / self._norm()).astype(complex)

    def x_extent(self):
        return abs(self.x0) + 6.0

    def freq_extent(self):
        return 6.0

    def descriptor(self):
        return {"kind": self.label, "x0": self.x0}


class Fock2(WaveFunction):
    """Two-photon state 2^(-1/4) (4 pi x^2 - 1) exp(-pi x^2)."""

    label = "fock2"
    theta_invariant = True  # Hermite eigenfunction of every A_theta

    def values_on(self, xs):
        xs = np.asarray(xs, dtype=float)
        poly = 4.0 * np.pi * xs * xs - 1.0
        return (2.0 ** -0.25 * poly * np.exp(-np.pi * xs * xs)).astype(complex)

    def ft_values_on(self, nus):
        # second Hermite eigenfunction of this Fourier convention: (-i)^2 = -1
        return -self.values_on(nus)

    def x_extent(self):
        return 6.0

    def freq_extent(self):
        return 6.0


class Tabulated(WaveFunction):
    """Sampled wave function; linear interpolation inside the grid, zero
    outside."""

    label = "tabulated"

    def __init__(self, grid: Grid1D, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != (grid.n,):
            raise ValueError("values do not match the grid")
        self.grid = grid
        self.values = values

    def values_on(self, xs):
        xs = np.asarray(xs, dtype=float)
        gx = self.grid.xs
        re = np.interp(xs, gx, self.values.real, left=0.0, right=0.0)
        im = np.interp(xs, gx, self.values.imag, left=0.0, right=0.0)
        return re + 1j * im

    def std_samples(self):
        cached = getattr(self, "_std_cache", None)
        if cached is None:
            g = self.grid
            if (abs(g.lo - STD_GRID.lo) < 1e-12 and abs(g.hi - STD_GRID.hi) < 1e-12
                    and g.n == STD_GRID.n):
                cached = self.values
            else:
                cached = self.values_on(STD_GRID.xs)
            self._std_cache = cached
        return cached

    def ft_values_on(self, nus):
        nus = np.asarray(nus, dtype=float)
        return chirp.nudft(self.values, self.grid.lo, self.grid.spacing,
                           nus.ravel()).reshape(nus.shape)

    def x_extent(self):
        return max(abs(self.grid.lo), abs(self.grid.hi))


class MixedState:
    """Convex combination of pure states (components treated as
    orthonormal by contract)."""

    def __init__(self, weights, components):
        weights = np.asarray(weights, dtype=float)
        if len(weights) != len(components):
            raise ValueError("one weight per component")
        if np.any(weights <= 0.0):
            raise ValueError("weights must be positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        self.weights = weights
        self.components = list(components)


def eval_psi(state: WaveFunction, x):
    """Evaluate the wave function at a point (or array of points)."""
    out = state.values_on(np.asarray(x, dtype=float))
    if np.isscalar(x) or np.ndim(x) == 0:
        return complex(out.ravel()[0])
    return out


def inner_product(a: WaveFunction, b: WaveFunction, grid: Grid1D = STD_GRID):
    """<a, b> by trapezoid quadrature; linear in a, antilinear in b."""
    xs = grid.xs
    va = a.values_on(xs)
    vb = b.values_on(xs)
    prod = va * np.conj(vb)
    return complex(np.trapezoid(prod, dx=grid.spacing))


def l2_norm(state: WaveFunction, grid: Grid1D = STD_GRID):
    return float(np.sqrt(inner_product(state, state, grid).real))


def _check_boundary_decay(state, grid2d):
    for x in (grid2d.x.lo, grid2d.x.hi):
        if abs(eval_psi(state, x)) > _BOUNDARY_DECAY:
            raise GridTooNarrow(
                f"|psi({x:g})| = {abs(eval_psi(state, x)):.2e} at the grid edge")
    for w in (grid2d.omega.lo, grid2d.omega.hi):
        if abs(complex(state.ft_values_on(np.array([w]))[0])) > _BOUNDARY_DECAY:
            raise GridTooNarrow(f"|psi_hat({w:g})| too large at the grid edge")


def wigner(state: WaveFunction, grid: Grid2D = None, check=True) -> WignerGrid:
    """Wigner quasi-density W(x, w) = integral psi(x + t/2)
    conj(psi(x - t/2)) exp(-2 pi i w t) dt, per output row via a chirp-z
    transform over the t samples.
    """
    from .grids import DEFAULT_WIGNER_GRID

    if grid is None:
        grid = DEFAULT_WIGNER_GRID
    if check:
        _check_boundary_decay(state, grid)

    xg, wg = grid.x, grid.omega
    w_max = max(abs(wg.lo), abs(wg.hi))
    dt = STD_GRID.spacing
    while 0.5 / dt < 1.15 * (w_max + state.freq_extent()):
        dt *= 0.5
    t_half = 2.0 * (state.x_extent() + max(abs(xg.lo), abs(xg.hi)))
    n_half = int(np.ceil(t_half / dt))
    ts = dt * np.arange(-n_half, n_half + 1)

    values = np.empty((xg.n, wg.n), dtype=float)
    worst_imag = 0.0
    chunk = max(1, int(4e6 / ts.size))
    for s in range(0, xg.n, chunk):
        xs = xg.xs[s:s + chunk, None]
        vp = state.values_on((xs + 0.5 * ts[None, :]).ravel()).reshape(-1, ts.size)
        vm = state.values_on((xs - 0.5 * ts[None, :]).ravel()).reshape(-1, ts.size)
        rows = chirp.spectrum_on_grid(vp * np.conj(vm), ts[0], dt,
                                      wg.lo, wg.spacing, wg.n)
        worst_imag = max(worst_imag, float(np.max(np.abs(rows.imag))))
        values[s:s + vp.shape[0]] = rows.real
    if check and worst_imag > 1e-9:
        raise GridTooNarrow(f"imaginary residue {worst_imag:.2e} in the Wigner "
                            "transform; the t quadrature is under-resolved")
    return WignerGrid(grid, values)


def wigner_mixed(state: MixedState, grid: Grid2D = None) -> WignerGrid:
    """Weighted sum of the component Wigner grids."""
    parts = [wigner(c, grid) for c in state.components]
    total = sum(w * p.values for w, p in zip(state.weights, parts))
    return WignerGrid(parts[0].grid, total)
