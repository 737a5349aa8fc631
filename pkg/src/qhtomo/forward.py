"""Measurement forward model: quadrature densities p_psi(x, theta), the
Radon-of-Wigner oracle, the Gaussian efficiency kernel G_gamma, and the
efficiency-corrected observation density.

The joint density on R x [0, pi] is p_psi(x, theta) = |A_theta psi(x)|^2 / pi
where A_theta is a fractional-Fourier-type transform,

    A_theta psi(x) = |sin t|^(-1/2) integral psi(z)
                     exp(i pi z^2 cot t - 2 pi i x z / sin t) dz.

The constants are fixed by requiring agreement with the Radon transform of
the Wigner distribution (checked in the test suite); they are *not* the
half-cot variant sometimes quoted, which fails that check.  For
|sin theta| < 1/sqrt(2) the state is rotated by a quarter turn
(A_theta = phase * A_(theta - pi/2) o FourierTransform, the phase being
x-dependent only) so the chirp slope |cot| never exceeds 1.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RectBivariateSpline

from . import chirp
from .errors import EtaIsOne, GridTooNarrow
from .grids import STD_GRID, WignerGrid
from .states import WaveFunction

_ROTATE_BELOW = np.sqrt(0.5)  # |sin theta| threshold for the rotated branch
_GH_NODES = 64


@dataclass(frozen=True)
class NoiseModel:
    """Detector efficiency eta and the derived convolution kernel."""

    eta: float

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must be in (0, 1]")

    @property
    def gamma(self):
        return np.pi * (1.0 - self.eta) / (2.0 * self.eta)

    @property
    def sigma(self):
        """Standard deviation of the additive noise, sqrt((1-eta)/(4 pi eta))."""
        return np.sqrt(self.gamma / (2.0 * np.pi ** 2))

    def kernel(self, x):
        """G_gamma(x) = sqrt(pi/gamma) exp(-pi^2 x^2 / gamma)."""
        if self.eta == 1.0:
            raise EtaIsOne("the noise kernel is a point mass at eta = 1")
        g = self.gamma
        x = np.asarray(x, dtype=float)
        return np.sqrt(np.pi / g) * np.exp(-np.pi ** 2 * x * x / g)


def _exact_angle(state, theta, xs):
    if abs(theta) < 1e-12:
        return state.values_on(xs)
    if abs(theta - np.pi) < 1e-12:
        return state.values_on(-np.asarray(xs, dtype=float))
    if abs(theta - np.pi / 2) < 1e-12:
        return state.ft_values_on(xs)
    return None


def conditional_amplitude(state: WaveFunction, theta, xs=None, grid=None):
    """A_theta psi at arbitrary points `xs` or on a uniform grid
    (x0, dx, m).  |result|^2 is the conditional density p_psi(x | theta).
    The result carries an uncontrolled x-dependent phase."""
    if xs is not None:
        exact = _exact_angle(state, theta, xs)
        if exact is not None:
            return exact
    if abs(np.sin(theta)) >= _ROTATE_BELOW:
        values = state.std_samples()
        z0, dz = STD_GRID.lo, STD_GRID.spacing
        theta_eff = theta
        bw = state.freq_extent() + 4.0
    else:
        z0, dz, values = state.ft_table()
        theta_eff = theta - np.pi / 2.0
        bw = state.x_extent() + 4.0
    return chirp.fractional_from_samples(values, z0, dz, theta_eff,
                                         xs=xs, grid=grid, content_bw=bw)


def quadrature_density(state: WaveFunction, x, theta):
    """Joint density p_psi(x, theta) on R x [0, pi]; the conditional
    density given theta is pi times this."""
    amp = conditional_amplitude(state, theta, xs=np.atleast_1d(x))
    dens = np.abs(amp) ** 2 / np.pi
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(dens.ravel()[0])
    return dens


def conditional_density_grid(state: WaveFunction, theta, x0, dx, m):
    """p_psi(. | theta) sampled on a uniform grid (fast CZT path)."""
    amp = conditional_amplitude(state, theta, grid=(x0, dx, m))
    return np.abs(amp) ** 2


def _line_range(grid, x, theta):
    """Parameter interval of {(x cos t - s sin t, x sin t + s cos t)}
    inside the grid rectangle."""
    lo, hi = -np.inf, np.inf
    ct, st = np.cos(theta), np.sin(theta)
    for start, direction, amin, amax in (
            (x * ct, -st, grid.x.lo, grid.x.hi),
            (x * st, ct, grid.omega.lo, grid.omega.hi)):
        if abs(direction) < 1e-15:
            if not amin <= start <= amax:
                return None
            continue
        a = (amin - start) / direction
        b = (amax - start) / direction
        lo = max(lo, min(a, b))
        hi = min(hi, max(a, b))
    if not lo < hi:
        return None
    return lo, hi


def radon_of_wigner(w: WignerGrid, x, theta):
    """Line integral of the Wigner grid along direction theta, divided by
    pi.  Serves as the independent numeric oracle for quadrature_density."""
    spline = getattr(w, "_spline", None)
    if spline is None:
        spline = RectBivariateSpline(w.grid.x.xs, w.grid.omega.xs, w.values,
                                     kx=3, ky=3)
        object.__setattr__(w, "_spline", spline)
    span = _line_range(w.grid, x, theta)
    if span is None:
        raise GridTooNarrow("the integration line misses the grid")
    step = 0.5 * min(w.grid.x.spacing, w.grid.omega.spacing)
    n = int(np.ceil((span[1] - span[0]) / step)) + 1
    ss = np.linspace(span[0], span[1], n)
    px = x * np.cos(theta) - ss * np.sin(theta)
    pw = x * np.sin(theta) + ss * np.cos(theta)
    vals = spline.ev(px, pw)
    if max(abs(vals[0]), abs(vals[-1])) > 1e-8:
        raise GridTooNarrow("Wigner values have not decayed where the "
                            "integration line leaves the grid")
    return float(np.trapezoid(vals, ss) / np.pi)


def gauss_hermite_nodes(n=_GH_NODES):
    return np.polynomial.hermite.hermgauss(n)


def noisy_density(state: WaveFunction, y, theta, nm: NoiseModel):
    """Efficiency-corrected joint density, the convolution
    [p_psi(., theta) * G_gamma](y), by 64-point Gauss-Hermite quadrature."""
    if nm.eta == 1.0:
        return quadrature_density(state, y, theta)
    nodes, weights = gauss_hermite_nodes()
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    pts = ys[:, None] + np.sqrt(2.0) * nm.sigma * nodes[None, :]
    amp = conditional_amplitude(state, theta, xs=pts.ravel())
    dens = (np.abs(amp) ** 2).reshape(pts.shape) / np.pi
    out = dens @ weights / np.sqrt(np.pi)
    if np.isscalar(y) or np.ndim(y) == 0:
        return float(out[0])
    return out


def noisy_density_grid(state: WaveFunction, theta, nm: NoiseModel,
                       x0, dx, m):
    """Noisy joint density on a uniform y grid (CZT + discrete
    convolution; used by the diagnostics integrals)."""
    clean = conditional_density_grid(state, theta, x0, dx, m) / np.pi
    if nm.eta == 1.0:
        return clean
    half = int(np.ceil(8.0 * nm.sigma / dx))
    ks = dx * np.arange(-half, half + 1)
    kern = nm.kernel(ks) * dx
    return np.convolve(clean, kern, mode="same")
