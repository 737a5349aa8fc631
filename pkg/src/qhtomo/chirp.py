"""Oscillatory quadrature kernels: uniform-grid Fourier sums and the chirp
(fractional Fourier) transform behind the quadrature densities.

All transforms use the convention  F(nu) = integral f(z) exp(-2 pi i nu z) dz,
approximated by Riemann sums on uniform grids of rapidly decaying samples.
"""

import numpy as np
from scipy.signal import czt

TWO_PI = 2.0 * np.pi


def spectrum_on_grid(values, z0, dz, nu0, dnu, m):
    """Evaluate sum_n values[n] exp(-2 pi i nu_k z_n) * dz on a uniform
    frequency grid nu_k = nu0 + k*dnu via the chirp-z transform.

    `values` may be a batch with the sample axis last.  Exact up to fft
    roundoff, for any frequency offset and spacing (dnu may be negative).
    """
    w = np.exp(-2j * np.pi * dnu * dz)
    a = np.exp(2j * np.pi * nu0 * dz)
    out = czt(values, m=m, w=w, a=a, axis=-1)
    nus = nu0 + dnu * np.arange(m)
    return out * (dz * np.exp(-2j * np.pi * nus * z0))


def nudft(values, z0, dz, nus, chunk=512):
    """Direct evaluation of the same sum at arbitrary frequencies."""
    zs = z0 + dz * np.arange(values.shape[-1])
    nus = np.atleast_1d(np.asarray(nus, dtype=float))
    out = np.empty(values.shape[:-1] + (nus.size,), dtype=complex)
    for s in range(0, nus.size, chunk):
        block = nus[s:s + chunk]
        kernel = np.exp(-2j * np.pi * np.outer(zs, block))
        out[..., s:s + block.size] = values @ kernel
    return out * dz


def resample_uniform(values, factor):
    """Refine a uniform tabulation by trigonometric (FFT) interpolation.

    The samples must include both endpoints of the range and decay to ~0
    there, so that the implicit periodization is harmless.  Returns the
    refined array with (n-1)*factor + 1 samples over the same range.
    """
    if factor == 1:
        return np.asarray(values)
    vals = np.asarray(values, dtype=complex)
    n = vals.shape[-1] - 1
    spec = np.fft.fft(vals[..., :n], axis=-1)
    m = n * factor
    out_spec = np.zeros(vals.shape[:-1] + (m,), dtype=complex)
    half = n // 2
    out_spec[..., :half] = spec[..., :half]
    out_spec[..., -half:] = spec[..., -half:]
    if n % 2 == 0:
        # split the Nyquist coefficient symmetrically
        out_spec[..., half] = 0.5 * spec[..., half]
        out_spec[..., -half] = 0.5 * spec[..., half]
        out_spec[..., -half + 1:] = spec[..., half + 1:]
    fine = np.fft.ifft(out_spec, axis=-1) * factor
    return np.concatenate([fine, vals[..., -1:]], axis=-1)


def fourier_table(values, z0, dz, pad_factor=4):
    """Sampled Fourier transform of a uniform tabulation.

    Zero-pads by `pad_factor` before the FFT so the frequency step shrinks
    accordingly.  Returns (nu0, dnu, ft_values) with frequencies fftshifted
    to increasing order.
    """
    vals = np.asarray(values, dtype=complex)
    n = vals.shape[-1]
    nfft = 1
    while nfft < n * pad_factor:
        nfft *= 2
    spec = np.fft.fft(vals, n=nfft, axis=-1)
    spec = np.fft.fftshift(spec, axes=-1)
    freqs = np.fft.fftshift(np.fft.fftfreq(nfft, d=dz))
    phase = dz * np.exp(-2j * np.pi * freqs * z0)
    return freqs[0], freqs[1] - freqs[0], spec * phase


def chirp_weights(zs, cot_theta):
    return np.exp(1j * np.pi * cot_theta * zs * zs)


def required_oversampling(dz, cot_theta, z_extent, max_abs_nu, content_bw):
    """Power-of-two refinement factor keeping the chirped integrand below
    Nyquist with a 25% margin."""
    b_req = abs(cot_theta) * z_extent + max_abs_nu + content_bw
    factor = 1
    while 0.5 / (dz / factor) < 1.25 * b_req:
        factor *= 2
        if factor > 16:
            from .errors import NumericalInstability

            raise NumericalInstability(
                "chirp quadrature cannot resolve the integrand "
                f"(required bandwidth {b_req:.1f})")
    return factor


def fractional_from_samples(values, z0, dz, theta, xs=None, grid=None,
                            content_bw=24.0):
    """Evaluate A_theta f(x) = |sin t|^{-1/2} integral f(z)
    exp(i pi z^2 cot t - 2 pi i x z / sin t) dz  from samples of f.

    Exactly one of `xs` (arbitrary points) or `grid` ((x0, dx, m) uniform
    spec) must be given.  |A_theta f(x)|^2 is the conditional quadrature
    density of the state f for measurement phase theta; the result carries
    an x-dependent phase relative to the standard fractional Fourier
    transform, which cancels in all modulus-based uses.
    """
    sin_t = np.sin(theta)
    cot_t = np.cos(theta) / sin_t
    n = values.shape[-1]
    z_extent = max(abs(z0), abs(z0 + dz * (n - 1)))
    if grid is not None:
        x0, dx, m = grid
        max_nu = max(abs(x0), abs(x0 + dx * (m - 1))) / abs(sin_t)
    else:
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        max_nu = float(np.max(np.abs(xs))) / abs(sin_t) if xs.size else 0.0
    factor = required_oversampling(dz, cot_t, z_extent, max_nu, content_bw)
    vals = resample_uniform(values, factor)
    dzf = dz / factor
    zs = z0 + dzf * np.arange(vals.shape[-1])
    chirped = vals * chirp_weights(zs, cot_t)
    scale = 1.0 / np.sqrt(abs(sin_t))
    if grid is not None:
        x0, dx, m = grid
        out = spectrum_on_grid(chirped, z0, dzf, x0 / sin_t, dx / sin_t, m)
    else:
        out = nudft(chirped, z0, dzf, xs / sin_t)
    return scale * out
