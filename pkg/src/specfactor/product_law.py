"""Limiting spectral law of a product of two coupled Wishart matrices.

The model covariance is S0*S1 where each Si = Gi*Gi'/n is built from an m x n
Gaussian block with aspect ratio ``phi = m/n``. Free multiplication gives the
S-transform of the product as 1/(1 + phi*w)^2, which translates into a cubic
equation for the Green's function G(z):

    phi^2 z^2 G^3 + 2(1-phi) phi z G^2 + ((1-phi)^2 - z) G + 1 = 0.

This module solves that cubic with an explicit closed form (auditable root
list, no iteration to diverge), selects the physical branch, and turns G into
binned densities, support edges and low moments.

Branch selection follows the two defining properties of a Stieltjes
transform: Im G < 0 in the upper half-plane, and G ~ 1/z at infinity. Sweeps
across a grid walk from large Re z downward so each point can seed its
neighbor (near z = 0 the discarded cubic roots grow like 1/sqrt(z) and would
otherwise fool a pointwise filter).

Bin masses are exact: with M = zG - 1 the function

    Phi(M) = 2M + (2(phi-1)/phi) * log(1 + phi*M) - log M        (phi < 1)
    Phi(M) = 2M - log M                                          (phi = 1)

satisfies d/dz Im Phi(M(z + i0)) = Im G, so -(1/pi) * Im Phi is the
cumulative distribution up to one global constant that cancels in
differences across bin edges (the M-path stays in the closed lower
half-plane and never crosses the principal log cuts: 1 + phi*M is bounded
away from zero for phi < 1, and the coefficient of that log vanishes at
phi = 1).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NumericalError
from .spectra import BinningPolicy, SpectralDensity

__all__ = [
    "GreenValue",
    "ModelDensityParams",
    "s_transform_component",
    "s_transform_product",
    "green_function",
    "green_line",
    "support_edges",
    "model_density",
    "model_moment",
]

_RESIDUAL_TOL = 1e-9


def _check_phi(phi: float) -> float:
    phi = float(phi)
    if not 0.0 < phi <= 1.0:
        raise ValueError(f"phi must lie in (0, 1], got {phi}")
    return phi


def s_transform_component(w: complex, phi: float) -> complex:
    """S-transform 1/(1 + phi*w) of a single Wishart factor."""
    phi = _check_phi(phi)
    denom = 1.0 + phi * w
    if denom == 0:
        raise ZeroDivisionError(f"S-transform pole at w = -1/phi = {-1.0 / phi}")
    return 1.0 / denom


def s_transform_product(w: complex, phi: float) -> complex:
    """S-transform of the two-factor product: the component transform squared."""
    s = s_transform_component(w, phi)
    return s * s


def _cubic_coeffs(z, phi):
    z = np.asarray(z, dtype=complex)
    a = phi * phi * z * z
    b = 2.0 * (1.0 - phi) * phi * z
    c = (1.0 - phi) ** 2 - z
    d = np.ones_like(z)
    return a, b, c, d


def _cubic_roots(a, b, c, d):
    """All three roots of a*x^3 + b*x^2 + c*x + d, vectorized, shape (..., 3).

    Complex Cardano with the larger-magnitude cube-root branch chosen to
    avoid cancellation, followed by two Newton polish steps.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex) / a
    c = np.asarray(c, dtype=complex) / a
    d = np.asarray(d, dtype=complex) / a
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    s = np.sqrt(0.25 * q * q + p**3 / 27.0)
    u3 = -0.5 * q + s
    alt = -0.5 * q - s
    u3 = np.where(np.abs(alt) > np.abs(u3), alt, u3)
    u = u3 ** (1.0 / 3.0)
    v = np.where(u != 0, -p / (3.0 * np.where(u != 0, u, 1.0)), 0.0)
    w = np.exp(2j * np.pi / 3.0)
    roots = np.stack([u + v, u * w + v / w, u * w**2 + v / w**2], axis=-1)
    roots -= (b / 3.0)[..., None]
    one = np.ones_like(roots)
    for _ in range(2):
        f = ((roots + b[..., None]) * roots + c[..., None]) * roots + d[..., None]
        fp = (3.0 * roots + 2.0 * b[..., None]) * roots + c[..., None]
        roots = roots - np.where(fp != 0, f / np.where(fp != 0, fp, one), 0.0)
    return roots


class GreenValue(NamedTuple):
    """A Green's-function evaluation: the point ``z`` and the value ``g``."""

    z: complex
    g: complex


def _residual(z, g, phi):
    return abs(
        phi**2 * z**2 * g**3 + 2.0 * (1.0 - phi) * phi * z * g**2 + ((1.0 - phi) ** 2 - z) * g + 1.0
    )


def _select(roots: np.ndarray, z: complex, ref: complex) -> complex:
    """Pick the physical root: prefer Im < 0, fall back to near-real roots."""
    cand = roots[roots.imag < -1e-12]
    if cand.size == 1:
        return complex(cand[0])
    if cand.size == 0:
        cand = roots[np.abs(roots.imag) < 1e-9 * (1.0 + np.abs(roots.real))]
        if cand.size == 0:
            cand = roots
    return complex(cand[np.argmin(np.abs(cand - ref))])


def green_function(z: complex, phi: float, hint: GreenValue | None = None) -> GreenValue:
    """The physical Green's-function value at a single point with Im z > 0.

    Among the cubic's roots, those mapping into the lower half-plane are
    kept; if several qualify the one closest to ``hint`` (continuity) or to
    the asymptotic seed 1/z is chosen. The returned value is checked against
    the cubic to within ``1e-9 * (1 + |z|^3)``.
    """
    phi = _check_phi(phi)
    z = complex(z)
    if not z.imag > 0.0:
        raise ValueError(f"green_function requires Im z > 0, got {z!r}")
    a, b, c, d = _cubic_coeffs(z, phi)
    if abs(a) < 1e-280:
        raise NumericalError(f"cubic leading coefficient underflows at z = {z!r}")
    roots = _cubic_roots(a, b, c, d)
    ref = hint.g if hint is not None else 1.0 / z
    g = _select(roots, z, complex(ref))
    if _residual(z, g, phi) >= _RESIDUAL_TOL * (1.0 + abs(z) ** 3):
        raise NumericalError(f"root selection lost the physical branch at z = {z!r}")
    return GreenValue(z, g)


def green_line(zs, phi: float) -> np.ndarray:
    """Green's-function values along an array of points with Im z > 0.

    Points are processed in order of decreasing real part so that the
    asymptotic 1/z seed is only trusted where it is valid, and every other
    point inherits continuity from its right neighbor.
    """
    phi = _check_phi(phi)
    zs = np.asarray(zs, dtype=complex)
    flat = zs.ravel()
    if flat.size and not np.all(flat.imag > 0):
        raise ValueError("green_line requires Im z > 0 everywhere")
    roots = _cubic_roots(*_cubic_coeffs(flat, phi))
    out = np.empty(flat.size, dtype=complex)
    hint = None
    for idx in np.argsort(-flat.real, kind="stable"):
        ref = hint if hint is not None else 1.0 / flat[idx]
        out[idx] = _select(roots[idx], flat[idx], ref)
        hint = out[idx]
    bad = _residual_arr(flat, out, phi) >= _RESIDUAL_TOL * (1.0 + np.abs(flat) ** 3)
    if np.any(bad):
        raise NumericalError(
            f"root selection lost the physical branch at z = {flat[bad][0]!r}"
        )
    return out.reshape(zs.shape)


def _residual_arr(z, g, phi):
    return np.abs(
        phi**2 * z**2 * g**3 + 2.0 * (1.0 - phi) * phi * z * g**2 + ((1.0 - phi) ** 2 - z) * g + 1.0
    )


def support_edges(phi: float) -> tuple[float, float]:
    """Exact support interval of the product law.

    The edges are stationary points of z(M) = (1+M)(1+phi*M)^2 / M along the
    real M branch, i.e. roots of 2*phi*M^2 + phi*M - 1 = 0. At phi = 1 this
    gives [0, 27/4].
    """
    phi = _check_phi(phi)
    disc = np.sqrt(phi * phi + 8.0 * phi)
    lo_m = (-phi - disc) / (4.0 * phi)
    hi_m = (-phi + disc) / (4.0 * phi)

    def z_of(m):
        return (1.0 + m) * (1.0 + phi * m) ** 2 / m

    lo = max(z_of(lo_m), 0.0)
    return (lo, z_of(hi_m))


@dataclass(frozen=True)
class ModelDensityParams:
    """Parameters for producing a binned model density.

    ``epsilon`` is the imaginary offset used when evaluating boundary values
    of analytic functions; it defaults to 1e-6 of the grid span, capped at
    half a bin width, and must not exceed one bin width (a larger offset
    oversmooths the recovered density). ``grid`` defaults to 100 bins over
    [0, 1.1 * upper support edge].
    """

    phi: float
    epsilon: float | None = None
    grid: BinningPolicy | None = None

    def __post_init__(self):
        _check_phi(self.phi)
        if self.epsilon is not None and not float(self.epsilon) > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    def resolved_grid(self) -> BinningPolicy:
        if self.grid is not None:
            return self.grid
        return BinningPolicy(100, 0.0, 1.1 * support_edges(self.phi)[1])

    def resolved_epsilon(self, grid: BinningPolicy) -> float:
        width = (grid.support_hi - grid.support_lo) / grid.bin_count
        if self.epsilon is None:
            return min(1e-6 * (grid.support_hi - grid.support_lo), 0.5 * width)
        eps = float(self.epsilon)
        if not eps > 0.0:
            raise ValueError(f"epsilon must be positive, got {eps}")
        if eps > width:
            raise ValueError(
                f"epsilon {eps} exceeds one bin width {width}; the density would be oversmoothed"
            )
        return eps


def _log_antiderivative(m: np.ndarray, phi: float) -> np.ndarray:
    """Phi(M) whose boundary imaginary part integrates the density exactly."""
    if phi == 1.0:
        return 2.0 * m - np.log(m)
    return 2.0 * m + (2.0 * (phi - 1.0) / phi) * np.log(1.0 + phi * m) - np.log(m)


def model_density(params: ModelDensityParams) -> SpectralDensity:
    """The product law binned onto a grid, with exact per-bin masses.

    The cumulative distribution is evaluated at every interior bin edge via
    the closed-form antiderivative of G, so each bin carries exactly its
    share of the limiting measure (no midpoint-rule bias at the edge
    singularities). Bins are clamped at zero and renormalized over the part
    of the support the grid covers.
    """
    phi = _check_phi(params.phi)
    grid = params.resolved_grid()
    eps = params.resolved_epsilon(grid)
    edges = grid.edges()
    if edges[0] < 0.0:
        raise ValueError("model support starts at 0; support_lo must be >= 0")
    inner = edges[1:] if edges[0] == 0.0 else edges
    zs = inner + 1j * eps
    g = green_line(zs, phi)
    m = zs * g - 1.0
    cdf = -np.imag(_log_antiderivative(m, phi)) / np.pi  # true CDF minus 1
    mass = np.empty(grid.bin_count)
    if edges[0] == 0.0:
        mass[0] = cdf[0] + 1.0
        mass[1:] = np.diff(cdf)
    else:
        mass[:] = np.diff(cdf)
    mass = np.clip(mass, 0.0, None)
    total = mass.sum()
    if total <= 1e-9:
        raise NumericalError(
            f"binning grid [{edges[0]}, {edges[-1]}] misses the model support for phi={phi}"
        )
    return SpectralDensity(edges, mass / total)


def model_moment(phi: float, k: int) -> float:
    """Closed-form moments of the product law for k in {1, 2, 3}.

    Obtained by series inversion of z = (1+M)(1+phi*M)^2 / M around M = 0;
    at phi = 1 these reduce to the Fuss-Catalan numbers 1, 3, 12.
    """
    phi = _check_phi(phi)
    if k == 1:
        return 1.0
    if k == 2:
        return 1.0 + 2.0 * phi
    if k == 3:
        return 1.0 + 6.0 * phi + 5.0 * phi * phi
    raise ValueError(f"closed-form moments are available for k in {{1, 2, 3}}, got {k}")
