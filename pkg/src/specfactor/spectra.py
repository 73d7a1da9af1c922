"""Spectral building blocks.

Everything downstream speaks in terms of two small value types:

* :class:`BinningPolicy` — how an eigenvalue axis is discretized, and
* :class:`SpectralDensity` — a binned probability density over that axis.

On top of those this module provides eigenvalue histograms, the
Marchenko-Pastur density, discrete Stieltjes transforms, density moments and
the Jensen-Shannon divergence used as the spectral matching objective.

All functions are pure; densities are immutable after construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, GridMismatchError

__all__ = [
    "BinningPolicy",
    "SpectralDensity",
    "as_spectrum",
    "esd",
    "mp_pdf",
    "mp_density_on_grid",
    "js_divergence",
    "density_moment",
    "stieltjes_of_density",
]


@dataclass(frozen=True)
class BinningPolicy:
    """Uniform binning of the interval ``[support_lo, support_hi]``.

    Fewer than 10 bins makes the divergence between bulk densities
    meaningless, so that is rejected outright.
    """

    bin_count: int
    support_lo: float
    support_hi: float

    def __post_init__(self):
        if int(self.bin_count) != self.bin_count or self.bin_count < 10:
            raise ValueError(f"bin_count must be an integer >= 10, got {self.bin_count}")
        if not (np.isfinite(self.support_lo) and np.isfinite(self.support_hi)):
            raise ValueError("support bounds must be finite")
        if not self.support_lo < self.support_hi:
            raise ValueError(
                f"support_lo must be < support_hi, got [{self.support_lo}, {self.support_hi}]"
            )

    def edges(self) -> np.ndarray:
        """The ``bin_count + 1`` bin edges."""
        return np.linspace(self.support_lo, self.support_hi, self.bin_count + 1)


@dataclass(frozen=True)
class SpectralDensity:
    """A probability mass vector over contiguous bins.

    ``edges`` has one more entry than ``mass``; masses are nonnegative and
    sum to one (within 1e-9, enforced here).
    """

    edges: np.ndarray
    mass: np.ndarray
    _skip_checks: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        mass = np.asarray(self.mass, dtype=float)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "mass", mass)
        if not self._skip_checks:
            if edges.ndim != 1 or mass.ndim != 1 or edges.size != mass.size + 1:
                raise ValueError("edges must be 1-D with exactly one more entry than mass")
            if not np.all(np.isfinite(edges)) or not np.all(np.isfinite(mass)):
                raise ValueError("edges and mass must be finite")
            if np.any(np.diff(edges) <= 0):
                raise ValueError("edges must be strictly increasing")
            if np.any(mass < -1e-12):
                raise ValueError("bin masses must be nonnegative")
            if abs(mass.sum() - 1.0) > 1e-9:
                raise ValueError(f"bin masses must sum to 1, got {mass.sum()!r}")
        edges.setflags(write=False)
        mass.setflags(write=False)

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def to_tsv(self) -> str:
        """Two-column TSV (bin midpoint, mass) for external plotting."""
        lines = [f"{m:.17g}\t{w:.17g}" for m, w in zip(self.midpoints, self.mass)]
        return "\n".join(lines) + "\n"


def as_spectrum(values) -> np.ndarray:
    """Validate and normalize raw eigenvalues into an ascending spectrum.

    Tiny negative values produced by finite-precision eigensolvers (down to
    ``-1e-8 * max|value|``) are clamped to zero; anything more negative or
    non-finite is rejected.
    """
    vals = np.asarray(values, dtype=float).ravel()
    if vals.size == 0:
        raise DataError("empty eigenvalue spectrum")
    if not np.all(np.isfinite(vals)):
        raise DataError("non-finite eigenvalue in spectrum")
    scale = np.abs(vals).max()
    tol = 1e-8 * scale
    if np.any(vals < -tol - 1e-300):
        raise DataError(
            f"eigenvalue {vals.min()!r} is negative beyond the clamping tolerance {tol!r}"
        )
    vals = np.where(vals < 0.0, 0.0, vals)
    return np.sort(vals)


def esd(spectrum, policy: BinningPolicy, clip: bool = False) -> SpectralDensity:
    """Empirical spectral density: bin mass = (eigenvalues in bin) / n.

    Eigenvalues must lie inside the policy support unless ``clip`` is set,
    in which case out-of-range mass is assigned to the nearest end bin.
    """
    vals = as_spectrum(spectrum)
    lo, hi = policy.support_lo, policy.support_hi
    if clip:
        vals = np.clip(vals, lo, hi)
    elif vals[0] < lo or vals[-1] > hi:
        raise DataError(
            f"eigenvalues outside binning support [{lo}, {hi}] "
            f"(range [{vals[0]}, {vals[-1]}]); pass clip=True to fold them into the end bins"
        )
    counts, edges = np.histogram(vals, bins=policy.bin_count, range=(lo, hi))
    return SpectralDensity(edges, counts / vals.size)


def mp_pdf(lam, c: float, sigma2: float = 1.0):
    """Marchenko-Pastur density at ``lam`` for aspect ratio ``c`` and scale ``sigma2``.

    Supported on ``[sigma2*(1-sqrt(c))^2, sigma2*(1+sqrt(c))^2]``; zero outside.
    Accepts scalars or arrays.
    """
    if not 0.0 < c <= 1.0:
        raise ValueError(f"aspect ratio c must be in (0, 1], got {c}")
    if sigma2 <= 0.0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    lam_arr = np.asarray(lam, dtype=float)
    a = sigma2 * (1.0 - np.sqrt(c)) ** 2
    b = sigma2 * (1.0 + np.sqrt(c)) ** 2
    out = np.zeros_like(lam_arr)
    inside = (lam_arr > a) & (lam_arr < b)
    lam_in = lam_arr[inside]
    out[inside] = np.sqrt((b - lam_in) * (lam_in - a)) / (2.0 * np.pi * c * sigma2 * lam_in)
    return out if out.ndim else float(out)


# Gauss-Legendre nodes reused by the M-P bin quadrature.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)


def mp_density_on_grid(c: float, sigma2: float, policy: BinningPolicy) -> SpectralDensity:
    """Marchenko-Pastur law binned onto ``policy``, renormalized to sum 1.

    Bin masses are computed by substituting lam = sigma2*(1 + c - 2 sqrt(c) cos t),
    which turns the square-root edge singularities into a smooth integrand
    (2/pi) sin^2 t / (1 + c - 2 sqrt(c) cos t); each bin is then integrated with
    fixed Gauss-Legendre nodes.
    """
    if not 0.0 < c <= 1.0:
        raise ValueError(f"aspect ratio c must be in (0, 1], got {c}")
    if sigma2 <= 0.0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    edges = policy.edges()
    sqc = np.sqrt(c)
    # map bin edges into the substitution angle, clamping to the support
    arg = (1.0 + c - np.clip(edges / sigma2, (1 - sqc) ** 2, (1 + sqc) ** 2)) / (2.0 * sqc)
    theta = np.arccos(np.clip(arg, -1.0, 1.0))
    mass = np.zeros(policy.bin_count)
    for i in range(policy.bin_count):
        t0, t1 = theta[i], theta[i + 1]
        if t1 <= t0:
            continue
        t = 0.5 * (t1 - t0) * _GL_NODES + 0.5 * (t0 + t1)
        integrand = np.sin(t) ** 2 / (1.0 + c - 2.0 * sqc * np.cos(t))
        mass[i] = (2.0 / np.pi) * 0.5 * (t1 - t0) * (integrand * _GL_WEIGHTS).sum()
    total = mass.sum()
    if total <= 0.0:
        raise DataError("binning grid misses the Marchenko-Pastur support entirely")
    return SpectralDensity(edges, mass / total)


def js_divergence(a: SpectralDensity, b: SpectralDensity) -> float:
    """Jensen-Shannon divergence between two densities on identical grids.

    Natural logarithm; bins where one side has zero mass contribute only
    through the other side (0*log 0 := 0). Bounded by log 2.
    """
    if a.edges.shape != b.edges.shape or not np.array_equal(a.edges, b.edges):
        raise GridMismatchError("densities must share identical bin edges")
    pa, pb = a.mass, b.mass
    mid = 0.5 * (pa + pb)
    out = 0.0
    for p in (pa, pb):
        nz = p > 0.0
        out += 0.5 * float(np.sum(p[nz] * np.log(p[nz] / mid[nz])))
    return max(out, 0.0)


def density_moment(rho: SpectralDensity, k: int) -> float:
    """k-th moment of a binned density by the midpoint rule."""
    if int(k) != k or k < 1:
        raise ValueError(f"moment order must be a positive integer, got {k}")
    return float(np.sum(rho.mass * rho.midpoints ** k))


def stieltjes_of_density(rho: SpectralDensity, z: complex) -> complex:
    """Stieltjes transform sum(mass_b / (z - midpoint_b)) for Im z > 0."""
    if not np.imag(z) > 0.0:
        raise ValueError(f"evaluation point must have positive imaginary part, got {z!r}")
    return complex(np.sum(rho.mass / (z - rho.midpoints)))
