"""Joint estimation of (number of factors, shape parameter) by spectral matching.

For every candidate factor count p the standardized residual covariance
spectrum is computed once; for every candidate phi the model law is laid on
the same bins; the Jensen-Shannon divergence between the two fills a (p, phi)
surface whose global minimizer is the estimate.

Comparison modes, selected by ``EstimatorConfig.epsilon``:

* ``epsilon=None`` (default) — matched resolvent smoothing. Both densities
  are evaluated as -(1/pi) Im of their Stieltjes transforms at the bin
  midpoints with the same imaginary offset eta = 3 * support_hi / N: the
  empirical side from the exact eigenvalue resolvent, the model side from
  the Green's function. Identical smoothing on both sides cancels the
  histogram's finite-N sampling noise, which otherwise swamps the small
  divergence differences that separate neighboring p. The offset scales
  like the mean eigenvalue spacing, so it vanishes in the large-N limit.
* ``epsilon=0`` — raw comparison: residual eigenvalue histogram against the
  exactly binned model law. This is the definitional form of the objective;
  surface cells equal independent js_divergence(residual_esd(R, p),
  model_density(phi)) calls bit for bit.
* ``epsilon > 0`` — matched smoothing with a fixed offset.

Each (p, phi) cell is compared on bins spanning [0, 1.1 * max(largest
residual eigenvalue at p, model support edge at phi)] so that neither
density is truncated. Model evaluations are cached by (phi, grid, offset)
and reused across p — and across windows when the caller passes a shared
cache.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, NumericalError
from .product_law import ModelDensityParams, green_line, model_density, support_edges
from .residuals import check_data_matrix, residual_spectrum, right_singular_rows
from .spectra import BinningPolicy, SpectralDensity, esd, js_divergence

__all__ = [
    "EstimatorConfig",
    "EstimationResult",
    "estimate",
    "divergence_surface",
    "pair_policy",
    "DEFAULT_PHI_GRID",
]

DEFAULT_PHI_GRID = tuple(i / 100 for i in range(1, 101))
_SMOOTHING_SCALE = 3.0  # auto bandwidth: eta = 3 * support_hi / N


@dataclass(frozen=True)
class EstimatorConfig:
    """Sweep configuration.

    ``p_max`` defaults to min(20, N // 5). ``phi_grid`` defaults to
    {0.01, ..., 1.00}; with ``refine`` the sweep re-runs at step 0.001 within
    +-0.02 of the coarse optimum (at the selected p). ``binning`` is either a
    bin count (support chosen per (p, phi) as described in the module
    docstring) or a fully fixed BinningPolicy. ``epsilon`` picks the
    comparison mode, see module docstring.
    """

    p_max: int | None = None
    phi_grid: tuple[float, ...] | None = None
    refine: bool = True
    binning: BinningPolicy | int = 100
    epsilon: float | None = None

    def __post_init__(self):
        if self.phi_grid is not None:
            grid = tuple(float(v) for v in self.phi_grid)
            if not grid:
                raise ValueError("phi_grid must be nonempty")
            if any(not 0.0 < v <= 1.0 for v in grid):
                raise ValueError("phi_grid values must lie in (0, 1]")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError("phi_grid must be strictly ascending")
            object.__setattr__(self, "phi_grid", grid)
        if self.epsilon is not None and self.epsilon < 0:
            raise ValueError(f"epsilon must be None, 0, or positive, got {self.epsilon}")
        if isinstance(self.binning, int):
            if self.binning < 10:
                raise ValueError(f"need at least 10 bins, got {self.binning}")
        elif not isinstance(self.binning, BinningPolicy):
            raise ValueError("binning must be a bin count or a BinningPolicy")


@dataclass(frozen=True)
class EstimationResult:
    p_hat: int
    phi_hat: float
    d_min: float
    surface: dict = field(repr=False)
    per_p_best: dict = field(repr=False)


def pair_policy(lam_max: float, phi: float, binning: BinningPolicy | int) -> BinningPolicy:
    """The shared binning used to compare residual and model densities.

    With an integer bin count the support is [0, 1.1 * max(largest residual
    eigenvalue, model upper edge)]; an explicit BinningPolicy is honored as
    given.
    """
    if isinstance(binning, BinningPolicy):
        return binning
    hi = 1.1 * max(float(lam_max), support_edges(phi)[1])
    return BinningPolicy(binning, 0.0, hi)


def _resolvent_mass(eigs: np.ndarray, policy: BinningPolicy, eta: float) -> SpectralDensity:
    """Empirical density smoothed by the eigenvalue resolvent at offset eta."""
    edges = policy.edges()
    mids = 0.5 * (edges[:-1] + edges[1:])
    # -(1/pi) Im mean(1/(x + i eta - lam)) = (1/pi) mean(eta / ((x-lam)^2 + eta^2))
    diff = mids[:, None] - eigs[None, :]
    dens = (eta / np.pi) * np.mean(1.0 / (diff * diff + eta * eta), axis=1)
    mass = dens * np.diff(edges)
    total = mass.sum()
    if total <= 0.0:
        raise NumericalError("smoothed empirical density vanished on the grid")
    return SpectralDensity(edges, mass / total, _skip_checks=True)


def _smoothed_model_mass(phi: float, policy: BinningPolicy, eta: float) -> SpectralDensity:
    edges = policy.edges()
    mids = 0.5 * (edges[:-1] + edges[1:])
    dens = np.clip(-green_line(mids + 1j * eta, phi).imag / np.pi, 0.0, None)
    mass = dens * np.diff(edges)
    total = mass.sum()
    if total <= 0.0:
        raise NumericalError(f"model density vanished on the grid for phi={phi}")
    return SpectralDensity(edges, mass / total, _skip_checks=True)


def _resolve_p_max(cfg: EstimatorConfig, n: int, t: int) -> int:
    if cfg.p_max is None:
        return min(20, n // 5)
    if not 0 <= cfg.p_max < min(n, t):
        raise ValueError(f"p_max must satisfy 0 <= p_max < min(N, T), got {cfg.p_max}")
    return cfg.p_max


def _refined_grid(phi0: float) -> list[float]:
    center = round(phi0 * 1000)
    return [j / 1000 for j in range(max(1, center - 20), min(1000, center + 20) + 1)]


def estimate(R, cfg: EstimatorConfig | None = None, model_cache: dict | None = None) -> EstimationResult:
    """Sweep the (p, phi) grid and return the divergence-minimizing estimate.

    Ties break toward the smallest p, then the smallest phi (parsimony).
    ``model_cache`` may be shared across calls operating on same-sized data
    (e.g. sliding windows) to reuse model-side evaluations.
    """
    R = check_data_matrix(R)
    n, t = R.shape
    if n > t:
        raise DataError(
            f"got N={n} > T={t}; estimation needs N <= T — transpose the matrix "
            "yourself if rows are samples"
        )
    cfg = cfg or EstimatorConfig()
    p_max = _resolve_p_max(cfg, n, t)
    grid = cfg.phi_grid or DEFAULT_PHI_GRID
    cache = model_cache if model_cache is not None else {}

    vt = right_singular_rows(R)
    spectra = {p: residual_spectrum(R, p, vt) for p in range(p_max + 1)}

    surface: dict[tuple[int, float], float] = {}

    def cell(p: int, phi: float) -> float:
        eigs = spectra[p]
        policy = pair_policy(eigs[-1], phi, cfg.binning)
        if cfg.epsilon == 0:
            emp = esd(eigs, policy, clip=True)
            key = ("hist", phi, policy.bin_count, policy.support_lo, policy.support_hi)
            model = cache.get(key)
            if model is None:
                model = cache[key] = model_density(ModelDensityParams(phi, grid=policy))
        else:
            eta = (
                _SMOOTHING_SCALE * policy.support_hi / n
                if cfg.epsilon is None
                else float(cfg.epsilon)
            )
            emp = _resolvent_mass(eigs, policy, eta)
            key = ("res", phi, policy.bin_count, policy.support_lo, policy.support_hi, eta)
            model = cache.get(key)
            if model is None:
                model = cache[key] = _smoothed_model_mass(phi, policy, eta)
        return js_divergence(emp, model)

    for p in range(p_max + 1):
        for phi in grid:
            surface[(p, phi)] = cell(p, phi)
    if not surface:
        raise NumericalError("empty divergence surface")

    (p0, phi0), _ = min(surface.items(), key=lambda kv: (kv[1], kv[0]))
    if cfg.refine:
        for phi in _refined_grid(phi0):
            if (p0, phi) not in surface:
                surface[(p0, phi)] = cell(p0, phi)

    (p_hat, phi_hat), d_min = min(surface.items(), key=lambda kv: (kv[1], kv[0]))
    per_p_best: dict[int, tuple[float, float]] = {}
    for (p, phi), d in surface.items():
        cur = per_p_best.get(p)
        if cur is None or (d, phi) < (cur[1], cur[0]):
            per_p_best[p] = (phi, d)
    return EstimationResult(p_hat, phi_hat, d_min, surface, per_p_best)


def divergence_surface(R, cfg: EstimatorConfig | None = None, model_cache: dict | None = None) -> dict:
    """The full (p, phi) -> divergence map with no arg-min reduction."""
    return estimate(R, cfg, model_cache).surface
