"""Synthetic data generators for experiments and oracle sampling.

Three families:

* a Monte Carlo factor model R = Lambda F + sqrt(gamma) U whose residuals U
  carry controllable auto-correlation (AR coefficient ``alpha``) and local
  cross-correlation (weight ``beta`` over ``j`` neighbor rows on each side),
* step-change anomaly scenarios: per-row baseline levels, persistent level
  shifts at chosen start times, and a small white-Gaussian + AR(1) noise
  floor, and
* direct sampling of the two-Wishart product that the model density predicts,
  used as the Monte Carlo oracle for the analytic law.

Every generator is deterministic per seed: identical config + seed gives a
bit-identical matrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectra import as_spectrum

__all__ = [
    "SyntheticConfig",
    "ScenarioConfig",
    "generate_factor_data",
    "generate_iid_check_data",
    "generate_scenario",
    "sample_wishart_product",
]


@dataclass(frozen=True)
class SyntheticConfig:
    """Monte Carlo factor-model parameters.

    ``gamma`` is the residual level (signal-to-noise ratio = p / gamma),
    ``alpha`` the residual AR(1) coefficient, ``beta`` the cross-correlation
    weight applied to the ``j`` nearest rows on each side.
    """

    n: int
    t: int
    p: int
    gamma: float
    alpha: float = 0.0
    beta: float = 0.0
    j: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 or self.t < 2:
            raise ValueError(f"need n, t >= 2, got {self.n}x{self.t}")
        if not 0 <= self.p <= min(self.n, self.t):
            raise ValueError(f"factor count p must be in [0, min(n, t)], got {self.p}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must be in [0, 1), got {self.alpha}")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must be in [0, 1), got {self.beta}")
        if not 0 <= self.j <= self.n:
            raise ValueError(f"cross-range j must be in [0, n], got {self.j}")


def _banded_row_sums(v: np.ndarray, j: int) -> np.ndarray:
    """For each row i: sum of v over rows within distance j, excluding i itself."""
    if j == 0:
        return np.zeros_like(v)
    n = v.shape[0]
    csum = np.vstack([np.zeros((1, v.shape[1])), np.cumsum(v, axis=0)])
    idx = np.arange(n)
    hi = np.minimum(idx + j, n - 1)
    lo = np.maximum(idx - j, 0)
    return csum[hi + 1] - csum[lo] - v


def generate_factor_data(cfg: SyntheticConfig) -> np.ndarray:
    """Draw one N x T observation matrix R = Lambda F + sqrt(gamma) U.

    Loadings, factors and residual innovations are standard normal. The
    residual driver e follows e_t = alpha * e_{t-1} + v_t + beta * (banded
    neighbor sum of v_t); e_0 is drawn from the stationary marginal with
    variance (1 + 2 j beta^2) / (1 - alpha^2) so there is no burn-in bias,
    and U rescales e by the reciprocal square root of that variance so that
    var(U) = 1 for interior rows.
    """
    rng = np.random.default_rng(cfg.seed)
    lam = rng.standard_normal((cfg.n, cfg.p))
    fac = rng.standard_normal((cfg.p, cfg.t))
    v = rng.standard_normal((cfg.n, cfg.t))
    e0 = rng.standard_normal(cfg.n)

    drive = v + cfg.beta * _banded_row_sums(v, cfg.j)
    stat_var = (1.0 + 2.0 * cfg.j * cfg.beta**2) / (1.0 - cfg.alpha**2)
    e = np.empty((cfg.n, cfg.t))
    prev = np.sqrt(stat_var) * e0
    for t in range(cfg.t):
        prev = cfg.alpha * prev + drive[:, t]
        e[:, t] = prev
    u = np.sqrt((1.0 - cfg.alpha**2) / (1.0 + 2.0 * cfg.j * cfg.beta**2)) * e
    return lam @ fac + np.sqrt(cfg.gamma) * u


def generate_iid_check_data(n: int, t: int, seed: int = 0) -> np.ndarray:
    """Sanity-model data: 4 weak factors on top of unit i.i.d. noise.

    Loadings are N(0,1), factor series N(0, 0.01), noise N(0,1) — the
    configuration whose p=4 residual spectrum should follow the
    Marchenko-Pastur law.
    """
    if n < 2 or t < 2:
        raise ValueError(f"need n, t >= 2, got {n}x{t}")
    rng = np.random.default_rng(seed)
    lam = rng.standard_normal((n, 4))
    fac = 0.1 * rng.standard_normal((4, t))
    noise = rng.standard_normal((n, t))
    return lam @ fac + noise


@dataclass(frozen=True)
class ScenarioConfig:
    """Step-change scenario: persistent level shifts on top of a noise floor.

    ``base_level`` is a scalar or per-row array of baselines. ``events`` is a
    list of ``(row, start, level)`` triples: from 1-based sampling time
    ``start`` onward, that row sits at ``level``. Rows not named keep their
    baseline. Every row carries (1/snr) * (white Gaussian + AR(1)) noise.
    """

    n: int
    t: int
    base_level: float | tuple = 20.0
    events: tuple = ()
    snr: float = 1000.0
    ar_coeff: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 or self.t < 2:
            raise ValueError(f"need n, t >= 2, got {self.n}x{self.t}")
        if self.snr <= 0:
            raise ValueError(f"snr must be positive, got {self.snr}")
        if not 0.0 <= self.ar_coeff < 1.0:
            raise ValueError(f"ar_coeff must be in [0, 1), got {self.ar_coeff}")
        object.__setattr__(self, "events", tuple(tuple(ev) for ev in self.events))
        for row, start, _level in self.events:
            if not 0 <= row < self.n:
                raise ValueError(f"event row {row} outside [0, {self.n})")
            if not 1 <= start <= self.t:
                raise ValueError(f"event start {start} outside sampling range [1, {self.t}]")


def generate_scenario(cfg: ScenarioConfig) -> np.ndarray:
    """Render a scenario into an N x T matrix."""
    rng = np.random.default_rng(cfg.seed)
    wg = rng.standard_normal((cfg.n, cfg.t))
    innov = rng.standard_normal((cfg.n, cfg.t))
    e0 = rng.standard_normal(cfg.n)

    ar = np.empty((cfg.n, cfg.t))
    # stationary start, so the noise floor has no transient
    prev = e0 / np.sqrt(1.0 - cfg.ar_coeff**2)
    for t in range(cfg.t):
        prev = cfg.ar_coeff * prev + innov[:, t]
        ar[:, t] = prev

    levels = np.broadcast_to(
        np.asarray(cfg.base_level, dtype=float).reshape(-1, 1), (cfg.n, cfg.t)
    ).copy()
    for row, start, level in cfg.events:
        levels[row, start - 1 :] = level
    return levels + (wg + ar) / cfg.snr


def sample_wishart_product(n_dim: int, phi: float, seed: int = 0) -> np.ndarray:
    """Eigenvalues of S0 S1 with Si = Gi Gi'/n, Gi of shape n_dim x round(n_dim/phi).

    The product of two PSD matrices has a real spectrum; it is computed from
    the symmetric similar form S1^{1/2} S0 S1^{1/2} to stay in real
    arithmetic. Returns the ascending spectrum.
    """
    if not 0.0 < phi <= 1.0:
        raise ValueError(f"phi must lie in (0, 1], got {phi}")
    if n_dim < 2:
        raise ValueError(f"n_dim must be >= 2, got {n_dim}")
    rng = np.random.default_rng(seed)
    m, n = n_dim, int(round(n_dim / phi))
    g0 = rng.standard_normal((m, n))
    g1 = rng.standard_normal((m, n))
    s0 = g0 @ g0.T / n
    s1 = g1 @ g1.T / n
    w, vec = np.linalg.eigh(s1)
    root = (vec * np.sqrt(np.clip(w, 0.0, None))) @ vec.T
    return as_spectrum(np.linalg.eigvalsh(root @ s0 @ root))
