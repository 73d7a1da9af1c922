"""Moving-window estimation: p-hat and phi-hat as time series.

A fixed-width window slides across the sample axis; the estimator runs on
each window independently and the results line up into a series indexed by
the window's (1-based) end sample. A window that fails (say, a zero-variance
row inside it) is recorded as an explicit gap entry carrying the error text —
silent skips would corrupt any event-timing read off the series.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import SpecfactorError
from .estimator import EstimatorConfig, estimate
from .residuals import check_data_matrix

__all__ = ["WindowConfig", "WindowEntry", "WindowSeries", "sliding_estimates"]


@dataclass(frozen=True)
class WindowConfig:
    """Window width (in samples), stride, and the estimator to run per window.

    Width must exceed N so each window keeps the variables-to-samples ratio
    below one.
    """

    width: int
    step: int = 1
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)

    def __post_init__(self):
        if self.width < 2:
            raise ValueError(f"window width must be >= 2, got {self.width}")
        if self.step < 1:
            raise ValueError(f"stride must be >= 1, got {self.step}")


@dataclass(frozen=True)
class WindowEntry:
    end_index: int  # 1-based index of the window's last sample
    p_hat: int | None
    phi_hat: float | None
    d_min: float | None
    error: str | None = None


@dataclass(frozen=True)
class WindowSeries:
    entries: tuple[WindowEntry, ...]

    def __post_init__(self):
        ends = [e.end_index for e in self.entries]
        if any(b <= a for a, b in zip(ends, ends[1:])):
            raise ValueError("window entries must have strictly increasing end_index")

    def column(self, name: str) -> list:
        return [getattr(e, name) for e in self.entries]

    def to_csv(self) -> str:
        lines = ["end_index,p_hat,phi_hat,d_min,error"]
        for e in self.entries:
            if e.error is None:
                lines.append(f"{e.end_index},{e.p_hat},{e.phi_hat:.17g},{e.d_min:.17g},")
            else:
                err = e.error.replace(",", ";").replace("\n", " ")
                lines.append(f"{e.end_index},,,,{err}")
        return "\n".join(lines) + "\n"


def sliding_estimates(R, cfg: WindowConfig, threads: int = 1) -> WindowSeries:
    """Run the estimator on every window [t - width + 1, t], t = width, width+step, ...

    Windows are independent (no state carries over), so the series does not
    depend on evaluation order; with ``threads > 1`` they run concurrently
    over the shared read-only matrix. Model-side evaluations are cached and
    shared across windows.
    """
    R = check_data_matrix(R)
    n, t = R.shape
    if cfg.width > t:
        raise ValueError(f"window width {cfg.width} exceeds T={t}")
    if cfg.width <= n:
        raise ValueError(
            f"window width {cfg.width} must exceed N={n} to keep the aspect ratio below 1"
        )
    ends = range(cfg.width, t + 1, cfg.step)
    cache: dict = {}

    def run(end: int) -> WindowEntry:
        window = R[:, end - cfg.width : end]
        try:
            res = estimate(window, cfg.estimator, model_cache=cache)
        except SpecfactorError as exc:
            return WindowEntry(end, None, None, None, f"{type(exc).__name__}: {exc}")
        return WindowEntry(end, res.p_hat, res.phi_hat, res.d_min)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            entries = list(pool.map(run, ends))
    else:
        entries = [run(end) for end in ends]
    return WindowSeries(tuple(entries))
