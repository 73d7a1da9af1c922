"""Tests for sliding-window estimation series."""
import numpy as np
import pytest

from specfactor.estimator import EstimatorConfig, estimate
from specfactor.synthetic import ScenarioConfig, generate_scenario
from specfactor.windows import WindowConfig, WindowEntry, WindowSeries, sliding_estimates

FAST = EstimatorConfig(p_max=5, phi_grid=tuple(i / 20 for i in range(1, 21)), refine=False)


def window_cfg(width, step=1):
    return WindowConfig(width=width, step=step, estimator=FAST)


def noise(n, t, seed=0):
    return np.random.default_rng(seed).standard_normal((n, t))


# ---------------------------------------------------------------- geometry

@pytest.mark.parametrize("t,width,step", [(300, 100, 25), (257, 64, 7), (120, 100, 200)])
def test_series_length_formula(t, width, step):
    series = sliding_estimates(noise(20, t), window_cfg(width, step))
    assert len(series.entries) == (t - width) // step + 1
    ends = [e.end_index for e in series.entries]
    assert ends[0] == width
    assert all(b - a == step for a, b in zip(ends, ends[1:]))


def test_single_window_equals_plain_estimate():
    R = noise(25, 140, seed=1)
    series = sliding_estimates(R, window_cfg(140))
    assert len(series.entries) == 1
    entry = series.entries[0]
    direct = estimate(R, FAST)
    assert (entry.p_hat, entry.phi_hat, entry.d_min) == (
        direct.p_hat, direct.phi_hat, direct.d_min,
    )


def test_width_validation():
    R = noise(30, 100)
    with pytest.raises(ValueError):
        sliding_estimates(R, window_cfg(101))     # wider than T
    with pytest.raises(ValueError):
        sliding_estimates(R, window_cfg(30))      # must exceed N
    with pytest.raises(ValueError):
        WindowConfig(width=1)
    with pytest.raises(ValueError):
        WindowConfig(width=50, step=0)


# ---------------------------------------------------------------- order independence

def test_threaded_equals_serial():
    R = generate_scenario(ScenarioConfig(n=24, t=300, seed=0))
    serial = sliding_estimates(R, window_cfg(100, 25), threads=1)
    threaded = sliding_estimates(R, window_cfg(100, 25), threads=4)
    for a, b in zip(serial.entries, threaded.entries):
        assert (a.end_index, a.p_hat, a.phi_hat, a.d_min) == (
            b.end_index, b.p_hat, b.phi_hat, b.d_min,
        )


# ---------------------------------------------------------------- dynamics

def test_no_event_series_is_flat():
    R = generate_scenario(ScenarioConfig(n=24, t=300, seed=0))
    series = sliding_estimates(R, window_cfg(100, 25))
    ps = [e.p_hat for e in series.entries]
    assert max(ps) - min(ps) <= 1


def test_staggered_events_rise_and_fall():
    events = tuple((r, 181, 60.0) for r in range(6)) + tuple(
        (r, 221, 60.0) for r in range(6, 12)
    )
    R = generate_scenario(ScenarioConfig(n=30, t=400, events=events, seed=0))
    series = sliding_estimates(R, window_cfg(120, 20))
    ends = [e.end_index for e in series.entries]
    ps = [e.p_hat for e in series.entries]

    peak = max(ps)
    peak_positions = [end for end, p in zip(ends, ps) if p == peak]
    # the maximum must occur while both change points are inside the window
    assert all(221 <= end <= 300 for end in peak_positions)

    # weakly increasing while events accumulate, weakly decreasing as they
    # leave, with one sample of jitter allowed either way
    top = ends.index(peak_positions[0])
    assert all(b >= a - 1 for a, b in zip(ps[:top], ps[1:top + 1]))
    assert all(b <= a + 1 for a, b in zip(ps[top:], ps[top + 1:]))

    # far from the event the series sits at the pre-event baseline
    assert ps[0] == ps[-1] == 0


# ---------------------------------------------------------------- failure entries

def test_zero_variance_window_recorded_as_gap():
    R = noise(12, 200, seed=2)
    R[3, :60] = 4.25  # constant prefix: early windows cannot standardize
    series = sliding_estimates(R, window_cfg(50, 50))
    first, *rest = series.entries
    assert first.p_hat is None and first.phi_hat is None and first.d_min is None
    assert "ZeroVarianceRowError" in first.error
    assert all(e.error is None and e.p_hat is not None for e in rest)


# ---------------------------------------------------------------- serialization

def test_series_csv_layout():
    entries = (
        WindowEntry(100, 2, 0.45, 0.0123),
        WindowEntry(150, None, None, None, "DataError: bad, window"),
    )
    text = WindowSeries(entries).to_csv()
    lines = text.strip().splitlines()
    assert lines[0] == "end_index,p_hat,phi_hat,d_min,error"
    assert lines[1].startswith("100,2,")
    assert "bad; window" in lines[2]  # commas in error text are defanged
    assert lines[2].startswith("150,,,,")


def test_series_column_access():
    entries = (WindowEntry(10, 1, 0.5, 0.2), WindowEntry(20, 2, 0.6, 0.1))
    series = WindowSeries(entries)
    assert series.column("p_hat") == [1, 2]
    assert series.column("end_index") == [10, 20]


def test_series_requires_increasing_index():
    entries = (WindowEntry(20, 1, 0.5, 0.2), WindowEntry(10, 2, 0.6, 0.1))
    with pytest.raises(ValueError):
        WindowSeries(entries)
