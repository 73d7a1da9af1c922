"""Tests for the histogram/density toolbox.

Anchor values here were computed by hand or with independent quadrature and
are frozen as literals; they must not be regenerated from the code under test.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specfactor.errors import DataError, GridMismatchError
from specfactor.spectra import (
    BinningPolicy,
    SpectralDensity,
    as_spectrum,
    density_moment,
    esd,
    js_divergence,
    mp_density_on_grid,
    mp_pdf,
    stieltjes_of_density,
)


def hand_density(edges, mass) -> SpectralDensity:
    """Build a density from explicit edges, bypassing BinningPolicy's >=10-bin rule."""
    return SpectralDensity(np.asarray(edges, dtype=float), np.asarray(mass, dtype=float))


def two_bin(m0: float, m1: float) -> SpectralDensity:
    return hand_density([0.0, 1.0, 2.0], [m0, m1])


# ---------------------------------------------------------------- JS oracle

def test_js_hand_value():
    # p = (1/2, 1/2), q = (1, 0):
    #   m = (3/4, 1/4)
    #   JS = 1/2 [ 1/2 ln(2/3) + 1/2 ln 2 ] + 1/2 ln(4/3)
    # evaluated by hand to 17 digits.
    assert js_divergence(two_bin(0.5, 0.5), two_bin(1.0, 0.0)) == pytest.approx(
        0.21576155433883565, abs=1e-15
    )


def test_js_identical_is_zero():
    a = two_bin(0.3, 0.7)
    assert js_divergence(a, a) == 0.0


def test_js_disjoint_saturates_at_log2():
    d = js_divergence(two_bin(1.0, 0.0), two_bin(0.0, 1.0))
    assert d == pytest.approx(math.log(2.0), rel=1e-12)


def test_js_requires_shared_grid():
    a = two_bin(0.5, 0.5)
    b = hand_density([0.0, 1.5, 3.0], [0.5, 0.5])
    with pytest.raises(GridMismatchError):
        js_divergence(a, b)


@settings(max_examples=200, deadline=None)
@given(
    raw=st.lists(st.tuples(st.floats(0.0, 1.0), st.floats(0.0, 1.0)),
                 min_size=2, max_size=40),
)
def test_js_bounds_and_symmetry(raw):
    pa = np.array([r[0] for r in raw]) + 1e-12
    pb = np.array([r[1] for r in raw]) + 1e-12
    edges = np.linspace(0.0, 1.0, len(raw) + 1)
    a = hand_density(edges, pa / pa.sum())
    b = hand_density(edges, pb / pb.sum())
    d_ab = js_divergence(a, b)
    d_ba = js_divergence(b, a)
    assert d_ab == d_ba  # exact, not approximate
    assert 0.0 <= d_ab <= math.log(2.0) + 1e-12


def test_js_positive_for_different_masses():
    edges = [0.0, 1.0, 2.0, 3.0]
    a = hand_density(edges, [0.2, 0.3, 0.5])
    b = hand_density(edges, [0.2, 0.3 + 1e-6, 0.5 - 1e-6])
    assert js_divergence(a, b) > 0.0


# ---------------------------------------------------------------- ESD / spectrum

def test_as_spectrum_sorts_and_clamps():
    vals = as_spectrum([3.0, -1e-12, 1.0])
    assert vals[0] == 0.0
    assert list(vals) == sorted(vals)


def test_as_spectrum_rejects_genuine_negative():
    with pytest.raises(DataError):
        as_spectrum([1.0, -0.5])


def test_as_spectrum_rejects_nan():
    with pytest.raises(DataError):
        as_spectrum([1.0, float("nan")])


def test_esd_mass_sums_to_one():
    rng = np.random.default_rng(7)
    spec = as_spectrum(rng.uniform(0.0, 5.0, size=137))
    hist = esd(spec, BinningPolicy(25, 0.0, 5.0))
    assert hist.mass.sum() == pytest.approx(1.0, abs=1e-12)
    assert hist.mass.min() >= 0.0


def test_esd_out_of_range_needs_clip():
    spec = as_spectrum([0.5, 7.0])
    pol = BinningPolicy(10, 0.0, 5.0)
    with pytest.raises(DataError):
        esd(spec, pol)
    clipped = esd(spec, pol, clip=True)
    assert clipped.mass.sum() == pytest.approx(1.0)
    assert clipped.mass[-1] == pytest.approx(0.5)  # the clipped value lands in the top bin


def test_esd_point_masses_land_in_expected_bins():
    hist = esd(as_spectrum([0.25, 0.25, 1.75]), BinningPolicy(10, 0.0, 2.0))
    want = np.zeros(10)
    want[1] = 2 / 3   # 0.25 twice -> [0.2, 0.4)
    want[8] = 1 / 3   # 1.75      -> [1.6, 1.8)
    assert hist.mass == pytest.approx(want)


# ---------------------------------------------------------------- Marchenko-Pastur

def test_mp_pdf_hand_value():
    # c=1, sigma^2=1: rho(2) = sqrt((4-2)*2) / (2*pi*2) = 1/(2*pi)
    assert mp_pdf(2.0, 1.0) == pytest.approx(0.15915494309189535, rel=1e-14)


def test_mp_pdf_zero_outside_support():
    assert mp_pdf(3.0, 0.25) == 0.0
    assert mp_pdf(0.1, 0.25) == 0.0


@pytest.mark.parametrize("c", [0.1, 0.5, 1.0])
def test_mp_pdf_integrates_to_one(c):
    lo = (1 - math.sqrt(c)) ** 2
    hi = (1 + math.sqrt(c)) ** 2
    if c < 1.0:
        x = np.linspace(lo, hi, 10_000)
    else:
        # at c=1 the density has an integrable 1/sqrt(x) singularity at 0;
        # a sqrt-spaced grid keeps the 10^4-node trapezoid rule convergent.
        x = np.linspace(math.sqrt(lo), math.sqrt(hi), 10_000) ** 2
    total = np.trapezoid(mp_pdf(x, c), x)
    assert total == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize("c", [0.25, 0.5, 1.0])
def test_mp_grid_moments(c):
    pol = BinningPolicy(400, 0.0, 1.05 * (1 + math.sqrt(c)) ** 2)
    rho = mp_density_on_grid(c, 1.0, pol)
    assert rho.mass.sum() == pytest.approx(1.0, abs=1e-12)
    assert density_moment(rho, 1) == pytest.approx(1.0, rel=0.02)
    assert density_moment(rho, 2) == pytest.approx(1.0 + c, rel=0.03)


def test_mp_rejects_bad_aspect():
    pol = BinningPolicy(10, 0.0, 4.0)
    with pytest.raises(ValueError):
        mp_density_on_grid(1.5, 1.0, pol)
    with pytest.raises(ValueError):
        mp_density_on_grid(0.0, 1.0, pol)
    with pytest.raises(ValueError):
        mp_pdf(1.0, 0.5, sigma2=-1.0)


# ---------------------------------------------------------------- moments / Stieltjes

def test_density_moment_midpoint_rule():
    rho = two_bin(0.25, 0.75)
    # midpoints 0.5, 1.5
    assert density_moment(rho, 1) == pytest.approx(0.25 * 0.5 + 0.75 * 1.5)
    assert density_moment(rho, 2) == pytest.approx(0.25 * 0.25 + 0.75 * 2.25)


def test_density_moment_rejects_bad_order():
    with pytest.raises(ValueError):
        density_moment(two_bin(0.5, 0.5), 0)


def test_stieltjes_halfplane_mapping():
    rng = np.random.default_rng(3)
    mass = rng.uniform(0.1, 1.0, 30)
    mass /= mass.sum()
    rho = hand_density(np.linspace(0.0, 6.0, 31), mass)
    for z in (0.5 + 1e-6j, 2.0 + 0.3j, -1.0 + 2.0j, 10.0 + 1e-3j):
        out = stieltjes_of_density(rho, z)
        assert out.imag < 0.0


def test_stieltjes_rejects_real_argument():
    with pytest.raises(ValueError):
        stieltjes_of_density(two_bin(0.5, 0.5), 1.0 + 0.0j)


def test_stieltjes_far_field_decay():
    z = 1e6 + 1.0j
    assert stieltjes_of_density(two_bin(0.5, 0.5), z) * z == pytest.approx(1.0, rel=1e-4)


# ---------------------------------------------------------------- containers

def test_binning_policy_validation():
    with pytest.raises(ValueError):
        BinningPolicy(5, 2.0, 1.0)
    with pytest.raises(ValueError):
        BinningPolicy(3, 0.0, 1.0)  # fewer than 10 bins
    with pytest.raises(ValueError):
        BinningPolicy(10, 0.0, float("inf"))


def test_binning_policy_edges():
    pol = BinningPolicy(10, 0.0, 5.0)
    e = pol.edges()
    assert len(e) == 11
    assert e[0] == 0.0 and e[-1] == 5.0


def test_spectral_density_validation():
    edges = [0.0, 1.0, 2.0]
    with pytest.raises(ValueError):
        hand_density(edges, [0.6, 0.6])  # sums to 1.2
    with pytest.raises(ValueError):
        hand_density(edges, [1.2, -0.2])


def test_spectral_density_is_immutable():
    rho = two_bin(0.5, 0.5)
    with pytest.raises((ValueError, RuntimeError)):
        rho.mass[0] = 1.0


def test_to_tsv_round_trips_17_digits():
    rho = two_bin(1.0 / 3.0, 2.0 / 3.0)
    lines = rho.to_tsv().strip().splitlines()
    parsed = [float(line.split("\t")[1]) for line in lines]
    assert parsed == [1.0 / 3.0, 2.0 / 3.0]
