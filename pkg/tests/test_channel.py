"""Port-selection channel model: correlation profile, joint and max laws."""

import math

import numpy as np
import pytest

from fasdep import specfun
from fasdep.channel import (
    FasChannel,
    bivariate_cdf_series,
    joint_cdf,
    joint_pdf,
    marginal_cdf,
    marginal_pdf,
    max_cdf,
    spatial_correlation,
)

import oracles

# Pinned by tests/oracles.py.
MU2_TWO_PORT_W03 = 0.2905642140891242  # J0(0.6 pi): port pair at W = 0.3
BIV_RAYLEIGH_PDF_POINT = 0.5476567591079227  # (r1, r2, mu) = (0.8, 1.1, 0.5)


# ---------------------------------------------------------------------------
# Construction and correlation profile
# ---------------------------------------------------------------------------

def test_correlation_profile_reproducible():
    """Stored mu must equal the generator function entry by entry."""
    chan = FasChannel(n_ports=5, aperture=0.4, nakagami_m=1.0)
    want = tuple(spatial_correlation(k, 5, 0.4) for k in range(2, 6))
    assert chan.mu == want


def test_correlation_is_bessel_of_port_offset():
    # second port of a pair at W = 0.3: J0(2 pi * 0.3) = J0(0.6 pi)
    assert spatial_correlation(2, 2, 0.3) == pytest.approx(
        MU2_TWO_PORT_W03, rel=1e-12)
    assert spatial_correlation(2, 2, 0.3) == pytest.approx(
        oracles.j0_maclaurin(2 * math.pi * 0.3), rel=1e-12)


def test_zero_aperture_means_full_correlation():
    chan = FasChannel(n_ports=4, aperture=0.0, nakagami_m=2.0)
    assert chan.mu == (1.0, 1.0, 1.0)
    assert chan.degenerate_ports()


def test_correlations_bounded_by_one():
    for n in (2, 3, 5, 9):
        for w in (0.0, 0.1, 0.5, 1.0, 3.0):
            chan = FasChannel(n_ports=n, aperture=w, nakagami_m=1.0)
            assert all(abs(v) <= 1.0 for v in chan.mu)


def test_single_port_has_no_correlations():
    chan = FasChannel(n_ports=1, aperture=0.5, nakagami_m=1.0)
    assert chan.mu == ()
    assert not chan.degenerate_ports()


def test_construction_validation():
    with pytest.raises(ValueError):
        FasChannel(n_ports=0, aperture=0.1, nakagami_m=1.0)
    with pytest.raises(ValueError):
        FasChannel(n_ports=2, aperture=-0.1, nakagami_m=1.0)
    with pytest.raises(ValueError):
        FasChannel(n_ports=2, aperture=0.1, nakagami_m=0.4)
    with pytest.raises(ValueError):
        FasChannel(n_ports=2, aperture=0.1, nakagami_m=1.0, power=0.0)
    with pytest.raises(ValueError):
        FasChannel.with_correlation(3, (0.5,), nakagami_m=1.0)
    with pytest.raises(ValueError):
        FasChannel.with_correlation(2, (1.2,), nakagami_m=1.0)


def test_port_index_validation():
    with pytest.raises(ValueError):
        spatial_correlation(1, 4, 0.3)
    with pytest.raises(ValueError):
        spatial_correlation(5, 4, 0.3)
    with pytest.raises(ValueError):
        spatial_correlation(2, 1, 0.3)


# ---------------------------------------------------------------------------
# Marginal law
# ---------------------------------------------------------------------------

def test_marginal_cdf_is_regularized_gamma():
    chan = FasChannel(n_ports=3, aperture=0.5, nakagami_m=2.5, power=1.7)
    for x in (0.2, 0.8, 1.5, 3.0):
        want = specfun.reg_lower_inc_gamma(2.5, 2.5 * x * x / 1.7)
        assert marginal_cdf(chan, x) == pytest.approx(want, rel=1e-13)


def test_marginal_cdf_endpoints():
    chan = FasChannel(n_ports=2, aperture=0.3, nakagami_m=1.0)
    assert marginal_cdf(chan, 0.0) == 0.0
    assert marginal_cdf(chan, 40.0) == pytest.approx(1.0, abs=1e-12)


def test_rayleigh_marginal_closed_form():
    """m = 1 collapses to the Rayleigh law 1 - exp(-x^2/sigma^2)."""
    chan = FasChannel(n_ports=2, aperture=0.3, nakagami_m=1.0, power=2.0)
    for x in (0.3, 1.0, 2.2):
        assert marginal_cdf(chan, x) == pytest.approx(
            -math.expm1(-x * x / 2.0), rel=1e-13)
        assert marginal_pdf(chan, x) == pytest.approx(
            x * math.exp(-x * x / 2.0), rel=1e-13)


def test_marginal_pdf_integrates_to_cdf():
    from fasdep.quadrature import adaptive_gk
    chan = FasChannel(n_ports=2, aperture=0.3, nakagami_m=3.0, power=0.9)
    f = lambda xs: np.array([marginal_pdf(chan, float(v)) for v in xs])
    got = adaptive_gk(f, 0.0, 1.2, abs_tol=1e-12).value
    assert got == pytest.approx(marginal_cdf(chan, 1.2), rel=1e-10)


def test_marginal_mean_square_is_power():
    from fasdep.quadrature import adaptive_gk
    chan = FasChannel(n_ports=2, aperture=0.3, nakagami_m=1.5, power=1.3)
    f = lambda xs: np.array([v * v * marginal_pdf(chan, float(v)) for v in xs])
    got = adaptive_gk(f, 0.0, 12.0, abs_tol=1e-12).value
    assert got == pytest.approx(1.3, rel=1e-9)


# ---------------------------------------------------------------------------
# Joint density
# ---------------------------------------------------------------------------

def test_joint_pdf_two_port_rayleigh_against_quadrature():
    """N = 2, m = 1 against a numerically integrated bivariate Rayleigh."""
    chan = FasChannel.with_correlation(2, (0.5,), nakagami_m=1.0)
    assert joint_pdf(chan, (0.8, 1.1)) == pytest.approx(
        BIV_RAYLEIGH_PDF_POINT, rel=1e-10)


def test_joint_pdf_single_port_is_marginal():
    chan = FasChannel(n_ports=1, aperture=0.0, nakagami_m=2.0)
    for x in (0.4, 1.0, 1.9):
        assert joint_pdf(chan, (x,)) == pytest.approx(
            marginal_pdf(chan, x), rel=1e-12)


def test_joint_pdf_uncorrelated_factorizes():
    chan = FasChannel.with_correlation(3, (0.0, 0.0), nakagami_m=1.5)
    xs = (0.5, 1.1, 0.8)
    want = math.prod(marginal_pdf(chan, v) for v in xs)
    assert joint_pdf(chan, xs) == pytest.approx(want, rel=1e-9)


@pytest.mark.parametrize("n_ports,nodes", [(2, 120), (3, 48)])
def test_joint_pdf_has_unit_mass(n_ports, nodes):
    """Gauss-Legendre cubature of the joint density over [0, 20]^N."""
    chan = FasChannel(n_ports=n_ports, aperture=0.25, nakagami_m=1.0)
    x, w = np.polynomial.legendre.leggauss(nodes)
    x = 10.0 * (x + 1.0)
    w = 10.0 * w
    if n_ports == 2:
        grid = [(a, b) for a in x for b in x]
        wts = np.array([wa * wb for wa in w for wb in w])
    else:
        grid = [(a, b, c) for a in x for b in x for c in x]
        wts = np.array([wa * wb * wc for wa in w for wb in w for wc in w])
    vals = np.array([joint_pdf(chan, g) for g in grid])
    assert float(wts @ vals) == pytest.approx(1.0, abs=1e-4)


def test_joint_pdf_rejects_bad_input():
    chan = FasChannel(n_ports=2, aperture=0.3, nakagami_m=1.0)
    with pytest.raises(ValueError):
        joint_pdf(chan, (0.5,))
    with pytest.raises(ValueError):
        joint_pdf(chan, (0.5, -0.1))
    with pytest.raises(ValueError):
        joint_pdf(FasChannel(n_ports=2, aperture=0.0, nakagami_m=1.0),
                  (0.5, 0.5))


# ---------------------------------------------------------------------------
# Joint CDF
# ---------------------------------------------------------------------------

def test_joint_cdf_single_port_is_marginal():
    chan = FasChannel(n_ports=1, aperture=0.2, nakagami_m=1.0)
    assert joint_cdf(chan, (0.9,)) == pytest.approx(
        marginal_cdf(chan, 0.9), rel=1e-12)


def test_joint_cdf_nondecreasing_per_component():
    chan = FasChannel(n_ports=3, aperture=0.3, nakagami_m=2.0)
    base = (0.6, 0.9, 0.7)
    p0 = joint_cdf(chan, base)
    for i in range(3):
        up = list(base)
        up[i] += 0.4
        assert joint_cdf(chan, tuple(up)) >= p0 - 1e-12


def test_joint_cdf_zero_corner():
    chan = FasChannel(n_ports=2, aperture=0.4, nakagami_m=1.0)
    assert joint_cdf(chan, (0.0, 1.0)) == 0.0
    assert joint_cdf(chan, (1.0, 0.0)) == pytest.approx(0.0, abs=1e-12)


def test_joint_cdf_saturates_to_marginal():
    """Pushing all but one limit to infinity leaves that port's marginal."""
    chan = FasChannel(n_ports=2, aperture=0.35, nakagami_m=2.0)
    assert joint_cdf(chan, (0.8, 50.0)) == pytest.approx(
        marginal_cdf(chan, 0.8), rel=1e-9)


def test_joint_cdf_against_monte_carlo():
    """Correlated Rayleigh pair, P(X1 <= 1, X2 <= 1) from 1e7 draws.

    Gaussian components per port with variance 1/2 (unit power); port 2
    mixes in the port-1 components with weight mu.
    """
    mu = 0.3
    chan = FasChannel.with_correlation(2, (mu,), nakagami_m=1.0)
    want = joint_cdf(chan, (1.0, 1.0))
    rng = np.random.default_rng(2024)
    s = math.sqrt(0.5)
    c = math.sqrt(1.0 - mu * mu)
    hits = 0
    n = 10_000_000
    chunk = 1_000_000
    for _ in range(n // chunk):
        g1 = rng.normal(0.0, s, size=(chunk, 2))
        g2 = mu * g1 + c * rng.normal(0.0, s, size=(chunk, 2))
        x1 = np.hypot(g1[:, 0], g1[:, 1])
        x2 = np.hypot(g2[:, 0], g2[:, 1])
        hits += int(np.count_nonzero((x1 <= 1.0) & (x2 <= 1.0)))
    p_hat = hits / n
    se = math.sqrt(want * (1.0 - want) / n)
    assert abs(p_hat - want) < 3.0 * se


# ---------------------------------------------------------------------------
# Best-port CDF
# ---------------------------------------------------------------------------

def test_max_cdf_single_port():
    chan = FasChannel(n_ports=1, aperture=0.3, nakagami_m=1.0)
    assert max_cdf(chan, 0.7) == pytest.approx(
        marginal_cdf(chan, 0.7), rel=1e-12)


def test_max_cdf_equals_joint_at_common_threshold():
    chan = FasChannel(n_ports=3, aperture=0.4, nakagami_m=1.5)
    assert max_cdf(chan, 0.9) == pytest.approx(
        joint_cdf(chan, (0.9, 0.9, 0.9)), rel=1e-10)


def test_max_cdf_decreases_with_ports():
    """More ports can only improve the best envelope."""
    prev = None
    for n in (1, 2, 3, 4, 5):
        chan = FasChannel(n_ports=n, aperture=0.5, nakagami_m=1.0)
        p = max_cdf(chan, 0.8)
        if prev is not None:
            assert p <= prev + 1e-10
        prev = p


def test_max_cdf_uncorrelated_is_product():
    chan = FasChannel.with_correlation(3, (0.0, 0.0), nakagami_m=2.0)
    single = marginal_cdf(chan, 0.75)
    assert max_cdf(chan, 0.75) == pytest.approx(single**3, rel=1e-8)


def test_max_cdf_near_full_correlation_collapses():
    """mu -> 1 pushes the best-port law onto the single marginal.

    The approach is O(sqrt(1 - mu^2)), so mu = 1 - 1e-4 still carries a
    few-e-4 residual of diversity; assert absolute closeness on the CDF.
    """
    chan = FasChannel.with_correlation(2, (1.0 - 1e-4,), nakagami_m=2.0)
    got = max_cdf(chan, 0.25)
    want = marginal_cdf(chan, 0.25)
    assert got == pytest.approx(want, abs=1e-3)


def test_max_cdf_monotone_in_threshold():
    chan = FasChannel(n_ports=4, aperture=0.3, nakagami_m=2.0)
    xs = np.linspace(0.05, 2.5, 30)
    vals = [max_cdf(chan, float(x)) for x in xs]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert all(0.0 <= v <= 1.0 for v in vals)


def test_max_cdf_rejects_degenerate_and_negative():
    with pytest.raises(ValueError):
        max_cdf(FasChannel(n_ports=2, aperture=0.0, nakagami_m=1.0), 0.5)
    with pytest.raises(ValueError):
        max_cdf(FasChannel(n_ports=2, aperture=0.3, nakagami_m=1.0), -0.5)


# ---------------------------------------------------------------------------
# Two-port series
# ---------------------------------------------------------------------------

def test_bivariate_series_matches_quadrature_route():
    for m in (1.0, 2.0, 4.0):
        for mu in (0.1, 0.5, 0.9):
            chan = FasChannel.with_correlation(2, (mu,), nakagami_m=m)
            for x in (0.5, 1.0, 2.0):
                assert bivariate_cdf_series(chan, x, x) == pytest.approx(
                    max_cdf(chan, x), rel=1e-8)


def test_bivariate_series_asymmetric_limits():
    chan = FasChannel.with_correlation(2, (0.6,), nakagami_m=1.5)
    assert bivariate_cdf_series(chan, 0.7, 1.3) == pytest.approx(
        joint_cdf(chan, (0.7, 1.3)), rel=1e-8)


def test_bivariate_series_input_checks():
    chan3 = FasChannel(n_ports=3, aperture=0.3, nakagami_m=1.0)
    with pytest.raises(ValueError):
        bivariate_cdf_series(chan3, 0.5, 0.5)
    chan = FasChannel.with_correlation(2, (1.0,), nakagami_m=1.0)
    with pytest.raises(ValueError):
        bivariate_cdf_series(chan, 0.5, 0.5)
