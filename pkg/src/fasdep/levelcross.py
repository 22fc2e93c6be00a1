"""Level-crossing statistics of the selected-port envelope.

The selected envelope falls below a threshold when every port is below it,
so the down-crossing rate collects one boundary term per port: the term for
port i integrates the bivariate density of (reference, port i) pinned at
the threshold against the conditional CDFs of the remaining ports.  Every
term carries the common scale sqrt(2 pi / m) * sigma * f_D from the
envelope-derivative variance.

Closed forms are provided for the degenerate geometries (single port, all
ports identical, independent ports) and for the two-port gamma series,
which doubles as a cross-check of the quadrature path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .channel import FasChannel, _threshold_factors, marginal_pdf, max_cdf
from .errors import QuadratureError, SeriesTruncationError
from .quadrature import adaptive_gk

__all__ = [
    "CrossingContext",
    "RatePair",
    "lcr",
    "normalized_lcr",
    "lcr_iid",
    "lcr_fully_correlated",
    "lcr_two_port_series",
    "afd",
    "afd_two_port_series",
    "anfd",
    "failure_repair_rates",
]


# below this, 1 - max_cdf is quadrature noise; switch to the stable tail bound
_COMPLEMENT_TRUST = 1e-7


@dataclass(frozen=True)
class CrossingContext:
    """Channel plus the dynamics inputs of a crossing-rate query.

    doppler_hz is the maximum Doppler shift f_D > 0; threshold is the
    envelope level x_th >= 0 the crossings are counted against.
    """

    channel: FasChannel
    doppler_hz: float
    threshold: float

    def __post_init__(self):
        if not self.doppler_hz > 0.0:
            raise ValueError(f"doppler_hz must be positive, got {self.doppler_hz}")
        if not self.threshold >= 0.0:
            raise ValueError(f"threshold must be nonnegative, got {self.threshold}")


@dataclass(frozen=True)
class RatePair:
    """Failure rate Upsilon = 1/ANFD and repair rate beta = 1/AFD, in 1/s."""

    failure_rate: float
    repair_rate: float


def _lcr_single(m: float, sigma2: float, doppler: float, x: float) -> float:
    # one-port Nakagami crossing rate; also the all-ports-identical law
    if x == 0.0:
        return math.sqrt(2.0) * doppler if m == 0.5 else 0.0
    lg = (0.5 * math.log(2.0 * math.pi) + (m - 0.5) * math.log(m)
          + (2.0 * m - 1.0) * math.log(x) - m * x * x / sigma2
          - math.lgamma(m) - (m - 0.5) * math.log(sigma2))
    return doppler * math.exp(lg)


def lcr(ctx: CrossingContext) -> float:
    """Down-crossing rate of the selected envelope through the threshold."""
    chan = ctx.channel
    x = ctx.threshold
    m = chan.nakagami_m
    s2 = chan.power
    if chan.n_ports == 1:
        return _lcr_single(m, s2, ctx.doppler_hz, x)
    if chan.degenerate_ports():
        raise ValueError(
            "|mu_k| = 1 makes the ports identical; use lcr_fully_correlated")
    if x == 0.0:
        return 0.0

    fset = _threshold_factors(chan, float(x))
    # boundary term of the reference port
    t_ref = 0.5 * marginal_pdf(chan, x) * float(fset.product(np.array([x]))[0])
    total = t_ref
    for port in range(2, chan.n_ports + 1):
        total += 0.5 * _port_crossing_integral(chan, fset, port, x)
    return math.sqrt(2.0 * math.pi / m) * math.sqrt(s2) * ctx.doppler_hz * total


def normalized_lcr(ctx: CrossingContext) -> float:
    """LCR divided by the Doppler frequency (dimensionless)."""
    return lcr(ctx) / ctx.doppler_hz


def _port_crossing_integral(chan: FasChannel, fset, port: int, x: float) -> float:
    """Integral over the reference envelope for the boundary term of `port`."""
    m = chan.nakagami_m
    s2 = chan.power
    mu = chan.mu[port - 2]
    om = 1.0 - mu * mu
    denom = s2 * om
    w_scale = 2.0 * m * abs(mu) * x / denom
    const = (math.log(4.0) + 2.0 * m * math.log(m) + (2.0 * m - 1.0) * math.log(x)
             - math.lgamma(m) - 2.0 * m * math.log(s2) - m * math.log(om)
             - m * x * x / denom)

    def integrand(x1: np.ndarray) -> np.ndarray:
        x1 = np.asarray(x1, dtype=float)
        safe = np.maximum(x1, 1e-300)
        lg = (const + (2.0 * m - 1.0) * np.log(safe)
              + specfun._log_bessel_i_scaled_vec(m - 1.0, w_scale * x1)
              - m * x1 * x1 / denom)
        vals = np.exp(lg)
        vals[x1 <= 0.0] = 0.0 if m > 0.5 else math.exp(const)
        return vals * fset.product_excluding(port, x1)

    # the kernel rides a ridge near mu*x and, for |mu| near 1, piles up
    # against the right endpoint on a width set by the residual spread
    width = math.sqrt(denom / (2.0 * m))
    seeds = [abs(mu) * x, 0.5 * x, x - width, x - 5.0 * width]
    try:
        res = adaptive_gk(integrand, 0.0, x, abs_tol=1e-12, rel_tol=1e-9,
                          max_subdiv=2000, points=seeds)
    except QuadratureError as exc:
        raise QuadratureError(
            f"crossing-rate term for port {port} did not converge: {exc}",
            exc.estimate, exc.error) from exc
    return max(res.value, 0.0)


def lcr_iid(ctx: CrossingContext) -> float:
    """Crossing rate when all N ports fade independently (mu_k = 0)."""
    chan = ctx.channel
    x = ctx.threshold
    m = chan.nakagami_m
    s2 = chan.power
    n = chan.n_ports
    if n == 1:
        return _lcr_single(m, s2, ctx.doppler_hz, x)
    if x == 0.0:
        return 0.0
    p = specfun.reg_lower_inc_gamma(m, m * x * x / s2)
    if p == 0.0:
        return 0.0
    lg = (0.5 * math.log(2.0 * math.pi) + math.log(n) + (m - 0.5) * math.log(m)
          + (2.0 * m - 1.0) * math.log(x) - m * x * x / s2
          - math.lgamma(m) - (m - 0.5) * math.log(s2)
          + (n - 1) * math.log(p))
    return ctx.doppler_hz * math.exp(lg)


def lcr_fully_correlated(ctx: CrossingContext) -> float:
    """Crossing rate when every port carries the same envelope (|mu_k| = 1)."""
    chan = ctx.channel
    return _lcr_single(chan.nakagami_m, chan.power, ctx.doppler_hz, ctx.threshold)


def lcr_two_port_series(ctx: CrossingContext,
                        rel_tol: float = 1e-14, max_terms: int = 500) -> float:
    """Two-port crossing rate by its single-sum gamma series.

    The sum runs over even powers of the correlation; each term carries the
    regularized lower gamma P(m+k, Z) with Z = m x^2/(s2 (1-mu^2)), so the
    Gamma(m+k) factors cancel and the accumulation stays in log space.
    Stops when the latest term drops below rel_tol of the running sum.
    """
    chan = ctx.channel
    if chan.n_ports != 2:
        raise ValueError(f"two-port channel required, got N={chan.n_ports}")
    mu = chan.mu[0]
    if abs(mu) >= 1.0:
        raise ValueError("series requires |mu_2| < 1; use lcr_fully_correlated")
    x = ctx.threshold
    if x == 0.0:
        return 0.0
    m = chan.nakagami_m
    s2 = chan.power
    if mu == 0.0:
        return lcr_iid(ctx)

    om = 1.0 - mu * mu
    z = m * x * x / (s2 * om)
    kappa = m / (s2 * om)
    lmu2 = 2.0 * math.log(abs(mu))
    lx = math.log(x)
    lkap = math.log(kappa)

    total = -math.inf
    prev = math.inf
    for k in range(max_terms):
        p = specfun.reg_lower_inc_gamma(m + k, z)
        if p <= 0.0:
            break
        lt = (k * lmu2 + (2.0 * k + m - 1.0) * lx + (k - 1.0) * lkap
              - math.lgamma(k + 1.0) + math.log(p))
        total = _logaddexp(total, lt)
        if lt < total + math.log(rel_tol) and lt < prev:
            break
        prev = lt
    else:
        raise SeriesTruncationError(
            f"two-port crossing series needed more than {max_terms} terms "
            f"(mu={mu}, x_th={x})", partial=total)

    lead = (0.5 * math.log(2.0 * math.pi) + math.log(2.0)
            + (m + 0.5) * math.log(m) + m * lx - z
            - math.lgamma(m) - (m + 0.5) * math.log(s2) - math.log(om))
    return ctx.doppler_hz * math.exp(lead + total)


def afd(ctx: CrossingContext) -> float:
    """Average fade duration: time below threshold per down-crossing, seconds."""
    if ctx.threshold == 0.0:
        return 0.0
    return max_cdf(ctx.channel, ctx.threshold) / lcr(ctx)


def afd_two_port_series(ctx: CrossingContext) -> float:
    """Two-port AFD with the series crossing rate in the denominator."""
    if ctx.threshold == 0.0:
        return 0.0
    return max_cdf(ctx.channel, ctx.threshold) / lcr_two_port_series(ctx)


def anfd(ctx: CrossingContext) -> float:
    """Average non-fade duration 1/LCR - AFD, seconds."""
    rate = lcr(ctx)
    if rate == 0.0:
        return math.inf
    return 1.0 / rate - afd(ctx)


def failure_repair_rates(ctx: CrossingContext) -> RatePair:
    """Outage birth/death rates: Upsilon = 1/ANFD and beta = 1/AFD.

    At x_th = 0 the envelope never fades, so Upsilon = 0 and beta is
    reported as inf.

    Deep in the upper tail the CDF quadrature cannot resolve 1 - CDF
    (absolute tolerance ~1e-10), so below a trust floor the complement is
    replaced by the single-port survival Q(m, m x^2 / sigma^2).  The true
    complement of the port maximum lies between that and N times it, so
    Upsilon is overstated by at most the port count, only in regimes where
    the mission is lost regardless.
    """
    rate = lcr(ctx)
    if ctx.threshold == 0.0 or rate == 0.0:
        return RatePair(0.0, math.inf)
    chan = ctx.channel
    cdf = max_cdf(chan, ctx.threshold)
    survival = specfun.reg_upper_inc_gamma(
        chan.nakagami_m,
        chan.nakagami_m * ctx.threshold ** 2 / chan.power)
    comp = 1.0 - cdf
    comp = survival if comp < _COMPLEMENT_TRUST else max(comp, survival)
    down = cdf / rate
    up = comp / rate
    return RatePair(
        failure_rate=1.0 / up if up > 0.0 else math.inf,
        repair_rate=1.0 / down if down > 0.0 else math.inf)


def _logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))
