"""N-port fluid antenna channel model over correlated Nakagami-m fading.

The port layout is a uniform linear aperture of ``aperture`` wavelengths;
port k's envelope is correlated with the reference port through
J0(2 pi (k-1) W / (N-1)).  Joint statistics follow the product-of-bivariate
construction: the reference envelope carries the marginal Nakagami law and
every other port is conditionally independent given it.

All densities depend on the correlations only through mu_k^2, so negative
J0 values (wide apertures) need no special treatment; formulas written
with mu^(m-1) in them are evaluated through the even-in-mu scaled Bessel
form to keep non-integer m and mu <= 0 on one code path.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from . import specfun
from .errors import SeriesTruncationError
from .quadrature import adaptive_gk

__all__ = [
    "FasChannel",
    "spatial_correlation",
    "joint_pdf",
    "joint_cdf",
    "max_cdf",
    "bivariate_cdf_series",
    "marginal_pdf",
    "marginal_cdf",
]

# Quadrature budget for every CDF-type integral in this module.
_CDF_ABS_TOL = 1e-10
_CDF_REL_TOL = 1e-8
_CDF_MAX_SUBDIV = 2000


def spatial_correlation(k: int, n_ports: int, aperture: float) -> float:
    """Correlation mu_k = J0(2 pi (k-1) W / (N-1)) of port k with port 1.

    Defined for k = 2..N on an N >= 2 port aperture of W wavelengths.
    """
    if n_ports < 2:
        raise ValueError(f"need at least two ports, got N={n_ports}")
    if not 2 <= k <= n_ports:
        raise ValueError(f"port index must lie in 2..{n_ports}, got {k}")
    if not aperture >= 0.0:
        raise ValueError(f"aperture must be nonnegative, got {aperture}")
    return specfun.bessel_j0(2.0 * math.pi * (k - 1) * aperture / (n_ports - 1))


@dataclass(frozen=True)
class FasChannel:
    """Immutable N-port channel configuration.

    mu is derived from the aperture on construction; pass it explicitly
    (see with_correlation) to study hypothetical correlation profiles, in
    which case the aperture is recorded as NaN.

    Attributes:
        n_ports: number of switchable ports, N >= 1.
        aperture: linear span in wavelengths, W >= 0.
        nakagami_m: fading figure m >= 0.5.
        power: mean square envelope sigma^2 > 0.
        mu: correlations (mu_2, ..., mu_N) against the reference port.
    """

    n_ports: int
    aperture: float
    nakagami_m: float
    power: float = 1.0
    mu: Tuple[float, ...] = field(default=None)

    def __post_init__(self):
        if self.n_ports < 1:
            raise ValueError(f"n_ports must be >= 1, got {self.n_ports}")
        if self.nakagami_m < 0.5:
            raise ValueError(f"nakagami_m must be >= 0.5, got {self.nakagami_m}")
        if not self.power > 0.0:
            raise ValueError(f"power must be positive, got {self.power}")
        if self.mu is None:
            if not self.aperture >= 0.0:
                raise ValueError(f"aperture must be nonnegative, got {self.aperture}")
            derived = tuple(
                spatial_correlation(k, self.n_ports, self.aperture)
                for k in range(2, self.n_ports + 1))
            object.__setattr__(self, "mu", derived)
        else:
            object.__setattr__(self, "mu", tuple(float(v) for v in self.mu))
            if len(self.mu) != max(self.n_ports - 1, 0):
                raise ValueError(
                    f"mu must have {self.n_ports - 1} entries, got {len(self.mu)}")
            if any(abs(v) > 1.0 for v in self.mu):
                raise ValueError("correlations must satisfy |mu_k| <= 1")

    @classmethod
    def with_correlation(cls, n_ports: int, mu: Sequence[float], nakagami_m: float,
                         power: float = 1.0) -> "FasChannel":
        """Channel with an explicitly forced correlation vector."""
        return cls(n_ports=n_ports, aperture=math.nan, nakagami_m=nakagami_m,
                   power=power, mu=tuple(mu))

    def degenerate_ports(self) -> bool:
        """True when any |mu_k| = 1 (identical ports; joint laws singular)."""
        return any(abs(v) == 1.0 for v in self.mu)


# ---------------------------------------------------------------------------
# Marginal Nakagami law
# ---------------------------------------------------------------------------

def marginal_pdf(chan: FasChannel, x: float) -> float:
    """Single-port envelope density 2 m^m x^(2m-1) e^(-m x^2/s2) / (Gamma(m) s2^m)."""
    if x < 0.0:
        return 0.0
    m = chan.nakagami_m
    if x == 0.0:
        # x^(2m-1) limit: zero unless the exponent hits 0 at m = 1/2
        if m > 0.5:
            return 0.0
        return 2.0 * math.sqrt(m / chan.power) / math.gamma(m) * math.exp(0.0)
    return math.exp(_log_marginal_pdf(m, chan.power, x))


def _log_marginal_pdf(m: float, sigma2: float, x: float) -> float:
    return (math.log(2.0) + m * math.log(m) + (2.0 * m - 1.0) * math.log(x)
            - m * x * x / sigma2 - math.lgamma(m) - m * math.log(sigma2))


def _log_marginal_pdf_vec(m: float, sigma2: float, x: np.ndarray) -> np.ndarray:
    # callers guarantee x > 0
    return (math.log(2.0) + m * math.log(m) + (2.0 * m - 1.0) * np.log(x)
            - m * x * x / sigma2 - math.lgamma(m) - m * math.log(sigma2))


def marginal_cdf(chan: FasChannel, x: float) -> float:
    """Single-port envelope CDF, the regularized lower gamma P(m, m x^2/s2)."""
    if x <= 0.0:
        return 0.0
    m = chan.nakagami_m
    return specfun.reg_lower_inc_gamma(m, m * x * x / chan.power)


# ---------------------------------------------------------------------------
# Conditional-factor machinery shared with the crossing-rate integrals
# ---------------------------------------------------------------------------

# A "factor" is F_k(x1) = 1 - Q_m(c_k x1, d_k X_k): the conditional
# probability that port k sits below X_k given the reference envelope x1.
# c_k^2 = 2 m mu_k^2 / (s2 (1 - mu_k^2)) and d_k^2 = 2 m / (s2 (1 - mu_k^2)).
#
# Evaluation goes through the Poisson-mixture table in specfun.  When the
# mixture mean gets large the per-call window is wide, so the factor is
# replaced by a Chebyshev interpolant fitted once per (channel, threshold);
# its accuracy is verified against the direct evaluation before use.  In
# that regime the factor value is bounded away from 0 (the Marcum arguments
# satisfy a = mu b < b), so an absolute fit tolerance preserves relative
# accuracy.

_CHEB_Y_CUTOFF = 300.0
_CHEB_FIT_TOL = 5e-11


class _Factor:
    def __init__(self, m: float, sigma2: float, mu_k: float, upper: float,
                 domain_hi: float):
        one_minus = 1.0 - mu_k * mu_k
        if one_minus <= 0.0:
            raise ValueError("factor undefined at |mu_k| = 1")
        self.order = m
        self.y_scale = m * mu_k * mu_k / (sigma2 * one_minus)   # y = y_scale x1^2
        self.z = m * upper * upper / (sigma2 * one_minus)
        self._cheb = None
        y_max = self.y_scale * domain_hi * domain_hi
        if y_max > _CHEB_Y_CUTOFF and domain_hi > 0.0:
            self._cheb = self._fit_cheb(domain_hi)

    def _direct(self, x1: np.ndarray) -> np.ndarray:
        y = self.y_scale * np.square(np.asarray(x1, dtype=float))
        return specfun._one_minus_marcum_q_fixed_b(self.order, y, self.z)

    def _fit_cheb(self, hi: float):
        from numpy.polynomial.chebyshev import Chebyshev

        for deg in (64, 128, 256, 512, 1024):
            fit = Chebyshev.interpolate(self._direct, deg, domain=[0.0, hi])
            # probe strictly between the first-kind interpolation nodes
            # cos(pi (j+1/2)/(deg+1)), plus both endpoints; probing the
            # nodes themselves would pass any fit
            probe = 0.5 * hi * (1.0 + np.cos(
                np.pi * np.arange(deg + 2) / (deg + 1)))
            if float(np.max(np.abs(fit(probe) - self._direct(probe)))) < _CHEB_FIT_TOL:
                return fit
        return None  # direct evaluation stays correct, just slower

    def __call__(self, x1: np.ndarray) -> np.ndarray:
        if self._cheb is not None:
            return np.clip(self._cheb(np.asarray(x1, dtype=float)), 0.0, 1.0)
        return self._direct(x1)


class _FactorSet:
    """All N-1 conditional factors of a channel at one common threshold."""

    def __init__(self, chan: FasChannel, x_th: float):
        self.factors = tuple(
            _Factor(chan.nakagami_m, chan.power, mu_k, x_th, x_th)
            for mu_k in chan.mu)

    def stack(self, x1: np.ndarray) -> np.ndarray:
        return np.vstack([f(x1) for f in self.factors]) if self.factors \
            else np.ones((0, np.asarray(x1).size))

    def product(self, x1: np.ndarray) -> np.ndarray:
        vals = self.stack(x1)
        return vals.prod(axis=0)

    def product_excluding(self, skip: int, x1: np.ndarray) -> np.ndarray:
        """Product over k != skip, with skip indexed like the port (2-based)."""
        vals = self.stack(x1)
        n, width = vals.shape
        out = np.ones(width)
        for row in range(n):
            if row != skip - 2:
                out *= vals[row]
        return out


@functools.lru_cache(maxsize=256)
def _threshold_factors(chan: FasChannel, x_th: float) -> _FactorSet:
    return _FactorSet(chan, x_th)


# ---------------------------------------------------------------------------
# Joint statistics
# ---------------------------------------------------------------------------

def joint_pdf(chan: FasChannel, x: Sequence[float]) -> float:
    """Joint envelope density at the point x = (x_1, ..., x_N).

    Reference port marginal times the conditional bivariate kernels,
    assembled in log space.  Degenerate |mu_k| = 1 is rejected; route those
    configurations to the identical-port formulas instead.
    """
    xs = [float(v) for v in x]
    if len(xs) != chan.n_ports:
        raise ValueError(f"expected {chan.n_ports} components, got {len(xs)}")
    if any(v < 0.0 for v in xs):
        raise ValueError("envelope components must be nonnegative")
    if chan.n_ports == 1:
        return marginal_pdf(chan, xs[0])
    if chan.degenerate_ports():
        raise ValueError("joint density singular at |mu_k| = 1 (identical ports)")

    m = chan.nakagami_m
    s2 = chan.power
    if m > 0.5 and any(v == 0.0 for v in xs):
        return 0.0

    x1 = xs[0]
    if x1 == 0.0:  # only reachable at m = 1/2
        total = math.log(marginal_pdf(chan, 0.0))
    else:
        total = _log_marginal_pdf(m, s2, x1)
    for mu_k, xk in zip(chan.mu, xs[1:]):
        om = 1.0 - mu_k * mu_k
        w = 2.0 * m * abs(mu_k) * x1 * xk / (s2 * om)
        total += (math.log(2.0) + m * math.log(m)
                  - m * math.log(s2 * om)
                  - m * (xk * xk + mu_k * mu_k * x1 * x1) / (s2 * om)
                  + specfun._log_bessel_i_scaled(m - 1.0, w))
        if xk > 0.0:
            total += (2.0 * m - 1.0) * math.log(xk)
    if total > 709.0:
        return math.inf
    return math.exp(total)


def _cdf_quad(chan: FasChannel, x1_hi: float, fset: "_FactorSet | None",
              factors) -> float:
    """Common quadrature core: integral of marginal(x1) * prod factors."""
    m = chan.nakagami_m
    s2 = chan.power

    def integrand(x1: np.ndarray) -> np.ndarray:
        x1 = np.asarray(x1, dtype=float)
        safe = np.maximum(x1, 1e-300)
        lead = np.exp(_log_marginal_pdf_vec(m, s2, safe))
        lead[x1 <= 0.0] = marginal_pdf(chan, 0.0)
        if fset is not None:
            prod = fset.product(x1)
        else:
            prod = np.ones_like(x1)
            for f in factors:
                prod *= f(x1)
        return lead * prod

    # seed the mesh around the marginal mode so a single wide segment
    # cannot straddle a sharp peak unnoticed
    peak = math.sqrt(s2 * max(2.0 * m - 1.0, 0.1) / (2.0 * m))
    seeds = [f * peak for f in (0.5, 1.0, 1.5, 2.5)] + [0.5 * x1_hi]
    res = adaptive_gk(integrand, 0.0, x1_hi,
                      abs_tol=_CDF_ABS_TOL, rel_tol=_CDF_REL_TOL,
                      max_subdiv=_CDF_MAX_SUBDIV, points=seeds)
    return min(max(res.value, 0.0), 1.0)


def joint_cdf(chan: FasChannel, upper: Sequence[float]) -> float:
    """P(alpha_1 < X_1, ..., alpha_N < X_N) by adaptive quadrature."""
    ups = [float(v) for v in upper]
    if len(ups) != chan.n_ports:
        raise ValueError(f"expected {chan.n_ports} components, got {len(ups)}")
    if any(v < 0.0 for v in ups):
        raise ValueError("upper limits must be nonnegative")
    if chan.n_ports == 1:
        return marginal_cdf(chan, ups[0])
    if chan.degenerate_ports():
        raise ValueError("joint CDF singular at |mu_k| = 1 (identical ports)")
    if any(v == 0.0 for v in ups):
        return 0.0
    if len(set(ups)) == 1:
        return max_cdf(chan, ups[0])
    factors = [
        _Factor(chan.nakagami_m, chan.power, mu_k, xk, ups[0])
        for mu_k, xk in zip(chan.mu, ups[1:])]
    return _cdf_quad(chan, ups[0], None, factors)


def max_cdf(chan: FasChannel, x_th: float) -> float:
    """CDF of the selected (best-port) envelope, evaluated at x_th."""
    if x_th < 0.0:
        raise ValueError(f"threshold must be nonnegative, got {x_th}")
    if x_th == 0.0:
        return 0.0
    if chan.n_ports == 1:
        return marginal_cdf(chan, x_th)
    if chan.degenerate_ports():
        raise ValueError("joint CDF singular at |mu_k| = 1 (identical ports)")
    fset = _threshold_factors(chan, float(x_th))
    return _cdf_quad(chan, float(x_th), fset, None)


def bivariate_cdf_series(chan: FasChannel, x1: float, x2: float,
                         tol: specfun.EvalTolerance = None) -> float:
    """Two-port joint CDF by its gamma-product series.

    Series form: (1-mu^2)^m / Gamma(m) * sum_k mu^(2k)
    gamma(m+k, Z1) gamma(m+k, Z2) / (k! Gamma(m+k)) with
    Z_i = m x_i^2 / (s2 (1-mu^2)).  Terms accumulate in log space; the sum
    stops once the last term falls below 1e-14 of the total.
    """
    if chan.n_ports != 2:
        raise ValueError(f"two-port channel required, got N={chan.n_ports}")
    if x1 < 0.0 or x2 < 0.0:
        raise ValueError("upper limits must be nonnegative")
    if x1 == 0.0 or x2 == 0.0:
        return 0.0
    mu = chan.mu[0]
    if abs(mu) >= 1.0:
        raise ValueError("series requires |mu_2| < 1")
    m = chan.nakagami_m
    s2 = chan.power
    if mu == 0.0:
        return marginal_cdf(chan, x1) * marginal_cdf(chan, x2)

    om = 1.0 - mu * mu
    z1 = m * x1 * x1 / (s2 * om)
    z2 = m * x2 * x2 / (s2 * om)
    lmu2 = 2.0 * math.log(abs(mu))
    # log of mu^(2k) Gamma(m+k) P(m+k,Z1) P(m+k,Z2) / k!
    total = -math.inf
    prev = -math.inf
    max_terms = 500
    for k in range(max_terms):
        p1 = specfun.reg_lower_inc_gamma(m + k, z1)
        p2 = specfun.reg_lower_inc_gamma(m + k, z2)
        if p1 <= 0.0 or p2 <= 0.0:
            break  # deeper terms only shrink further
        lt = (k * lmu2 + math.lgamma(m + k) - math.lgamma(k + 1.0)
              + math.log(p1) + math.log(p2))
        total = _logaddexp(total, lt)
        if lt < total + math.log(1e-14) and lt < prev:
            break
        prev = lt
    else:
        raise SeriesTruncationError(
            f"bivariate CDF series needed more than {max_terms} terms "
            f"(mu={mu}, x=({x1}, {x2}))")
    value = math.exp(m * math.log(om) - math.lgamma(m) + total)
    return min(max(value, 0.0), 1.0)


def _logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))
