"""Independent reference implementations used to pin expected test values.

Nothing in here imports the package under test.  Each function recomputes
a quantity from its defining integral, series, or fixed point using scipy
or mpmath, so the frozen constants scattered through the test modules can
be regenerated by running this file directly:

    python tests/oracles.py
"""

import math
import warnings

import mpmath
import numpy as np
from scipy import integrate, special, stats


# ---------------------------------------------------------------------------
# Bessel J0 and the incomplete gamma family
# ---------------------------------------------------------------------------

def j0_maclaurin(x: float) -> float:
    """Ascending series sum_k (-1)^k (x^2/4)^k / (k!)^2, fine for |x| < 12."""
    term = 1.0
    total = 1.0
    q = 0.25 * x * x
    for k in range(1, 60):
        term *= -q / (k * k)
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return total


def j0_first_root() -> float:
    """First positive zero of J0 by bisection on the Maclaurin series."""
    lo, hi = 2.0, 3.0
    flo = j0_maclaurin(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = j0_maclaurin(mid)
        if flo * fmid <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def j0_quadrature(x: float) -> float:
    """Integral representation (1/pi) int_0^pi cos(x sin t) dt."""
    # oscillatory for large x; quad warns about roundoff near its own floor
    # even though the estimate is good to ~1e-13, so silence that one warning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(lambda t: math.cos(x * math.sin(t)),
                                0.0, math.pi, epsabs=1e-14, epsrel=1e-13,
                                limit=400)
    return val / math.pi


def lower_gamma_quad(s: float, x: float) -> float:
    """gamma(s, x) = int_0^x t^(s-1) e^(-t) dt by adaptive quadrature."""
    val, _ = integrate.quad(lambda t: t ** (s - 1.0) * math.exp(-t), 0.0, x,
                            epsabs=1e-14, epsrel=1e-13)
    return val


# ---------------------------------------------------------------------------
# Marcum Q and the Gaussian Q inverse
# ---------------------------------------------------------------------------

def marcum_q_defining_integral(order: float, a: float, b: float) -> float:
    """Q_order(a, b) from its defining integral with scipy's Bessel I.

    Uses the exponentially scaled ive so the e^(ax) growth cancels inside
    the integrand instead of overflowing.
    """
    def integrand(x):
        return (x * (x / a) ** (order - 1.0)
                * math.exp(-0.5 * (x - a) ** 2)
                * special.ive(order - 1.0, a * x))
    val, _ = integrate.quad(integrand, b, b + 60.0,
                            epsabs=1e-13, epsrel=1e-12)
    return val


def marcum_q_ncx2(order: float, a: float, b: float) -> float:
    """Same tail via the noncentral chi-square survival function."""
    return float(stats.ncx2.sf(b * b, 2.0 * order, a * a))


def qfunc_inv_bisect(p: float) -> float:
    """Solve 0.5 erfc(x / sqrt 2) = p by bisection on [-40, 40]."""
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 0.5 * math.erfc(mid / math.sqrt(2.0)) > p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Bivariate Rayleigh density from the Gaussian quadruple
# ---------------------------------------------------------------------------

def bivariate_rayleigh_pdf(r1: float, r2: float, mu: float) -> float:
    """Joint envelope density built from first principles.

    The two unit-power Rayleigh envelopes come from Gaussian pairs with
    per-component variance 1/2 and cross-correlation mu/2 between like
    components.  The envelope density is r1 r2 times the phase integral of
    the 4-D Gaussian density; the inner phase integrates out analytically
    to 2 pi, the outer one is done numerically.
    """
    c = 1.0 - mu * mu

    def gauss4(psi):
        quad_form = (r1 * r1 + r2 * r2
                     - 2.0 * mu * r1 * r2 * math.cos(psi)) / c
        return math.exp(-quad_form) / (math.pi ** 2 * c)

    val, _ = integrate.quad(gauss4, 0.0, 2.0 * math.pi,
                            epsabs=1e-14, epsrel=1e-13)
    return r1 * r2 * 2.0 * math.pi * val


# ---------------------------------------------------------------------------
# Finite-blocklength threshold fixed point, extended precision
# ---------------------------------------------------------------------------

def fbl_eta_mp(rate: float, blocklength: int, error_target: float,
               eta_tol: float, dps: int = 50) -> mpmath.mpf:
    """Threshold iteration re-run in mpmath with the same stopping rule."""
    with mpmath.workdps(dps):
        n = mpmath.mpf(blocklength)
        r = mpmath.mpf(rate)
        qinv = mpmath.sqrt(2) * mpmath.erfinv(1 - 2 * mpmath.mpf(error_target))
        penalty = qinv * mpmath.log(mpmath.e, 2) / mpmath.sqrt(n)
        radical = mpmath.mpf(1)
        prev = None
        for _ in range(10000):
            eta = 2 ** (r + radical * penalty) - 1
            if prev is not None and abs(eta - prev) < eta_tol:
                return eta
            prev = eta
            radical = mpmath.sqrt(1 - 1 / (1 + eta) ** 2)
        raise RuntimeError("fixed point did not settle")


# ---------------------------------------------------------------------------
# QoS layer oracles
# ---------------------------------------------------------------------------

def ec_onoff_eig(theta: float, rate: float, p_stay_off: float,
                 p_stay_on: float) -> float:
    """ON-OFF effective capacity via an explicit 2x2 eigenvalue solve."""
    damp = math.exp(-theta * rate)
    weighted = np.array([[p_stay_off, (1.0 - p_stay_off) * damp],
                         [1.0 - p_stay_on, p_stay_on * damp]])
    radius = max(abs(v) for v in np.linalg.eigvals(weighted))
    return -math.log(radius) / theta


def mec_mp(theta: float, blocklength: int, rate: float,
           reliability: float, dps: int = 50) -> mpmath.mpf:
    """Mission effective capacity at extended precision."""
    with mpmath.workdps(dps):
        th = mpmath.mpf(theta)
        n = mpmath.mpf(blocklength)
        served = 1 - mpmath.e ** (-th * n * mpmath.mpf(rate))
        return -mpmath.log(1 - mpmath.mpf(reliability) * served) / (n * th)


def rmax_bisect_mp(theta: float, burstiness: float, mec: float,
                   dps: int = 50) -> mpmath.mpf:
    """Solve effective_bandwidth(theta, r/S, S) = mec for r by bisection."""
    with mpmath.workdps(dps):
        th = mpmath.mpf(theta)
        s = mpmath.mpf(burstiness)
        target = mpmath.mpf(mec)

        def bandwidth(r):
            return mpmath.log(1 - s + s * mpmath.e ** (r / s * th)) / th

        lo, hi = mpmath.mpf(0), mpmath.mpf(10) * (target + 1)
        for _ in range(300):
            mid = (lo + hi) / 2
            if bandwidth(mid) < target:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2


def total_power_direct(avg_snr: float, drain_eff: float, idle_power: float,
                       circuit_power: float, burstiness: float,
                       load: float) -> float:
    """Refined power model evaluated term by term."""
    peak = drain_eff * avg_snr
    return peak - (peak - idle_power) * (1.0 - burstiness) * (1.0 - load) \
        + circuit_power


if __name__ == "__main__":
    print("j0 first root              ", repr(j0_first_root()))
    print("j0(1.8849556)              ", repr(j0_quadrature(1.8849556)))
    print("j0(0.6 pi)                 ", repr(j0_quadrature(0.6 * math.pi)))
    print("lower gamma(2.5, 3.7)      ", repr(lower_gamma_quad(2.5, 3.7)))
    print("marcum Q_2(1.5, 0.8) quad  ", repr(marcum_q_defining_integral(2.0, 1.5, 0.8)))
    print("marcum Q_2(1.5, 0.8) ncx2  ", repr(marcum_q_ncx2(2.0, 1.5, 0.8)))
    print("marcum Q_1(0, 2) exact     ", repr(math.exp(-2.0)))
    print("qfunc_inv(1e-2)            ", repr(qfunc_inv_bisect(1e-2)))
    print("biv rayleigh (0.8,1.1,0.5) ", repr(bivariate_rayleigh_pdf(0.8, 1.1, 0.5)))
    eta = fbl_eta_mp(0.1, 1000, 1e-2, 1e-4)
    print("fbl eta (R=0.1 point)      ", mpmath.nstr(eta, 17))
    print("rho = sqrt(eta/10)         ", mpmath.nstr(mpmath.sqrt(eta / 10), 17))
    print("ec eigen (0.3,0.8)         ", repr(ec_onoff_eig(0.01, 1.0, 0.3, 0.8)))
    print("mec (0.9999 point)         ", mpmath.nstr(mec_mp(1e-3, 1000, 0.1, 0.9999), 17))
    print("rmax (S=0.5, mec=0.08)     ", mpmath.nstr(rmax_bisect_mp(1e-3, 0.5, 0.08), 17))
    print("total power (phi=5 point)  ", repr(total_power_direct(5.0, 0.2, 0.03, 0.2, 0.5, 0.4)))
