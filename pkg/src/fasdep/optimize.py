"""Ratio maximization: Dinkelbach outer loop, golden-section inner search.

The inner search contracts the bracket by the literal factor 0.618 per
iteration and stops on relative width 2(ub-lb)/(ub+lb).  The outer loop
maximizes F(x, kappa) = f1(x) - kappa f2(x), updates kappa to the ratio at
the inner maximizer, and stops once |F| falls below the residual tolerance;
the kappa iterates are non-decreasing by construction.

A reliability-style constraint g(x) >= level is handled by clipping the
search interval to the feasible side, located by bisection under a
monotonicity check of g on a coarse grid; if g turns out non-monotone the
code falls back to penalizing infeasible points with a huge negative
objective value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

__all__ = [
    "DinkelbachConfig",
    "OptResult",
    "golden_section_max",
    "dinkelbach_maximize",
]

_GOLDEN = 0.618          # contraction ratio, kept literal
_PENALTY = -1e300        # finite stand-in for -inf so the search can proceed
_MAX_INNER_ITERS = 400


@dataclass(frozen=True)
class DinkelbachConfig:
    """Search bounds and tolerances of the outer/inner loops.

    Bounds are linear SNR values; lb = 0 is accepted (the closed-form
    benchmark uses it) although operating points are normally positive.
    """

    lb: float = 1e-2
    ub: float = 1e4
    inner_tol: float = 1e-6
    outer_tol: float = 1e-8
    max_outer_iters: int = 50

    def __post_init__(self):
        if not 0.0 <= self.lb < self.ub:
            raise ValueError(f"need 0 <= lb < ub, got [{self.lb}, {self.ub}]")
        if not (self.inner_tol > 0.0 and self.outer_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if self.max_outer_iters < 1:
            raise ValueError(
                f"max_outer_iters must be >= 1, got {self.max_outer_iters}")


@dataclass(frozen=True)
class OptResult:
    """Outcome of a ratio maximization.

    kappa_trace starts at the 0 initialization and appends one value per
    outer update; it is non-decreasing.  feasible is False when the
    constraint excludes the whole interval (phi_star is NaN then);
    converged is False only on outer-iteration exhaustion.
    """

    phi_star: float
    value_star: float
    kappa_trace: Tuple[float, ...]
    feasible: bool
    converged: bool = True


def golden_section_max(f: Callable[[float], float], lb: float, ub: float,
                       inner_tol: float) -> Tuple[float, float]:
    """Golden-section maximizer of a unimodal f on [lb, ub].

    Returns the midpoint of the final bracket and f there.  Ties between
    the two probes move the lower bound (the else branch), which also
    fixes the behavior on constant objectives.
    """
    if not lb < ub:
        raise ValueError(f"need lb < ub, got [{lb}, {ub}]")
    if not inner_tol > 0.0:
        raise ValueError(f"inner_tol must be positive, got {inner_tol}")

    def checked(x: float) -> float:
        v = f(x)
        if not math.isfinite(v):
            raise ValueError(f"objective returned non-finite value {v} at x={x}")
        return v

    for _ in range(_MAX_INNER_ITERS):
        width = ub - lb
        denom = ub + lb
        if denom > 0.0 and 2.0 * width / denom < inner_tol:
            break
        if width <= 1e-15 * max(abs(lb), abs(ub), 1.0):
            break  # bracket at floating-point resolution
        step = _GOLDEN * width
        x1 = ub - step
        x2 = lb + step
        if checked(x1) > checked(x2):
            ub = x2
        else:
            lb = x1
    x = 0.5 * (lb + ub)
    return x, checked(x)


def _clip_feasible(g: Callable[[float], float], level: float,
                   lb: float, ub: float):
    """Restrict [lb, ub] to {g >= level}; returns (lb, ub, feasible, penalize).

    g is probed on a coarse grid (geometric when lb > 0).  If the
    feasibility pattern is one-sided, the boundary is bisected to locate
    the feasible sub-interval; otherwise the caller must penalize.
    """
    n_probe = 17
    if lb > 0.0:
        probes = [lb * (ub / lb) ** (i / (n_probe - 1)) for i in range(n_probe)]
        mid = lambda a, b: math.sqrt(a * b) if a > 0.0 else 0.5 * (a + b)
    else:
        probes = [lb + (ub - lb) * i / (n_probe - 1) for i in range(n_probe)]
        mid = lambda a, b: 0.5 * (a + b)
    feas = [g(x) >= level for x in probes]

    if not any(feas):
        return lb, ub, False, False
    if all(feas):
        return lb, ub, True, False

    rises = feas[0] is False and all(
        not (feas[i] and not feas[i + 1]) for i in range(n_probe - 1))
    falls = feas[0] is True and all(
        not (not feas[i] and feas[i + 1]) for i in range(n_probe - 1))
    if rises:
        i = max(j for j in range(n_probe) if not feas[j])
        bad, good = probes[i], probes[i + 1]
        for _ in range(48):
            m = mid(bad, good)
            if g(m) >= level:
                good = m
            else:
                bad = m
        return good, ub, True, False
    if falls:
        i = min(j for j in range(n_probe) if not feas[j])
        good, bad = probes[i - 1], probes[i]
        for _ in range(48):
            m = mid(good, bad)
            if g(m) >= level:
                good = m
            else:
                bad = m
        return lb, good, True, False
    # feasible set not an interval on this grid: penalty fallback
    return lb, ub, True, True


def dinkelbach_maximize(f1: Callable[[float], float],
                        f2: Callable[[float], float],
                        cfg: Optional[DinkelbachConfig] = None,
                        constraint: Optional[Callable[[float], float]] = None,
                        level: float = 0.0) -> OptResult:
    """Maximize f1(x)/f2(x) on [cfg.lb, cfg.ub] subject to g(x) >= level.

    f2 must stay positive on the interval.  kappa starts at 0; each outer
    iteration solves the parametric problem by golden section and checks
    the residual |f1 - kappa f2| at the inner maximizer before updating.
    """
    cfg = cfg if cfg is not None else DinkelbachConfig()
    lb, ub = cfg.lb, cfg.ub
    penalize = False
    g_cache: dict = {}

    def g(x: float) -> float:
        if x not in g_cache:
            g_cache[x] = constraint(x)
        return g_cache[x]

    if constraint is not None:
        lb, ub, feasible, penalize = _clip_feasible(g, level, lb, ub)
        if not feasible:
            return OptResult(phi_star=math.nan, value_star=math.nan,
                             kappa_trace=(0.0,), feasible=False)

    kappas = [0.0]
    x_star = None
    converged = False
    for _ in range(cfg.max_outer_iters):
        kappa = kappas[-1]

        def param_obj(x: float, _k=kappa) -> float:
            if penalize and g(x) < level:
                return _PENALTY
            return f1(x) - _k * f2(x)

        x_star, f_star = golden_section_max(param_obj, lb, ub, cfg.inner_tol)
        if abs(f_star) <= cfg.outer_tol:
            converged = True
            break
        den = f2(x_star)
        if not den > 0.0:
            raise ValueError(f"denominator nonpositive ({den}) at x={x_star}")
        kappas.append(max(kappa, f1(x_star) / den))

    if penalize and g(x_star) < level:
        # midpoint straddled the boundary; fall back to the best feasible probe
        candidates = [x for x in g_cache if g_cache[x] >= level and lb <= x <= ub]
        if not candidates:
            return OptResult(math.nan, math.nan, tuple(kappas), False, converged)
        x_star = max(candidates, key=lambda x: f1(x) / f2(x))

    value = f1(x_star) / f2(x_star)
    return OptResult(phi_star=x_star, value_star=value,
                     kappa_trace=tuple(kappas), feasible=True,
                     converged=converged)
