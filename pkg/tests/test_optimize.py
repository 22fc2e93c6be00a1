"""Golden-section and Dinkelbach loops on closed-form problems."""

import math

import numpy as np
import pytest

from fasdep.optimize import (
    DinkelbachConfig,
    OptResult,
    dinkelbach_maximize,
    golden_section_max,
)


# ---------------------------------------------------------------------------
# Golden-section inner loop
# ---------------------------------------------------------------------------

def test_golden_finds_parabola_peak():
    x, fx = golden_section_max(lambda x: -(x - 2.0) ** 2, 0.0, 5.0, 1e-8)
    assert x == pytest.approx(2.0, abs=1e-6)
    assert fx == pytest.approx(0.0, abs=1e-10)


def test_golden_boundary_maximum():
    x, fx = golden_section_max(lambda x: x, 0.0, 3.0, 1e-9)
    assert x == pytest.approx(3.0, rel=1e-8)


def test_golden_constant_objective_terminates():
    x, fx = golden_section_max(lambda x: 1.0, 1.0, 2.0, 1e-9)
    assert 1.0 <= x <= 2.0
    assert fx == 1.0


def test_golden_contraction_rate_is_literal_618():
    """Eval growth per decade of tolerance pins the 0.618 bracket ratio.

    Each iteration costs two probes and shrinks the bracket by 0.618, so a
    10x tighter stop needs ln(10)/ln(1/0.618) ~ 4.8 more iterations.
    """
    def count(tol):
        n = 0
        def f(x):
            nonlocal n
            n += 1
            return -(x - 0.5) ** 2
        golden_section_max(f, 0.0, 1.0, tol)
        return n

    grows = [count(10.0 ** -(k + 1)) - count(10.0 ** -k) for k in (3, 4, 5)]
    for g in grows:
        assert 2 * 4 <= g <= 2 * 6  # two evals per iteration


def test_golden_validation():
    with pytest.raises(ValueError):
        golden_section_max(lambda x: x, 1.0, 1.0, 1e-6)
    with pytest.raises(ValueError):
        golden_section_max(lambda x: x, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        golden_section_max(lambda x: math.nan, 0.0, 1.0, 1e-6)


# ---------------------------------------------------------------------------
# Dinkelbach outer loop
# ---------------------------------------------------------------------------

def _benchmark_cfg():
    return DinkelbachConfig(lb=0.0, ub=10.0, inner_tol=1e-9, outer_tol=1e-12)


def test_dinkelbach_closed_form_benchmark():
    """max ln(1+x)/(1+x) sits at x = e - 1 with value 1/e."""
    res = dinkelbach_maximize(lambda x: math.log1p(x), lambda x: 1.0 + x,
                              cfg=_benchmark_cfg())
    assert res.feasible and res.converged
    assert res.phi_star == pytest.approx(math.e - 1.0, abs=1e-6)
    assert res.value_star == pytest.approx(1.0 / math.e, rel=1e-9)


def test_kappa_trace_monotone_and_terminal():
    res = dinkelbach_maximize(lambda x: math.log1p(x), lambda x: 1.0 + x,
                              cfg=_benchmark_cfg())
    trace = res.kappa_trace
    assert trace[0] == 0.0
    assert all(b >= a for a, b in zip(trace, trace[1:]))
    assert trace[-1] == pytest.approx(res.value_star, abs=1e-9)


def test_dinkelbach_residual_settles():
    """At the reported optimum |f1 - kappa f2| is inside the outer tolerance."""
    cfg = _benchmark_cfg()
    res = dinkelbach_maximize(lambda x: math.log1p(x), lambda x: 1.0 + x,
                              cfg=cfg)
    resid = math.log1p(res.phi_star) - res.kappa_trace[-1] * (1.0 + res.phi_star)
    assert abs(resid) <= 1e-6  # within inner-search resolution of the bound


def test_dinkelbach_linear_ratio():
    # f1/f2 = (2x+1)/(x+2) is increasing: optimum at the upper bound
    res = dinkelbach_maximize(lambda x: 2.0 * x + 1.0, lambda x: x + 2.0,
                              cfg=DinkelbachConfig(lb=0.0, ub=5.0,
                                                   inner_tol=1e-9,
                                                   outer_tol=1e-10))
    assert res.phi_star == pytest.approx(5.0, abs=1e-5)
    assert res.value_star == pytest.approx(11.0 / 7.0, rel=1e-6)


def test_constraint_pins_boundary_solution():
    """Active constraint g(x) = x >= 3 moves the peak to the boundary."""
    res = dinkelbach_maximize(lambda x: math.log1p(x), lambda x: 1.0 + x,
                              cfg=_benchmark_cfg(),
                              constraint=lambda x: x, level=3.0)
    assert res.feasible
    assert res.phi_star == pytest.approx(3.0, abs=1e-5)
    assert res.phi_star >= 3.0 - 1e-12
    assert res.value_star == pytest.approx(math.log(4.0) / 4.0, rel=1e-5)


def test_constraint_inactive_when_slack():
    res = dinkelbach_maximize(lambda x: math.log1p(x), lambda x: 1.0 + x,
                              cfg=_benchmark_cfg(),
                              constraint=lambda x: x, level=0.5)
    assert res.phi_star == pytest.approx(math.e - 1.0, abs=1e-6)


def test_infeasible_interval_reported_not_raised():
    res = dinkelbach_maximize(lambda x: math.log1p(x), lambda x: 1.0 + x,
                              cfg=DinkelbachConfig(lb=0.0, ub=1.0,
                                                   inner_tol=1e-9,
                                                   outer_tol=1e-10),
                              constraint=lambda x: x, level=2.0)
    assert not res.feasible
    assert math.isnan(res.phi_star)
    assert math.isnan(res.value_star)
    assert res.kappa_trace == (0.0,)


def test_nonpositive_denominator_is_loud():
    with pytest.raises(ValueError, match="denominator"):
        dinkelbach_maximize(lambda x: 1.0, lambda x: -1.0,
                            cfg=DinkelbachConfig(lb=0.0, ub=1.0,
                                                 inner_tol=1e-6,
                                                 outer_tol=1e-8))


def test_config_validation():
    with pytest.raises(ValueError):
        DinkelbachConfig(lb=2.0, ub=1.0)
    with pytest.raises(ValueError):
        DinkelbachConfig(lb=-1.0, ub=1.0)
    with pytest.raises(ValueError):
        DinkelbachConfig(inner_tol=0.0)
    with pytest.raises(ValueError):
        DinkelbachConfig(max_outer_iters=0)


def test_exhaustion_flags_converged_false():
    cfg = DinkelbachConfig(lb=0.0, ub=10.0, inner_tol=1e-9, outer_tol=1e-16,
                           max_outer_iters=2)
    res = dinkelbach_maximize(lambda x: math.log1p(x), lambda x: 1.0 + x,
                              cfg=cfg)
    assert not res.converged
    assert res.feasible  # last iterate still reported
    assert len(res.kappa_trace) == 3  # initial kappa plus one per iteration
