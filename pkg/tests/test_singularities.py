from fractions import Fraction

import numpy as np
import pytest

from immcalc.singularities import (
    BumpFunction,
    eliminate_symbolically,
    finite_difference_jacobian,
    jacobian_entries,
    outside_radius_matches_square,
    phi_tilde,
    verify_no_rank2,
)
from immcalc.smale import SIGMA2_Z2_MODEL

BUMPS = [BumpFunction(Fraction(c), kind) for c in ("1/100", "1/20", "1/10") for kind in ("exp", "exp2")]


@pytest.mark.parametrize("bump", BUMPS, ids=lambda b: f"{b.kind}-{b.c}")
def test_bump_shape(bump):
    c = float(bump.c)
    assert np.all(bump(np.linspace(0, c, 50)) == 1.0)
    assert np.all(bump(np.linspace(0.5, 1, 50)) == 0.0)
    t = np.linspace(c, 0.5, 400)
    assert np.all(np.diff(bump(t)) <= 0)
    # strictly decreasing where floats can resolve it (the tails flatten to 0 and 1)
    inner = np.linspace(c + 0.3 * (0.5 - c), 0.5 - 0.3 * (0.5 - c), 300)
    assert np.all(np.diff(bump(inner)) < 0)
    assert np.all(bump.derivative(inner) < 0)


def test_bump_rejects_bad_c():
    for c in (0, Fraction(1, 2), 1, -1):
        with pytest.raises(ValueError):
            BumpFunction(c)
    with pytest.raises(ValueError):
        BumpFunction(Fraction(1, 4), "cubic")


def test_phi_examples():
    b = BumpFunction()
    assert phi_tilde(0.0, 0.0, b) == (0.0, 0.0)
    assert np.allclose(jacobian_entries(0.0, 0.0, b), np.eye(2))
    assert phi_tilde(1.0, 0.0, b) == (1.0, 0.0)
    x, y = 0.6, -0.7
    assert np.array_equal(jacobian_entries(x, y, b), np.array([[2 * x, -2 * y], [2 * y, 2 * x]]))
    assert outside_radius_matches_square(b)


def _sample_points(seed=7, count=200):
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(0, 0.95, count))
    th = rng.uniform(0, 2 * np.pi, count)
    return list(zip(r * np.cos(th), r * np.sin(th)))


@pytest.mark.parametrize("bump", BUMPS, ids=lambda b: f"{b.kind}-{b.c}")
def test_jacobian_matches_finite_differences(bump):
    h = 1e-4
    for x, y in _sample_points():
        diff = np.abs(finite_difference_jacobian(x, y, bump, h, order=4) - jacobian_entries(x, y, bump)).max()
        assert diff < 10 * h * h, (x, y, diff)


@pytest.mark.parametrize("bump", BUMPS, ids=lambda b: f"{b.kind}-{b.c}")
def test_central_difference_converges_quadratically(bump):
    worst = 0.0
    for x, y in _sample_points(count=60):
        exact = jacobian_entries(x, y, bump)
        e1 = np.abs(finite_difference_jacobian(x, y, bump, 1e-3) - exact).max()
        e2 = np.abs(finite_difference_jacobian(x, y, bump, 1e-4) - exact).max()
        if e1 > 1e-9:  # away from the flat regions, where both errors are roundoff
            worst = max(worst, e2 / e1)
    assert worst < 0.02  # ideal ratio 0.01


def test_jacobian_against_high_precision():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 40
    bump = BumpFunction(Fraction(1, 20))
    c = mp.mpf(1) / 20

    def psi(t):
        return mp.exp(-1 / t) if t > 0 else mp.mpf(0)

    def rho(t):
        u = (t - c) / (mp.mpf(1) / 2 - c)
        a, b = psi(1 - u), psi(u)
        return a / (a + b)

    def phi(x, y):
        r = rho(x * x + y * y)
        return x * x - y * y + r * x, 2 * x * y + r * y

    for x, y in _sample_points(count=15):
        if not 0.05 < x * x + y * y < 0.5:
            continue
        X, Y = mp.mpf(x), mp.mpf(y)
        ref = [[mp.diff(lambda s: phi(s, Y)[i], X), mp.diff(lambda s: phi(X, s)[i], Y)] for i in range(2)]
        assert np.abs(np.array(ref, dtype=float) - jacobian_entries(x, y, bump)).max() < 1e-12


def test_symbolic_elimination():
    out = eliminate_symbolically()
    assert out["y_forced"] == ["0"] and out["x_forced"] == ["0"]
    assert out["only_origin"]


@pytest.mark.parametrize("bump", BUMPS, ids=lambda b: f"{b.kind}-{b.c}")
def test_no_rank2_points(bump):
    res = verify_no_rank2(256, bump, 1e-6, symbolic=False)
    assert res.ok and res.min_entry_max > 1e-6
    assert res.cells_checked > 50_000


def test_sweep_report_and_ledger_constant():
    res = verify_no_rank2(128)
    js = res.to_json()
    assert js["ok"] and js["sigma2"] == 0 == SIGMA2_Z2_MODEL
    assert set(js) >= {"ok", "min_entry_max", "cells_checked"}


def test_sweep_argument_checks():
    with pytest.raises(ValueError):
        verify_no_rank2(32)
    with pytest.raises(ValueError):
        verify_no_rank2(128, margin=0)


def test_margin_violation_is_reported():
    res = verify_no_rank2(128, margin=10.0, symbolic=False)
    assert not res.ok and res.sigma2 is None
    assert len(res.worst) == 2
