"""Perturbation of the fold model z -> z^2 on the disk.

The map (z, w) -> (z^2, w) on D^2 x S^2 is rank 2 along {0} x S^2.  Replacing
the disk factor by

    Phi~(z) = z^2 + rho(|z|^2) z

with a bump rho (1 near 0, 0 from |z|^2 = 1/2 on, strictly decreasing in
between) removes every rank-2 point while keeping the boundary values, so the
rank-2 count of the model is 0.  This module checks that numerically on a
grid and replays the algebraic elimination with sympy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def _psi(t):
    """exp(-1/t) for t > 0, else 0 (vectorised)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _dpsi(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos]) / t[pos] ** 2
    return out


def _psi2(t):
    """exp(-1/t^2) for t > 0, else 0."""
    t = np.asarray(t, dtype=float)
    return np.where(t > 0, _psi(t * t), 0.0)


def _dpsi2(t):
    t = np.asarray(t, dtype=float)
    return np.where(t > 0, 2 * t * _dpsi(t * t), 0.0)


@dataclass(frozen=True)
class BumpFunction:
    """Smooth monotone profile rho on [0, 1] with rho = 1 on [0, c], 0 on [1/2, 1].

    ``kind`` picks the transition: "exp" is the usual psi(1-u)/(psi(u)+psi(1-u)),
    "exp2" uses exp(-1/u^2) in place of exp(-1/u).
    """

    c: Fraction = Fraction(1, 20)
    kind: str = "exp"

    def __post_init__(self) -> None:
        c = Fraction(self.c)
        object.__setattr__(self, "c", c)
        if not 0 < c < Fraction(1, 2):
            raise ValueError("c must lie in (0, 1/2)")
        if self.kind not in ("exp", "exp2"):
            raise ValueError(f"unknown profile {self.kind!r}")

    def _parts(self):
        if self.kind == "exp":
            return _psi, _dpsi
        return _psi2, _dpsi2

    def _u(self, t):
        c = float(self.c)
        return (np.asarray(t, dtype=float) - c) / (0.5 - c), 1.0 / (0.5 - c)

    def __call__(self, t):
        f, _ = self._parts()
        u, _ = self._u(t)
        a, b = f(1 - u), f(u)
        return a / (a + b)

    def derivative(self, t):
        f, df = self._parts()
        u, du = self._u(t)
        a, b = f(1 - u), f(u)
        da, db = -df(1 - u), df(u)
        return du * (da * b - a * db) / (a + b) ** 2


def phi_tilde(x, y, bump: BumpFunction):
    r = np.asarray(x) ** 2 + np.asarray(y) ** 2
    rho = bump(r)
    return x * x - y * y + rho * x, 2 * x * y + rho * y


def jacobian_entries(x, y, bump: BumpFunction) -> np.ndarray:
    """The four partial derivatives of phi_tilde, shape (2, 2, ...)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = x * x + y * y
    rho = bump(r)
    d = bump.derivative(r)
    return np.array([
        [d * 2 * x * x + rho + 2 * x, d * 2 * x * y - 2 * y],
        [d * 2 * x * y + 2 * y, d * 2 * y * y + rho + 2 * x],
    ])


def finite_difference_jacobian(x: float, y: float, bump: BumpFunction, h: float = 1e-4, order: int = 2) -> np.ndarray:
    """Central differences of phi_tilde (independent of jacobian_entries).

    ``order`` 2 is the three-point stencil, 4 the five-point one.
    """
    if order == 2:
        stencil = ((1, 0.5), (-1, -0.5))
    elif order == 4:
        stencil = ((2, -1 / 12), (1, 8 / 12), (-1, -8 / 12), (-2, 1 / 12))
    else:
        raise ValueError("order must be 2 or 4")
    out = np.zeros((2, 2))
    for col, (dx, dy) in enumerate(((h, 0.0), (0.0, h))):
        for k, w in stencil:
            out[:, col] += w * np.array(phi_tilde(x + k * dx, y + k * dy, bump), dtype=float)
    return out / h


def eliminate_symbolically() -> dict:
    """Replay the hand elimination for a vanishing Jacobian.

    With rho and rho' as free symbols (rho' != 0), the four equations force
    x = y = 0, which is incompatible with c < x^2 + y^2 < 1/2.
    """
    import sympy as sp

    x, y, p, q = sp.symbols("x y rho drho", real=True)
    eqs = [
        q * 2 * x**2 + p + 2 * x,
        q * 2 * x * y - 2 * y,
        q * 2 * x * y + 2 * y,
        q * 2 * y**2 + p + 2 * x,
    ]
    # off-diagonal difference: 4y = 0
    y_forced = sp.solve(sp.Eq(eqs[2] - eqs[1], 0), y)
    # diagonal difference at y = 0: 2 drho x^2 = 0
    diag = sp.factor((eqs[0] - eqs[3]).subs(y, 0))
    x_forced = sp.solve(sp.Eq(diag / q, 0), x)
    sols = sp.solve(eqs, [x, y, p], dict=True)
    only_origin = all(s.get(x, x) == 0 and s.get(y, y) == 0 for s in sols) and bool(sols)
    return {
        "y_forced": [str(v) for v in y_forced],
        "x_forced": [str(v) for v in x_forced],
        "solutions": [{str(k): str(v) for k, v in s.items()} for s in sols],
        "only_origin": only_origin and y_forced == [0] and x_forced == [0],
    }


@dataclass
class SweepResult:
    ok: bool
    min_entry_max: float
    cells_checked: int
    worst: tuple[float, float]
    symbolic_ok: bool
    sigma2: int | None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "min_entry_max": self.min_entry_max,
            "cells_checked": self.cells_checked,
            "worst_cell": list(self.worst),
            "symbolic_elimination": self.symbolic_ok,
            "sigma2": self.sigma2,
        }


def verify_no_rank2(grid: int = 256, bump: BumpFunction | None = None, margin: float = 1e-6,
                    symbolic: bool = True) -> SweepResult:
    """Sweep the unit disk; the Jacobian must never come within ``margin`` of zero.

    The statistic is min over grid points of max |J_ij|.  The closed disk is
    sampled on a (grid+1) x (grid+1) lattice over [-1, 1]^2, which includes
    the origin when grid is even.
    """
    if grid < 64:
        raise ValueError("grid must be at least 64")
    if margin <= 0:
        raise ValueError("margin must be positive")
    bump = bump or BumpFunction()
    axis = np.linspace(-1.0, 1.0, grid + 1)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    inside = xx**2 + yy**2 <= 1.0
    xs, ys = xx[inside], yy[inside]
    jac = jacobian_entries(xs, ys, bump)
    stat = np.abs(jac).max(axis=(0, 1))
    k = int(np.argmin(stat))
    low = float(stat[k])
    sym = eliminate_symbolically()["only_origin"] if symbolic else True
    ok = low >= margin and sym
    return SweepResult(ok, low, int(xs.size), (float(xs[k]), float(ys[k])), sym, 0 if ok else None)


def outside_radius_matches_square(bump: BumpFunction, samples: int = 2000, seed: int = 0) -> bool:
    """phi_tilde(z) == z^2 exactly whenever |z|^2 >= 1/2."""
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(0.5, 1.0, samples))
    th = rng.uniform(0, 2 * math.pi, samples)
    x, y = r * np.cos(th), r * np.sin(th)
    u, v = phi_tilde(x, y, bump)
    return bool(np.all(u == x * x - y * y) and np.all(v == 2 * x * y))

