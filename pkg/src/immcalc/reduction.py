"""Splitting reduction used to find congruence certificates.

The plain bidirectional search in :mod:`immcalc.forms` stalls once the rank
grows past four or five.  Here both forms are first brought into the shape

    diag(+1, ..., -1, ...)  +  H + ... + H  +  residual

by splitting off vectors of square +-1 and unimodular binary blocks.  The
split uses only elementary congruences, so the accumulated basis change is an
explicit unimodular matrix.  When the two shapes agree the certificate is
immediate; otherwise the search runs on the (small) leftover blocks.
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Sequence

from .forms import (
    IntegerSymmetricForm,
    Matrix,
    SearchBudget,
    bidirectional_search,
    identity,
    integer_inverse,
    matmul,
)


class _Basis:
    """Gram matrix G plus the basis U that produced it (U^T M U = G)."""

    def __init__(self, form: IntegerSymmetricForm):
        n = form.n
        self.n = n
        self.g = [list(r) for r in form.entries]
        self.u = [list(r) for r in identity(n)]  # rows of U; column k = basis vector k

    def slide(self, i: int, j: int, k: int = 1) -> None:
        """e_i <- e_i + k e_j."""
        if k == 0:
            return
        g = self.g
        gii = g[i][i] + 2 * k * g[i][j] + k * k * g[j][j]
        for t in range(self.n):
            if t != i:
                g[i][t] += k * g[j][t]
                g[t][i] = g[i][t]
        g[i][i] = gii
        for row in self.u:
            row[i] += k * row[j]

    def flip(self, i: int) -> None:
        g = self.g
        for t in range(self.n):
            if t != i:
                g[i][t] = -g[i][t]
                g[t][i] = -g[t][i]
        for row in self.u:
            row[i] = -row[i]

    def unimodular2(self, p: int, q: int, x: int, y: int, s: int, t: int) -> None:
        """(e_p, e_q) <- (x e_p + y e_q, s e_p + t e_q), with x t - y s = 1."""
        assert x * t - y * s == 1
        g = self.g
        n = self.n
        col_p = [x * g[r][p] + y * g[r][q] for r in range(n)]
        col_q = [s * g[r][p] + t * g[r][q] for r in range(n)]
        gpp = x * col_p[p] + y * col_p[q]
        gpq = s * col_p[p] + t * col_p[q]
        gqq = s * col_q[p] + t * col_q[q]
        for r in range(n):
            g[r][p] = g[p][r] = col_p[r]
            g[r][q] = g[q][r] = col_q[r]
        g[p][p], g[q][q] = gpp, gqq
        g[p][q] = g[q][p] = gpq
        for row in self.u:
            a, b = row[p], row[q]
            row[p], row[q] = x * a + y * b, s * a + t * b

    def replace(self, p: int, coeffs: dict[int, int]) -> None:
        """e_p <- sum coeffs[i] e_i, requiring coeffs[p] = +-1."""
        c = coeffs[p]
        assert c in (1, -1)
        if c == -1:
            self.flip(p)
        for i, k in coeffs.items():
            if i != p:
                self.slide(p, i, c * k)

    def orthogonalize(self, block: Sequence[int], others: Sequence[int]) -> None:
        """Make every e_r (r in others) orthogonal to span(block); needs a unimodular block."""
        if len(block) == 1:
            (p,) = block
            d = self.g[p][p]
            for r in others:
                k = self.g[r][p]
                if k:
                    assert k % d == 0
                    self.slide(r, p, -k // d)
            return
        p, q = block
        a, b, c = self.g[p][p], self.g[p][q], self.g[q][q]
        det = a * c - b * b
        assert det in (1, -1)
        for r in others:
            bp, bq = self.g[r][p], self.g[r][q]
            # solve [[a,b],[b,c]] (x,y) = (bp,bq) exactly
            x = (c * bp - b * bq) // det
            y = (a * bq - b * bp) // det
            self.slide(r, p, -x)
            self.slide(r, q, -y)

    def q(self, coeffs: dict[int, int]) -> int:
        g = self.g
        items = list(coeffs.items())
        return sum(ci * cj * g[i][j] for i, ci in items for j, cj in items)


_COEFFS = (1, -1, 2, -2)


def _unit_candidates(basis: _Basis, pool: Sequence[int], pivots: Sequence[int]):
    """Small vectors with a +-1 coefficient on some pivot index, in fixed order."""
    for p in pivots:
        yield p, {p: 1}
    for p in pivots:
        for i in pool:
            if i == p:
                continue
            for k in _COEFFS:
                yield p, {p: 1, i: k}
    if len(pool) <= 12:
        for p in pivots:
            others = [i for i in pool if i != p]
            for i, j in combinations(others, 2):
                for ki, kj in product(_COEFFS, repeat=2):
                    yield p, {p: 1, i: ki, j: kj}


def _find_unit(basis: _Basis, pool, pivots):
    for p, v in _unit_candidates(basis, pool, pivots):
        if basis.q(v) in (1, -1):
            return p, v
    return None


def _isotropic(a: int, b: int, c: int) -> tuple[int, int]:
    """Primitive (x, y) with a x^2 + 2 b x y + c y^2 = 0 when b^2 - a c = 1."""
    from math import gcd

    if a == 0:
        return 1, 0
    x, y = -b + 1, a
    g = gcd(x, y)
    return x // g, y // g


def _complete(x: int, y: int) -> tuple[int, int]:
    """(s, t) with x t - y s = 1 for coprime x, y."""

    def egcd(a, b):
        if b == 0:
            return (1 if a >= 0 else -1), 0, abs(a)
        s, t, g = egcd(b, a % b)
        return t, s - (a // b) * t, g

    u, v, g = egcd(x, y)  # u x + v y = g = 1
    assert g == 1
    return -v, u


class Shape:
    def __init__(self, units: list[int], hyperbolic: int, residual: list[int]):
        self.units = units
        self.hyperbolic = hyperbolic
        self.residual = residual


def reduce_form(form: IntegerSymmetricForm) -> tuple[Matrix, IntegerSymmetricForm, Shape]:
    """Split ``form`` into units, hyperbolic planes and a residual block.

    Returns (U, G, shape) with U^T form U = G, G block diagonal in the order
    +1's, -1's, H's, residual.
    """
    basis = _Basis(form)
    n = form.n
    units: list[int] = []
    pairs: list[tuple[int, int]] = []
    rest = list(range(n))

    def split_units() -> bool:
        progressed = False
        while True:
            hit = _find_unit(basis, rest, rest)
            if hit is None:
                return progressed
            p, v = hit
            basis.replace(p, v)
            rest.remove(p)
            basis.orthogonalize([p], rest)
            units.append(p)
            progressed = True

    split_units()
    # mixing: combine a residual vector with existing units to free new units
    tries = 0
    while rest and units and tries < 4 * n:
        tries += 1
        done = False
        for p in list(rest):
            for uidx in list(units):
                for i in [None] + [r for r in rest if r != p]:
                    for k in ((0,) if i is None else _COEFFS):
                        for cu in (1, -1):
                            v = {p: 1, uidx: cu}
                            if i is not None:
                                v[i] = k
                            if basis.q(v) not in (1, -1):
                                continue
                            snapshot = ([r[:] for r in basis.g], [r[:] for r in basis.u], units[:], rest[:])
                            basis.replace(p, v)
                            units.remove(uidx)
                            rest.remove(p)
                            basis.orthogonalize([p], rest + [uidx] + units)
                            rest.append(uidx)
                            units.append(p)
                            before = len(rest)
                            if split_units() and len(rest) < before:
                                done = True
                                break
                            basis.g, basis.u = snapshot[0], snapshot[1]
                            units[:] = snapshot[2]
                            rest[:] = snapshot[3]
                        if done:
                            break
                    if done:
                        break
                if done:
                    break
            if done:
                break
        if not done:
            break

    # unimodular indefinite binary blocks among basis vectors
    while True:
        hit = None
        for p, q in combinations(rest, 2):
            if basis.g[p][p] * basis.g[q][q] - basis.g[p][q] ** 2 == -1:
                hit = (p, q)
                break
        if hit is None:
            break
        p, q = hit
        rest.remove(p)
        rest.remove(q)
        basis.orthogonalize([p, q], rest)
        a, b, c = basis.g[p][p], basis.g[p][q], basis.g[q][q]
        x, y = _isotropic(a, b, c)
        s, t = _complete(x, y)
        basis.unimodular2(p, q, x, y, s, t)
        if basis.g[p][q] == -1:
            basis.flip(q)
        c = basis.g[q][q]
        if c % 2 == 0:
            basis.slide(q, p, -c // 2)
            pairs.append((p, q))
        else:
            basis.slide(q, p, -(c - 1) // 2)
            # twisted plane [[0,1],[1,1]]: (e_q, e_p - e_q) is diag(1, -1)
            basis.slide(p, q, -1)
            units.extend([q, p])
        split_units()

    # with an odd unit available, H + <e> = <e> + <-e> + <e>
    if units and pairs:
        for a_idx, b_idx in pairs:
            c_idx = units[0]
            eps = basis.g[c_idx][c_idx]
            # new basis: a + c, b - eps (a + c), c - eps b
            basis.slide(c_idx, b_idx, -eps)
            basis.slide(a_idx, c_idx, 1)
            basis.slide(a_idx, b_idx, eps)
            basis.slide(b_idx, a_idx, -eps)
            units.extend([a_idx, b_idx])
        pairs = []

    pos = [i for i in units if basis.g[i][i] == 1]
    neg = [i for i in units if basis.g[i][i] == -1]
    order = pos + neg + [i for pq in pairs for i in pq] + rest
    perm = [[int(order[c] == r) for c in range(n)] for r in range(n)]
    u = matmul(basis.u, perm)
    g = form.transform(u)
    shape = Shape([1] * len(pos) + [-1] * len(neg), len(pairs), list(range(n - len(rest), n)))
    return u, g, shape


def _sub(form: IntegerSymmetricForm, idx: Sequence[int]) -> IntegerSymmetricForm:
    return IntegerSymmetricForm(tuple(tuple(form.entries[i][j] for j in idx) for i in idx))


def _block_plan(shape: Shape, keep_units: dict[int, int], keep_h: int):
    """Index order [kept units, kept H's, everything else] for a reduced form."""
    n_units = len(shape.units)
    unit_idx = {1: [i for i in range(n_units) if shape.units[i] == 1],
                -1: [i for i in range(n_units) if shape.units[i] == -1]}
    common = unit_idx[1][: keep_units.get(1, 0)] + unit_idx[-1][: keep_units.get(-1, 0)]
    h_idx = []
    for h in range(keep_h):
        h_idx += [n_units + 2 * h, n_units + 2 * h + 1]
    fixed = common + h_idx
    total = n_units + 2 * shape.hyperbolic + len(shape.residual)
    rest = [i for i in range(total) if i not in set(fixed)]
    return fixed, rest


def find_congruence(
    m1: IntegerSymmetricForm, m2: IntegerSymmetricForm, budget: SearchBudget
) -> tuple[Matrix | None, dict]:
    n = m1.n
    u1, g1, s1 = reduce_form(m1)
    u2, g2, s2 = reduce_form(m2)
    detail = {
        "reduced_lhs": g1.literal(),
        "reduced_rhs": g2.literal(),
    }
    if g1.entries == g2.entries:
        detail["route"] = "reduction"
        return matmul(u1, integer_inverse(u2)), detail

    # strip what the two shapes share, search on the remainder
    shared = {e: min(s1.units.count(e), s2.units.count(e)) for e in (1, -1)}
    shared_h = min(s1.hyperbolic, s2.hyperbolic)
    attempts = [dict(shared)]
    for e in (1, -1):
        if shared[e]:
            attempts.append({**shared, e: shared[e] - 1})
    if shared[1] and shared[-1]:
        attempts.append({1: shared[1] - 1, -1: shared[-1] - 1})
    for keep in attempts:
        f1, r1 = _block_plan(s1, keep, shared_h)
        f2, r2 = _block_plan(s2, keep, shared_h)
        b1, b2 = _sub(g1, r1), _sub(g2, r2)
        if b1.n > 6:
            continue
        t = bidirectional_search(b1, b2, budget)
        if t is None:
            continue
        k = len(f1)
        w = [list(r) for r in identity(n)]
        for i in range(len(r1)):
            for j in range(len(r1)):
                w[k + i][k + j] = t[i][j]
        p1 = [[int((f1 + r1)[c] == r) for c in range(n)] for r in range(n)]
        p2 = [[int((f2 + r2)[c] == r) for c in range(n)] for r in range(n)]
        left = matmul(matmul(u1, p1), w)
        right = matmul(u2, p2)
        detail["route"] = f"reduction+search(rank {b1.n})"
        return matmul(left, integer_inverse(right)), detail

    if n <= 6:
        t = bidirectional_search(m1, m2, budget)
        if t is not None:
            detail["route"] = "search"
            return t, detail
    detail["route"] = "exhausted"
    return None, detail
