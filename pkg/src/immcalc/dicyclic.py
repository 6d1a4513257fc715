"""Dicyclic groups Dic_n = <a, x | a^n = x^2, x a x^-1 = a^-1>, order 4n.

Elements are kept in the normal form a^k x^e with k mod 2n and e in {0, 1}.
A second, independent model realises Dic_n as unit quaternions
e^{i pi k / n} j^e, stored as 2x2 monomial matrices over Z[zeta_2n]; it is
used to cross-check the normal-form multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .forms import finite_abelian_label, smith_diagonal


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class DicyclicElement:
    n: int
    k: int
    e: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GroupError("Dic_n needs n >= 1")
        object.__setattr__(self, "k", self.k % (2 * self.n))
        if self.e not in (0, 1):
            raise GroupError("exponent of x must be 0 or 1")

    def __mul__(self, other: DicyclicElement) -> DicyclicElement:
        return dic_mul(self, other)

    def __pow__(self, m: int) -> DicyclicElement:
        if m < 0:
            return inverse(self) ** (-m)
        out = identity(self.n)
        for _ in range(m):
            out = out * self
        return out

    def __str__(self) -> str:
        parts = []
        if self.k:
            parts.append(f"a^{self.k}")
        if self.e:
            parts.append("x")
        return "".join(parts) or "1"


def identity(n: int) -> DicyclicElement:
    return DicyclicElement(n, 0, 0)


def gen_a(n: int) -> DicyclicElement:
    return DicyclicElement(n, 1, 0)


def gen_x(n: int) -> DicyclicElement:
    return DicyclicElement(n, 0, 1)


def dic_mul(g: DicyclicElement, h: DicyclicElement) -> DicyclicElement:
    if g.n != h.n:
        raise GroupError(f"cannot multiply elements of Dic_{g.n} and Dic_{h.n}")
    n = g.n
    if g.e == 0:
        return DicyclicElement(n, g.k + h.k, h.e)
    # x a^k = a^-k x, and x^2 = a^n
    if h.e == 0:
        return DicyclicElement(n, g.k - h.k, 1)
    return DicyclicElement(n, g.k - h.k + n, 0)


def inverse(g: DicyclicElement) -> DicyclicElement:
    if g.e == 0:
        return DicyclicElement(g.n, -g.k, 0)
    # (a^k x)^2 = a^k a^-k x^2 = a^n, so (a^k x)^-1 = a^k x a^-n = a^(k+n) x
    return DicyclicElement(g.n, g.k + g.n, 1)


def elements(n: int) -> list[DicyclicElement]:
    return [DicyclicElement(n, k, e) for e in (0, 1) for k in range(2 * n)]


def dic_order(n: int) -> int:
    """Order of Dic_n, by closing {1} under right multiplication by a and x."""
    if n < 1:
        raise GroupError("n must be >= 1")
    gens = (gen_a(n), gen_x(n))
    seen = {identity(n)}
    frontier = [identity(n)]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = g * s
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return len(seen)


def element_order(g: DicyclicElement) -> int:
    one = identity(g.n)
    h = g
    m = 1
    while h != one:
        h = h * g
        m += 1
    return m


def check_extension(n: int) -> bool:
    """1 -> Z_2n -> Dic_n -> Z_2 -> 1 with the first map k -> a^k."""
    G = elements(n)
    a = gen_a(n)
    cyclic = [a ** k for k in range(2 * n)]
    sub = set(cyclic)
    # injective from Z_2n, and a has order exactly 2n
    if len(sub) != 2 * n or element_order(a) != 2 * n:
        return False
    # normal: g h g^-1 stays in <a>
    if any(g * h * inverse(g) not in sub for g in G for h in cyclic):
        return False
    # index 2 with cyclic quotient of order 2: cosets {<a>, x<a>}
    cosets = {frozenset(g * h for h in cyclic) for g in G}
    if len(cosets) != 2:
        return False
    x = gen_x(n)
    return x not in sub and x * x in sub


# ---------------------------------------------------------------------------
# quaternion model
#
# e^{i theta} -> diag(z, z^-1) and j -> [[0, -1], [1, 0]] with z = zeta_2n.
# Entries are 0 or a signed power of z; -z^k is folded into z^(k+n).


@dataclass(frozen=True)
class _Mono:
    """2x2 monomial matrix, entries None (zero) or an exponent of zeta mod 2n."""

    n: int
    m: tuple[tuple[int | None, int | None], tuple[int | None, int | None]]

    def __mul__(self, other: _Mono) -> _Mono:
        mod = 2 * self.n
        out = [[None, None], [None, None]]
        for i, j in product(range(2), repeat=2):
            terms = [
                (self.m[i][t] + other.m[t][j]) % mod
                for t in range(2)
                if self.m[i][t] is not None and other.m[t][j] is not None
            ]
            if len(terms) > 1:  # pragma: no cover - monomial matrices never collide
                raise AssertionError("non-monomial product")
            out[i][j] = terms[0] if terms else None
        return _Mono(self.n, (tuple(out[0]), tuple(out[1])))


def quaternion(g: DicyclicElement) -> _Mono:
    n = g.n
    rot = _Mono(n, ((g.k % (2 * n), None), (None, (-g.k) % (2 * n))))
    if g.e == 0:
        return rot
    j = _Mono(n, ((None, n), (0, None)))  # -1 = zeta^n
    return rot * j


def quaternion_model_agrees(n: int) -> bool:
    """Normal-form products match quaternion products for every pair."""
    G = elements(n)
    image = {g: quaternion(g) for g in G}
    if len(set(image.values())) != len(G):
        return False
    return all(image[g * h] == image[g] * image[h] for g in G for h in G)


def relations_hold(n: int) -> bool:
    a, x = gen_a(n), gen_x(n)
    return a ** n == x * x and x * a * inverse(x) == inverse(a)


def is_associative(n: int) -> bool:
    G = elements(n)
    return all((g * h) * k == g * (h * k) for g in G for h in G for k in G)


def has_unique_inverses(n: int) -> bool:
    G = elements(n)
    one = identity(n)
    return all(sum(1 for h in G if g * h == one) == 1 for g in G)


# ---------------------------------------------------------------------------
# abelianization


def relation_matrix(n: int) -> list[list[int]]:
    """Abelianized relators in the basis (a, x): a^n x^-2 and x a x^-1 a."""
    return [[n, -2], [2, 0]]


def abelianization(n: int) -> tuple[int, ...]:
    """Invariant factors of H_1(S^3/Dic_n) = Dic_n^ab (trivial factors dropped)."""
    if n < 1:
        raise GroupError("n must be >= 1")
    return tuple(d for d in smith_diagonal(relation_matrix(n)) if d != 1)


def abelianization_by_enumeration(n: int) -> tuple[int, ...]:
    """Dic_n / [Dic_n, Dic_n] computed from the multiplication table.

    Returns invariant factors of the quotient (which has order at most 4 here,
    so it is Z4 or Z2+Z2 or smaller).
    """
    G = elements(n)
    comm = {g * h * inverse(g) * inverse(h) for g in G for h in G}
    # close under products
    sub = set(comm) | {identity(n)}
    frontier = list(sub)
    while frontier:
        nxt = []
        for g in frontier:
            for h in list(sub):
                p = g * h
                if p not in sub:
                    sub.add(p)
                    nxt.append(p)
        frontier = nxt
    order = len(G) // len(sub)
    if order == 1:
        return ()
    # exponent of the quotient: smallest m with g^m in sub for all g
    exponent = 1
    for g in G:
        m = 1
        h = g
        while h not in sub:
            h = h * g
            m += 1
        exponent = max(exponent, m)
    if exponent == order:
        return (order,)
    if order == 4 and exponent == 2:
        return (2, 2)
    raise AssertionError(f"unexpected abelianization of order {order}")  # pragma: no cover


def group_report(n: int) -> dict:
    ab = abelianization(n)
    return {
        "n": n,
        "order": dic_order(n),
        "abelianization": finite_abelian_label(ab),
        "extension_ok": check_extension(n),
    }
