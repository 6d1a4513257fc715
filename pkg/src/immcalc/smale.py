"""Smale invariants of immersions S^3 -> R^4 from singular Seifert surfaces.

The bookkeeping runs through three numbers attached to a singular Seifert
surface F: V -> R^4 of an immersion f:

* sigma(V), the signature of the source 4-manifold,
* #Sigma^2(F), the algebraic count of rank-2 points,
* ndeg(f), the normal degree.

Then Hdef(f) = -3 sigma - #Sigma^2, and the Smale invariant in
pi_3(SO_4) = Z + Z is (ndeg - 1, (-Hdef - 2 (ndeg - 1)) / 4).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .kirby import x_n
from .plumbing import CP2, DiskBundle, Expr, SxS, a_chain_or_ball, euler_characteristic, plumbing, signature


class LedgerError(ValueError):
    """Inconsistent bookkeeping; never raised for genuine immersions."""


@dataclass(frozen=True)
class SmaleInvariant:
    a: int
    b: int

    def __add__(self, other: SmaleInvariant) -> SmaleInvariant:
        return connected_sum(self, other)

    def __neg__(self) -> SmaleInvariant:
        return SmaleInvariant(-self.a, -self.b)

    def __sub__(self, other: SmaleInvariant) -> SmaleInvariant:
        return self + (-other)

    def __rmul__(self, m: int) -> SmaleInvariant:
        return scalar(m, self)

    def __iter__(self):
        return iter((self.a, self.b))

    def __str__(self) -> str:
        return f"({self.a}, {self.b})"


def connected_sum(x: SmaleInvariant, y: SmaleInvariant) -> SmaleInvariant:
    return SmaleInvariant(x.a + y.a, x.b + y.b)


def scalar(m: int, x: SmaleInvariant) -> SmaleInvariant:
    return SmaleInvariant(m * x.a, m * x.b)


def hirzebruch_defect(sigma: int, sigma2: int) -> int:
    return -3 * sigma - sigma2


def smale_invariant(ndeg: int, hdef: int) -> SmaleInvariant:
    num = -hdef - 2 * (ndeg - 1)
    if num % 4:
        raise LedgerError(
            f"inconsistent ledger: -Hdef - 2(ndeg-1) = {num} is not divisible by 4 "
            f"(ndeg={ndeg}, Hdef={hdef})"
        )
    return SmaleInvariant(ndeg - 1, num // 4)


def ndeg_immersed(expr: Expr) -> int:
    """Normal degree of the boundary of an immersed 4-manifold: its Euler characteristic."""
    return euler_characteristic(expr)


def ndeg_composite(cover_degree: int, base_ndeg: int) -> int:
    if cover_degree < 1:
        raise ValueError("covering degree must be positive")
    return cover_degree * base_ndeg


# rank-2 point counts ------------------------------------------------------


def sigma2_thom(sigma_closed: int) -> int:
    """Umbilic count of a generic map of a closed 4-manifold into R^4."""
    return -3 * sigma_closed


def sigma2_pi(k: int) -> int:
    """Rank-2 count of the fibrewise z -> z^k branched cover E(xi_-1) -> E(xi_-k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return -(k * k - 1)


def sigma2_compose(deg_f: int, s2_g: int, s2_f: int, disjoint: str | None = None) -> int:
    """Rank-2 count of g o f for a branched cover f.

    Valid only when the branch locus of f misses the singular set of g; the
    caller names the argument that guarantees this via ``disjoint``.
    """
    if not disjoint:
        raise LedgerError(
            "composition rule needs the branch locus to avoid the singular set; "
            "pass the justification as `disjoint`"
        )
    return deg_f * s2_g + s2_f


SIGMA2_IMMERSION = 0
SIGMA2_Z2_MODEL = 0  # (z, w) -> (z^2, w) on D^2 x S^2, see immcalc.singularities


def modification_correction(omega_mod: SmaleInvariant, deg: int, omega_beta: SmaleInvariant) -> SmaleInvariant:
    """Omega(alpha) = Omega(alpha') + deg * Omega(beta)."""
    return omega_mod + scalar(deg, omega_beta)


def bordism_class(omega: SmaleInvariant) -> int:
    """Image in pi_3^S = Z_24 via (a, b) -> a + 2b."""
    return (omega.a + 2 * omega.b) % 24


def is_generator(cls: int) -> bool:
    return gcd(cls % 24, 24) == 1


# ledger ----------------------------------------------------------------------


@dataclass
class SeifertLedger:
    source: Expr
    sigma: int = 0
    sigma2: int = 0
    ndeg: int = 0
    trace: list[dict] = field(default_factory=list)

    def note(self, step: str, value, why: str) -> None:
        if isinstance(value, SmaleInvariant):
            value = [value.a, value.b]
        self.trace.append({"step": step, "value": value, "why": why})


def torus_omega() -> SmaleInvariant:
    """Omega(t) for t the boundary of an immersed punctured S^2 x S^2."""
    square = Expr((SxS,))
    return smale_invariant(ndeg_immersed(square), hirzebruch_defect(signature(square), SIGMA2_IMMERSION))


@dataclass
class FamilyResult:
    family: str
    n: int
    omega: SmaleInvariant
    omega_modified: SmaleInvariant
    hdef: int
    ledger: SeifertLedger

    @property
    def bordism(self) -> int:
        return bordism_class(self.omega)

    @property
    def generator(self) -> bool:
        return is_generator(self.bordism)

    def to_json(self, trace: bool = False) -> dict:
        out = {
            "family": self.family,
            "n": self.n,
            "omega": [self.omega.a, self.omega.b],
            "omega_modified": [self.omega_modified.a, self.omega_modified.b],
            "hdef": self.hdef,
            "ndeg": self.ledger.ndeg,
            "sigma": self.ledger.sigma,
            "sigma2": self.ledger.sigma2,
            "bordism": self.bordism,
            "generator": self.generator,
        }
        if trace:
            out["trace"] = self.ledger.trace
        return out


def seifert_source_f(n: int) -> Expr:
    return Expr((DiskBundle(-1),)) + Expr((CP2,)) * (n * n)


def seifert_source_g(n: int) -> Expr:
    return Expr((DiskBundle(-1),)) + x_n(n) * (2 * n) + Expr((CP2,)) * (4 * n * (n + 2))


def pipeline_f(n: int) -> FamilyResult:
    """f_n: S^3 -> L(n,1) -> R^4 through the A_{n-1} plumbing."""
    if n < 1:
        raise ValueError("n must be >= 1")
    source = seifert_source_f(n)
    led = SeifertLedger(source)
    led.sigma = signature(source)
    led.note("sigma(V), V = E(-1) # CP2^(n^2)", led.sigma, "Novikov additivity over the boundary sum")
    led.sigma2 = SIGMA2_IMMERSION + sigma2_pi(n)
    led.note("#Sigma^2(F'_n) = #Sigma^2(Pi_n)", led.sigma2, "rank-2 count of the fibrewise z^n cover; CP2 summands are covered unbranched")
    base = a_chain_or_ball(n - 1) + Expr((SxS,))
    chi = ndeg_immersed(base)
    led.note("ndeg(kappa'_A) = chi(P(A_{n-1},2) # SxS)", chi, "normal degree of an immersed filling = Euler characteristic")
    led.ndeg = ndeg_composite(n, chi)
    led.note("ndeg(f'_n)", led.ndeg, "normal degree multiplies by the covering degree n")
    hdef = hirzebruch_defect(led.sigma, led.sigma2)
    led.note("Hdef(f'_n)", hdef, "Hdef = -3 sigma - #Sigma^2")
    omega_mod = smale_invariant(led.ndeg, hdef)
    led.note("Omega(f'_n)", omega_mod, "Smale formula from (ndeg, Hdef)")
    omega_s = -torus_omega()
    led.note("Omega(s) = -Omega(t)", omega_s, "s = -t, with t bounding an immersed punctured S2xS2")
    omega = modification_correction(omega_mod, n, omega_s)
    led.note("Omega(f_n)", omega, "connected-sum correction by n copies of s")
    return FamilyResult("f", n, omega, omega_mod, hdef, led)


def pipeline_g(n: int) -> FamilyResult:
    """g_n: S^3 -> S^3/Dic_n -> R^4 through the D_{n+2} plumbing."""
    if n < 1:
        raise ValueError("n must be >= 1")
    source = seifert_source_g(n)
    led = SeifertLedger(source)
    led.sigma = signature(source)
    led.note("sigma(V), V = E(-1) # X_n^(2n) # CP2^(4n(n+2))", led.sigma, "Novikov additivity; X_n has signature 0")
    inner = SIGMA2_Z2_MODEL  # Phi_1 on the 0-framed handle
    led.note("#Sigma^2(Phi_1)", inner, "model (z,w) -> (z^2,w) perturbs to a map without rank-2 points")
    outer = sigma2_pi(2 * n)  # Phi_2 restricted to E(xi_-1) -> E(xi_-2n)
    led.note("#Sigma^2(Phi_2)", outer, "rank-2 count of the fibrewise z^2n cover")
    led.sigma2 = SIGMA2_IMMERSION + sigma2_compose(
        2 * n, inner, outer, disjoint="branch loci near cores of distinct 2-handles"
    )
    led.note("#Sigma^2(G'_n) = deg(Phi_2) #Sigma^2(Phi_1) + #Sigma^2(Phi_2)", led.sigma2,
             "composition rule for a branched cover followed by a map")
    base = plumbing("D", n + 2) + Expr((SxS,))
    chi = ndeg_immersed(base)
    led.note("ndeg(kappa'_D) = chi(P(D_{n+2},2) # SxS)", chi, "normal degree of an immersed filling = Euler characteristic")
    led.ndeg = ndeg_composite(4 * n, chi)
    led.note("ndeg(g'_n)", led.ndeg, "normal degree multiplies by the covering degree 4n")
    hdef = hirzebruch_defect(led.sigma, led.sigma2)
    led.note("Hdef(g'_n)", hdef, "Hdef = -3 sigma - #Sigma^2")
    omega_mod = smale_invariant(led.ndeg, hdef)
    led.note("Omega(g'_n)", omega_mod, "Smale formula from (ndeg, Hdef)")
    omega_s = -torus_omega()
    omega = modification_correction(omega_mod, 4 * n, omega_s)
    led.note("Omega(s) = -Omega(t)", omega_s, "s = -t, with t bounding an immersed punctured S2xS2")
    led.note("Omega(g_n)", omega, "connected-sum correction by 4n copies of s")
    return FamilyResult("g", n, omega, omega_mod, hdef, led)
