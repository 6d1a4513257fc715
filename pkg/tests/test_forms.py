import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from immcalc.forms import (
    HYPERBOLIC,
    TWISTED,
    FormError,
    IntegerSymmetricForm,
    SearchBudget,
    bareiss_det,
    bidirectional_search,
    congruent,
    direct_sum,
    finite_abelian_label,
    integer_inverse,
    matmul,
    smith_diagonal,
    verify_certificate,
)
from immcalc.plumbing import intersection_form, parse_expr

F = IntegerSymmetricForm
I = F.diagonal


def cartan_a(k):
    return intersection_form(parse_expr(f"P(A,{k};2)"))


def cartan_d(k):
    return intersection_form(parse_expr(f"P(D,{k};2)"))


# --- oracles ------------------------------------------------------------


def oracle_det(m):
    return int(sympy.Matrix(m.entries).det()) if m.n else 1


def oracle_snf(m):
    if not m.n:
        return ()
    d = sympy_snf(sympy.Matrix(m.entries), domain=sympy.ZZ)
    return tuple(sorted((abs(int(d[i, i])) for i in range(m.n)), key=lambda x: (x == 0, x)))


def oracle_inertia(m):
    if not m.n:
        return (0, 0, 0)
    ev = np.linalg.eigvalsh(np.array(m.entries, dtype=float))
    tol = 1e-9 * max(1.0, np.abs(ev).max())
    return int((ev > tol).sum()), int((ev < -tol).sum()), int((np.abs(ev) <= tol).sum())


# --- strategies -----------------------------------------------------------


@st.composite
def sym_forms(draw, max_n=5, bound=6):
    n = draw(st.integers(1, max_n))
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = draw(st.integers(-bound, bound))
    return F(rows)


@st.composite
def unimodular(draw, n):
    """Product of random elementary matrices and sign flips."""
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(draw(st.integers(0, 8))):
        if n > 1 and draw(st.booleans()):
            i, j = draw(st.sampled_from([(a, b) for a in range(n) for b in range(n) if a != b]))
            c = draw(st.sampled_from([-2, -1, 1, 2]))
            e = [[int(a == b) for b in range(n)] for a in range(n)]
            e[j][i] = c
        else:
            k = draw(st.integers(0, n - 1))
            e = [[(-1 if a == k else 1) * int(a == b) for b in range(n)] for a in range(n)]
        u = matmul(u, e)
    return u


@st.composite
def form_and_conjugate(draw):
    m = draw(sym_forms())
    u = draw(unimodular(m.n))
    return m, u


# --- worked examples --------------------------------------------------------


def test_signature_examples():
    assert F(((2, 1), (1, 2))).signature == 2
    assert HYPERBOLIC.signature == 0
    for n in range(1, 7):
        assert (I([-1]) + I([1] * n * n)).signature == n * n - 1


def test_determinant_and_snf_examples():
    a4 = cartan_a(4)
    assert a4.determinant == 5
    assert a4.smith == (1, 1, 1, 5)
    assert cartan_d(7).determinant == 4
    m = F(((0, 2), (2, -7)))
    assert (m.determinant, m.signature, m.parity) == (-4, 0, "odd")


def test_direct_sum_examples():
    assert (I([2]) + HYPERBOLIC).entries == ((2, 0, 0), (0, 0, 1), (0, 1, 0))
    assert (I([-1]) + I([1])).signature == 0
    assert (cartan_a(1) + HYPERBOLIC).determinant == -2


def test_cartan_determinant_recurrence():
    d = [1, 2]  # d_0, d_1
    for k in range(2, 30):
        d.append(2 * d[-1] - d[-2])
    for k in range(1, 30):
        assert cartan_a(k).determinant == d[k] == k + 1
    for k in range(3, 30):
        assert cartan_d(k).determinant == 4


def test_empty_form():
    e = F.empty()
    assert (e.n, e.signature, e.determinant, e.smith) == (0, 0, 1, ())


def test_asymmetric_rejected():
    with pytest.raises(FormError):
        F(((1, 2), (3, 4)))


def test_parse_literal():
    m = F.parse("[[0,1],[1,0]]")
    assert m == HYPERBOLIC
    assert F.parse(m.literal()) == m
    for bad in ("[[1,2]", "[[1.5]]", "[1,2]", "[[true]]"):
        with pytest.raises(FormError):
            F.parse(bad)


def test_finite_abelian_label():
    assert finite_abelian_label((4,)) == "Z4"
    assert finite_abelian_label((1, 2, 2)) == "Z2+Z2"
    assert finite_abelian_label((1, 1)) == "0"
    assert finite_abelian_label((0,)) == "Z"


def test_smith_rectangular():
    assert smith_diagonal([[2, 4, 4], [-6, 6, 12]]) == (2, 6)


# --- oracle agreement -----------------------------------------------------


@settings(max_examples=300, deadline=None)
@given(sym_forms(max_n=6, bound=9))
def test_invariants_match_oracles(m):
    assert m.determinant == oracle_det(m)
    assert m.smith == oracle_snf(m)
    assert m.inertia == oracle_inertia(m)


@settings(max_examples=200, deadline=None)
@given(sym_forms(), sym_forms())
def test_direct_sum_composes(a, b):
    s = direct_sum(a, b)
    assert s.signature == a.signature + b.signature
    assert s.determinant == a.determinant * b.determinant
    assert s.rank == a.rank + b.rank


@settings(max_examples=200, deadline=None)
@given(sym_forms())
def test_det_sign_matches_negative_index(m):
    pos, neg, zero = m.inertia
    if m.determinant:
        assert zero == 0
        assert (m.determinant > 0) == (neg % 2 == 0)
    else:
        assert zero > 0


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.booleans())
def test_definite_signature_is_rank(n, negative):
    m = cartan_a(n) if not negative else F([[-x for x in r] for r in cartan_a(n).entries])
    assert abs(m.signature) == m.rank == n


# --- congruence invariance ------------------------------------------------


@settings(max_examples=500, deadline=None)
@given(form_and_conjugate())
def test_invariants_under_unimodular_conjugation(pair):
    m, u = pair
    assert abs(bareiss_det(u)) == 1
    c = m.transform(u)
    assert c.invariants() == m.invariants()
    assert c.inertia == m.inertia


@settings(max_examples=60, deadline=None)
@given(form_and_conjugate())
def test_congruent_is_sound(pair):
    m, u = pair
    c = m.transform(u)
    res = congruent(m, c, SearchBudget(max_states=20_000))
    assert res.verdict != "no"
    if res:
        assert verify_certificate(m, c, res.certificate)


def test_integer_inverse():
    u = [[2, 1], [1, 1]]
    assert matmul(u, integer_inverse(u)) == ((1, 0), (0, 1))


# --- congruence examples --------------------------------------------------


def test_cp2_trade():
    res = congruent(I([1, 1, -1]), HYPERBOLIC + I([1]))
    assert res and verify_certificate(I([1, 1, -1]), HYPERBOLIC + I([1]), res.certificate)
    assert res.to_json()["verified"] is True


def test_parity_witness():
    res = congruent(I([2]) + HYPERBOLIC, I([-2, 1, 1]))
    assert res.verdict == "no"
    assert "parity" in res.witness


def test_odd_blowup_congruence():
    a, b = I([2, 1, -1]), I([-2, 1, 1])
    res = congruent(a, b)
    assert res and verify_certificate(a, b, res.certificate)


def test_rank_mismatch_is_no():
    res = congruent(I([1]), I([1, 1]))
    assert res.verdict == "no" and "rank" in res.witness


def test_twisted_is_odd_unimodular():
    assert (TWISTED.determinant, TWISTED.signature, TWISTED.parity) == (-1, 0, "odd")
    assert congruent(TWISTED, I([1, -1]))


def test_plumbing_sign_choice_is_congruent():
    # flipping the sign of an edge is a basis sign flip
    a = cartan_a(4)
    b = F([[2, -1, 0, 0], [-1, 2, 1, 0], [0, 1, 2, -1], [0, 0, -1, 2]])
    res = congruent(a, b)
    assert res and verify_certificate(a, b, res.certificate)


def test_bfs_small_instance():
    cert = bidirectional_search(HYPERBOLIC, F(((2, 1), (1, 0))), SearchBudget())
    assert cert is not None and verify_certificate(HYPERBOLIC, F(((2, 1), (1, 0))), cert)


def test_congruent_deterministic():
    a, b = I([-5, 1, 1, 1, 1]), cartan_a(4) + I([-1])
    r1, r2 = congruent(a, b), congruent(a, b)
    assert r1.certificate == r2.certificate
