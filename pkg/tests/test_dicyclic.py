import pytest
from hypothesis import given
from hypothesis import strategies as st

from immcalc.dicyclic import (
    DicyclicElement,
    GroupError,
    abelianization,
    abelianization_by_enumeration,
    check_extension,
    dic_mul,
    dic_order,
    element_order,
    elements,
    gen_a,
    gen_x,
    group_report,
    has_unique_inverses,
    identity,
    inverse,
    is_associative,
    quaternion_model_agrees,
    relations_hold,
)
from immcalc.forms import finite_abelian_label
from immcalc.plumbing import intersection_form, plumbing


def test_relation_examples():
    assert gen_x(2) * gen_x(2) == gen_a(2) ** 2
    a, x = gen_a(3), gen_x(3)
    assert x * a * inverse(x) == inverse(a)


@given(st.integers(1, 12), st.integers(0, 50), st.integers(0, 1))
def test_identity_is_neutral(n, k, e):
    g = DicyclicElement(n, k, e)
    assert identity(n) * g == g == g * identity(n)
    assert g * inverse(g) == identity(n)


def test_orders():
    assert dic_order(5) == 20
    assert element_order(gen_a(5)) == 10
    for n in range(1, 10):
        assert element_order(gen_x(n)) == 4


@pytest.mark.parametrize("n", [1, 4, 7])
def test_extension_examples(n):
    assert check_extension(n)


def test_abelianization_examples():
    assert abelianization(3) == (4,)
    assert abelianization(4) == (2, 2)
    assert finite_abelian_label(abelianization(3)) == "Z4"


@pytest.mark.parametrize("n", range(1, 13))
def test_exhaustive_suite(n):
    assert dic_order(n) == len(elements(n)) == 4 * n
    assert relations_hold(n)
    assert check_extension(n)
    assert quaternion_model_agrees(n)
    assert has_unique_inverses(n)
    assert is_associative(n)
    assert abelianization(n) == abelianization_by_enumeration(n)
    # |H_1| of the boundary matches the D-plumbing determinant, with the same group
    d = intersection_form(plumbing("D", n + 2))
    assert abs(d.determinant) == 4
    assert tuple(x for x in d.smith if x != 1) == abelianization(n)
    assert abelianization(n) == ((4,) if n % 2 else (2, 2))


def test_mismatched_parameters():
    with pytest.raises(GroupError):
        dic_mul(gen_a(2), gen_a(3))
    with pytest.raises(GroupError):
        DicyclicElement(0, 0, 0)
    with pytest.raises(GroupError):
        DicyclicElement(2, 0, 2)


def test_group_report():
    assert group_report(5) == {"n": 5, "order": 20, "abelianization": "Z4", "extension_ok": True}


def test_str():
    assert str(identity(3)) == "1"
    assert str(DicyclicElement(3, 2, 1)) == "a^2x"
