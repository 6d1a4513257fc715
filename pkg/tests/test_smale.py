import pytest

from immcalc.forms import IntegerSymmetricForm
from immcalc.plumbing import Expr, SxS, euler_characteristic, intersection_form, plumbing
from immcalc.smale import (
    LedgerError,
    SmaleInvariant,
    bordism_class,
    connected_sum,
    hirzebruch_defect,
    is_generator,
    modification_correction,
    ndeg_composite,
    ndeg_immersed,
    pipeline_f,
    pipeline_g,
    scalar,
    seifert_source_f,
    seifert_source_g,
    sigma2_compose,
    sigma2_pi,
    sigma2_thom,
    smale_invariant,
    torus_omega,
)

S = SmaleInvariant
NS = range(1, 17)


def test_hirzebruch_defect_examples():
    for n in NS:
        assert hirzebruch_defect(n * n - 1, -(n * n - 1)) == -2 * n * n + 2
        assert hirzebruch_defect(4 * n * n + 8 * n - 1, -4 * n * n + 1) == -8 * n * n - 24 * n + 2
    assert hirzebruch_defect(0, 0) == 0


def test_smale_invariant_examples():
    assert smale_invariant(3, 0) == S(2, -1)
    assert smale_invariant(1, 0) == S(0, 0)
    assert smale_invariant(15, -16) == S(14, -3)
    with pytest.raises(LedgerError, match="inconsistent ledger"):
        smale_invariant(2, 0)


def test_ndeg_examples():
    for n in range(2, 10):
        assert ndeg_immersed(plumbing("A", n - 1) + Expr((SxS,))) == n + 2
        assert ndeg_immersed(plumbing("D", n + 2) + Expr((SxS,))) == n + 5
        assert ndeg_composite(n, n + 2) == n * (n + 2)
        assert ndeg_composite(4 * n, n + 5) == 4 * n * (n + 5)
    assert ndeg_immersed(Expr((SxS,))) == 3
    assert ndeg_composite(1, 7) == 7
    with pytest.raises(ValueError):
        ndeg_composite(0, 3)


def test_sigma2_constants():
    assert [sigma2_thom(s) for s in (0, 1, -2)] == [0, -3, 6]
    assert sigma2_pi(1) == 0
    for n in NS:
        assert sigma2_pi(n) == -(n * n - 1)
        assert sigma2_pi(2 * n) == -(4 * n * n - 1)
        assert sigma2_compose(2 * n, 0, sigma2_pi(2 * n), disjoint="test") == -4 * n * n + 1
    assert sigma2_compose(1, 5, 0, disjoint="test") == 5
    assert sigma2_compose(7, 0, 0, disjoint="test") == 0
    with pytest.raises(LedgerError):
        sigma2_compose(2, 0, -3)


def test_group_operations():
    t = S(2, -1)
    assert connected_sum(t, S(-2, 1)) == S(0, 0)
    assert -t == S(-2, 1)
    for n in NS:
        assert scalar(n, S(-2, 1)) == S(-2 * n, n)
    assert t + S(0, 0) == t
    assert 3 * t == S(6, -3)
    assert t - t == S(0, 0)
    assert tuple(t) == (2, -1)


def test_modification_correction_examples():
    for n in NS:
        assert modification_correction(S(n * n + 2 * n - 1, -n), n, S(-2, 1)) == S(n * n - 1, 0)
        assert modification_correction(S(4 * n * n + 20 * n - 1, -4 * n), 4 * n, S(-2, 1)) == S(4 * n * n + 12 * n - 1, 0)
    assert modification_correction(S(3, 4), 0, S(9, 9)) == S(3, 4)


def test_bordism_examples():
    assert bordism_class(S(35, 0)) == 11 and is_generator(11)
    assert bordism_class(S(2, -1)) == 0 and not is_generator(0)
    assert bordism_class(S(71, 0)) == 23 and is_generator(23)


def test_torus():
    assert torus_omega() == S(2, -1)


def test_pipeline_examples():
    assert pipeline_f(6).omega == S(35, 0) and pipeline_f(6).generator
    assert pipeline_g(1).omega == S(15, 0)
    assert pipeline_f(1).omega == S(0, 0)
    g2 = pipeline_g(2)
    assert (g2.omega, g2.bordism, g2.generator) == (S(39, 0), 15, False)


@pytest.mark.parametrize("n", NS)
def test_ledger_sigma_matches_form(n):
    for res, source in ((pipeline_f(n), seifert_source_f(n)), (pipeline_g(n), seifert_source_g(n))):
        assert res.ledger.sigma == intersection_form(source).signature
        assert res.ledger.source == source


def test_trace_contents():
    res = pipeline_g(3)
    steps = [t["step"] for t in res.ledger.trace]
    assert steps[-1] == "Omega(g_n)"
    assert all(t["why"] for t in res.ledger.trace)
    js = res.to_json(trace=True)
    assert js["omega"] == [71, 0] and js["bordism"] == 23 and js["generator"]
    assert "trace" not in res.to_json()


def test_pipeline_rejects_bad_n():
    with pytest.raises(ValueError):
        pipeline_f(0)
    with pytest.raises(ValueError):
        pipeline_g(0)


def test_chi_of_sources():
    # chi(V) = 1 + rank for a single boundary sum of 2-handlebodies
    for n in (1, 2, 5):
        v = seifert_source_f(n)
        assert euler_characteristic(v) == 1 + intersection_form(v).n
        assert isinstance(intersection_form(v), IntegerSymmetricForm)
