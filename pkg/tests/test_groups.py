import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import groups_upto, span_size, torsion_elements
from tyind.groups import (
    INFINITY,
    QZ,
    FinAbGroup,
    SpecError,
    element_order,
    p_valuation,
    parse_group,
    sylow_split,
    torsion_order,
    torsion_subgroup_gens,
    vp,
)

SMALL_GROUPS = groups_upto(64)


def test_element_orders_and_valuations():
    Z4 = FinAbGroup([(2, 2)])
    assert element_order(Z4, (2,)) == 2
    assert p_valuation(Z4, (2,), 2) == -1
    Z9 = FinAbGroup([(3, 2)])
    assert element_order(Z9, (3,)) == 3
    assert p_valuation(Z9, (3,), 3) == -1
    assert element_order(Z9, (0,)) == 1
    assert p_valuation(Z9, (0,), 3) is INFINITY


def test_p_valuation_rejects_mixed_elements():
    G = FinAbGroup([(2, 1), (3, 1)])
    with pytest.raises(ValueError):
        p_valuation(G, (1, 1), 2)


def test_torsion_examples():
    assert torsion_order(FinAbGroup([(2, 1), (2, 2)]), 2) == 4
    assert torsion_order(FinAbGroup([(5, 1)]), 1) == 1
    G1 = FinAbGroup([(2, 1)] * 4 + [(2, 2)])
    for odd in (1, 3, 5, 7, 21):
        assert torsion_order(G1, 2 * odd) == 32
    assert torsion_order(FinAbGroup([(3, 2)]), 3) == 3


@pytest.mark.parametrize("G", SMALL_GROUPS, ids=str)
def test_torsion_order_matches_enumeration(G):
    for k in range(1, 13):
        elems = torsion_elements(G, k)
        assert torsion_order(G, k) == len(elems)
        gens = torsion_subgroup_gens(G, k)
        assert span_size(G, gens) == len(elems)


def test_sylow_split():
    even, odd = sylow_split(FinAbGroup([(2, 3), (3, 2), (5, 1)]))
    assert even == FinAbGroup([(2, 3)])
    assert odd == FinAbGroup([(3, 2), (5, 1)])
    assert sylow_split(parse_group("Z/2 + Z/3")) == (FinAbGroup([(2, 1)]), FinAbGroup([(3, 1)]))


def test_parse_group_canonical_and_errors():
    G = parse_group("Z/3 + Z/2 + Z/8")
    assert G.factors == ((2, 3), (2, 1), (3, 1))
    assert parse_group("Z/2^3") == FinAbGroup([(2, 3)])
    with pytest.raises(SpecError) as e:
        parse_group("Z/12")
    assert e.value.position == 2
    assert parse_group("Z/12", allow_composite=True).factors == ((2, 2), (3, 1))
    with pytest.raises(SpecError) as e:
        parse_group("Z/4 + X")
    assert e.value.position == 5
    with pytest.raises(SpecError):
        parse_group("")


def test_factor_validation():
    with pytest.raises(ValueError):
        FinAbGroup([(4, 1)])
    with pytest.raises(ValueError):
        FinAbGroup([(2, 0)])


def test_canonical_and_same_type():
    G = FinAbGroup([(3, 1), (2, 1), (2, 2)])
    H, perm = G.canonical()
    assert H.factors == ((2, 2), (2, 1), (3, 1))
    assert [G.factors[i] for i in perm] == list(H.factors)
    assert G.same_type(H) and G != H
    assert G.order == 24 and G.exponent == 12


@given(st.integers(-10**6, 10**6), st.integers(1, 10**4), st.integers(-10**6, 10**6), st.integers(1, 10**4))
def test_qz_is_rational_mod_one(a, b, c, d):
    x, y = QZ.of(Fraction(a, b)), QZ.of(Fraction(c, d))
    assert 0 <= x.fraction() < 1
    assert (x + y).fraction() == (Fraction(a, b) + Fraction(c, d)) % 1
    assert (x - y).fraction() == (Fraction(a, b) - Fraction(c, d)) % 1
    assert (3 * x).fraction() == (3 * Fraction(a, b)) % 1
    assert math.gcd(x.num, x.den) == 1


@given(st.integers(1, 10**9), st.sampled_from([2, 3, 5, 7]))
def test_vp(n, p):
    v = vp(n, p)
    assert n % p ** v == 0 and (n // p ** v) % p != 0
