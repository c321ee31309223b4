import random

import pytest
from hypothesis import given, strategies as st

from oracles import (
    conjugate,
    find_isometry,
    groups_upto,
    random_automorphism,
    random_nondegenerate_gram,
)
from tyind.forms import DegenerateFormError, DiscForm, boundary, form_from_blocks, parse_form, block_bilinear
from tyind.groups import INFINITY, FinAbGroup
from tyind.invariants import (
    SigmaValue,
    characteristic_element,
    isometry_test,
    odd_invariants,
    reduced_group,
    sigma_invariants,
    two_adic_range,
    varsigma,
)

TWO_GROUPS = [G for G in groups_upto(128) if G.primes() == [2]]


def test_reduced_group():
    assert reduced_group(FinAbGroup([(2, 1), (2, 2)]), 2, 1).rank == 1
    assert reduced_group(FinAbGroup([(2, 2), (2, 2), (2, 1)]), 2, 2).rank == 2


def test_characteristic_examples():
    assert characteristic_element(block_bilinear("A", 2, 1), 1) == (1,)
    assert characteristic_element(block_bilinear("E", 2, 1), 1) == (0, 0)
    assert characteristic_element(block_bilinear("A", 2, 2), 1) == ()


def test_varsigma_examples():
    assert varsigma(block_bilinear("A", 2, 1), 1) == SigmaValue(INFINITY)
    assert varsigma(block_bilinear("E", 2, 1), 1) == SigmaValue(0)
    assert SigmaValue(0).image().to_json() == {"radicand": 1, "phase_eighth": 0}
    empty = DiscForm(FinAbGroup(), [])
    assert all(varsigma(empty, k) == SigmaValue(0) for k in (1, 2, 5))
    assert SigmaValue(INFINITY).image().is_zero
    assert (SigmaValue(3) + SigmaValue(7)).value == 2


def test_isometry_examples():
    assert not isometry_test(parse_form("A3"), parse_form("B3"))
    assert isometry_test(parse_form("A3+A3"), parse_form("B3+B3"))
    assert not isometry_test(parse_form("A2+A2+A2+A2+A4"), parse_form("A2+A2+A4+A4"))
    assert isometry_test(parse_form("A2"), parse_form("C2"))
    with pytest.raises(DegenerateFormError):
        isometry_test(DiscForm(FinAbGroup([(2, 1)]), [["0"]]), parse_form("A2"))


def test_odd_invariants_shape():
    inv = odd_invariants(parse_form("A3+B3+B9+A5"))
    assert inv == {(3, 1): (2, 1), (3, 2): (1, 1), (5, 1): (1, 0)}


@given(st.integers(0, 10**6), st.sampled_from(TWO_GROUPS))
def test_sigma_infinite_iff_characteristic_nonzero(seed, G):
    b = random_nondegenerate_gram(G, random.Random(seed))
    if b is None:
        return
    for k in two_adic_range(G):
        c = characteristic_element(b, k)
        assert varsigma(b, k).is_infinite == any(c)


@given(st.integers(0, 10**6), st.sampled_from(TWO_GROUPS))
def test_sigma_vanishes_beyond_exponent(seed, G):
    b = random_nondegenerate_gram(G, random.Random(seed))
    if b is None:
        return
    top = max(two_adic_range(G))
    for k in range(top + 1, top + 4):
        assert varsigma(b, k) == SigmaValue(0)


@given(st.integers(0, 10**6), st.sampled_from(groups_upto(200)))
def test_invariants_survive_automorphisms(seed, G):
    rng = random.Random(seed)
    b = random_nondegenerate_gram(G, rng)
    if b is None:
        return
    c = conjugate(b, random_automorphism(G, rng))
    assert sigma_invariants(b) == sigma_invariants(c)
    assert odd_invariants(b) == odd_invariants(c)
    assert isometry_test(b, c)


@given(st.integers(0, 10**6), st.sampled_from(groups_upto(64)))
def test_isometry_test_agrees_with_search(seed, G):
    rng = random.Random(seed)
    b1 = random_nondegenerate_gram(G, rng)
    b2 = random_nondegenerate_gram(G, rng)
    if b1 is None or b2 is None:
        return
    assert isometry_test(b1, b2) == (find_isometry(b1, b2) is not None)


def test_quadratic_input_uses_boundary():
    q = form_from_blocks([("A", 2, 1), ("E", 2, 1)])
    assert sigma_invariants(q) == sigma_invariants(boundary(q))
