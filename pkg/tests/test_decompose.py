import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import find_isometry, groups_upto, random_nondegenerate_gram, random_refinement
from tyind.decompose import (
    IrreducibleBlock,
    RowColOp,
    apply_rowcol,
    block_diagonalize_two,
    diagonalize_odd,
    hensel_lift,
    new_to_old_coords,
    normalize_rank2,
    two_adic_unit_class,
    validity_check,
    wall_decompose,
)
from tyind.forms import DegenerateFormError, DiscForm, QuadForm, boundary, form_from_blocks, parse_form
from tyind.groups import QZ, FinAbGroup


def _qz(rows):
    return [[QZ.of(x) for x in row] for row in rows]


def _conj(A, S):
    n = len(A)
    F = [[QZ.of(x).fraction() for x in row] for row in A]
    return [[QZ.of(sum(S[c][a] * F[c][d] * S[d][b] for c in range(n) for d in range(n)))
             for b in range(n)] for a in range(n)]


def test_add_on_hyperbolic_plane_keeps_gram():
    H = _qz([["0", "1/2"], ["1/2", "0"]])
    assert apply_rowcol(H, RowColOp.add(1, 1, 0)) == H


def test_op_matrices_and_json():
    assert RowColOp.flip(0, 1).matrix(2) == [[0, 1], [1, 0]]
    assert RowColOp.add(3, 1, 0).matrix(2) == [[1, 0], [3, 1]]
    assert RowColOp.scale(5, 1).matrix(2) == [[1, 0], [0, 5]]
    assert RowColOp.add(3, 1, 0).to_json() == ["add", 3, 1, 0]
    with pytest.raises(ValueError):
        RowColOp.add(1, 0, 0)
    with pytest.raises(IndexError):
        apply_rowcol(_qz([["1/2"]]), RowColOp.flip(0, 1))


def test_validity_check_cases():
    G = FinAbGroup([(2, 1), (2, 2)])
    gens = [G.gen(0), G.gen(1)]
    assert not validity_check(G, gens, RowColOp.flip(0, 1))
    assert not validity_check(G, gens, RowColOp.add(1, 1, 0))  # e_0 += e_1 raises the order
    assert validity_check(G, gens, RowColOp.add(1, 0, 1))
    assert validity_check(G, gens, RowColOp.add(2, 1, 0))  # e_0 + 2 e_1 still has order 2
    assert not validity_check(G, gens, RowColOp.scale(2, 1))
    assert validity_check(G, gens, RowColOp.scale(3, 1))


def test_unit_classes():
    assert two_adic_unit_class(3, 3) == -5
    assert two_adic_unit_class(7, 3) == -1
    assert two_adic_unit_class(3, 1) == 1
    assert two_adic_unit_class(5, 2) == 1


def test_diagonalize_odd_examples():
    S, diag = diagonalize_odd(_qz([["2/3"]]), 3)
    assert diag == [QZ(2, 3)]
    A = _qz([["0", "1/3"], ["1/3", "0"]])
    S, diag = diagonalize_odd(A, 3)
    assert sorted(d.num for d in diag) == [1, 2]
    D = _conj(A, S)
    assert D[0][1] == QZ(0) and [D[0][0], D[1][1]] == diag


def test_block_diagonalize_two_example():
    S, blocks = block_diagonalize_two(_qz([["3/8"]]))
    assert len(blocks) == 1 and blocks[0][0] == (0,)
    assert [b.name for b in wall_decompose(DiscForm(FinAbGroup([(2, 3)]), [["3/8"]])).blocks] == ["D8"]


@pytest.mark.parametrize("system,targets,n", [("a", (3, 5, 1), 3), ("b", (0, 1, 0), 4),
                                               ("a", (1, 1, 1), 6), ("b", (2, 3, 1), 5)])
def test_hensel_lift_substitutes_back(system, targets, n):
    S = hensel_lift(system, targets, n)
    s11, s12 = S[0]
    s21, s22 = S[1]
    mod = 2 ** n
    if system == "a":
        got = (s11 * s11 + s11 * s12 + s12 * s12,
               2 * s11 * s21 + s11 * s22 + s21 * s12 + 2 * s12 * s22,
               s21 * s21 + s21 * s22 + s22 * s22)
    else:
        got = (s11 * s12, s11 * s22 + s21 * s12, s21 * s22)
    assert all((g - t) % mod == 0 for g, t in zip(got, targets))
    if (system, targets) == ("b", (0, 1, 0)):
        assert [[x % 2 for x in row] for row in S] == [[0, 1], [1, 0]]


def test_hensel_lift_rejects_wrong_parity():
    with pytest.raises(ValueError):
        hensel_lift("a", (2, 1, 1), 3)
    with pytest.raises(ValueError):
        hensel_lift("b", (1, 1, 1), 3)


@pytest.mark.parametrize("gram,name", [([["1/2", "1/4"], ["1/4", "1/2"]], "F4"),
                                       ([["1/2", "1/4"], ["1/4", "0"]], "E4"),
                                       ([["0", "3/8"], ["3/8", "1/4"]], "E8")])
def test_normalize_rank2(gram, name):
    blk, S = normalize_rank2(_qz(gram))
    assert blk.name == name
    assert _conj(_qz(gram), S) == boundary(blk.quadratic()).gram


def test_example_decompositions():
    dec = wall_decompose(parse_form("A2+A2+A4+A4"))
    assert Counter(dec.block_names()) == Counter(["A2", "A2", "A4", "A4"])
    dec = wall_decompose(DiscForm(FinAbGroup([(3, 1), (3, 1)]), [["0", "1/3"], ["1/3", "0"]]))
    assert sorted(dec.block_names()) == ["A3", "B3"]


def test_decompose_rejects_degenerate():
    with pytest.raises(DegenerateFormError):
        wall_decompose(DiscForm(FinAbGroup([(2, 2)]), [["1/2"]]))


def _replay(dec):
    G = dec.group
    gens = [G.gen(i) for i in range(G.rank)]
    for op in dec.provenance:
        assert validity_check(G, gens, op), str(op)
        gens = op.apply_to_generators(G, gens)
    return gens


def check_decomposition(f):
    """Exact recomposition, op replay with validity, and consistency of the inverse basis change."""
    dec = wall_decompose(f)
    G = f.group
    X = np.array(dec.new_generators(), dtype=object).reshape(G.rank, G.rank)
    H = dec.block_form()
    sh = f.N // H.N if G.rank else 1
    assert not ((np.asarray(f.gram_nums(X), dtype=object) - np.asarray(H.B, dtype=object) * sh) % f.N).any()
    if isinstance(f, QuadForm):
        assert not ((np.asarray(f.qnums(X), dtype=object) - np.asarray(H.Q, dtype=object) * sh) % (2 * f.N)).any()
    assert _replay(dec) == dec.new_generators()
    inv = new_to_old_coords(dec)
    for i in range(G.rank):
        back = G.zero()
        for j in range(G.rank):
            back = G.add(back, G.scale(inv[i][j], dec.new_generators()[j]))
        assert back == G.gen(i)
    return dec


@given(st.integers(0, 10**6), st.sampled_from(groups_upto(256)))
def test_random_bilinear_decompositions(seed, G):
    rng = random.Random(seed)
    b = random_nondegenerate_gram(G, rng)
    if b is None:
        return
    dec = check_decomposition(b)
    if G.order <= 64:
        assert find_isometry(b, dec.block_form()) is not None


@given(st.integers(0, 10**6), st.sampled_from(groups_upto(128)))
def test_random_quadratic_decompositions(seed, G):
    rng = random.Random(seed)
    b = random_nondegenerate_gram(G, rng)
    if b is None:
        return
    check_decomposition(random_refinement(b, rng))


def test_block_names_and_ranks():
    assert IrreducibleBlock("E", 2, 3).name == "E8" and IrreducibleBlock("E", 2, 3).rank == 2
    assert IrreducibleBlock("B", 3, 2).name == "B9"
    with pytest.raises(ValueError):
        IrreducibleBlock("C", 3, 1)
    f = form_from_blocks([("F", 2, 2), ("B", 5, 1)])
    assert sorted(wall_decompose(f).block_names()) == ["B5", "F4"]
