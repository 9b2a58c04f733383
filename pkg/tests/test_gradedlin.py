"""Tests for graded linear algebra utilities.

Linear-algebra answers are checked against hand-computed oracles;
sign and combinatorics invariants are property-tested.
"""

import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linfkit.gradedlin import (CapError, GradedMap, GradedSpace,
                               canonical_word, cohomology, complement_in,
                               dumps_canonical, euler_check, in_span,
                               koszul_sign, matrix_rank, nullspace, rref,
                               scalar_from_str, scalar_to_str, solve_canonical,
                               split_sign, sym_words, unshuffles, vec_add,
                               vec_scale, word_degree)


def test_scalar_roundtrip():
    for s in ["0", "1", "-3", "5/7", "-22/7"]:
        assert scalar_to_str(scalar_from_str(s)) == s
    assert scalar_from_str("4/8") == F(1, 2)
    with pytest.raises(ValueError):
        scalar_from_str("1/0")


def test_rref_and_rank_oracle():
    # hand oracle: rank 2, rref has pivots in columns 0 and 1
    m = [[F(1), F(2), F(3)], [F(2), F(4), F(7)], [F(1), F(2), F(4)]]
    red, pivots = rref(m)
    assert matrix_rank(m) == 2
    assert pivots == [0, 2]
    assert red[0] == [F(1), F(2), F(0)]
    assert red[1] == [F(0), F(0), F(1)]


def test_nullspace_oracle():
    m = [[F(1), F(2), F(3)]]
    ns = nullspace(m, ncols=3)
    assert len(ns) == 2
    for v in ns:
        assert sum(a * b for a, b in zip(m[0], v)) == 0


def test_solve_canonical():
    m = [[F(1), F(1)], [F(0), F(0)]]
    # consistent underdetermined: canonical solution zeroes free vars
    assert solve_canonical(m, [F(3), F(0)], ncols=2) == [F(3), F(0)]
    # inconsistent
    assert solve_canonical(m, [F(0), F(1)], ncols=2) is None


def test_solve_sparse_matches_dense():
    """The sparse solver must return exactly the dense canonical
    solution (same pivot columns, free variables zero)."""
    import random
    from linfkit.gradedlin import solve_sparse
    rng = random.Random(3)
    for _ in range(150):
        n = rng.randint(0, 7)
        m = rng.randint(0, 9)
        rows = [[F(rng.choice([0, 0, 0, 1, -1, 2])) for _ in range(n)]
                for _ in range(m)]
        rhs = [F(rng.choice([0, 0, 1, -1])) for _ in range(m)]
        dense = solve_canonical(rows, rhs, ncols=n)
        sparse = solve_sparse([{j: v for j, v in enumerate(r) if v}
                               for r in rows], rhs, ncols=n)
        assert dense == sparse


def test_in_span_and_complement():
    vs = [[F(1), F(0), F(1)], [F(0), F(1), F(0)]]
    assert in_span(vs, [F(2), F(3), F(2)])
    assert not in_span(vs, [F(0), F(0), F(1)])
    amb = [[F(1), F(0)], [F(0), F(1)]]
    comp = complement_in(amb, [[F(1), F(1)]])
    assert len(comp) == 1


def test_koszul_sign_basics():
    # swapping two odd elements flips the sign
    assert koszul_sign([1, 1], [1, 0]) == -1
    # swapping odd past even costs nothing
    assert koszul_sign([1, 0], [1, 0]) == 1
    assert koszul_sign([0, 0, 0], [2, 0, 1]) == 1


@given(st.permutations(range(5)),
       st.lists(st.integers(min_value=0, max_value=3), min_size=5,
                max_size=5))
def test_koszul_sign_involution(perm, degs):
    # applying a permutation then its inverse restores sign 1
    perm = list(perm)
    inv = [0] * 5
    for i, p in enumerate(perm):
        inv[p] = i
    s1 = koszul_sign(degs, perm)
    degs_permuted = [degs[p] for p in perm]
    s2 = koszul_sign(degs_permuted, inv)
    assert s1 * s2 == 1


def test_unshuffle_counts_and_cap():
    for k in range(0, 7):
        for i in range(0, k + 1):
            assert len(unshuffles(i, k)) == math.comb(k, i)
    with pytest.raises(CapError):
        unshuffles(6, 13)


def test_canonical_word_and_odd_squares():
    S = GradedSpace([("a", 0), ("b", 1), ("c", 1)])
    w, s = canonical_word(S, ("c", "b", "a"))
    assert w == ("a", "b", "c") and s == -1
    w, s = canonical_word(S, ("b", "b"))
    assert w is None and s == 0
    # even generators repeat freely
    w, s = canonical_word(S, ("a", "a"))
    assert w == ("a", "a") and s == 1


def test_sym_words_count():
    S = GradedSpace([("a", 0), ("b", 1), ("c", 1)])
    # arity 2: aa, ab, ac, bc  (bb and cc vanish)
    assert len(sym_words(S, 2)) == 4
    assert word_degree(S, ("a", "b", "c")) == 2


def test_split_sign_matches_koszul():
    S = GradedSpace([("x", 1), ("y", 1), ("z", 1)])
    w = ("x", "y", "z")
    # splitting (positions 1,2 | 0) reorders odd letters
    assert split_sign(S, w, (1, 2), (0,)) == koszul_sign([1, 1, 1],
                                                         [1, 2, 0])


def test_cohomology_oracle():
    # 0 -> k a -> k b (+) k c -> 0 with d(a) = b: H^0 = 0, H^1 = <c>
    S = GradedSpace([("a", 0), ("b", 1), ("c", 1)])
    d = GradedMap(S, S, 1, {("a", "b"): F(1)})
    H = cohomology(d)
    assert H[0]["dim"] == 0
    assert H[1]["dim"] == 1
    assert euler_check(S, H)


def test_cohomology_rejects_nonsquarezero():
    S = GradedSpace([("a", 0), ("b", 1), ("c", 2)])
    d = GradedMap(S, S, 1, {("a", "b"): F(1), ("b", "c"): F(1)})
    with pytest.raises(Exception):
        cohomology(d)


def test_vec_helpers_and_canonical_dump():
    v = vec_add({"a": F(1)}, vec_scale(F(-1), {"a": F(1), "b": F(2)}))
    assert v == {"b": F(-2)}
    d1 = dumps_canonical({"b": 1, "a": [2, 3]})
    d2 = dumps_canonical({"a": [2, 3], "b": 1})
    assert d1 == d2 and d1.endswith("\n")


def test_graded_space_json_roundtrip():
    S = GradedSpace([("a", 0), ("b", -2)])
    S2 = GradedSpace.from_json(S.to_json())
    assert S == S2
    m = GradedMap(S, S, 2, {("b", "a"): F(3, 2)})
    m2 = GradedMap.from_json(m.to_json(), source=S, target=S)
    assert m2.entries == m.entries and m2.shift == 2
