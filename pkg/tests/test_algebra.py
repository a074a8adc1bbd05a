import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from groupsys import algebra
from groupsys.algebra import (
    ElementSet,
    SubgroupChain,
    builtin_group,
    chain_decompose,
    check_homomorphism,
    cyclic_group,
    direct_product,
    format_group,
    is_normal,
    is_subgroup,
    klein_four,
    parse_group,
    quotient,
    set_product,
    symmetric_group,
    transversal,
    validate_group,
)
from groupsys.errors import FormatError, MissingInverse, NoIdentityAtZero, NotAssociative, NotNormal

# a Latin square with identity that is not a group: every element squares
# to the identity, impossible in the only group of order 5
LOOP5 = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 4, 0, 1, 3],
    [3, 2, 4, 0, 1],
    [4, 3, 1, 2, 0],
]

GROUPS = [cyclic_group(n) for n in (1, 2, 3, 4, 6, 8)] + [klein_four(), symmetric_group(3),
                                                          direct_product(symmetric_group(3), cyclic_group(2))]


def relabel(table, perm):
    """Conjugate a table by a permutation of the labels (perm[0] == 0)."""
    T = np.asarray(table)
    inv = np.argsort(perm)
    return np.asarray(perm)[T[np.ix_(inv, inv)]]


@st.composite
def relabelings(draw, n):
    rest = draw(st.permutations(list(range(1, n))))
    return [0] + list(rest)


def test_builtin_orders():
    assert [builtin_group(n).order for n in ("1", "Z2", "Z3", "Z4", "V4", "S3", "Z7")] == [1, 2, 3, 4, 4, 6, 7]
    assert builtin_group("Q8") is None
    assert not symmetric_group(3).is_abelian()
    assert klein_four().is_abelian()


def test_rejects_each_axiom():
    with pytest.raises(NoIdentityAtZero):
        validate_group([[1, 0], [0, 1]])
    with pytest.raises(MissingInverse):
        validate_group([[0, 1, 2], [1, 1, 2], [2, 2, 0]])
    with pytest.raises(NotAssociative, match=r"\(.*\)"):
        validate_group(LOOP5)
    with pytest.raises(FormatError):
        validate_group([[0, 1]])


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_both_associativity_routes_agree(data):
    G = data.draw(st.sampled_from(GROUPS))
    perm = data.draw(relabelings(G.order))
    T = relabel(G.table, perm)
    L = relabel(LOOP5, data.draw(relabelings(5)))
    brute = algebra.BRUTE_FORCE_LIMIT
    try:
        results = []
        for limit in (brute, 0):
            algebra.BRUTE_FORCE_LIMIT = limit
            results.append((algebra._find_nonassociative(T), algebra._find_nonassociative(L) is not None))
    finally:
        algebra.BRUTE_FORCE_LIMIT = brute
    assert results[0][0] is None and results[1][0] is None
    assert results[0][1] and results[1][1]


def test_light_route_witness_is_real():
    brute = algebra.BRUTE_FORCE_LIMIT
    algebra.BRUTE_FORCE_LIMIT = 0
    try:
        a, b, c = algebra._find_nonassociative(np.array(LOOP5))
    finally:
        algebra.BRUTE_FORCE_LIMIT = brute
    T = np.array(LOOP5)
    assert T[T[a, b], c] != T[a, T[b, c]]


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_relabeled_groups_stay_groups(data):
    G = data.draw(st.sampled_from(GROUPS))
    H = validate_group(relabel(G.table, data.draw(relabelings(G.order))))
    assert H.order == G.order
    assert all(H.mul(a, H.inv(a)) == 0 for a in range(H.order))


def test_direct_product_layout():
    P = direct_product(cyclic_group(2), cyclic_group(3))
    assert P.order == 6 and P.is_abelian()
    # (1,0) * (0,1) = (1,1) -> index 1*3+1
    assert P.mul(3, 1) == 4


def _order2_elements(G):
    return [g for g in range(1, G.order) if G.mul(g, g) == 0]


def test_quotient_and_normality():
    S3 = symmetric_group(3)
    A3 = ElementSet.of(S3, [g for g in range(S3.order) if S3.mul(S3.mul(g, g), g) == 0])
    assert len(A3) == 3 and is_normal(A3)
    Q = quotient(S3, A3)
    assert Q.order == 2
    assert sorted(len(c) for c in Q.cosets) == [3, 3]
    assert check_homomorphism(Q.projection, S3, Q.quotient)
    assert Q.reps == tuple(c.members[0] for c in Q.cosets)
    t = _order2_elements(S3)[0]
    H = ElementSet.of(S3, [0, t])
    assert is_subgroup(H) and not is_normal(H)
    with pytest.raises(NotNormal):
        quotient(S3, H)
    assert len(set_product(H, A3)) == 6


def test_transversal_is_least_members():
    V = klein_four()
    H = ElementSet.of(V, [0, 1])
    assert transversal(V.whole(), H) == [0, 2]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 5))
def test_chain_decompose_inverts_product(b):
    S3 = symmetric_group(3)
    A3 = ElementSet.of(S3, [g for g in range(6) if S3.mul(S3.mul(g, g), g) == 0])
    chain = SubgroupChain(S3, (S3.trivial(), A3, S3.whole()))
    reps = [[0], transversal(A3, S3.trivial()), transversal(S3.whole(), A3)]
    parts = chain_decompose(b, chain, reps)
    assert S3.product(parts) == b
    # uniqueness: exactly one choice per level reproduces b
    hits = [p for p in itertools.product(reps[2], reps[1]) if S3.product(p) == b]
    assert hits == [tuple(parts)]


def test_group_file_round_trip():
    G = symmetric_group(3)
    H = parse_group(format_group(G))
    assert H.same_table(G) and H.name == G.name
    with pytest.raises(FormatError, match=":3:"):
        parse_group("group X\norder 2\ntbl\n", "x.group")
