import itertools
from collections import Counter

import pytest

from nilfract.actions import is_trivial_action
from nilfract.finite_groups import (FiniteGroup, FiniteHom, ShortExactSequence, Subgroup, abelian,
                                    abelian_invariants, alternating, are_isomorphic, center, cyclic,
                                    dihedral, direct_product, generated_subgroup, hall_subgroup,
                                    homomorphisms, is_central_extension, is_nilpotent, is_normal_inclusion,
                                    kernel_conjugation_action, library, lower_central_series, quaternion,
                                    quotient, sylow_decomposition, symmetric, NotNilpotentError)
from nilfract.abelian import FgAbelianGroup

S3 = symmetric(3)
Q8 = quaternion(8)
D4 = dihedral(8)


def _perm(G, label):
    return G.labels.index(label)


def _order_profile(G):
    return Counter(G.element_order(x) for x in G.elements)


def test_library_validates():
    for name, G in library(64).items():
        assert G.validate() == [], name


def test_cayley_validator_rejects():
    with pytest.raises(ValueError):
        FiniteGroup(((0, 1), (1, 1)))
    # a Latin square that is not associative
    t = ((0, 1, 2, 3, 4), (1, 0, 3, 4, 2), (2, 4, 0, 1, 3), (3, 2, 4, 0, 1), (4, 3, 1, 2, 0))
    assert FiniteGroup(t).validate()


def test_normal_inclusions():
    Z, incl = center(Q8).as_group()
    assert is_normal_inclusion(incl)
    A = abelian([2, 6])
    for S in (generated_subgroup(A, [x]) for x in A.elements):
        assert is_normal_inclusion(S.as_group()[1])
    T, incl = generated_subgroup(S3, [_perm(S3, "213")]).as_group()
    assert not is_normal_inclusion(incl)


def test_quotients():
    V, p = quotient(Q8, center(Q8))
    assert V.order == 4 and all(V.element_order(x) <= 2 for x in V.elements)
    assert set(p.kernel().elements) == set(center(Q8).elements)
    for G in (Q8, S3, cyclic(6)):
        Q, _ = quotient(G, G.trivial())
        assert are_isomorphic(Q, G) is not None
        Q, _ = quotient(G, G.whole())
        assert Q.order == 1
    with pytest.raises(ValueError):
        quotient(S3, generated_subgroup(S3, [_perm(S3, "213")]))


def _sign(G):
    Z2 = cyclic(2)
    for f in homomorphisms(G, Z2):
        if f.is_surjective():
            return f


def test_kernel_conjugation_action():
    G = Q8
    to_one = FiniteHom(G, cyclic(1), (0,) * G.order)
    a = kernel_conjugation_action(to_one)
    assert a.target.order == 8
    assert all(a.act(g, x) == G.conj(g, x) for g in G.elements for x in G.elements)
    _, p = quotient(Q8, center(Q8))
    assert is_trivial_action(kernel_conjugation_action(p))
    a = kernel_conjugation_action(_sign(S3))
    assert a.target.order == 3 and not is_trivial_action(a)


def test_kernel_action_is_left_action():
    # (g h) . l = g . (h . l): the left-conjugation convention
    a = kernel_conjugation_action(_sign(S3))
    G = S3
    for g, h in itertools.product(G.elements, repeat=2):
        for l in a.target.elements:
            assert a.act(G.mul(g, h), l) == a.act(g, a.act(h, l))


def test_central_extensions():
    Z, i = center(Q8).as_group()
    _, q = quotient(Q8, center(Q8))
    assert is_central_extension(ShortExactSequence(i, q))
    A3 = generated_subgroup(S3, [_perm(S3, "231")])
    K, i = A3.as_group()
    assert not is_central_extension(ShortExactSequence(i, _sign(S3)))
    A, B = cyclic(4), cyclic(3)
    AB = direct_product(A, B)
    inc = FiniteHom(A, AB, tuple(a * B.order for a in A.elements))
    pr = FiniteHom(AB, B, tuple(x % B.order for x in AB.elements))
    assert is_central_extension(ShortExactSequence(inc, pr))
    with pytest.raises(ValueError):
        ShortExactSequence(FiniteHom.identity(cyclic(2)), FiniteHom.identity(cyclic(2)))


def test_kernel_action_trivial_iff_central():
    for G in (Q8, D4, S3, alternating(4), direct_product(S3, cyclic(2))):
        for f in itertools.islice(homomorphisms(G, cyclic(2)), 8):
            K = f.kernel()
            central = set(K.elements) <= set(center(G).elements)
            assert is_trivial_action(kernel_conjugation_action(f)) == central


def test_lower_central_series():
    assert [S.order for S in lower_central_series(cyclic(6))] == [6, 1]
    lcs = lower_central_series(Q8)
    assert [S.order for S in lcs] == [8, 2, 1]
    assert lcs[1] == center(Q8)
    lcs = lower_central_series(S3)
    assert [S.order for S in lcs] == [6, 3]
    assert is_nilpotent(cyclic(6)) and is_nilpotent(Q8) and not is_nilpotent(S3)


def test_lcs_is_central_series():
    for name, G in library(64).items():
        if not is_nilpotent(G):
            continue
        lcs = lower_central_series(G)
        for hi, lo in zip(lcs, lcs[1:]):
            # [G, hi] <= lo means hi/lo is central in G/lo
            assert all(G.commutator(g, x) in lo for g in G.elements for x in hi.elements), name


def test_sylow():
    parts = sylow_decomposition(cyclic(12))
    assert [(p, S.order) for p, S in parts] == [(2, 4), (3, 3)]
    assert are_isomorphic(parts[0][1].as_group()[0], cyclic(4)) is not None
    assert [(p, S.order) for p, S in sylow_decomposition(Q8)] == [(2, 8)]
    assert sylow_decomposition(cyclic(1)) == []
    with pytest.raises(NotNilpotentError):
        sylow_decomposition(S3)


def test_nilpotent_iff_sylow_reassembles():
    for name, G in library(48).items():
        try:
            parts = sylow_decomposition(G)
        except NotNilpotentError:
            assert not is_nilpotent(G), name
            continue
        assert is_nilpotent(G)
        P = cyclic(1)
        for _, S in parts:
            P = direct_product(P, S.as_group()[0])
        assert are_isomorphic(P, G) is not None, name


def test_hall_subgroup():
    G = direct_product(Q8, cyclic(3))
    assert hall_subgroup(G, [3]).order == 3
    assert hall_subgroup(G, [2]).order == 8
    assert hall_subgroup(G, []).order == 1


def test_isomorphism():
    f = are_isomorphic(cyclic(6), direct_product(cyclic(2), cyclic(3)))
    assert f is not None and f.is_isomorphism()
    assert are_isomorphic(Q8, D4) is None
    assert _order_profile(Q8) != _order_profile(D4)
    for G in (Q8, S3, abelian([2, 4])):
        assert are_isomorphic(G, G).is_isomorphism()
    big = cyclic(65)
    with pytest.raises(ValueError):
        are_isomorphic(big, big)


def test_isomorphism_against_invariants():
    # two finite abelian groups are isomorphic iff their element-order profiles agree
    orders = [[2, 2, 2], [2, 4], [8], [4, 2], [3, 3], [9], [2, 6], [12], [2, 2, 3]]
    for a, b in itertools.product(orders, repeat=2):
        A, B = abelian(a), abelian(b)
        iso = are_isomorphic(A, B) is not None
        assert iso == (_order_profile(A) == _order_profile(B))


def test_abelian_invariants():
    assert abelian_invariants(abelian([4, 6])) == FgAbelianGroup(0, (2, 12))
    assert abelian_invariants(cyclic(1)) == FgAbelianGroup()


def test_homomorphism_counts():
    # |Hom(Z/m, G)| = number of x with x^m = e
    for G in (Q8, S3, D4):
        for m in (1, 2, 3, 4):
            expect = sum(1 for x in G.elements if G.power(x, m) == G.identity)
            assert sum(1 for _ in homomorphisms(cyclic(m), G)) == expect


def test_subgroup_closure_validated():
    with pytest.raises(ValueError):
        Subgroup(S3, (0, _perm(S3, "231")))
