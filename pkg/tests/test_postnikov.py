import random

import pytest

from nilfract.abelian import AbelianHom, AbelianSubgroup, FgAbelianGroup, cyclic as acyclic
from nilfract.actions import GroupAction, InvalidStructure, alpha_lower_central_series, is_trivial_action
from nilfract.arith import LocalizedRing, NumSet
from nilfract.finite_groups import cyclic, generated_subgroup, quaternion, symmetric
from nilfract.localization import localize_group
from nilfract.postnikov import (Level, PostnikovData, localize_tower, nilpotency_degree, principal_factorization,
                                validate)

from strategies import random_tower

Q8 = quaternion(8)
ONE = cyclic(1)


def level(n, G, A, chain=None):
    act = GroupAction.trivial(G, A)
    return Level(n, act, chain if chain is not None else alpha_lower_central_series(act).chain)


def tower(G, groups, pi1_chain=None):
    conj = GroupAction.conjugation(G)
    chain = pi1_chain if pi1_chain is not None else alpha_lower_central_series(conj).chain
    return PostnikovData(len(groups) + 1, G, chain, [level(n, G, A) for n, A in enumerate(groups, start=2)])


def test_validate_examples():
    x = tower(ONE, [acyclic(6), FgAbelianGroup(1, (2,)), acyclic(1)])
    assert validate(x)["valid"]
    S3 = symmetric(3)
    rep = validate(PostnikovData(1, S3, [S3.trivial(), S3.whole()]))
    assert not rep["valid"] and "pi1 is not nilpotent" in rep["levels"]["1"]
    Z4 = cyclic(4)
    x = PostnikovData(1, Z4, [Z4.trivial(), generated_subgroup(Z4, [2]), Z4.whole()])
    assert validate(x)["valid"]


def test_validate_reports_per_level():
    A = acyclic(3)
    neg = GroupAction(cyclic(2), A, (AbelianHom.identity(A), AbelianHom.multiplication(A, -1)))
    C2 = cyclic(2)
    x = PostnikovData(2, C2, [C2.trivial(), C2.whole()],
                      [Level(2, neg, [AbelianSubgroup.trivial(A), AbelianSubgroup.whole(A)])])
    rep = validate(x)
    assert not rep["valid"] and rep["levels"]["1"] == [] and rep["levels"]["2"]
    x = PostnikovData(3, C2, [C2.trivial(), C2.whole()], [])
    assert not validate(x)["valid"]
    with pytest.raises(InvalidStructure):
        nilpotency_degree(x)


def test_nilpotency_degree_examples():
    assert nilpotency_degree(tower(ONE, [])) == 0
    assert nilpotency_degree(tower(Q8, [acyclic(3)])) == 3
    assert nilpotency_degree(tower(ONE, [acyclic(2), acyclic(5), FgAbelianGroup(1)])) == 3


def test_localize_tower_examples():
    x = tower(cyclic(6), [acyclic(10)])
    assert localize_tower(x, NumSet(())) is x
    y = localize_tower(x, NumSet((2,)))
    assert y.pi1.order == 3
    assert y.level(2).group == acyclic(5, LocalizedRing((2,)))
    y = localize_tower(tower(Q8, [acyclic(6)]), NumSet((2,)))
    assert y.pi1.order == 1 and y.truncation == 2


def test_principal_factorization_examples():
    f = principal_factorization(tower(ONE, []))
    assert f.towers == () and f.total == 0
    Z4 = acyclic(4)
    C2 = cyclic(2)
    x = PostnikovData(2, C2, [C2.trivial(), C2.whole()],
                      [level(2, C2, Z4, [AbelianSubgroup.trivial(Z4), AbelianSubgroup(Z4, [(2,)]),
                                         AbelianSubgroup.whole(Z4)])])
    f = principal_factorization(x)
    t = dict(f.towers)[2]
    assert t.length == 2 and all(is_trivial_action(k) for k in t.kernels)
    assert f.round_trips(x)
    f = principal_factorization(tower(Q8, []))
    t = dict(f.towers)[1]
    assert [s.target.order for s in t.stages] == [8, 4, 1]


def test_random_towers(seed):
    rng = random.Random(seed)
    for _ in range(12):
        x = random_tower(rng)
        assert validate(x)["valid"]
        f = principal_factorization(x)
        assert f.round_trips(x) and f.total == nilpotency_degree(x)
        for s in ((2,), (3,), (2, 5)):
            y = localize_tower(x, NumSet(s))
            assert validate(y)["valid"]
            assert nilpotency_degree(y) <= nilpotency_degree(x)
            for old, new in zip(x.levels, y.levels):
                assert new.group == localize_group(old.group, NumSet(s)).localized


def test_tower_localization_merges(seed):
    rng = random.Random(seed + 9)
    for _ in range(8):
        x = random_tower(rng)
        twice = localize_tower(localize_tower(x, NumSet((2,))), NumSet((3,)))
        once = localize_tower(x, NumSet((2, 3)))
        assert twice.pi1.order == once.pi1.order
        assert [l.group for l in twice.levels] == [l.group for l in once.levels]
