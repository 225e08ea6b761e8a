import random
from math import gcd

import pytest
from hypothesis import given, strategies as st

from nilfract.abelian import FgAbelianGroup, cyclic as acyclic, finite_abelian_groups
from nilfract.actions import GroupAction, alpha_lower_central_series
from nilfract.arith import NumSet
from nilfract.finite_groups import cyclic, direct_product, quaternion
from nilfract.fracture import (CoprimalityError, FractureFamilies, bezout, bezout_matrices, fracture_colimit_row_check,
                               fracture_nilpotent_group, fracture_postnikov, fracture_square_abelian,
                               mult_square_pullback)
from nilfract.postnikov import Level, PostnikovData

from oracles import extended_gcd_bezout

Z = FgAbelianGroup(1)


def fams(r, s):
    return FractureFamilies(NumSet(tuple(r)), NumSet(tuple(s)))


def test_bezout_examples():
    assert bezout(3, 5) == (2, -1)
    assert bezout(4, 9) == (-2, 1)
    for k in range(2, 30):
        assert bezout(1, k) == (1, 0)
    with pytest.raises(ValueError):
        bezout(4, 6)


def test_bezout_one_one():
    # alpha = 0 is the representative of least absolute value here
    assert bezout(1, 1) == (0, 1)


def test_bezout_against_modular_inverse():
    for n in range(1, 101):
        for m in range(1, 101):
            if gcd(n, m) != 1:
                continue
            a, b = bezout(n, m)
            assert a * n + b * m == 1
            assert (a, b) == extended_gcd_bezout(n, m)
            m1, m2 = bezout_matrices(n, m)
            prod = [[sum(m1[i][k] * m2[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
            assert prod == [[1, 0], [0, 1]]


def test_mult_square_examples():
    c = mult_square_pullback(Z, 2, 3)
    assert c.passed and c.verify()
    assert c.bezout[0]["matrices"][0][0] == [2, -3]
    for A in (Z, acyclic(6), FgAbelianGroup(1, (4,))):
        c = mult_square_pullback(A, 1, 1)
        assert c.passed and c.verify()
    c = mult_square_pullback(acyclic(35), 2, 3)
    assert c.passed and c.verify()
    assert len(c.comparison["table"]) == 35
    with pytest.raises(ValueError):
        mult_square_pullback(Z, 2, 4)


def _brute_pullback(A, n, m):
    elems = list(A.elements())
    return {(x, y) for x in elems for y in elems if A.scale(n, x) == A.scale(m, y)}


def test_mult_square_against_brute_force(seed):
    rng = random.Random(seed)
    groups = finite_abelian_groups(40)
    for _ in range(30):
        A = rng.choice(groups)
        n, m = rng.randint(1, 12), rng.randint(1, 12)
        if gcd(n, m) != 1:
            continue
        c = mult_square_pullback(A, n, m)
        pairs = _brute_pullback(A, n, m)
        assert len(pairs) == A.order()
        table = {tuple(tuple(p) for p in v) for _, v in c.comparison["table"]}
        assert table == pairs


def test_certificate_tamper_detected():
    c = mult_square_pullback(acyclic(12), 5, 7)
    assert c.verify()
    c.inverse["table"][0][1] = [(c.inverse["table"][0][1][0] + 1) % 12]
    assert not c.verify()


def test_families():
    f = fams([2, 4], [3])
    assert f.T.entries == (6, 12)
    for n in range(6):
        assert f.t(n) == f.r(n) * f.s(n)
        assert f.rho(n) == (f.rho(n - 1) if n else 1) * f.r(n)
        assert f.sigma(n) == (f.sigma(n - 1) if n else 1) * f.s(n)
    with pytest.raises(CoprimalityError) as e:
        fams([2], [2])
    assert e.value.pair == (0, 0)
    with pytest.raises(CoprimalityError) as e:
        fams([3, 5], [2, 7, 10])
    assert e.value.pair == (1, 2)


def test_fracture_square_examples():
    c = fracture_square_abelian(acyclic(6), fams([2], [3]))
    assert c.passed and c.verify()
    assert str(c.groups["left"]) == "Z/3" and str(c.groups["right"]) == "Z/2" and c.groups["corner"].is_trivial
    c = fracture_square_abelian(Z, fams([2], [3]))
    assert c.passed and c.verify() and c.sampled
    assert str(c.groups["corner"]) == "Z[1/6]"
    c = fracture_square_abelian(FgAbelianGroup(), fams([2], [3]))
    assert c.passed and c.verify()


def test_fracture_prime_outside_both():
    # the 7-part survives in every corner and the square is still a pullback
    c = fracture_square_abelian(acyclic(2 * 3 * 7), fams([2], [3]))
    assert c.passed
    assert all(G.order() % 7 == 0 for k, G in c.groups.items())


def test_fracture_square_all_small(seed):
    splits = [([2], [3]), ([2, 4], [5, 15]), ([6], [35]), ([7], [2, 3])]
    for A in finite_abelian_groups(60):
        for r, s in splits:
            c = fracture_square_abelian(A, fams(r, s))
            assert c.passed and c.verify(), (str(A), r, s)


def test_colimit_row_examples():
    rep = fracture_colimit_row_check(acyclic(5), fams([2], [3]), 2)
    assert rep["passed"]
    assert all(c["passed"] for c in rep["columns"])
    assert fracture_colimit_row_check(FgAbelianGroup(), fams([2], [3]), 2)["passed"]
    with pytest.raises(ValueError):
        fracture_colimit_row_check(acyclic(5), fams([2], [3]), 0)
    assert fracture_colimit_row_check(FgAbelianGroup(1, (12,)), fams([2], [3, 5]), 4)["passed"]


def test_nilpotent_group_fracture():
    G = direct_product(quaternion(8), cyclic(3))
    rep = fracture_nilpotent_group(G, fams([2], [3]))
    assert rep["passed"] and rep["corners"] == {"left": 3, "right": 8, "corner": 1}


def _simple_tower(pi1, groups):
    conj = GroupAction.conjugation(pi1)
    levels = []
    for n, A in enumerate(groups, start=2):
        act = GroupAction.trivial(pi1, A)
        levels.append(Level(n, act, alpha_lower_central_series(act).chain))
    return PostnikovData(len(groups) + 1, pi1, alpha_lower_central_series(conj).chain, levels)


def test_fracture_postnikov_examples():
    x = _simple_tower(cyclic(6), [acyclic(10)])
    rep = fracture_postnikov(x, fams([2], [15]))
    assert rep["passed"]
    assert rep["levels"][0]["certificate"]["corners"] == {"left": 3, "right": 2, "corner": 1}
    assert fracture_postnikov(_simple_tower(cyclic(1), []), fams([2], [3]))["passed"]
    with pytest.raises(CoprimalityError) as e:
        fracture_postnikov(x, fams([2], [2]))
    assert e.value.pair == (0, 0)


@given(st.lists(st.sampled_from([2, 4, 8, 5, 25, 10]), min_size=1, max_size=3),
       st.lists(st.sampled_from([3, 9, 7, 21, 1]), min_size=1, max_size=3))
def test_fracture_square_property(r, s):
    for A in (FgAbelianGroup(1, (2, 30)), acyclic(84)):
        c = fracture_square_abelian(A, fams(r, s))
        assert c.passed and c.verify()
