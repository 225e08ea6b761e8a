import random

import pytest
from hypothesis import given, strategies as st

from nilfract.abelian import (AbelianHom, AbelianSubgroup, FgAbelianGroup, cyclic as acyclic, finite_abelian_groups, is_short_exact)
from nilfract.actions import GroupAction, InvalidStructure, NilpotentStructure, alpha_lower_central_series, is_trivial_action
from nilfract.arith import LocalizedRing, NumSet
from nilfract.finite_groups import (FiniteHom, center, cyclic, from_abelian, homomorphisms, is_nilpotent, library, quaternion, symmetric, sylow_decomposition, NotNilpotentError)
from nilfract.localization import (initiality_check, is_local_group, localize_abelian, localize_action, localize_finite_nilpotent, localize_structure, sequential_colimit_mult)

Q8 = quaternion(8)
Z = FgAbelianGroup(1)


def test_numset():
    with pytest.raises(ValueError):
        NumSet((0,))
    with pytest.raises(ValueError):
        NumSet((-2,))
    assert NumSet((12, 1, 10)).prime_set == (2, 3, 5)
    assert NumSet(()).prime_set == ()


def test_is_local_examples():
    assert is_local_group(acyclic(5), NumSet((2, 3)))
    assert not is_local_group(Z, NumSet((2,)))
    for G in (Z, acyclic(6), Q8, symmetric(3)):
        assert is_local_group(G, NumSet((1,)))
    assert is_local_group(FgAbelianGroup(1, (5,), LocalizedRing((2, 3))), NumSet((6,)))


def test_is_local_matches_power_maps():
    # decision from invariants agrees with the element-level definition
    for A in finite_abelian_groups(40):
        F, _ = from_abelian(A)
        for s in ((2,), (3,), (2, 3), (5,), (4,), (6,), (7,)):
            S = NumSet(s)
            brute = all(len({F.power(x, k) for x in F.elements}) == F.order for k in s)
            assert is_local_group(A, S) == brute == is_local_group(F, S)


def test_localize_abelian_examples():
    r = localize_abelian(acyclic(6), NumSet((2,)))
    assert r.localized == acyclic(3, LocalizedRing((2,)))
    assert [r.unit(x) for x in acyclic(6).elements()] == [(x % 3,) for x in range(6)]
    A = FgAbelianGroup(1, (2, 12))
    r = localize_abelian(A, NumSet(()))
    assert r.localized == A and r.unit == AbelianHom.identity(A)
    assert localize_abelian(acyclic(6), NumSet((6,))).localized.is_trivial


def test_localize_abelian_free_part():
    r = localize_abelian(FgAbelianGroup(2, (4, 36)), NumSet((3, 10)))
    assert r.localized == FgAbelianGroup(2, (), LocalizedRing((2, 3, 5)))
    assert r.verify(NumSet((3, 10)))


def test_initiality_small_examples():
    res = initiality_check(acyclic(6), NumSet((2,)), acyclic(9))
    assert res["bijective"] and res["hom_from_source"] == 3
    with pytest.raises(ValueError):
        initiality_check(acyclic(6), NumSet((2,)), acyclic(4))


def test_localize_finite_nilpotent_examples():
    r = localize_finite_nilpotent(cyclic(12), NumSet((2,)))
    assert r.localized.order == 3
    r = localize_finite_nilpotent(Q8, NumSet((3,)))
    assert r.localized == Q8 and r.unit == FiniteHom.identity(Q8)
    assert localize_finite_nilpotent(Q8, NumSet((2,))).localized.order == 1
    with pytest.raises(NotNilpotentError):
        localize_finite_nilpotent(symmetric(3), NumSet((2,)))


def test_power_map_coherence_and_locality():
    for name, G in library(48).items():
        if not is_nilpotent(G):
            continue
        parts = sylow_decomposition(G)
        for s in ((2,), (3,), (2, 3), (5,), ()):
            S = NumSet(s)
            r = localize_finite_nilpotent(G, S)
            expect = 1
            for p, P in parts:
                if p not in s:
                    expect *= P.order
            assert r.localized.order == expect
            assert is_local_group(r.localized, S)
            assert r.unit.is_surjective()


def test_nilpotent_initiality_brute_force():
    # Hom(G_S, L) -> Hom(G, L) is a bijection for small S-local nilpotent L
    lib = library(16)
    sources = [G for G in lib.values() if is_nilpotent(G) and G.order <= 16]
    for s in ((2,), (3,)):
        S = NumSet(s)
        targets = [L for L in lib.values() if is_nilpotent(L) and L.order <= 9 and is_local_group(L, S)]
        for G in sources[::3]:
            r = localize_finite_nilpotent(G, S)
            for L in targets:
                down = {tuple(f.images[y] for y in r.unit.images) for f in homomorphisms(r.localized, L)}
                assert down == {f.images for f in homomorphisms(G, L)}
                assert len(down) == sum(1 for _ in homomorphisms(r.localized, L))


def test_idempotence_and_merging():
    for A in finite_abelian_groups(60)[::5] + [FgAbelianGroup(2, (6,))]:
        for s in ((2,), (3, 5), (6,)):
            S = NumSet(s)
            r = localize_abelian(A, S)
            again = localize_abelian(r.localized, S)
            assert again.localized == r.localized
            assert again.unit == AbelianHom.identity(r.localized)
            merged = localize_abelian(localize_abelian(A, NumSet((2,))).localized, S)
            assert merged.localized == localize_abelian(A, NumSet((2,) + s)).localized


@given(st.lists(st.integers(1, 30), min_size=1, max_size=4), st.integers(1, 4))
def test_multiplicity_irrelevant(entries, times):
    A = FgAbelianGroup(1, (2, 60))
    base = localize_abelian(A, NumSet(tuple(entries))).localized
    assert localize_abelian(A, NumSet(tuple(entries * times))).localized == base
    primes = NumSet(tuple(entries)).prime_set
    assert localize_abelian(A, NumSet(primes or (1,))).localized == base


def test_localize_action_examples():
    A = FgAbelianGroup(1, (12,))
    loc = localize_action(GroupAction.trivial(cyclic(6), A), NumSet((2,)))
    assert is_trivial_action(loc.action)
    assert loc.action.actor.order == 3 and loc.action.target == FgAbelianGroup(1, (3,), LocalizedRing((2,)))
    neg3 = GroupAction(cyclic(2), acyclic(3), (AbelianHom.identity(acyclic(3)), AbelianHom.multiplication(acyclic(3), -1)))
    with pytest.raises(InvalidStructure):
        localize_action(neg3, NumSet((2,)))
    Z8 = acyclic(8)
    five = GroupAction(cyclic(2), Z8, (AbelianHom.identity(Z8), AbelianHom.multiplication(Z8, 5)))
    loc = localize_action(five, NumSet((2,)))
    assert loc.action.actor.order == 1 and loc.action.target.is_trivial


def test_localize_action_commutes_random(seed):
    from strategies import action_pool
    rng = random.Random(seed)
    pool = [a for a in action_pool() if alpha_lower_central_series(a) is not None]
    for a in rng.sample(pool, 20):
        for s in ((2,), (3,), (2, 3)):
            loc = localize_action(a, NumSet(s))
            assert loc.commutes(a)


def test_localize_structure_examples():
    Z6 = acyclic(6)
    triv = GroupAction.trivial(cyclic(1), Z6)
    st_ = NilpotentStructure(triv, [AbelianSubgroup.trivial(Z6), AbelianSubgroup.whole(Z6)])
    out = localize_structure(st_, NumSet(()))
    assert out.length == 1 and out.action.target == Z6
    st_ = NilpotentStructure(triv, [AbelianSubgroup.trivial(Z6), AbelianSubgroup(Z6, [(3,)]), AbelianSubgroup.whole(Z6)])
    out = localize_structure(st_, NumSet((3,)))
    assert out.length == 1 and out.action.target == acyclic(2, LocalizedRing((3,)))
    conj = GroupAction.conjugation(Q8)
    out = localize_structure(NilpotentStructure(conj, [Q8.trivial(), center(Q8), Q8.whole()]), NumSet((2,)))
    assert out.length == 0 and out.action.target.order == 1


def test_localize_structure_random(seed):
    from strategies import action_pool, random_structure
    rng = random.Random(seed + 2)
    pool = action_pool()
    for _ in range(30):
        st_ = random_structure(rng, pool)
        for s in ((2,), (3,), (5,)):
            out = localize_structure(st_, NumSet(s))
            assert out.length <= st_.length
            NilpotentStructure(out.action, list(out.chain))


def _random_ses(rng, groups):
    """Random short exact sequence K -> B -> B/K of finite abelian groups."""
    B = rng.choice(groups)
    elems = list(B.elements())
    gens = [rng.choice(elems) for _ in range(rng.randint(0, 2))]
    sub = AbelianSubgroup(B, gens)
    K, i = sub.inclusion()
    from nilfract.abelian import cokernel
    Q, q = cokernel(i)
    return i, q


def test_exactness_preserved(seed):
    rng = random.Random(seed)
    groups = finite_abelian_groups(48)
    for _ in range(60):
        i, q = _random_ses(rng, groups)
        assert is_short_exact(i, q)
        for s in ((2,), (3,), (2, 3), (5, 7)):
            S = NumSet(s)
            lk, lb, lq = (localize_abelian(G, S) for G in (i.domain, i.codomain, q.codomain))
            # induced maps: eta_B o i = i_S o eta_K determines i_S on generators
            iS = _induced(i, lk, lb)
            qS = _induced(q, lb, lq)
            assert is_short_exact(iS, qS)


def _induced(f, lsrc, ldst):
    cols = []
    for j in range(lsrc.localized.ngens):
        x = next(x for x in f.domain.elements() if lsrc.unit(x) == lsrc.localized.generator(j))
        cols.append(ldst.unit(f(x)))
    h = AbelianHom.from_columns(lsrc.localized, ldst.localized, cols)
    assert h.compose(lsrc.unit) == ldst.unit.compose(f)
    return h


def test_sequential_colimit_examples():
    assert sequential_colimit_mult(Z, [2, 2, 2]) == localize_abelian(Z, NumSet((2,))).localized
    assert sequential_colimit_mult(acyclic(3), [2]) == acyclic(3, LocalizedRing((2,)))
    A = FgAbelianGroup(1, (2, 12))
    assert sequential_colimit_mult(A, [1]) == A
    with pytest.raises(ValueError):
        sequential_colimit_mult(A, [])


def test_sequential_colimit_agreement(seed):
    rng = random.Random(seed)
    groups = finite_abelian_groups(100) + [FgAbelianGroup(1, (6,)), FgAbelianGroup(2, (2, 4))]
    for _ in range(80):
        A = rng.choice(groups)
        ks = [rng.choice([1, 2, 3, 4, 5, 6, 9, 10]) for _ in range(rng.randint(1, 4))]
        assert sequential_colimit_mult(A, ks) == localize_abelian(A, NumSet(tuple(ks))).localized
