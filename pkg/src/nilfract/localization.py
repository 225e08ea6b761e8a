"""Localization away from a set of naturals S.

A group is S-local when every power map x -> x^s, s in S, is bijective.
For abelian groups this only depends on the primes dividing entries of
S; the localization of a finite nilpotent group is its Hall subgroup for
the remaining primes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, prod
from typing import Sequence

from .abelian import AbelianHom, AbelianSubgroup, FgAbelianGroup, image
from .actions import (GroupAction, GroupTarget, InvalidStructure, NilpotentStructure, alpha_lower_central_series, target_quotient)
from .arith import ZZ, LocalizedRing, NumSet, coprime_part, prime_factors
from .finite_groups import (FiniteGroup, FiniteHom, NotNilpotentError, Subgroup, are_isomorphic,
                            hall_subgroup, is_nilpotent, sylow_decomposition)

__all__ = ["NumSet", "LocalizedRing", "LocalizationResult", "ActionLocalization", "DescentError",
           "is_local_group", "localize_abelian", "localize_finite_nilpotent", "localize_group",
           "localize_action", "localize_structure", "sequential_colimit_mult", "initiality_check"]


class DescentError(ValueError):
    """The action does not descend to the localized acting group."""


@dataclass(frozen=True, eq=False)
class LocalizationResult:
    localized: GroupTarget
    unit: object
    certificate: dict = field(default_factory=dict)

    def verify(self, s: NumSet) -> bool:
        return self.unit.codomain == self.localized and is_local_group(self.localized, s)


def is_local_group(g: GroupTarget, s: NumSet) -> bool:
    """Whether x -> x^k is a bijection for every entry k of s."""
    if isinstance(g, FgAbelianGroup):
        primes = s.prime_set
        if g.free_rank and not set(primes) <= set(g.ring.inverted_primes):
            return False
        return all(gcd(d, k) == 1 for d in g.torsion for k in s.entries)
    for k in set(s.entries):
        if len({g.power(x, k) for x in g.elements}) != g.order:
            return False
    return True


def localize_abelian(a: FgAbelianGroup, s: NumSet) -> LocalizationResult:
    """Invert the primes of s on the free part, kill them on the torsion."""
    primes = s.prime_set
    ring = a.ring.invert(primes)
    kept = [coprime_part(d, primes) for d in a.torsion]
    tors = tuple(d for d in kept if d > 1)
    loc = FgAbelianGroup(a.free_rank, tors, ring)
    rows = [[int(i == j) for j in range(a.ngens)] for i in range(a.free_rank)]
    dropped = len(a.torsion) - len(tors)
    for i in range(len(tors)):
        col = a.free_rank + dropped + i
        rows.append([int(j == col) for j in range(a.ngens)])
    unit = AbelianHom(a, loc, rows)
    cert = {
        "inverted_primes": list(ring.inverted_primes),
        "torsion_before": list(a.torsion),
        "torsion_after": list(tors),
        "coprime": [[d, k, gcd(d, k)] for d in tors for k in s.entries],
    }
    return LocalizationResult(loc, unit, cert)


def localize_finite_nilpotent(g: FiniteGroup, s: NumSet) -> LocalizationResult:
    """Hall subgroup for the primes outside s, with the projection onto it."""
    if not is_nilpotent(g):
        raise NotNilpotentError(f"{g} is not nilpotent; localization is only defined here for nilpotent groups")
    primes = set(s.prime_set)
    parts = sylow_decomposition(g)
    keep = [p for p, _ in parts if p not in primes]
    H = hall_subgroup(g, keep)
    L, incl = H.as_group()
    back = {x: i for i, x in enumerate(incl.images)}
    images = []
    for x in g.elements:
        # the component of x in the kept Sylow factors is x^u with
        # u = 1 mod |kept part of ord x|, u = 0 mod the rest
        n = g.element_order(x)
        m = coprime_part(n, primes)
        u = _crt_idempotent(m, n // m)
        images.append(back[g.power(x, u)])
    unit = FiniteHom(g, L, tuple(images))
    name = g.name if not (set(primes) & {p for p, _ in parts}) else None
    if name is not None:
        L = FiniteGroup(L.cayley, labels=L.labels, name=name)
        unit = FiniteHom(g, L, unit.images)
    cert = {
        "kept_primes": keep,
        "killed_primes": sorted({p for p, _ in parts} - set(keep)),
        "sylow_orders": {str(p): S.order for p, S in parts},
        "order": L.order,
    }
    return LocalizationResult(L, unit, cert)


def _crt_idempotent(m: int, r: int) -> int:
    """u with u = 1 mod m and u = 0 mod r (gcd(m, r) = 1)."""
    if r == 1:
        return 1
    if m == 1:
        return 0
    return r * pow(r, -1, m) % (m * r)


def localize_group(g: GroupTarget, s: NumSet) -> LocalizationResult:
    if isinstance(g, FgAbelianGroup):
        return localize_abelian(g, s)
    return localize_finite_nilpotent(g, s)


@dataclass(frozen=True, eq=False)
class ActionLocalization:
    action: GroupAction
    actor_unit: FiniteHom
    target_unit: object

    def commutes(self, source: GroupAction) -> bool:
        """eta_H(alpha(g, h)) == alpha_S(eta_G g, eta_H h)."""
        eta_g, eta_h = self.actor_unit, self.target_unit
        gens = _generators(source.target)
        return all(eta_h(source.act(g, h)) == self.action.act(eta_g(g), eta_h(h))
                   for g in source.actor.elements for h in gens)


def _generators(H: GroupTarget):
    if isinstance(H, FgAbelianGroup):
        return [H.generator(i) for i in range(H.ngens)]
    return list(H.elements)


def localize_action(a: GroupAction, s: NumSet) -> ActionLocalization:
    """Localize actor and target and push the action down.

    The automorphism of the localized target induced by g depends only on
    the image of g in the localized actor; this is checked elementwise.
    """
    if alpha_lower_central_series(a) is None:
        raise InvalidStructure("action admits no nilpotent structure")
    G, H = a.actor, a.target
    actor_loc = localize_finite_nilpotent(G, s)
    target_loc = localize_group(H, s)
    GS, eta_g = actor_loc.localized, actor_loc.unit
    HS, eta_h = target_loc.localized, target_loc.unit
    if isinstance(H, FgAbelianGroup):
        autos: list = [None] * GS.order
        for g in G.elements:
            # the same matrix acts on HS: free coordinates are kept, torsion projected
            cols = [eta_h(a.act(g, _lift(H, HS, eta_h, j))) for j in range(HS.ngens)]
            auto = AbelianHom.from_columns(HS, HS, cols)
            if auto.compose(eta_h) != eta_h.compose(a.autos[g]):
                raise DescentError("target localization is not preserved by the action")
            t = eta_g(g)
            if autos[t] is None:
                autos[t] = auto
            elif autos[t] != auto:
                raise DescentError("elements of the localized-away part of the actor act nontrivially")
    else:
        autos = [None] * GS.order
        for g in G.elements:
            table = [-1] * HS.order
            for h in H.elements:
                x, y = eta_h(h), eta_h(a.act(g, h))
                if table[x] == -1:
                    table[x] = y
                elif table[x] != y:
                    raise DescentError("target localization is not preserved by the action")
            t = eta_g(g)
            if autos[t] is None:
                autos[t] = tuple(table)
            elif autos[t] != tuple(table):
                raise DescentError("elements of the localized-away part of the actor act nontrivially")
    loc = GroupAction(GS, HS, tuple(autos))
    out = ActionLocalization(loc, eta_g, eta_h)
    if not out.commutes(a):
        raise DescentError("localization units do not commute with the actions")
    return out


def _lift(H: FgAbelianGroup, HS: FgAbelianGroup, eta: AbelianHom, j: int):
    """A preimage in H of generator j of HS (units are generator-to-generator)."""
    target = HS.generator(j)
    for i in range(H.ngens):
        if eta(H.generator(i)) == target:
            return H.generator(i)
    raise ValueError("generator has no preimage under the localization unit")


def localize_structure(n: NilpotentStructure, s: NumSet) -> NilpotentStructure:
    """Push each term of the chain along the target unit; repeated terms
    (stages killed by the localization) are collapsed."""
    loc = localize_action(n.action, s)
    eta = loc.target_unit
    HS = loc.action.target
    chain = []
    for S in n.chain:
        if isinstance(S, AbelianSubgroup):
            chain.append(AbelianSubgroup(HS, [eta(x) for x in S.gens]))
        else:
            chain.append(Subgroup(HS, tuple({eta(x) for x in S.elements})))
    out = NilpotentStructure(loc.action, chain).collapsed()
    _check_stage_quotients(n, chain, s)
    return out


def _check_stage_quotients(n: NilpotentStructure, chain, s: NumSet):
    """(H_{i+1}/H_i)_S must match the localized stage quotient."""
    for i in range(n.length):
        lo, hi = n.chain[i], n.chain[i + 1]
        q_orig = _subquotient(lo, hi)
        q_loc = _subquotient(chain[i], chain[i + 1])
        expected = localize_group(q_orig, s).localized
        if isinstance(expected, FgAbelianGroup):
            ok = expected == q_loc
        else:
            ok = are_isomorphic(expected, q_loc) is not None
        if not ok:
            raise InvalidStructure(f"localized stage {i} is not the localization of the original stage")


def _subquotient(lo, hi):
    if isinstance(hi, AbelianSubgroup):
        K, incl = hi.inclusion()
        sub = AbelianSubgroup(K, [_preimage_in(incl, x) for x in lo.gens])
        return target_quotient(K, sub)[0]
    K, incl = hi.as_group()
    back = {x: i for i, x in enumerate(incl.images)}
    return target_quotient(K, Subgroup(K, tuple(back[x] for x in lo.elements)))[0]


def _preimage_in(incl: AbelianHom, x):
    from .abelian import preimage
    y = preimage(incl, x)
    if y is None:
        raise InvalidStructure("chain is not increasing")
    return y


def sequential_colimit_mult(a: FgAbelianGroup, ks: Sequence[int]) -> FgAbelianGroup:
    """Colimit of A -k1-> A -k2-> ..., the ks repeating periodically.

    Free part: inverting every prime of the ks.  Torsion part: the stable
    image of multiplication by the period product, on which that
    multiplication is bijective, computed by iterating images.
    """
    ks = list(ks)
    if not ks:
        raise ValueError("need at least one multiplier")
    if any(k < 1 for k in ks):
        raise ValueError("multipliers must be positive")
    if a.ring != ZZ:
        raise ValueError("sequential colimits are computed for groups over Z")
    K = prod(ks)
    primes = [p for k in ks if k > 1 for p in prime_factors(k)]
    ring = ZZ.invert(primes)
    T = FgAbelianGroup(0, a.torsion)
    times_k = AbelianHom.multiplication(T, K)
    current = T
    sub = AbelianHom.identity(T)
    while True:
        img, incl = image(times_k.compose(sub))
        if img == current:
            break
        current, sub = img, incl
    return FgAbelianGroup(a.free_rank, current.torsion, ring)


def initiality_check(a: FgAbelianGroup, s: NumSet, target: FgAbelianGroup) -> dict:
    """Exhaustively compare Hom(A_S, L) with Hom(A, L) under precomposition
    with the unit, for a finite S-local abelian L."""
    from .abelian import hom_images
    if not is_local_group(target, s):
        raise ValueError(f"{target} is not local away from {list(s.entries)}")
    loc = localize_abelian(a, s)
    cols = loc.unit.columns
    L = target

    # the unit sends generators to generators or zero: reindex when possible
    index = []
    for c in cols:
        nz = [j for j, cj in enumerate(c) if cj]
        index.append(nz[0] if len(nz) == 1 and c[nz[0]] == 1 else None if not nz else -1)
    zero = L.zero()
    if -1 not in index:
        def pull(imgs):
            return tuple(zero if j is None else imgs[j] for j in index)
    else:
        def pull(imgs):
            out = []
            for c in cols:
                acc = zero
                for cj, y in zip(c, imgs):
                    if cj:
                        acc = L.add(acc, L.scale(cj, y))
                out.append(acc)
            return tuple(out)

    n_local = 0
    pulled = set()
    for imgs in hom_images(loc.localized, L):
        n_local += 1
        pulled.add(pull(imgs))
    n_source = 0
    surjective = True
    for imgs in hom_images(a, L):
        n_source += 1
        if tuple(imgs) not in pulled:
            surjective = False
    return {"target": str(L), "hom_from_localized": n_local, "hom_from_source": n_source,
            "injective": len(pulled) == n_local, "surjective": surjective,
            "bijective": len(pulled) == n_local and surjective}
