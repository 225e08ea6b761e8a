"""Finite groups as Cayley tables.

Elements are indices 0..n-1.  Subgroups are sorted index sets, so the hot
operation (membership) is a set lookup.  Everything here is exhaustive
and meant for orders up to NILFRACT_MAX_ORDER (default 64).
"""
from __future__ import annotations

import itertools
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Optional, Sequence

from sympy import factorint

from .abelian import FgAbelianGroup


def max_order() -> int:
    return int(os.environ.get("NILFRACT_MAX_ORDER", "64"))


@dataclass(frozen=True)
class FiniteGroup:
    cayley: tuple[tuple[int, ...], ...]
    identity: int = field(default=-1)
    inverse: tuple[int, ...] = field(default=())
    labels: Optional[tuple[str, ...]] = field(default=None, compare=False)
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        table = tuple(tuple(int(x) for x in row) for row in self.cayley)
        object.__setattr__(self, "cayley", table)
        n = len(table)
        if n == 0 or any(len(r) != n for r in table):
            raise ValueError("Cayley table must be a nonempty square")
        if any(not 0 <= x < n for r in table for x in r):
            raise ValueError("Cayley table entries out of range")
        if self.identity < 0:
            e = next((i for i in range(n) if table[i] == tuple(range(n))), None)
            if e is None:
                raise ValueError("group law violated: no identity element")
            object.__setattr__(self, "identity", e)
        if not self.inverse:
            inv = []
            for a in range(n):
                b = next((b for b in range(n) if table[a][b] == self.identity), None)
                if b is None:
                    raise ValueError(f"group law violated: element {a} has no inverse")
                inv.append(b)
            object.__setattr__(self, "inverse", tuple(inv))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != n:
                raise ValueError("labels length must equal the order")

    # construction -----------------------------------------------------------
    @classmethod
    def from_elements(cls, elements: Sequence[Hashable], mul: Callable, name: str | None = None,
                      label: Callable = str) -> FiniteGroup:
        index = {x: i for i, x in enumerate(elements)}
        table = [[index[mul(a, b)] for b in elements] for a in elements]
        return cls(tuple(map(tuple, table)), labels=tuple(label(x) for x in elements), name=name)

    @classmethod
    def generated_by(cls, gens: Sequence[Hashable], mul: Callable, identity: Hashable,
                     name: str | None = None, label: Callable = str) -> FiniteGroup:
        """Closure of ``gens`` under ``mul``, elements in breadth-first order."""
        elems, seen, frontier = [identity], {identity}, [identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        elems.append(y)
                        nxt.append(y)
            frontier = nxt
        return cls.from_elements(elems, mul, name, label)

    def validate(self) -> list[str]:
        """Full O(n^3) check of the group laws; returns violated laws."""
        t, n, e = self.cayley, self.order, self.identity
        errs = []
        for a in range(n):
            if t[e][a] != a or t[a][e] != a:
                errs.append(f"identity law fails at {a}")
            if t[a][self.inverse[a]] != e or t[self.inverse[a]][a] != e:
                errs.append(f"inverse law fails at {a}")
            for b in range(n):
                ab = t[a][b]
                for c in range(n):
                    if t[ab][c] != t[a][t[b][c]]:
                        errs.append(f"associativity fails at ({a}, {b}, {c})")
                        return errs
        return errs

    # basic structure --------------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.cayley)

    def __len__(self):
        return len(self.cayley)

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return self.cayley[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inverse[a], -k
        out, base = self.identity, a
        while k:
            if k & 1:
                out = self.cayley[out][base]
            base = self.cayley[base][base]
            k >>= 1
        return out

    def conj(self, g: int, x: int) -> int:
        """g x g^-1."""
        return self.cayley[self.cayley[g][x]][self.inverse[g]]

    def commutator(self, a: int, b: int) -> int:
        """a b a^-1 b^-1."""
        t, inv = self.cayley, self.inverse
        return t[t[t[a][b]][inv[a]]][inv[b]]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.cayley[x][a]
            k += 1
        return k

    def is_abelian(self) -> bool:
        t = self.cayley
        return all(t[a][b] == t[b][a] for a in self.elements for b in range(a))

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels else str(a)

    def __str__(self):
        return self.name or f"group of order {self.order}"

    def whole(self) -> Subgroup:
        return Subgroup(self, tuple(self.elements))

    def trivial(self) -> Subgroup:
        return Subgroup(self, (self.identity,))


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup = field(repr=False)
    elements: tuple[int, ...]

    def __post_init__(self):
        elems = tuple(sorted(set(self.elements)))
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "_members", frozenset(elems))
        G = self.parent
        if G.identity not in self._members:
            raise ValueError("subgroup must contain the identity")
        for a in elems:
            if G.inverse[a] not in self._members:
                raise ValueError("subset not closed under inverses")
            for b in elems:
                if G.cayley[a][b] not in self._members:
                    raise ValueError("subset not closed under products")

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, a: int) -> bool:
        return a in self._members

    def __le__(self, other: Subgroup) -> bool:
        return self._members <= other._members

    def __len__(self):
        return len(self.elements)

    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    def is_whole(self) -> bool:
        return len(self.elements) == self.parent.order

    def is_normal(self) -> bool:
        G = self.parent
        return all(G.conj(g, x) in self._members for g in G.elements for x in self.elements)

    def as_group(self) -> tuple[FiniteGroup, FiniteHom]:
        """The subgroup as a group in its own right, with its inclusion."""
        G = self.parent
        idx = {x: i for i, x in enumerate(self.elements)}
        table = tuple(tuple(idx[G.cayley[a][b]] for b in self.elements) for a in self.elements)
        labels = tuple(G.label(x) for x in self.elements) if G.labels else None
        H = FiniteGroup(table, labels=labels)
        return H, FiniteHom(H, G, self.elements)


def generated_subgroup(G: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    members = {G.identity}
    frontier = [G.identity]
    gens = list(gens)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.cayley[x][g]
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return Subgroup(G, tuple(members))


def normal_closure(G: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    conjs = {G.conj(g, x) for g in G.elements for x in gens}
    return generated_subgroup(G, conjs)


def center(G: FiniteGroup) -> Subgroup:
    t = G.cayley
    return Subgroup(G, tuple(z for z in G.elements if all(t[z][g] == t[g][z] for g in G.elements)))


def commutator_subgroup(G: FiniteGroup, A: Iterable[int], B: Iterable[int]) -> Subgroup:
    B = list(B)
    return generated_subgroup(G, {G.commutator(a, b) for a in A for b in B})


@dataclass(frozen=True)
class FiniteHom:
    domain: FiniteGroup = field(repr=False)
    codomain: FiniteGroup = field(repr=False)
    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(x) for x in self.images)
        object.__setattr__(self, "images", imgs)
        A, B = self.domain, self.codomain
        if len(imgs) != A.order:
            raise ValueError("image table must have one entry per domain element")
        for a in A.elements:
            for b in A.elements:
                if imgs[A.cayley[a][b]] != B.cayley[imgs[a]][imgs[b]]:
                    raise ValueError(f"not a homomorphism at ({a}, {b})")

    def __call__(self, a: int) -> int:
        return self.images[a]

    @classmethod
    def identity(cls, G: FiniteGroup) -> FiniteHom:
        return cls(G, G, tuple(G.elements))

    def compose(self, other: FiniteHom) -> FiniteHom:
        """self after other."""
        if other.codomain != self.domain:
            raise ValueError("homomorphisms are not composable")
        return FiniteHom(other.domain, self.codomain, tuple(self.images[x] for x in other.images))

    __matmul__ = compose

    def kernel(self) -> Subgroup:
        e = self.codomain.identity
        return Subgroup(self.domain, tuple(a for a in self.domain.elements if self.images[a] == e))

    def image(self) -> Subgroup:
        return Subgroup(self.codomain, tuple(set(self.images)))

    def is_injective(self) -> bool:
        return len(set(self.images)) == self.domain.order

    def is_surjective(self) -> bool:
        return len(set(self.images)) == self.codomain.order

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()


# --------------------------------------------------------------------------
# library constructors

def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    return FiniteGroup(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)),
                       labels=tuple(str(a) for a in range(n)), name=f"cyclic:{n}")


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """Element (g, h) has index g * |H| + h."""
    m = H.order
    table = tuple(
        tuple(G.cayley[a // m][b // m] * m + H.cayley[a % m][b % m] for b in range(G.order * m))
        for a in range(G.order * m))
    labels = tuple(f"({G.label(a // m)},{H.label(a % m)})" for a in range(G.order * m))
    name = f"{G.name}x{H.name}" if G.name and H.name else None
    return FiniteGroup(table, labels=labels, name=name)


def abelian(orders: Sequence[int]) -> FiniteGroup:
    G = cyclic(1)
    for i, n in enumerate(orders):
        G = cyclic(n) if i == 0 else direct_product(G, cyclic(n))
    return G


def dihedral(order: int) -> FiniteGroup:
    """Symmetries of the regular n-gon, order 2n: r^k is k, s r^k is n + k."""
    if order < 2 or order % 2:
        raise ValueError("dihedral group order must be even")
    n = order // 2

    def mul(a, b):
        (fa, ka), (fb, kb) = divmod(a, n), divmod(b, n)
        # s^fa r^ka s^fb r^kb = s^(fa+fb) r^(+-ka + kb)
        k = (-ka if fb else ka) + kb
        return ((fa + fb) % 2) * n + k % n

    labels = [f"r^{k}" for k in range(n)] + [f"sr^{k}" for k in range(n)]
    return FiniteGroup.from_elements(list(range(order)), mul, name=f"dihedral:{order}",
                                     label=lambda x: labels[x])


def quaternion(order: int = 8) -> FiniteGroup:
    """Dicyclic group <a, x | a^2m, x^2 = a^m, x a x^-1 = a^-1> of order 4m.

    Index k is a^k, index 2m + k is a^k x; order 8 is the quaternion group.
    """
    if order < 4 or order % 4:
        raise ValueError("quaternion group order must be a multiple of 4")
    m2 = order // 2
    m = m2 // 2

    def mul(a, b):
        (fa, ka), (fb, kb) = divmod(a, m2), divmod(b, m2)
        # a^ka x^fa a^kb x^fb = a^(ka +- kb) x^(fa+fb)
        k = ka + (-kb if fa else kb)
        if fa and fb:
            k += m
        return ((fa + fb) % 2) * m2 + k % m2

    labels = [f"a^{k}" for k in range(m2)] + [f"a^{k}x" for k in range(m2)]
    return FiniteGroup.from_elements(list(range(order)), mul, name=f"quaternion:{order}",
                                     label=lambda x: labels[x])


def _perm_mul(p, q):
    # apply q first, then p
    return tuple(p[i] for i in q)


def symmetric(n: int) -> FiniteGroup:
    if not 1 <= n <= 4:
        raise ValueError("symmetric groups are provided for n <= 4")
    perms = sorted(itertools.permutations(range(n)))
    return FiniteGroup.from_elements(perms, _perm_mul, name=f"symmetric:{n}",
                                     label=lambda p: "".join(str(i + 1) for i in p))


def alternating(n: int) -> FiniteGroup:
    if not 1 <= n <= 5:
        raise ValueError("alternating groups are provided for n <= 5")

    def even(p):
        return sum(1 for i in range(n) for j in range(i) if p[j] > p[i]) % 2 == 0

    perms = [p for p in sorted(itertools.permutations(range(n))) if even(p)]
    return FiniteGroup.from_elements(perms, _perm_mul, name=f"alternating:{n}",
                                     label=lambda p: "".join(str(i + 1) for i in p))


def from_abelian(A: FgAbelianGroup) -> tuple[FiniteGroup, list[tuple]]:
    """Cayley table of a finite abelian group; element i is ``elements[i]``."""
    if not A.is_finite:
        raise ValueError("only finite groups have Cayley tables")
    elems = list(A.elements())
    G = FiniteGroup.from_elements(elems, A.add, name=None)
    return G, elems


def library(max_order: int = 32) -> dict[str, FiniteGroup]:
    """Named groups up to ``max_order``: cyclic, abelian products, dihedral,
    quaternion, symmetric, alternating, and a few mixed products."""
    lib = {}
    for n in range(1, max_order + 1):
        lib[f"cyclic:{n}"] = cyclic(n)
    for orders in ([2, 2], [2, 4], [2, 2, 2], [3, 3], [2, 6], [4, 4], [2, 8], [2, 2, 4],
                   [2, 2, 2, 2], [2, 10], [3, 6], [2, 12], [5, 5], [2, 2, 6], [3, 9],
                   [2, 14], [4, 8], [2, 16], [2, 2, 8], [2, 4, 4], [2, 2, 2, 4], [2, 2, 2, 2, 2]):
        size = 1
        for o in orders:
            size *= o
        if size <= max_order:
            lib["x".join(f"cyclic:{o}" for o in orders)] = abelian(orders)
    for order in range(6, max_order + 1, 2):
        lib[f"dihedral:{order}"] = dihedral(order)
    for order in range(8, max_order + 1, 4):
        lib[f"quaternion:{order}"] = quaternion(order)
    for n in (3, 4):
        if symmetric(n).order <= max_order:
            lib[f"symmetric:{n}"] = symmetric(n)
    if 12 <= max_order:
        lib["alternating:4"] = alternating(4)
    for a, b in (("quaternion:8", "cyclic:2"), ("dihedral:8", "cyclic:2"),
                 ("quaternion:8", "cyclic:3"), ("dihedral:8", "cyclic:3"),
                 ("symmetric:3", "cyclic:2"), ("quaternion:8", "cyclic:4"),
                 ("dihedral:8", "cyclic:4")):
        if a in lib and b in lib and lib[a].order * lib[b].order <= max_order:
            g = direct_product(lib[a], lib[b])
            lib[g.name] = g
    return lib


# --------------------------------------------------------------------------
# normal inclusions, quotients, extensions

def is_normal_inclusion(i: FiniteHom) -> bool:
    if not i.is_injective():
        return False
    return i.image().is_normal()


def quotient(G: FiniteGroup, N: Subgroup) -> tuple[FiniteGroup, FiniteHom]:
    """G/N with cosets ordered by smallest representative."""
    if N.parent != G:
        raise ValueError("subgroup of a different group")
    if not N.is_normal():
        raise ValueError("cannot form a quotient by a non-normal subgroup")
    coset_of = [-1] * G.order
    reps = []
    for g in G.elements:
        if coset_of[g] < 0:
            for x in N.elements:
                coset_of[G.cayley[g][x]] = len(reps)
            reps.append(g)
    table = tuple(tuple(coset_of[G.cayley[a][b]] for b in reps) for a in reps)
    labels = tuple(f"{G.label(r)}N" for r in reps) if G.labels else None
    Q = FiniteGroup(table, labels=labels)
    return Q, FiniteHom(G, Q, tuple(coset_of))


@dataclass(frozen=True)
class ShortExactSequence:
    """I -> G -> H with i injective, q surjective and im i = ker q.

    The witnesses are re-verified on construction; works for finite and
    abelian homomorphisms alike.
    """

    i: object
    q: object

    def __post_init__(self):
        from .abelian import AbelianHom, is_short_exact
        i, q = self.i, self.q
        if isinstance(i, AbelianHom):
            if not is_short_exact(i, q):
                raise ValueError("sequence is not short exact")
            return
        if i.codomain != q.domain:
            raise ValueError("maps are not composable")
        if not i.is_injective():
            raise ValueError("first map is not injective")
        if not q.is_surjective():
            raise ValueError("second map is not surjective")
        if set(i.images) != set(q.kernel().elements):
            raise ValueError("image of the first map is not the kernel of the second")


def kernel_conjugation_action(q: FiniteHom):
    """Action of the domain of q on ker(q) by conjugation, g . l = g l g^-1."""
    from .actions import GroupAction
    G = q.domain
    K, incl = q.kernel().as_group()
    back = {x: i for i, x in enumerate(incl.images)}
    autos = tuple(tuple(back[G.conj(g, x)] for x in incl.images) for g in G.elements)
    return GroupAction(G, K, autos)


def is_central_extension(s: ShortExactSequence) -> bool:
    from .abelian import AbelianHom
    from .actions import is_trivial_action
    if isinstance(s.q, AbelianHom):
        return True
    return is_trivial_action(kernel_conjugation_action(s.q))


def lower_central_series(G: FiniteGroup) -> list[Subgroup]:
    """G = Γ0 ⊇ Γ1 = [G, Γ0] ⊇ ... until the series stabilizes."""
    series = [G.whole()]
    while True:
        nxt = commutator_subgroup(G, G.elements, series[-1].elements)
        if nxt == series[-1]:
            return series
        series.append(nxt)


def is_nilpotent(G: FiniteGroup) -> bool:
    return lower_central_series(G)[-1].is_trivial()


class NotNilpotentError(ValueError):
    pass


def sylow_decomposition(G: FiniteGroup) -> list[tuple[int, Subgroup]]:
    """Sylow subgroups of a nilpotent group, whose product map is verified
    to be an isomorphism onto G."""
    if not is_nilpotent(G):
        raise NotNilpotentError(f"{G} is not nilpotent")
    parts = []
    for p, e in sorted(factorint(G.order).items()):
        elems = [a for a in G.elements if _is_power_of(G.element_order(a), p)]
        S = Subgroup(G, tuple(elems))
        if S.order != p ** e:
            raise NotNilpotentError(f"{p}-elements of {G} do not form a Sylow subgroup")
        parts.append((p, S))
    _check_internal_product(G, [S for _, S in parts])
    return parts


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def _check_internal_product(G: FiniteGroup, factors: Sequence[Subgroup]):
    seen = set()
    for combo in itertools.product(*(S.elements for S in factors)):
        x = G.identity
        for c in combo:
            x = G.cayley[x][c]
        seen.add(x)
    if len(seen) != G.order:
        raise NotNilpotentError("product of Sylow subgroups is not the whole group")
    for A, B in itertools.combinations(factors, 2):
        if any(G.cayley[a][b] != G.cayley[b][a] for a in A.elements for b in B.elements):
            raise NotNilpotentError("Sylow subgroups do not commute")


def hall_subgroup(G: FiniteGroup, primes: Iterable[int]) -> Subgroup:
    """Product of the Sylow subgroups for ``primes`` (G nilpotent)."""
    primes = set(primes)
    keep = [a for a in G.elements
            if all(p in primes for p in factorint(G.element_order(a)))]
    return Subgroup(G, tuple(keep))


def abelian_invariants(G: FiniteGroup) -> FgAbelianGroup:
    """Invariant factors of a finite abelian group from element counts."""
    if not G.is_abelian():
        raise ValueError(f"{G} is not abelian")
    orders = Counter(G.element_order(a) for a in G.elements)
    cyclics = []
    for p, e in factorint(G.order).items():
        # c[k] = log_p #{x : x^(p^k) = 1}
        c = [0]
        for k in range(1, e + 1):
            cnt = sum(m for o, m in orders.items() if (p ** k) % o == 0)
            c.append(round(_log(cnt, p)))
        conj = [c[k] - c[k - 1] for k in range(1, e + 1)]  # #{i : λ_i >= k}
        parts = [sum(1 for x in conj if x > i) for i in range(conj[0] if conj else 0)]
        cyclics += [p ** k for k in parts]
    return FgAbelianGroup.from_invariants(cyclics)


def _log(n: int, p: int) -> int:
    k = 0
    while n > 1:
        n //= p
        k += 1
    return k


# --------------------------------------------------------------------------
# homomorphisms and isomorphism search

def generating_set(G: FiniteGroup) -> list[int]:
    """Small generating set, largest element orders first."""
    gens, H = [], G.trivial()
    by_order = sorted(G.elements, key=lambda a: (-G.element_order(a), a))
    for a in by_order:
        if a not in H:
            gens.append(a)
            H = generated_subgroup(G, gens)
            if H.is_whole():
                break
    return gens


def _extend(G: FiniteGroup, H: FiniteGroup, gens: Sequence[int], imgs: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Homomorphism determined by gens -> imgs, or None if inconsistent."""
    phi = {G.identity: H.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            fx = phi[x]
            for g, h in zip(gens, imgs):
                y, fy = G.cayley[x][g], H.cayley[fx][h]
                old = phi.get(y)
                if old is None:
                    phi[y] = fy
                    nxt.append(y)
                elif old != fy:
                    return None
        frontier = nxt
    images = tuple(phi[a] for a in G.elements)
    # the breadth-first labelling is consistent on generators; check the full law
    for a in G.elements:
        for b in G.elements:
            if images[G.cayley[a][b]] != H.cayley[images[a]][images[b]]:
                return None
    return images


def homomorphisms(G: FiniteGroup, H: FiniteGroup) -> Iterator[FiniteHom]:
    """Every homomorphism G -> H, by backtracking over generator images."""
    gens = generating_set(G)
    cands = [[h for h in H.elements if G.element_order(g) % H.element_order(h) == 0] for g in gens]
    for imgs in itertools.product(*cands):
        images = _extend(G, H, gens, imgs)
        if images is not None:
            yield FiniteHom(G, H, images)


def _check_bound(*groups: FiniteGroup):
    cap = max_order()
    for G in groups:
        if G.order > cap:
            raise ValueError(f"order {G.order} exceeds the brute-force bound {cap}")


def are_isomorphic(G: FiniteGroup, H: FiniteGroup) -> Optional[FiniteHom]:
    """A verified isomorphism G -> H, or None."""
    _check_bound(G, H)
    if G.order != H.order:
        return None
    og = [G.element_order(a) for a in G.elements]
    oh = [H.element_order(a) for a in H.elements]
    if Counter(og) != Counter(oh):
        return None
    if G.is_abelian() != H.is_abelian():
        return None
    if G == H:
        return FiniteHom.identity(G)
    zg, zh = center(G).order, center(H).order
    if zg != zh:
        return None
    gens = generating_set(G)
    cands = [[h for h in H.elements if oh[h] == og[g]] for g in gens]
    for imgs in itertools.product(*cands):
        if len(set(imgs)) != len(imgs):
            continue
        images = _extend(G, H, gens, imgs)
        if images is not None and len(set(images)) == H.order:
            return FiniteHom(G, H, images)
    return None
