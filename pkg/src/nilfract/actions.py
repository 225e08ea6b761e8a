"""Actions of finite groups on groups, and nilpotent structures on them.

A target is either a FiniteGroup (automorphisms stored as image tables)
or an FgAbelianGroup (automorphisms stored as AbelianHom matrices).
Subtargets are Subgroup or AbelianSubgroup respectively.

The central-series and epimorphism-tower presentations of a nilpotent
structure are converted into each other by ``structure_to_tower`` and
``tower_to_structure``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .abelian import AbelianHom, AbelianSubgroup, FgAbelianGroup, cokernel, kernel, preimage
from .finite_groups import (FiniteGroup, FiniteHom, ShortExactSequence, Subgroup, is_central_extension, normal_closure, quotient)

GroupTarget = Union[FiniteGroup, FgAbelianGroup]
Subtarget = Union[Subgroup, AbelianSubgroup]
TargetHom = Union[FiniteHom, AbelianHom]


class InvalidStructure(ValueError):
    pass


def _is_abelian_target(H) -> bool:
    return isinstance(H, FgAbelianGroup)


def whole(H: GroupTarget) -> Subtarget:
    return AbelianSubgroup.whole(H) if _is_abelian_target(H) else H.whole()


def trivial_sub(H: GroupTarget) -> Subtarget:
    return AbelianSubgroup.trivial(H) if _is_abelian_target(H) else H.trivial()


def is_trivial_group(H: GroupTarget) -> bool:
    return H.is_trivial if _is_abelian_target(H) else H.order == 1


def identity_hom(H: GroupTarget) -> TargetHom:
    return AbelianHom.identity(H) if _is_abelian_target(H) else FiniteHom.identity(H)


def hom_kernel(h: TargetHom) -> Subtarget:
    if isinstance(h, AbelianHom):
        return AbelianSubgroup.image_of(kernel(h)[1])
    return h.kernel()


def sub_generators(S: Subtarget) -> Sequence:
    return S.gens if isinstance(S, AbelianSubgroup) else S.elements


def sub_equal(A: Subtarget, B: Subtarget) -> bool:
    return A == B


def target_quotient(H: GroupTarget, N: Subtarget) -> tuple[GroupTarget, TargetHom]:
    if _is_abelian_target(H):
        _, incl = N.inclusion()
        return cokernel(incl)
    return quotient(H, N)


def induced_quotient_map(p: TargetHom, q: TargetHom) -> TargetHom:
    """f with f o p = q, for p surjective and ker p inside ker q."""
    if isinstance(p, AbelianHom):
        cols = []
        for j in range(p.codomain.ngens):
            x = preimage(p, p.codomain.generator(j))
            if x is None:
                raise ValueError("map is not surjective")
            cols.append(q(x))
        f = AbelianHom.from_columns(p.codomain, q.codomain, cols)
        if f.compose(p) != q:
            raise ValueError("kernel of the first map is not inside the kernel of the second")
        return f
    images = [-1] * p.codomain.order
    for a in p.domain.elements:
        b = p(a)
        if images[b] == -1:
            images[b] = q(a)
        elif images[b] != q(a):
            raise ValueError("kernel of the first map is not inside the kernel of the second")
    if -1 in images:
        raise ValueError("map is not surjective")
    return FiniteHom(p.codomain, q.codomain, tuple(images))


# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GroupAction:
    """Homomorphism from ``actor`` into the automorphisms of ``target``.

    ``autos[g]`` is the automorphism by which actor element g acts.
    """

    actor: FiniteGroup
    target: GroupTarget
    autos: tuple

    def __post_init__(self):
        autos = tuple(self.autos)
        object.__setattr__(self, "autos", autos)
        G, H = self.actor, self.target
        if len(autos) != G.order:
            raise ValueError("need one automorphism per actor element")
        if _is_abelian_target(H):
            for g, a in enumerate(autos):
                if not isinstance(a, AbelianHom) or a.domain != H or a.codomain != H:
                    raise ValueError(f"automorphism of actor element {g} is not an endomorphism of the target")
                if not a.is_isomorphism():
                    raise ValueError(f"actor element {g} does not act by an automorphism")
        else:
            autos = tuple(tuple(a) for a in autos)
            object.__setattr__(self, "autos", autos)
            for g, a in enumerate(autos):
                if len(a) != H.order or len(set(a)) != H.order:
                    raise ValueError(f"actor element {g} does not act bijectively")
                FiniteHom(H, H, a)  # raises unless a preserves products
        for g in G.elements:
            for g2 in G.elements:
                if not self._compose_eq(g, g2):
                    raise ValueError(f"action law fails: auto({g}) o auto({g2}) != auto({G.mul(g, g2)})")

    def _compose_eq(self, g, g2) -> bool:
        a, b, ab = self.autos[g], self.autos[g2], self.autos[self.actor.mul(g, g2)]
        if isinstance(a, AbelianHom):
            return a.compose(b) == ab
        return all(a[b[h]] == ab[h] for h in range(len(b)))

    def act(self, g: int, h):
        a = self.autos[g]
        return a(h) if isinstance(a, AbelianHom) else a[h]

    def auto_hom(self, g: int) -> TargetHom:
        a = self.autos[g]
        return a if isinstance(a, AbelianHom) else FiniteHom(self.target, self.target, a)

    @classmethod
    def trivial(cls, actor: FiniteGroup, target: GroupTarget) -> GroupAction:
        e = identity_hom(target)
        auto = e if isinstance(e, AbelianHom) else e.images
        return cls(actor, target, (auto,) * actor.order)

    @classmethod
    def conjugation(cls, G: FiniteGroup) -> GroupAction:
        return cls(G, G, tuple(tuple(G.conj(g, x) for x in G.elements) for g in G.elements))

    @classmethod
    def from_hom(cls, actor: FiniteGroup, target: GroupTarget, rho: FiniteHom,
                 autos_of_image: Sequence) -> GroupAction:
        """Action through a homomorphism rho: actor -> C, with autos given on C."""
        return cls(actor, target, tuple(autos_of_image[rho(g)] for g in actor.elements))

    def __eq__(self, other):
        if not isinstance(other, GroupAction):
            return NotImplemented
        return (self.actor == other.actor and self.target == other.target
                and self.autos == other.autos)

    def __hash__(self):
        return hash((self.actor, self.target))

    def is_invariant(self, S: Subtarget) -> bool:
        """Whether every auto(g) maps S into itself."""
        return all(self.act(g, x) in S for g in self.actor.elements for x in sub_generators(S))


def is_trivial_action(a: GroupAction) -> bool:
    if _is_abelian_target(a.target):
        e = AbelianHom.identity(a.target)
        return all(x == e for x in a.autos)
    ident = tuple(a.target.elements)
    return all(x == ident for x in a.autos)


@dataclass(frozen=True, eq=False)
class ActionMap:
    """Equivariant homomorphism between the targets of two actions."""

    source: GroupAction
    dest: GroupAction
    hom: TargetHom

    def __post_init__(self):
        s, d, h = self.source, self.dest, self.hom
        if s.actor != d.actor:
            raise ValueError("actions must share the acting group")
        if h.domain != s.target or h.codomain != d.target:
            raise ValueError("underlying homomorphism does not match the targets")
        for g in s.actor.elements:
            for x in sub_generators(whole(s.target)):
                if h(s.act(g, x)) != d.act(g, h(x)):
                    raise ValueError(f"map is not equivariant at actor element {g}")

    def is_surjective(self) -> bool:
        return self.hom.is_surjective()

    def is_injective(self) -> bool:
        return self.hom.is_injective()

    def compose(self, other: ActionMap) -> ActionMap:
        """self after other."""
        return ActionMap(other.source, self.dest, self.hom.compose(other.hom))


def restrict_action(a: GroupAction, S: Subtarget) -> tuple[GroupAction, TargetHom]:
    """The action on an invariant subtarget, with the inclusion."""
    if not a.is_invariant(S):
        raise InvalidStructure("subtarget is not preserved by the action")
    if isinstance(S, AbelianSubgroup):
        K, incl = S.inclusion()
        autos = []
        for g in a.actor.elements:
            cols = [preimage(incl, a.act(g, c)) for c in incl.columns]
            autos.append(AbelianHom.from_columns(K, K, cols))
        return GroupAction(a.actor, K, tuple(autos)), incl
    K, incl = S.as_group()
    back = {x: i for i, x in enumerate(incl.images)}
    autos = tuple(tuple(back[a.act(g, x)] for x in incl.images) for g in a.actor.elements)
    return GroupAction(a.actor, K, autos), incl


def kernel_subaction(m: ActionMap) -> tuple[GroupAction, TargetHom]:
    return restrict_action(m.source, hom_kernel(m.hom))


def kernel_of_action_map(m: ActionMap) -> GroupAction:
    """The source action restricted to the kernel of the underlying map."""
    return kernel_subaction(m)[0]


def quotient_action(a: GroupAction, N: Subtarget) -> tuple[GroupAction, ActionMap]:
    """Induced action on target/N and the projection as an ActionMap."""
    H = a.target
    if isinstance(N, Subgroup) and not N.is_normal():
        raise InvalidStructure("subtarget is not normal")
    if not a.is_invariant(N):
        raise InvalidStructure("subtarget is not preserved by the action")
    Q, proj = target_quotient(H, N)
    autos = []
    for g in a.actor.elements:
        autos.append(induced_quotient_map(proj, proj.compose(a.auto_hom(g))))
    autos = tuple(x if isinstance(x, AbelianHom) else x.images for x in autos)
    qa = GroupAction(a.actor, Q, autos)
    return qa, ActionMap(a, qa, proj)


# --------------------------------------------------------------------------

def structure_failures(action: GroupAction, chain: Sequence[Subtarget]) -> list[str]:
    """Violated conditions of a nilpotent structure, empty when valid."""
    H = action.target
    errs = []
    if not chain:
        return ["chain is empty"]
    for i, S in enumerate(chain):
        if S.parent != H:
            return [f"term {i} is not a subgroup of the target"]
    if not chain[0].is_trivial():
        errs.append("first term is not trivial")
    if not chain[-1].is_whole():
        errs.append("last term is not the whole target")
    for i, S in enumerate(chain):
        if isinstance(S, Subgroup) and not S.is_normal():
            errs.append(f"term {i} is not normal in the target")
        if not action.is_invariant(S):
            errs.append(f"term {i} is not invariant under the action")
    if errs:
        return errs
    for i in range(len(chain) - 1):
        lo, hi = chain[i], chain[i + 1]
        if not lo <= hi:
            errs.append(f"term {i} is not contained in term {i + 1}")
            continue
        if isinstance(lo, Subgroup):
            # H_{i+1}/H_i -> H/H_i -> H/H_{i+1} must be central
            Q, p = quotient(H, lo)
            N = Subgroup(Q, tuple({p(x) for x in hi.elements}))
            Ng, incl = N.as_group()
            _, q2 = quotient(Q, N)
            if not is_central_extension(ShortExactSequence(incl, q2)):
                errs.append(f"extension at step {i} is not central")
            G = H
            for g in action.actor.elements:
                if any(G.mul(action.act(g, x), G.inv(x)) not in lo for x in hi.elements):
                    errs.append(f"quotient action at step {i} is not trivial")
                    break
        else:
            A = H
            for g in action.actor.elements:
                if any(A.sub(action.act(g, x), x) not in lo for x in hi.gens):
                    errs.append(f"quotient action at step {i} is not trivial")
                    break
    return errs


@dataclass(frozen=True, eq=False)
class NilpotentStructure:
    """Chain 1 = H_0 <= ... <= H_k = H of invariant normal subgroups with
    central steps and trivial induced actions on H_{i+1}/H_i."""

    action: GroupAction
    chain: tuple

    def __post_init__(self):
        object.__setattr__(self, "chain", tuple(self.chain))
        errs = structure_failures(self.action, self.chain)
        if errs:
            raise InvalidStructure("; ".join(errs))

    @property
    def length(self) -> int:
        return len(self.chain) - 1

    def __eq__(self, other):
        if not isinstance(other, NilpotentStructure):
            return NotImplemented
        return (self.action == other.action and len(self.chain) == len(other.chain)
                and all(a == b for a, b in zip(self.chain, other.chain)))

    __hash__ = None

    def collapsed(self) -> NilpotentStructure:
        """Same structure with repeated consecutive terms removed."""
        out = [self.chain[0]]
        for S in self.chain[1:]:
            if not S == out[-1]:
                out.append(S)
        return NilpotentStructure(self.action, out)


@dataclass(frozen=True, eq=False)
class EpiTower:
    """alpha = stage_0 ->> stage_1 ->> ... ->> stage_k = action on 1, each
    step surjective with central kernel on which the actor acts trivially."""

    stages: tuple
    maps: tuple
    kernels: tuple = ()

    def __post_init__(self):
        stages, maps = tuple(self.stages), tuple(self.maps)
        object.__setattr__(self, "stages", stages)
        object.__setattr__(self, "maps", maps)
        if len(maps) != len(stages) - 1:
            raise InvalidStructure("need exactly one map between consecutive stages")
        if not is_trivial_group(stages[-1].target):
            raise InvalidStructure("last stage must act on the trivial group")
        kernels = []
        for i, m in enumerate(maps):
            if m.source != stages[i] or m.dest != stages[i + 1]:
                raise InvalidStructure(f"map {i} does not connect stages {i} and {i + 1}")
            if not m.is_surjective():
                raise InvalidStructure(f"map {i} is not surjective")
            K, incl = kernel_subaction(m)
            if not is_trivial_action(K):
                raise InvalidStructure(f"kernel action at step {i} is not trivial")
            if isinstance(m.hom, FiniteHom):
                if not is_central_extension(ShortExactSequence(incl, m.hom)):
                    raise InvalidStructure(f"kernel at step {i} is not central")
            kernels.append(K)
        object.__setattr__(self, "kernels", tuple(kernels))

    @property
    def length(self) -> int:
        return len(self.maps)

    @property
    def action(self) -> GroupAction:
        return self.stages[0]

    def composites(self) -> list[TargetHom]:
        """The maps H -> stage_i target."""
        out = [identity_hom(self.stages[0].target)]
        for m in self.maps:
            out.append(m.hom.compose(out[-1]))
        return out


def structure_to_tower(n: NilpotentStructure) -> EpiTower:
    a = n.action
    stages, projs = [a], [identity_hom(a.target)]
    for S in n.chain[1:]:
        qa, p = quotient_action(a, S)
        stages.append(qa)
        projs.append(p.hom)
    maps = []
    for i in range(n.length):
        f = induced_quotient_map(projs[i], projs[i + 1])
        maps.append(ActionMap(stages[i], stages[i + 1], f))
    return EpiTower(stages, maps)


def tower_to_structure(t: EpiTower) -> NilpotentStructure:
    return NilpotentStructure(t.action, [hom_kernel(c) for c in t.composites()])


def towers_equivalent(t1: EpiTower, t2: EpiTower) -> bool:
    """Same top action and the same kernels of H -> stage_i at every level,
    hence canonically isomorphic stage by stage."""
    if t1.action != t2.action or t1.length != t2.length:
        return False
    return all(hom_kernel(a) == hom_kernel(b) for a, b in zip(t1.composites(), t2.composites()))


def alpha_lower_central_series(a: GroupAction) -> Optional[NilpotentStructure]:
    """Fastest descending series Γ_{i+1} = <[H, Γ_i], α(g,x)x^-1>; returned
    reversed as a nilpotent structure when it reaches the trivial group."""
    H = a.target
    G = a.actor
    if _is_abelian_target(H):
        series = [AbelianSubgroup.whole(H)]
        while not series[-1].is_trivial():
            gens = [H.sub(a.act(g, x), x) for g in G.elements for x in series[-1].gens]
            nxt = AbelianSubgroup(H, gens)
            # a nilpotent action of a finite group is trivial on H/torsion
            if len(series) == 1 and nxt.group().free_rank > 0:
                return None
            if nxt == series[-1]:
                return None
            series.append(nxt)
    else:
        series = [H.whole()]
        while not series[-1].is_trivial():
            cur = series[-1].elements
            gens = {H.commutator(h, x) for h in H.elements for x in cur}
            gens |= {H.mul(a.act(g, x), H.inv(x)) for g in G.elements for x in cur}
            nxt = _invariant_closure(a, normal_closure(H, gens))
            if nxt == series[-1]:
                return None
            series.append(nxt)
    return NilpotentStructure(a, list(reversed(series)))


def _invariant_closure(a: GroupAction, S: Subgroup) -> Subgroup:
    H = a.target
    while True:
        more = {a.act(g, x) for g in a.actor.elements for x in S.elements}
        if more <= set(S.elements):
            return S
        S = normal_closure(H, set(S.elements) | more)


def invariant_normal_closure(a: GroupAction, gens) -> Subtarget:
    """Smallest invariant normal subtarget containing ``gens``."""
    H = a.target
    if _is_abelian_target(H):
        S = AbelianSubgroup(H, gens)
        while True:
            more = [a.act(g, x) for g in a.actor.elements for x in S.gens]
            T = AbelianSubgroup(H, list(S.gens) + more)
            if T <= S:
                return S
            S = T
    return _invariant_closure(a, normal_closure(H, gens))
