"""Truncated towers of homotopy-group data.

A tower records pi_1 (a finite nilpotent group with a chain for its
conjugation self-action) and, for 2 <= n <= N, an abelian group with a
pi_1-action and a nilpotent chain for that action.  Levels are independent;
no extension data between them is modelled.
"""
from __future__ import annotations

from dataclasses import dataclass

from .abelian import FgAbelianGroup
from .actions import (GroupAction, InvalidStructure, NilpotentStructure, structure_failures,
                      structure_to_tower, tower_to_structure)
from .arith import NumSet
from .finite_groups import FiniteGroup, are_isomorphic, is_nilpotent
from .localization import localize_finite_nilpotent, localize_group, localize_structure


@dataclass(frozen=True, eq=False)
class Level:
    n: int
    action: GroupAction
    chain: tuple

    def __post_init__(self):
        object.__setattr__(self, "chain", tuple(self.chain))

    @property
    def group(self):
        return self.action.target

    def structure(self) -> NilpotentStructure:
        return NilpotentStructure(self.action, self.chain)


@dataclass(frozen=True, eq=False)
class PostnikovData:
    truncation: int
    pi1: FiniteGroup
    pi1_chain: tuple
    levels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pi1_chain", tuple(self.pi1_chain))
        object.__setattr__(self, "levels", tuple(self.levels))

    def pi1_action(self) -> GroupAction:
        return GroupAction.conjugation(self.pi1)

    def pi1_structure(self) -> NilpotentStructure:
        return NilpotentStructure(self.pi1_action(), self.pi1_chain)

    def level(self, n: int) -> Level:
        for lvl in self.levels:
            if lvl.n == n:
                return lvl
        raise KeyError(n)

    def structures(self) -> list[tuple[int, NilpotentStructure]]:
        return [(1, self.pi1_structure())] + [(l.n, l.structure()) for l in self.levels]

    def __eq__(self, other):
        if not isinstance(other, PostnikovData):
            return NotImplemented
        return (self.truncation == other.truncation and self.pi1 == other.pi1
                and len(self.levels) == len(other.levels)
                and self.pi1_structure() == other.pi1_structure()
                and all(a.n == b.n and a.structure() == b.structure()
                        for a, b in zip(self.levels, other.levels)))

    __hash__ = None


def _is_abelian(G) -> bool:
    return isinstance(G, FgAbelianGroup) or G.is_abelian()


def validate(x: PostnikovData) -> dict:
    """Re-run every invariant; failures are listed per level."""
    per_level: dict[str, list[str]] = {}
    general = []
    if x.truncation < 1:
        general.append("truncation level must be at least 1")
    ns = [l.n for l in x.levels]
    if ns != list(range(2, x.truncation + 1)):
        general.append(f"levels must be exactly 2..{x.truncation} in order, got {ns}")
    errs = []
    if not is_nilpotent(x.pi1):
        errs.append("pi1 is not nilpotent")
    else:
        errs += structure_failures(x.pi1_action(), x.pi1_chain)
    per_level["1"] = errs
    for lvl in x.levels:
        errs = []
        if lvl.action.actor != x.pi1:
            errs.append("action is not by pi1")
        if not _is_abelian(lvl.group):
            errs.append("group is not abelian")
        if not errs:
            errs += structure_failures(lvl.action, lvl.chain)
        per_level[str(lvl.n)] = errs
    failures = general + [f"level {n}: {e}" for n, es in per_level.items() for e in es]
    return {"valid": not failures, "failures": failures, "levels": per_level}


def _require_valid(x: PostnikovData):
    rep = validate(x)
    if not rep["valid"]:
        raise InvalidStructure("invalid tower: " + "; ".join(rep["failures"]))


def nilpotency_degree(x: PostnikovData) -> int:
    _require_valid(x)
    return len(x.pi1_chain) - 1 + sum(len(l.chain) - 1 for l in x.levels)


def _same_group(a, b) -> bool:
    if isinstance(a, FgAbelianGroup) or isinstance(b, FgAbelianGroup):
        return a == b
    return are_isomorphic(a, b) is not None


def localize_tower(x: PostnikovData, s: NumSet) -> PostnikovData:
    """Localize pi_1 and every level, then check each level against the
    direct localization of its group."""
    _require_valid(x)
    if not s.prime_set:
        return x
    pi1_loc = localize_structure(x.pi1_structure(), s)
    P = localize_finite_nilpotent(x.pi1, s).localized
    if pi1_loc.action != GroupAction.conjugation(P):
        raise InvalidStructure("localized pi1 action is not conjugation")
    levels = []
    for lvl in x.levels:
        st = localize_structure(lvl.structure(), s)
        if not _same_group(st.action.target, localize_group(lvl.group, s).localized):
            raise InvalidStructure(f"level {lvl.n} does not match the direct localization")
        levels.append(Level(lvl.n, st.action, st.chain))
    out = PostnikovData(x.truncation, P, pi1_loc.chain, levels)
    _require_valid(out)
    return out


@dataclass(frozen=True, eq=False)
class FactorizationReport:
    towers: tuple  # of (n, EpiTower)

    @property
    def total(self) -> int:
        return sum(t.length for _, t in self.towers)

    def round_trips(self, x: PostnikovData) -> bool:
        structures = dict(x.structures())
        return all(tower_to_structure(t) == structures[n] for n, t in self.towers)


def principal_factorization(x: PostnikovData) -> FactorizationReport:
    """Each nilpotent structure as a tower of surjections with trivially
    acted-on central kernels, one per stage."""
    _require_valid(x)
    return FactorizationReport(tuple((n, structure_to_tower(st)) for n, st in x.structures() if st.length))
