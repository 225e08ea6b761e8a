"""JSON forms and named constructors for groups, actions, chains and towers."""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Any

from .abelian import AbelianHom, AbelianSubgroup, FgAbelianGroup
from .actions import GroupAction, InvalidStructure, alpha_lower_central_series
from .arith import LocalizedRing, NumSet
from .finite_groups import (FiniteGroup, cyclic, dihedral, direct_product, from_abelian, generated_subgroup, max_order, quaternion, symmetric, alternating)
from .postnikov import Level, PostnikovData


class InputError(ValueError):
    """Malformed input; ``where`` names the offending field."""

    def __init__(self, where: str, msg: str):
        self.where = where
        super().__init__(f"{where}: {msg}")


def max_torsion() -> int:
    env = os.environ.get("NILFRACT_MAX_ORDER")
    return int(env) if env else 200


# --------------------------------------------------------------------------
# scalars and elements

def scalar_json(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    return x


def scalar_parse(x, where="value"):
    if isinstance(x, bool):
        raise InputError(where, "expected a number")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            f = Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise InputError(where, f"not a rational number: {x!r}") from None
        return f.numerator if f.denominator == 1 else f
    raise InputError(where, "expected an integer or an 'a/b' string")


def vector_json(v):
    return [scalar_json(x) for x in v]


def matrix_json(m):
    return [vector_json(r) for r in m]


# --------------------------------------------------------------------------
# groups

_NAMED = re.compile(r"^(cyclic|quaternion|dihedral|symmetric|alternating|free-abelian):(\d+)$")


def _named(token: str, where: str):
    token = token.strip()
    if token.startswith("ab:"):
        try:
            orders = json.loads(token[3:])
        except json.JSONDecodeError as e:
            raise InputError(where, f"bad torsion list at column {e.colno}") from None
        if not isinstance(orders, list) or not all(isinstance(d, int) and d >= 0 for d in orders):
            raise InputError(where, "ab:[...] needs a list of nonnegative integers")
        return FgAbelianGroup.from_invariants(orders)
    m = _NAMED.match(token)
    if not m:
        raise InputError(where, f"unknown group constructor {token!r}")
    kind, n = m.group(1), int(m.group(2))
    try:
        if kind == "cyclic":
            return cyclic(n)
        if kind == "free-abelian":
            return FgAbelianGroup(n)
        if kind == "quaternion":
            return quaternion(n)
        if kind == "dihedral":
            return dihedral(n)
        if kind == "symmetric":
            return symmetric(n)
        return alternating(n)
    except (ValueError, AssertionError) as e:
        raise InputError(where, str(e)) from None


def _as_finite(G, where: str) -> FiniteGroup:
    if isinstance(G, FiniteGroup):
        return G
    if not G.is_finite:
        raise InputError(where, f"{G} is infinite and cannot be combined with non-abelian factors")
    F, _ = from_abelian(G)
    return FiniteGroup(F.cayley, name=str(G))


def _as_abelian(G) -> FgAbelianGroup:
    if isinstance(G, FgAbelianGroup):
        return G
    from .finite_groups import abelian_invariants
    return abelian_invariants(G)


def _product(factors, where: str):
    if len(factors) == 1:
        return factors[0]
    abel = [isinstance(G, FgAbelianGroup) or G.is_abelian() for G in factors]
    if any(isinstance(G, FgAbelianGroup) for G in factors) and all(abel):
        parts = [_as_abelian(G) for G in factors]
        orders = [0] * sum(p.free_rank for p in parts) + [d for p in parts for d in p.torsion]
        return FgAbelianGroup.from_invariants(orders)
    out = _as_finite(factors[0], where)
    for G in factors[1:]:
        out = direct_product(out, _as_finite(G, where))
    return out


def parse_group(spec: Any, where: str = "group"):
    """A named constructor string, a JSON string, or an already-decoded dict."""
    if isinstance(spec, str):
        s = spec.strip()
        if s.startswith("{"):
            try:
                spec = json.loads(s)
            except json.JSONDecodeError as e:
                raise InputError(where, f"invalid JSON at line {e.lineno} column {e.colno}") from None
        else:
            G = _product([_named(t, where) for t in _split_product(s)], where)
            _check_size(G, where)
            return G
    if not isinstance(spec, dict):
        raise InputError(where, "expected a group name or object")
    if "spec" in spec:
        return parse_group(spec["spec"], f"{where}.spec")
    if "cayley" in spec:
        G = _finite_from_json(spec, where)
    elif "torsion" in spec or "free_rank" in spec:
        G = _abelian_from_json(spec, where)
    else:
        raise InputError(where, "group object needs 'cayley', 'torsion'/'free_rank' or 'spec'")
    _check_size(G, where)
    return G


def _split_product(s: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in s:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "x" and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return parts


def _check_size(G, where):
    if isinstance(G, FiniteGroup):
        if G.order > max_order():
            raise InputError(where, f"order {G.order} exceeds the limit {max_order()} (NILFRACT_MAX_ORDER)")
    elif prod(G.torsion) > max_torsion():
        raise InputError(where, f"torsion order {prod(G.torsion)} exceeds the limit {max_torsion()}")


def _finite_from_json(d: dict, where: str) -> FiniteGroup:
    table = d["cayley"]
    if not isinstance(table, list) or not all(isinstance(r, list) for r in table):
        raise InputError(f"{where}.cayley", "expected a list of rows")
    if "order" in d and d["order"] != len(table):
        raise InputError(f"{where}.order", f"order {d['order']} does not match {len(table)} rows")
    try:
        G = FiniteGroup(tuple(tuple(r) for r in table), labels=d.get("labels"), name=d.get("name"))
    except (ValueError, TypeError) as e:
        raise InputError(f"{where}.cayley", str(e)) from None
    errs = G.validate()
    if errs:
        raise InputError(f"{where}.cayley", errs[0])
    return G


def _abelian_from_json(d: dict, where: str) -> FgAbelianGroup:
    ring = d.get("ring", {}) or {}
    try:
        R = LocalizedRing(tuple(ring.get("inverted_primes", ())))
        orders = [0] * int(d.get("free_rank", 0)) + [int(t) for t in d.get("torsion", [])]
        return FgAbelianGroup.from_invariants(orders, R)
    except (ValueError, TypeError, AttributeError) as e:
        raise InputError(where, str(e)) from None


def group_json(G) -> dict:
    if isinstance(G, FiniteGroup):
        out = {"order": G.order, "cayley": [list(r) for r in G.cayley]}
        if G.name:
            out["name"] = G.name
        if G.labels:
            out["labels"] = list(G.labels)
        return out
    return {"free_rank": G.free_rank, "torsion": list(G.torsion),
            "ring": {"inverted_primes": list(G.ring.inverted_primes)}, "display": str(G)}


def group_summary(G) -> dict:
    if isinstance(G, FiniteGroup):
        out = {"kind": "finite", "order": G.order, "name": str(G)}
        if G.is_abelian():
            out["abelian_invariants"] = str(_as_abelian(G))
        return out
    return {"kind": "abelian", "display": str(G), "free_rank": G.free_rank,
            "torsion": list(G.torsion), "ring": str(G.ring)}


def hom_json(h) -> dict:
    if isinstance(h, AbelianHom):
        return {"matrix": matrix_json(h.matrix)}
    return {"images": list(h.images)}


def numset_parse(x, where: str = "set") -> NumSet:
    if isinstance(x, str) and x.strip().startswith("{"):
        try:
            x = json.loads(x)
        except json.JSONDecodeError:
            raise InputError(where, "invalid JSON") from None
    if isinstance(x, dict):
        x = x.get("entries", [])
    if isinstance(x, str):
        x = x.strip()
        if x.startswith("["):
            try:
                x = json.loads(x)
            except json.JSONDecodeError:
                raise InputError(where, "invalid list") from None
        else:
            x = [t for t in x.split(",") if t.strip()]
    try:
        return NumSet(tuple(int(v) for v in x))
    except (ValueError, TypeError) as e:
        raise InputError(where, str(e)) from None


# --------------------------------------------------------------------------
# actions and chains

def _element(H, x, where):
    if isinstance(H, FgAbelianGroup):
        if not isinstance(x, list) or len(x) != H.ngens:
            raise InputError(where, f"expected a coordinate list of length {H.ngens}")
        return H.normalize([scalar_parse(v, where) for v in x])
    if not isinstance(x, int) or not 0 <= x < H.order:
        raise InputError(where, f"expected an element index below {H.order}")
    return x


def _element_json(H, x):
    return vector_json(x) if isinstance(H, FgAbelianGroup) else x


def parse_action(actor: FiniteGroup, target, spec, where: str = "action") -> GroupAction:
    """'trivial', 'conjugation', or {"autos": {g: auto}} given on generators
    of the actor; autos of other elements follow from the action law."""
    if spec is None or spec == "trivial":
        return GroupAction.trivial(actor, target)
    if spec == "conjugation":
        if target != actor:
            raise InputError(where, "conjugation needs the actor acting on itself")
        return GroupAction.conjugation(actor)
    if isinstance(spec, dict) and "autos" in spec:
        spec = spec["autos"]
        if spec in ("trivial", "conjugation"):
            return parse_action(actor, target, spec, where)
    if not isinstance(spec, dict):
        raise InputError(where, "expected 'trivial', 'conjugation' or a map of automorphisms")
    given = {}
    for k, v in spec.items():
        try:
            g = int(k)
        except ValueError:
            raise InputError(f"{where}.{k}", "keys must be actor element indices") from None
        if not 0 <= g < actor.order:
            raise InputError(f"{where}.{k}", "actor element out of range")
        given[g] = _parse_auto(target, v, f"{where}.{k}")
    autos = _close_autos(actor, target, given, where)
    try:
        return GroupAction(actor, target, tuple(autos))
    except (ValueError, InvalidStructure) as e:
        raise InputError(where, str(e)) from None


def _parse_auto(H, v, where):
    if isinstance(H, FgAbelianGroup):
        if not isinstance(v, list) or len(v) != H.ngens:
            raise InputError(where, f"expected a {H.ngens}x{H.ngens} matrix")
        try:
            return AbelianHom(H, H, [[scalar_parse(x, where) for x in row] for row in v])
        except ValueError as e:
            raise InputError(where, str(e)) from None
    if not isinstance(v, list) or len(v) != H.order:
        raise InputError(where, f"expected an image list of length {H.order}")
    return tuple(v)


def _apply(a, x):
    return a(x) if isinstance(a, AbelianHom) else a[x]


def _compose(H, a, b):
    if isinstance(a, AbelianHom):
        return a.compose(b)
    return tuple(a[b[x]] for x in range(H.order))


def _close_autos(G: FiniteGroup, H, given: dict, where: str) -> list:
    ident = AbelianHom.identity(H) if isinstance(H, FgAbelianGroup) else tuple(range(H.order))
    autos = [None] * G.order
    autos[G.identity] = ident
    frontier = [G.identity]
    while frontier:
        nxt = []
        for g in frontier:
            for s, a in sorted(given.items()):
                gs = G.mul(g, s)
                val = _compose(H, autos[g], a)
                if autos[gs] is None:
                    autos[gs] = val
                    nxt.append(gs)
                elif autos[gs] != val:
                    raise InputError(where, f"automorphisms violate the action law at element {gs}")
        frontier = nxt
    for s, a in given.items():
        if autos[s] != a:
            raise InputError(where, f"automorphism of element {s} is inconsistent with the action law")
    if any(a is None for a in autos):
        raise InputError(where, "given elements do not generate the actor")
    return autos


def action_json(a: GroupAction) -> dict:
    if _is_trivial(a):
        return {"autos": "trivial"}
    if a.target == a.actor and isinstance(a.target, FiniteGroup) and a == GroupAction.conjugation(a.actor):
        return {"autos": "conjugation"}
    out = {}
    for g in a.actor.elements:
        auto = a.autos[g]
        out[str(g)] = matrix_json(auto.matrix) if isinstance(auto, AbelianHom) else list(auto)
    return {"autos": out}


def _is_trivial(a: GroupAction) -> bool:
    from .actions import is_trivial_action
    return is_trivial_action(a)


def parse_chain(action: GroupAction, spec, where: str = "chain") -> list:
    """'lcs' for the fastest descending series, or a list of terms from
    bottom to top, each term a list of (generating) elements."""
    H = action.target
    if spec is None or spec == "lcs":
        st = alpha_lower_central_series(action)
        if st is None:
            raise InputError(where, "the action admits no nilpotent structure")
        return list(st.chain)
    if not isinstance(spec, list):
        raise InputError(where, "expected 'lcs' or a list of terms")
    out = []
    for i, term in enumerate(spec):
        w = f"{where}[{i}]"
        if not isinstance(term, list):
            raise InputError(w, "expected a list of elements")
        elems = [_element(H, x, f"{w}") for x in term]
        if isinstance(H, FgAbelianGroup):
            out.append(AbelianSubgroup(H, elems))
        else:
            out.append(generated_subgroup(H, elems))
    return out


def chain_json(chain) -> list:
    out = []
    for S in chain:
        if isinstance(S, AbelianSubgroup):
            out.append([vector_json(g) for g in S.gens])
        else:
            out.append(list(S.elements))
    return out


# --------------------------------------------------------------------------
# towers

def parse_tower(d: dict, where: str = "tower") -> PostnikovData:
    if not isinstance(d, dict):
        raise InputError(where, "expected an object")
    try:
        N = int(d["truncation"])
    except (KeyError, TypeError, ValueError):
        raise InputError(f"{where}.truncation", "required integer") from None
    p = d.get("pi1")
    if p is None:
        raise InputError(f"{where}.pi1", "required")
    gspec = p.get("group", p) if isinstance(p, dict) else p
    G = parse_group(gspec, f"{where}.pi1")
    G = _as_finite(G, f"{where}.pi1")
    conj = GroupAction.conjugation(G)
    chain_spec = p.get("chain", "lcs") if isinstance(p, dict) else "lcs"
    if chain_spec == "lcs":
        st = alpha_lower_central_series(conj)
        chain = list(st.chain) if st is not None else [G.trivial(), G.whole()]
    else:
        chain = parse_chain(conj, chain_spec, f"{where}.pi1.chain")
    levels = []
    for i, lv in enumerate(d.get("levels", [])):
        w = f"{where}.levels[{i}]"
        if not isinstance(lv, dict) or "group" not in lv:
            raise InputError(w, "level needs 'n' and 'group'")
        H = parse_group(lv["group"], f"{w}.group")
        act = parse_action(G, H, lv.get("action", "trivial"), f"{w}.action")
        ch = parse_chain(act, lv.get("chain", "lcs"), f"{w}.chain")
        levels.append(Level(int(lv.get("n", i + 2)), act, ch))
    return PostnikovData(N, G, chain, levels)


def numset_json(s: NumSet) -> dict:
    return {"entries": list(s.entries)}


def tower_json(x: PostnikovData) -> dict:
    pi1 = group_json(x.pi1)
    pi1["chain"] = chain_json(x.pi1_chain)
    levels = []
    for lvl in x.levels:
        levels.append({"n": lvl.n, "group": group_json(lvl.group), "action": action_json(lvl.action),
                       "chain": chain_json(lvl.chain)})
    return {"truncation": x.truncation, "pi1": pi1, "levels": levels}


# --------------------------------------------------------------------------

@dataclass
class Report:
    command: dict
    result: Any = None
    certificates: Any = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    passed: bool = True

    def to_json(self) -> str:
        body = {"command": self.command, "result": self.result, "certificates": self.certificates,
                "warnings": sorted(set(self.warnings)), "passed": self.passed}
        return json.dumps(_plain(body), sort_keys=True, indent=2) + "\n"


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Fraction):
        return scalar_json(x)
    if isinstance(x, (FgAbelianGroup, FiniteGroup)):
        return str(x)
    return x
