"""Command line: nilfract <verb> ...

Exit status 0 when every check passes, 1 on a mathematical failure, 2 on
bad input.  Reports are JSON with sorted keys, so identical inputs give
byte-identical output.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .abelian import FgAbelianGroup, finite_abelian_groups
from .actions import (GroupAction, InvalidStructure, NilpotentStructure, alpha_lower_central_series,
                      structure_to_tower, tower_to_structure)
from .finite_groups import (FiniteGroup, NotNilpotentError, abelian_invariants, is_nilpotent,
                            lower_central_series)
from .fracture import (CoprimalityError, FractureFamilies, fracture_colimit_row_check,
                       fracture_nilpotent_group, fracture_postnikov, fracture_square_abelian)
from .localization import DescentError, initiality_check, is_local_group, localize_group
from .postnikov import localize_tower, nilpotency_degree, principal_factorization, validate
from .serialize import (InputError, Report, action_json, chain_json, group_json, group_summary, hom_json, numset_parse, parse_action, parse_chain, parse_group, parse_tower, tower_json)
from .snf import IntMatrix, smith_normal_form

INITIALITY_TARGET_MAX = 12


def _load_json_arg(text: str, where: str):
    """Inline JSON, or @path to read it from a file."""
    if text.startswith("@"):
        try:
            text = Path(text[1:]).read_text()
        except OSError as e:
            raise InputError(where, f"cannot read {text[1:]}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(where, f"invalid JSON at line {e.lineno} column {e.colno}") from None


def _load_tower(path: str):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as e:
        raise InputError("tower", f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError("tower", f"invalid JSON at line {e.lineno} column {e.colno}") from None
    return parse_tower(data)


def _group_arg(text: str, where: str = "group"):
    if text.startswith("@"):
        return parse_group(_load_json_arg(text, where), where)
    return parse_group(text, where)


# --------------------------------------------------------------------------
# verbs

def cmd_snf(args) -> Report:
    rows = _load_json_arg(args.matrix, "matrix")
    if (not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows)
            or len({len(r) for r in rows}) != 1
            or not all(isinstance(x, int) and not isinstance(x, bool) for r in rows for x in r)):
        raise InputError("matrix", "expected a nonempty rectangular list of integer rows")
    m = IntMatrix.from_rows(rows)
    u, d, v = smith_normal_form(m)
    ok = (u @ m @ v).to_rows() == d.to_rows() and abs(u.det()) == 1 and abs(v.det()) == 1
    diag = d.diagonal()
    chain = [x for x in diag if x]
    ok = ok and all(b % a == 0 for a, b in zip(chain, chain[1:]))
    return Report({"verb": "snf", "matrix": rows},
                  {"u": u.to_rows(), "d": d.to_rows(), "v": v.to_rows(), "diagonal": list(diag)},
                  {"u_m_v_equals_d": (u @ m @ v).to_rows() == d.to_rows(),
                   "det_u": u.det(), "det_v": v.det(), "divisibility_chain": ok}, passed=ok)


def cmd_localize(args) -> Report:
    G = _group_arg(args.group)
    s = numset_parse(args.away, "away")
    try:
        loc = localize_group(G, s)
    except NotNilpotentError as e:
        raise InputError("group", str(e)) from None
    certs = {"local": is_local_group(loc.localized, s), "unit": hom_json(loc.unit), "details": loc.certificate}
    warnings = []
    A = G if isinstance(G, FgAbelianGroup) else (abelian_invariants(G) if G.is_abelian() else None)
    if A is not None and A.is_finite and A.ring.inverted_primes == ():
        checks = [initiality_check(A, s, L) for L in finite_abelian_groups(INITIALITY_TARGET_MAX, 2)
                  if is_local_group(L, s)]
        certs["initiality"] = {"targets_checked": len(checks), "all_bijective": all(c["bijective"] for c in checks),
                               "max_target_order": INITIALITY_TARGET_MAX}
    else:
        warnings.append("initiality not enumerated for this group")
    passed = certs["local"] and certs.get("initiality", {}).get("all_bijective", True)
    return Report({"verb": "localize", "group": args.group, "away": list(s.entries)},
                  {"input": group_summary(G), "localized": group_summary(loc.localized),
                   "localized_group": group_json(loc.localized)},
                  certs, warnings, passed)


def _families(args) -> FractureFamilies:
    if args.r is None or args.s is None:
        raise InputError("r/s", "both --r and --s are required")
    R, S = numset_parse(args.r, "r"), numset_parse(args.s, "s")
    try:
        return FractureFamilies(R, S)
    except CoprimalityError as e:
        raise InputError(f"r[{e.pair[0]}]/s[{e.pair[1]}]", str(e)) from None
    except ValueError as e:
        raise InputError("r/s", str(e)) from None


def cmd_fracture(args) -> Report:
    fams = _families(args)
    cmd = {"verb": "fracture", "r": list(fams.R.entries), "s": list(fams.S.entries)}
    warnings = []
    if args.tower:
        x = _load_tower(args.tower)
        cmd["tower"] = Path(args.tower).name
        rep = fracture_postnikov(x, fams)
        if any(l["certificate"].get("sampled") for l in rep["levels"][1:]):
            warnings.append("free parts sampled, not exhaustive")
        return Report(cmd, {"levels": [{"n": l["n"], "passed": l["passed"]} for l in rep["levels"]]},
                      rep, warnings, rep["passed"])
    if args.group is None:
        raise InputError("group", "give --group or --tower")
    G = _group_arg(args.group)
    cmd["group"] = args.group
    if isinstance(G, FiniteGroup) and not G.is_abelian():
        if not is_nilpotent(G):
            raise InputError("group", f"{G} is not nilpotent")
        rep = fracture_nilpotent_group(G, fams)
        return Report(cmd, {"passed": rep["passed"], "corners": rep["corners"]}, rep, warnings, rep["passed"])
    A = G if isinstance(G, FgAbelianGroup) else abelian_invariants(G)
    if A.ring.inverted_primes:
        raise InputError("group", "fracture squares start from a group over Z")
    cert = fracture_square_abelian(A, fams, seed=args.seed)
    ok = cert.passed and cert.verify()
    if cert.sampled:
        warnings.append("free parts sampled, not exhaustive")
    certs = {"square": cert.to_json()}
    result = {"group": str(A), "corners": {k: str(v) for k, v in cert.groups.items()}, "square_passed": ok}
    if args.depth is not None:
        try:
            rows = fracture_colimit_row_check(A, fams, args.depth)
        except ValueError as e:
            raise InputError("depth", str(e)) from None
        certs["colimit_rows"] = rows
        result["colimit_rows_passed"] = rows["passed"]
        ok = ok and rows["passed"]
    return Report(cmd, result, certs, warnings, ok)


def cmd_nilpotency(args) -> Report:
    G = _group_arg(args.group)
    if isinstance(G, FgAbelianGroup):
        if not G.is_finite:
            return Report({"verb": "nilpotency", "group": args.group},
                          {"nilpotent": True, "class": 1 if G.free_rank else 0}, {}, ["abelian groups are nilpotent"])
        from .finite_groups import from_abelian
        G = from_abelian(G)[0]
    lcs = lower_central_series(G)
    nil = is_nilpotent(G)
    st = alpha_lower_central_series(GroupAction.conjugation(G))
    agree = (st is not None) == nil
    result = {"nilpotent": nil, "lower_central_series_orders": [S.order for S in lcs]}
    if st is not None:
        result["class"] = st.length
        result["chain"] = chain_json(st.chain)
    return Report({"verb": "nilpotency", "group": args.group}, result,
                  {"action_series_agrees": agree}, [], agree)


def _action_and_chain(args):
    G = _group_arg(args.group)
    if isinstance(G, FgAbelianGroup) and args.actor is None:
        from .finite_groups import from_abelian
        if G.is_finite:
            G = from_abelian(G)[0]
    if args.actor is None:
        if not isinstance(G, FiniteGroup):
            raise InputError("actor", "an infinite target needs --actor and --action")
        actor, target, default = G, G, "conjugation"
    else:
        actor, target, default = _group_arg(args.actor, "actor"), G, "trivial"
        if not isinstance(actor, FiniteGroup):
            from .finite_groups import from_abelian
            actor = from_abelian(actor)[0] if actor.is_finite else None
            if actor is None:
                raise InputError("actor", "the acting group must be finite")
    spec = _load_json_arg(args.action, "action") if args.action else default
    act = parse_action(actor, target, spec, "action")
    chain_spec = _load_json_arg(args.chain, "chain") if args.chain and args.chain != "lcs" else "lcs"
    chain = parse_chain(act, chain_spec, "chain")
    try:
        return NilpotentStructure(act, chain)
    except InvalidStructure as e:
        raise InputError("chain", str(e)) from None


def cmd_series_convert(args) -> Report:
    st = _action_and_chain(args)
    tower = structure_to_tower(st)
    back = tower_to_structure(tower)
    stages = []
    for i, stage in enumerate(tower.stages):
        entry = {"target": group_summary(stage.target)}
        if i < tower.length:
            entry["map_to_next"] = hom_json(tower.maps[i].hom)
            entry["kernel_order"] = _order(tower.kernels[i].target)
        stages.append(entry)
    ok = back == st
    return Report({"verb": "series-convert", "group": args.group, "chain": args.chain or "lcs"},
                  {"length": tower.length, "stages": stages, "chain": chain_json(st.chain),
                   "action": action_json(st.action)},
                  {"round_trip": ok, "kernel_actions_trivial": True}, [], ok)


def _order(H):
    return H.order if isinstance(H, FiniteGroup) else (H.order() if H.is_finite else "infinite")


def cmd_tower_validate(args) -> Report:
    x = _load_tower(args.tower)
    rep = validate(x)
    result = {"valid": rep["valid"], "failures": rep["failures"], "levels": rep["levels"]}
    if rep["valid"]:
        result["nilpotency_degree"] = nilpotency_degree(x)
    return Report({"verb": "tower-validate", "tower": Path(args.tower).name}, result, {}, [], rep["valid"])


def cmd_tower_localize(args) -> Report:
    x = _load_tower(args.tower)
    s = numset_parse(args.away, "away")
    rep = validate(x)
    if not rep["valid"]:
        return Report({"verb": "tower-localize", "tower": Path(args.tower).name, "away": list(s.entries)},
                      {"valid": False, "failures": rep["failures"]}, {}, [], False)
    y = localize_tower(x, s)
    direct = {}
    for old, new in zip(x.levels, y.levels):
        d = localize_group(old.group, s).localized
        direct[str(old.n)] = group_summary(d) == group_summary(new.group) if isinstance(d, FgAbelianGroup) \
            else d.order == new.group.order
    before, after = nilpotency_degree(x), nilpotency_degree(y)
    ok = validate(y)["valid"] and all(direct.values()) and after <= before
    return Report({"verb": "tower-localize", "tower": Path(args.tower).name, "away": list(s.entries)},
                  {"tower": tower_json(y), "pi1": group_summary(y.pi1),
                   "levels": {str(l.n): group_summary(l.group) for l in y.levels}},
                  {"validates": validate(y)["valid"], "levels_match_direct_localization": direct,
                   "nilpotency_degree": {"before": before, "after": after}}, [], ok)


def cmd_factorize(args) -> Report:
    x = _load_tower(args.tower)
    rep = validate(x)
    if not rep["valid"]:
        return Report({"verb": "factorize", "tower": Path(args.tower).name},
                      {"valid": False, "failures": rep["failures"]}, {}, [], False)
    f = principal_factorization(x)
    towers = []
    for n, t in f.towers:
        towers.append({"n": n, "length": t.length,
                       "stage_orders": [_order(s.target) for s in t.stages],
                       "kernel_orders": [_order(k.target) for k in t.kernels]})
    ok = f.round_trips(x) and f.total == nilpotency_degree(x)
    return Report({"verb": "factorize", "tower": Path(args.tower).name},
                  {"towers": towers, "total": f.total}, {"round_trip": f.round_trips(x)}, [], ok)


# --------------------------------------------------------------------------

def _group_args(s):
    s.add_argument("group_pos", nargs="?", metavar="GROUP", help="group name, JSON, or @file")
    s.add_argument("--group", dest="group_opt", help="same as the positional GROUP")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nilfract", description="Localization and fracture squares for nilpotent group data.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report to this file")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks (default 0)")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("snf", parents=[common], help="Smith normal form of an integer matrix")
    s.add_argument("matrix", help="JSON list of rows, or @file")
    s.set_defaults(func=cmd_snf)

    s = sub.add_parser("localize", parents=[common], help="localize a group away from --away")
    _group_args(s)
    s.add_argument("--away", required=True, help="comma list or JSON list of naturals")
    s.set_defaults(func=cmd_localize)

    s = sub.add_parser("fracture", parents=[common], help="check a fracture square")
    _group_args(s)
    s.add_argument("--tower", help="tower file; replaces GROUP")
    s.add_argument("--r", help="family R as a comma or JSON list of naturals")
    s.add_argument("--s", help="family S, entrywise coprime to R")
    s.add_argument("--depth", type=int, help="also check the colimit rows to this depth")
    s.set_defaults(func=cmd_fracture)

    s = sub.add_parser("nilpotency", parents=[common], help="decide nilpotency")
    _group_args(s)
    s.set_defaults(func=cmd_nilpotency)

    s = sub.add_parser("series-convert", parents=[common], help="central series to tower of epimorphisms")
    _group_args(s)
    s.add_argument("--actor", help="acting group (default: the group acting on itself by conjugation)")
    s.add_argument("--action", help="JSON action or @file")
    s.add_argument("--chain", help="'lcs' (default), JSON list of terms, or @file")
    s.set_defaults(func=cmd_series_convert)

    for verb, func, helptext in (("tower-validate", cmd_tower_validate, "validate a tower file"),
                                 ("tower-localize", cmd_tower_localize, "localize a tower file"),
                                 ("factorize", cmd_factorize, "principal factorization of a tower")):
        s = sub.add_parser(verb, parents=[common], help=helptext)
        s.add_argument("tower")
        if verb == "tower-localize":
            s.add_argument("--away", required=True)
        s.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        if hasattr(args, "group_pos"):
            args.group = args.group_opt or args.group_pos
            if args.group is None and not getattr(args, "tower", None):
                raise InputError("group", "a group is required")
        report = args.func(args)
        code = 0 if report.passed else 1
        text = report.to_json()
    except InputError as e:
        text = json.dumps({"error": {"field": e.where, "message": str(e)}}, sort_keys=True, indent=2) + "\n"
        code = 2
    except (InvalidStructure, DescentError, NotNilpotentError) as e:
        text = json.dumps({"error": {"message": str(e)}}, sort_keys=True, indent=2) + "\n"
        code = 1
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
