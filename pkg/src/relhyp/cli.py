"""Command line interface.

Exit status: 0 on success or a passing verdict, 2 on a failing verdict,
1 on usage or construction errors.  Artifacts (DOT, JSON, CSV, PNG) go to
``--out``; every JSON/CSV artifact records the seed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import groups as grp
from .complexes import BudgetExceeded, GraphError, LabeledGraph, bass_serre_ball, coned_off_ball, coset_ball, relative_ball
from .hyperbolicity import DeltaRefused, delta_four_point, delta_series, delta_slim, series_csv
from .isoperimetry import TruncationError, cycle_ball, cycle_from_word, fill_cycle, hnn_decompose
from .plotting import plot_delta_series
from .qi import check_qi_map, eqdef_check, lipschitz_orbit_bound
from .stallings import MembershipError, basis_alphabet, express_in_basis, fold, member
from .words import AlphabetError, format_word, parse_word

BUILTINS = {
    "free2": lambda: grp.free(2),
    "z2": lambda: grp.free_abelian(2),
    "z3": lambda: grp.free_abelian(3),
    "commuting-hnn": grp.commuting_hnn,
    "comm-hnn": grp.commutator_hnn,
    "swap-hnn": grp.swap_hnn,
    "trivial-hnn": grp.trivial_hnn,
    "amalgam": lambda: grp.group_from_json(
        {"type": "amalgam", "H": {"type": "free", "names": ["a", "b"]}, "K": {"type": "free", "names": ["c", "d"]},
         "A": ["a"], "B": ["c"]}
    ),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def load_json_arg(text: str):
    """Inline JSON, or a path to a JSON file."""
    s = text.strip()
    if s[:1] in "[{":
        return json.loads(s)
    p = Path(text)
    if not p.exists():
        raise UsageError(f"no such file: {text}")
    return json.loads(p.read_text())


def load_group(text: str) -> grp.Group:
    if text in BUILTINS:
        return BUILTINS[text]()
    return grp.group_from_json(load_json_arg(text))


def _word(G, text: str):
    return parse_word(text, G.alphabet)


def _write(out: Path, name: str, data) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    if isinstance(data, str):
        path.write_text(data)
    else:
        path.write_text(json.dumps(data, indent=2, default=str) + "\n")
    return path


# --------------------------------------------------------------------------
# argument groups


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0, help="seed for sampled procedures (recorded in artifacts)")
    p.add_argument("--threads", type=int, default=None, help="threads for the parallel scans (default: all)")
    p.add_argument("--out", type=Path, default=Path("relhyp_out"), help="artifact directory")


def _ball_args(p: argparse.ArgumentParser, radius: int = 2):
    p.add_argument("--group", required=True, help="group JSON (inline or file) or a built-in name: " + ", ".join(BUILTINS))
    p.add_argument("-X", "--gens", nargs="+", default=None, help="relative generating set (words); default: all generators")
    p.add_argument("--parabolic", action="append", default=[], help="parabolic subgroup JSON; repeat for several")
    p.add_argument("-r", "--radius", type=int, default=radius)
    p.add_argument("--R-H", dest="R_H", type=int, default=2, help="length cap for parabolic elements")


def _gens(G, args):
    return args.gens if args.gens else list(G.alphabet.names)


def _pars(args):
    return [load_json_arg(p) for p in args.parabolic]


def _build(kind: str, G, args, r: int | None = None) -> LabeledGraph:
    r = args.radius if r is None else r
    if kind == "relative":
        return relative_ball(G, _gens(G, args), _pars(args), r, args.R_H, check_exact=getattr(args, "check_exact", False))
    if kind == "coset":
        return coset_ball(G, _gens(G, args), _pars(args), r, args.R_H, check_exact=getattr(args, "check_exact", False))
    if kind == "coned":
        return coned_off_ball(G, _gens(G, args), _pars(args), r, args.R_H)
    if kind == "tree":
        return bass_serre_ball(G, r, args.R_H)
    raise UsageError(f"unknown ball kind {kind!r}")


# --------------------------------------------------------------------------
# commands


def cmd_ball(args, kind: str) -> int:
    G = load_group(args.group)
    g = _build(kind, G, args)
    name = {"relative": "ball", "coset": "coset", "coned": "coned", "tree": "tree"}[kind]
    data = g.to_json()
    data["meta"]["seed"] = args.seed
    if kind == "tree":
        data["meta"]["acyclic"] = g.is_acyclic()
    _write(args.out, f"{name}.json", data)
    _write(args.out, f"{name}.dot", g.to_dot())
    summary = {"kind": kind, "vertices": g.n, "edges": len(g.edges), "exact": g.meta.get("exact"), "out": str(args.out)}
    if kind == "tree":
        summary["acyclic"] = g.is_acyclic()
    print(json.dumps(summary))
    return 0 if kind != "tree" or g.is_acyclic() else 2


def cmd_delta(args) -> int:
    G = load_group(args.group)
    g = _build(args.kind, G, args)
    if args.mode == "slim":
        rep = delta_slim(g, args.slim_budget, seed=args.seed)
    else:
        rep = delta_four_point(g, args.mode, threads=args.threads)
    data = rep.to_json()
    data["seed"] = args.seed
    data["ball"] = {"kind": args.kind, "r": args.radius, "R_H": args.R_H}
    _write(args.out, "delta.json", data)
    print(json.dumps({"delta": str(rep.delta), "method": rep.method, "n_vertices": rep.n_vertices}))
    return 0


def cmd_delta_series(args) -> int:
    G = load_group(args.group)
    s = delta_series(lambda r: _build(args.kind, G, args, r), args.radii, args.mode, label=args.label or args.kind, threads=args.threads)
    _write(args.out, "delta_series.csv", series_csv([s], args.seed))
    plot_delta_series([s], args.out / "delta_series.png")
    print(json.dumps({"verdict": s.verdict, "values": [str(v) for v in s.values()]}))
    if args.expect and s.verdict != args.expect:
        return 2
    return 0


def cmd_qi_eqdef(args) -> int:
    G = load_group(args.group)
    alpha, iota = eqdef_check(G, _gens(G, args), _pars(args), args.radius, args.R_H)
    data = {"alpha": alpha.to_json(), "iota": iota.to_json(), "seed": args.seed}
    _write(args.out, "eqdef.json", data)
    print(json.dumps({"alpha": alpha.passed, "iota": iota.passed, "provisional": alpha.provisional}))
    return 0 if alpha.passed and iota.passed else 2


def _assoc(text: str):
    data = load_json_arg(text)
    if isinstance(data, dict):
        return {int(k): int(v) for k, v in data.items()}
    return [int(v) for v in data]


def cmd_qi_map(args) -> int:
    G1 = LabeledGraph.from_json(load_json_arg(args.source))
    G2 = LabeledGraph.from_json(load_json_arg(args.target))
    m = _assoc(args.map)
    v = check_qi_map(m, G1, G2, Fraction(args.lam), Fraction(args.c), Fraction(args.epsilon))
    lip = lipschitz_orbit_bound(G1, G2, m, inverse=_assoc(args.inverse) if args.inverse else None)
    data = {"qi": v.to_json(), "lipschitz": lip.to_json(), "seed": args.seed}
    _write(args.out, "qi_map.json", data)
    print(json.dumps({"qi": v.passed, "lipschitz": lip.verdict, "M": str(lip.M)}))
    return 0 if v.passed else 2


def cmd_britton(args) -> int:
    G = load_group(args.group)
    if not isinstance(G, grp.HNNExtension):
        raise UsageError("britton needs an HNN extension")
    w = _word(G, args.word)
    steps = []
    while (p := G.pinch_find(w)) is not None:
        steps.append({"word": format_word(w), "start": p.start, "stop": p.stop, "side": p.side})
        w = G.apply_pinch(w, p)
    print(format_word(w))
    _write(args.out, "britton.json", {"input": args.word, "reduced": format_word(w), "pinches": steps, "seed": args.seed})
    return 0


def cmd_member(args) -> int:
    G = load_group(args.group)
    if not isinstance(G, grp.FreeGroup):
        raise UsageError("member needs a free group")
    gens = load_json_arg(args.subgroup)
    S = fold([_word(G, g) for g in gens], G.alphabet)
    w = _word(G, args.word)
    ok = member(S, w)
    data = {"word": args.word, "subgroup": gens, "member": ok, "rank": S.rank, "basis": [format_word(b) for b in S.basis]}
    if ok and args.express:
        x = express_in_basis(S, w)
        data["expression"] = format_word(x)
        data["basis_names"] = list(basis_alphabet(S).names)
    print("true" if ok else "false")
    if "expression" in data:
        print(data["expression"])
    _write(args.out, "member.json", data | {"seed": args.seed})
    return 0


def cmd_reduce(args) -> int:
    G = load_group(args.group)
    w = _word(G, args.word)
    el = G.normal_form(w)
    print(format_word(el.word))
    _write(args.out, "reduce.json", {"input": args.word, "normal_form": format_word(el.word), "identity": G.is_identity(w), "seed": args.seed})
    return 0


def cmd_decompose(args) -> int:
    G = load_group(args.group)
    w = _word(G, args.word)
    if not G.is_identity(w):
        raise UsageError(f"{args.word} is not the identity, so it does not label a cycle")
    if isinstance(G, grp.HNNExtension):
        pars = _pars(args) or [G.A.spec.to_json(), G.B.spec.to_json()]
        g = cycle_ball(G, _gens(G, args), pars, w, args.margin, args.R_H)
        rep = hnn_decompose(g, cycle_from_word(g, w), args.M)
    else:
        g = cycle_ball(G, _gens(G, args), _pars(args), w, args.margin, args.R_H)
        rep = fill_cycle(g, cycle_from_word(g, w), args.M)
    data = rep.to_json()
    data.update({"word": args.word, "ok": rep.ok, "seed": args.seed, "vertices": g.n})
    _write(args.out, "decompose.json", data)
    print(json.dumps({"k": rep.k, "l": rep.length, "n": rep.n, "L": str(rep.L), "ok": rep.ok}))
    return 0 if rep.ok else 2


def cmd_experiment(args) -> int:
    from .presets import PRESETS

    if args.preset not in PRESETS:
        raise UsageError(f"unknown preset {args.preset!r}; choose from {', '.join(PRESETS)}")
    res = PRESETS[args.preset].run(args.out, args.seed, args.threads)
    print(json.dumps({"preset": args.preset, "pass": res["pass"], "out": str(args.out)}))
    return 0 if res["pass"] else 2


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="relhyp", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for kind, name, hlp in (
        ("relative", "ball", "relative Cayley ball"),
        ("coset", "coset", "left coset graph ball"),
        ("coned", "coned", "coned-off Cayley ball"),
        ("tree", "tree", "Bass-Serre tree ball"),
    ):
        p = sub.add_parser(name, help=hlp)
        _ball_args(p)
        if kind in ("relative", "coset"):
            p.add_argument("--check-exact", action="store_true", help="rebuild with R_H+2 and compare distances")
        _common(p)
        p.set_defaults(func=lambda a, k=kind: cmd_ball(a, k))

    p = sub.add_parser("delta", help="Gromov delta of one ball")
    _ball_args(p)
    p.add_argument("--kind", choices=["relative", "coset", "coned", "tree"], default="relative")
    p.add_argument("--mode", choices=["exact", "basepoint", "slim"], default="exact")
    p.add_argument("--slim-budget", type=int, default=20000)
    _common(p)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("delta-series", help="delta over increasing radii with a trend verdict")
    _ball_args(p)
    p.add_argument("--kind", choices=["relative", "coset", "coned", "tree"], default="relative")
    p.add_argument("--mode", choices=["exact", "basepoint"], default="exact")
    p.add_argument("--radii", type=int, nargs="+", required=True)
    p.add_argument("--label", default="")
    p.add_argument("--expect", choices=["bounded", "growing", "inconclusive"], default=None)
    _common(p)
    p.set_defaults(func=cmd_delta_series)

    p = sub.add_parser("qi-eqdef", help="relative ball vs coset and coned-off balls")
    _ball_args(p, radius=3)
    _common(p)
    p.set_defaults(func=cmd_qi_eqdef)

    p = sub.add_parser("qi-map", help="check a vertex map between two exported balls")
    p.add_argument("--source", required=True, help="graph JSON as written by the ball commands")
    p.add_argument("--target", required=True)
    p.add_argument("--map", required=True, help="JSON list or {source id: target id}")
    p.add_argument("--inverse", default=None, help="optional map back, for the two-sided Lipschitz check")
    p.add_argument("--lambda", dest="lam", default="1")
    p.add_argument("--c", default="0")
    p.add_argument("--epsilon", default="0")
    _common(p)
    p.set_defaults(func=cmd_qi_map)

    p = sub.add_parser("britton", help="Britton-reduce a word in an HNN extension")
    p.add_argument("--group", required=True)
    p.add_argument("--word", required=True)
    _common(p)
    p.set_defaults(func=cmd_britton)

    p = sub.add_parser("member", help="subgroup membership in a free group")
    p.add_argument("--group", required=True)
    p.add_argument("--subgroup", required=True, help='JSON list of generators, e.g. \'["a^2","a b"]\'')
    p.add_argument("--word", required=True)
    p.add_argument("--express", action="store_true", help="also print the word in the free basis")
    _common(p)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("reduce", help="canonical normal form of a word")
    p.add_argument("--group", required=True)
    p.add_argument("--word", required=True)
    _common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("decompose", help="bounded-diameter decomposition of the cycle read from an identity word")
    p.add_argument("--group", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("-X", "--gens", nargs="+", default=None)
    p.add_argument("--parabolic", action="append", default=[])
    p.add_argument("-M", type=int, default=4, help="piece diameter bound (>= 4)")
    p.add_argument("--margin", type=int, default=1, help="radius of the ball grown around the cycle")
    p.add_argument("--R-H", dest="R_H", type=int, default=4)
    _common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("experiment", help="run a named preset")
    p.add_argument("preset", help="z-chain, tree-comparison, comm-hnn or free-relative")
    _common(p)
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, grp.GroupSpecError, AlphabetError, MembershipError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (BudgetExceeded, GraphError, DeltaRefused, TruncationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
