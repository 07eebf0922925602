"""Command-line front end.

    pukanszky puk RECIPE
    pukanszky mm RECIPE
    pukanszky distinguish RECIPE_A RECIPE_B
    pukanszky verify FAMILY [--height H] [--bound B] [--seed S]
    pukanszky oracle [--trials N] [--seed S]

FAMILY is a shorthand such as ``three_by_three:2`` or ``infinite_ut:2,5``.
Exit status: 0 on success, 2 for unreadable input, 3 when a standing
hypothesis fails, 4 when two independent computations disagree.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from itertools import combinations

from . import __version__
from .constructions import evaluate, load_recipe
from .cosets import (
    ball_restriction,
    classify,
    coset_invariant,
    double_coset_witness,
    exceptional_k_set,
    stabilizer,
    stabilizer_bruteforce,
)
from .errors import ConsistencyError, DomainError, GuardError, RecipeError
from .extnat import fmt
from .groups import ThreeByThree, TwoByTwo, enumerate_ball, family_from_shorthand, random_element
from .mm import distinguish, puk_of, to_json
from .oracle import run_trials

EXIT_OK, EXIT_INPUT, EXIT_GUARD, EXIT_CONSISTENCY = 0, 2, 3, 4
MAX_HEIGHT = 8
SCHEMA = 1


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(payload: dict) -> str:
    return json.dumps({"schema": SCHEMA, **payload}, indent=2, ensure_ascii=False) + "\n"


def cmd_puk(args) -> int:
    ev = evaluate(load_recipe(args.recipe))
    if args.format == "json":
        _emit(args, _json({"command": "puk", "puk": ev.puk.to_json(), "checks": list(ev.checks)}))
    else:
        _emit(args, f"{ev.puk}\n")
    return EXIT_OK


def cmd_mm(args) -> int:
    ev = evaluate(load_recipe(args.recipe))
    _emit(args, to_json(ev.mm))
    return EXIT_OK


def cmd_distinguish(args) -> int:
    a = evaluate(load_recipe(args.a)).mm
    b = evaluate(load_recipe(args.b)).mm
    v = distinguish(a, b)
    if args.format == "json":
        _emit(args, _json({"command": "distinguish", "distinguished": v.distinguished,
                           "witness": v.witness, "puk": [puk_of(a).to_json(), puk_of(b).to_json()]}))
    else:
        _emit(args, f"{v}\n")
    return EXIT_OK


def _verify(family, height: int, bound: int, seed: int) -> dict:
    classes = classify(family)
    checked = mismatched = 0
    for g in enumerate_ball(family, height):
        if g.in_H:
            continue
        checked += 1
        if stabilizer_bruteforce(g, height + 1) != ball_restriction(stabilizer(g), family, height + 1):
            mismatched += 1
    reps_ok = True
    for cl in classes.classes:
        for r, s in combinations(cl.representatives, 2):
            if coset_invariant(r) == coset_invariant(s) or double_coset_witness(r, s, height + 1):
                reps_ok = False
    out = {
        "family": family.name,
        "classes": [{"label": c.label, "stabilizer": str(c.stabilizer), "count": fmt(c.coset_count)}
                    for c in classes.classes],
        "stabilizers_checked": checked,
        "stabilizer_mismatches": mismatched,
        "representatives_distinct": reps_ok,
    }
    if isinstance(family, (TwoByTwo, ThreeByThree)):
        rng = random.Random(seed)
        v = family.element(f=3) if isinstance(family, TwoByTwo) else family.element(f=3, g=5)
        sizes, certified = [], 0
        for _ in range(20):
            g1 = random_element(family, rng, 2, in_H=False)
            g2 = random_element(family, rng, 2, in_H=False)
            e = exceptional_k_set(g1, g2, v, bound)
            sizes.append(len(e.ks))
            certified += e.certified
        out["exceptional_sets"] = {"pairs": 20, "max_size": max(sizes), "certified": certified}
    return out


def cmd_verify(args) -> int:
    if not 0 <= args.height <= MAX_HEIGHT:
        raise DomainError(f"--height must lie in 0..{MAX_HEIGHT}")
    try:
        family = family_from_shorthand(args.family)
    except ValueError as exc:
        raise RecipeError(str(exc)) from None
    rep = _verify(family, args.height, args.bound, args.seed)
    ok = rep["stabilizer_mismatches"] == 0 and rep["representatives_distinct"]
    ex = rep.get("exceptional_sets")
    if ex is not None:
        ok = ok and ex["certified"] == ex["pairs"] and ex["max_size"] <= 1
    if args.format == "json":
        _emit(args, _json({"command": "verify", "ok": ok, **rep}))
    else:
        lines = [f"family: {rep['family']}"]
        lines += [f"  class {c['label']}: stabilizer {c['stabilizer']}, {c['count']} cosets"
                  for c in rep["classes"]]
        lines.append(f"stabilizers: {rep['stabilizers_checked']} checked, "
                     f"{rep['stabilizer_mismatches']} mismatches")
        lines.append(f"representatives distinct: {'yes' if rep['representatives_distinct'] else 'no'}")
        if ex is not None:
            lines.append(f"exceptional sets: {ex['certified']}/{ex['pairs']} certified, "
                         f"largest {ex['max_size']}")
        lines.append("OK" if ok else "FAILED")
        _emit(args, "\n".join(lines) + "\n")
    if not ok:
        raise ConsistencyError("closed forms and brute force disagree")
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.trials < 1:
        raise DomainError("--trials must be positive")
    s = run_trials(args.trials, args.seed)
    if args.format == "json":
        _emit(args, _json({"command": "oracle", "ok": s.ok, "trials": s.trials, "seed": s.seed,
                           "combine_agrees": s.agreements, "tensor_agrees": s.tensor_ok,
                           "identity_scaling": {str(k): v for k, v in s.identity_ok.items()}}))
    else:
        scal = ", ".join(f"k={k}: {v}" for k, v in s.identity_ok.items())
        _emit(args, f"trials: {s.trials} (seed {s.seed})\n"
                    f"combine vs eigenspaces: {s.agreements}/{s.trials}\n"
                    f"tensor products: {s.tensor_ok}/{s.trials}\n"
                    f"identity scaling: {scal}\n"
                    f"{'OK' if s.ok else 'FAILED'}\n")
    if not s.ok:
        raise ConsistencyError("finite-model oracle disagrees with the combination rule")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pukanszky", description="Pukanszky and MM invariants of group masas.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write the report to this file")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("puk", parents=[common], help="print the Pukanszky invariant of a recipe")
    s.add_argument("recipe")
    s.set_defaults(func=cmd_puk)

    s = sub.add_parser("mm", parents=[common], help="print the canonical MM invariant of a recipe")
    s.add_argument("recipe")
    s.set_defaults(func=cmd_mm)

    s = sub.add_parser("distinguish", parents=[common], help="compare two recipes")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_distinguish)

    s = sub.add_parser("verify", parents=[common], help="check closed forms against brute force")
    s.add_argument("family")
    s.add_argument("--height", type=int, default=1)
    s.add_argument("--bound", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("oracle", parents=[common], help="run the finite-model checks")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RecipeError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GuardError as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ConsistencyError as exc:
        print(f"internal disagreement: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY


if __name__ == "__main__":
    sys.exit(main())
