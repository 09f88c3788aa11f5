"""Command line entry point ``fg``.

Exit codes: 0 success, 1 a check found something (violation, witness,
failed decay), 2 usage or input error, 3 budget or schedule exhaustion.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path
from typing import List, Optional

from . import automorphism as au
from .currents import DEFAULT_RADIUS
from .dynamics import periodic_falsifier, stable_current_convergence, twist_growth, verify_twist_inequalities
from .errors import BudgetExceeded, EllipticInput, FreeTwistError, ScheduleExhausted
from .intmat import IntMatrix, lift_to_aut
from .pipeline import PipelineConfig, construct_phi, default_splitting, default_theta, reference_pair
from .splitting import CyclicSplitting, dehn_twist, translation_length
from .words import fmt, parse, random_reduced_word, reduce

OK, CHECK_FAILED, USAGE, EXHAUSTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dump(rec) -> str:
    return json.dumps(rec, sort_keys=True, indent=2) + "\n"


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e}")


def load_matrix(text: str) -> IntMatrix:
    """Inline "r,r,r;r,r,r;..." or a file holding {k, rows}."""
    if Path(text).is_file():
        return IntMatrix.from_record(_load_json(text))
    try:
        return IntMatrix.parse(text)
    except ValueError as e:
        raise UsageError(f"bad matrix {text!r}: {e}")


def load_splitting(text: str, k: int = 3) -> CyclicSplitting:
    """``default``, ``reference1``, ``reference2`` or a splitting file."""
    if text == "default" or text == "reference1":
        return default_splitting(k)
    if text == "reference2":
        return reference_pair(k)[1]
    if Path(text).is_file():
        try:
            return CyclicSplitting.from_record(_load_json(text))
        except (KeyError, TypeError) as e:
            raise UsageError(f"{text} is not a splitting record (missing {e})")
    raise UsageError(f"unknown splitting {text!r}")


def load_aut(text: str, k: int = 3) -> au.Automorphism:
    """``identity``, ``theta`` or an automorphism file."""
    if text == "identity":
        return au.identity(k)
    if text == "theta":
        return default_theta(k)
    if Path(text).is_file():
        try:
            return au.Automorphism.from_record(_load_json(text))
        except (KeyError, TypeError) as e:
            raise UsageError(f"{text} is not an automorphism record (missing {e})")
    raise UsageError(f"unknown automorphism {text!r}")


def _aut_text(phi: au.Automorphism) -> str:
    return _dump(phi.to_record())


# --- subcommands -------------------------------------------------------------

def cmd_reduce(args) -> int:
    _emit(args, fmt(reduce(parse(args.word))) + "\n")
    return OK


def cmd_length(args) -> int:
    T = load_splitting(args.splitting, args.rank)
    _emit(args, f"{translation_length(T, parse(args.word), args.budget)}\n")
    return OK


def cmd_twist(args) -> int:
    T = load_splitting(args.splitting, args.rank)
    _emit(args, _aut_text(dehn_twist(T, args.power)))
    return OK


def cmd_lift(args) -> int:
    _emit(args, _aut_text(lift_to_aut(load_matrix(args.matrix))))
    return OK


def cmd_abelianize(args) -> int:
    _emit(args, f"{au.abelianization(load_aut(args.aut, args.rank))}\n")
    return OK


def cmd_construct(args) -> int:
    a = load_matrix(args.matrix)
    cfg = PipelineConfig(a.k, a, budget=args.budget, random_seed=args.seed, falsifier_length=args.max_len,
                         falsifier_power=args.max_pow, run_inequalities=not args.skip_inequalities,
                         run_convergence=not args.skip_converge)
    cert = construct_phi(cfg)
    _emit(args, cert.to_json())
    return OK


def cmd_inequalities(args) -> int:
    T1 = load_splitting(args.t1, args.rank)
    T2 = load_splitting(args.t2, args.rank)
    reports = verify_twist_inequalities(T1, T2, args.max_len, args.n_max, corrected=args.corrected)
    _emit(args, _dump([r.to_record() for r in reports]))
    return OK if all(r.passes for r in reports) else CHECK_FAILED


def cmd_growth(args) -> int:
    T1 = load_splitting(args.t1, args.rank)
    T2 = load_splitting(args.t2, args.rank)
    words = [parse(w) for w in args.word]
    rng = random.Random(args.seed)
    out, ok = [], True
    if not words:
        while len(out) < args.samples:
            x = random_reduced_word(args.rank, rng.randint(1, 8), rng)
            try:
                out.append(twist_growth(T1, T2, x, args.n_max))
            except EllipticInput:
                continue
    else:
        out = [twist_growth(T1, T2, x, args.n_max) for x in words]
    for g in out:
        ok &= g.bounded and abs(g.ratio_at_max - 1) <= 0.05
    _emit(args, _dump([g.to_record() for g in out]))
    return OK if ok else CHECK_FAILED


def cmd_converge(args) -> int:
    T1 = load_splitting(args.t1, args.rank)
    T2 = load_splitting(args.t2, args.rank)
    n_list = tuple(int(x) for x in args.n_list.split(","))
    rep = stable_current_convergence(T1, T2, n_list, args.m_max, args.radius, args.budget)
    _emit(args, _dump(rep.to_record()))
    d = [c.deficit for c in rep.cells]
    decreasing = all(x > y for x, y in zip(d, d[1:]))
    return OK if decreasing else CHECK_FAILED


def cmd_falsify(args) -> int:
    phi = load_aut(args.aut, args.rank)
    seeds = [parse(w) for w in args.seed_word]
    res = periodic_falsifier(phi, args.max_len, args.max_pow, args.budget, seeds=seeds, rng_seed=args.seed)
    rec = res.to_record()
    if args.out:
        Path(args.out).write_text(_dump(rec))
    if res.witness is None:
        print(f"no witness up to length {args.max_len} and power {args.max_pow}")
        return OK
    print(f"witness {res.witness}")
    return CHECK_FAILED


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomized sampling")
    common.add_argument("--budget", type=int, default=None, help="letter budget (default FG_BUDGET or 10^7)")
    common.add_argument("--out", default=None, help="write the result to this file")
    common.add_argument("--rank", type=int, default=3, help="rank for named splittings and automorphisms")

    pair = _Parser(add_help=False)
    pair.add_argument("--t1", default="reference1")
    pair.add_argument("--t2", default="reference2")

    p = _Parser(prog="fg", description="Dehn twists, currents and automorphisms of free groups")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("reduce", parents=[common], help="freely reduce a word")
    s.add_argument("word")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("length", parents=[common], help="translation length in a splitting")
    s.add_argument("--splitting", default="default")
    s.add_argument("--word", required=True)
    s.set_defaults(func=cmd_length)

    s = sub.add_parser("twist", parents=[common], help="Dehn twist of a splitting")
    s.add_argument("--splitting", default="default")
    s.add_argument("--power", type=int, default=1)
    s.set_defaults(func=cmd_twist)

    s = sub.add_parser("lift", parents=[common], help="lift a GL(k, Z) matrix to an automorphism")
    s.add_argument("--matrix", required=True)
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("abelianize", parents=[common], help="matrix of an automorphism on homology")
    s.add_argument("aut")
    s.set_defaults(func=cmd_abelianize)

    s = sub.add_parser("construct", parents=[common], help="build phi with prescribed homology action")
    s.add_argument("--matrix", required=True)
    s.add_argument("--max-len", type=int, default=8)
    s.add_argument("--max-pow", type=int, default=6)
    s.add_argument("--skip-inequalities", action="store_true")
    s.add_argument("--skip-converge", action="store_true")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("verify", help="run a verification scan")
    vsub = s.add_subparsers(dest="check", parser_class=_Parser)
    vsub.required = True
    v = vsub.add_parser("twist-inequalities", parents=[common, pair], help="exhaustive scan of the twist inequalities")
    v.add_argument("--max-len", type=int, default=6)
    v.add_argument("--n-max", type=int, default=8)
    v.add_argument("--corrected", action="store_true", help="also report the 2<c1, x> variant of the fourth bound")
    v.set_defaults(func=cmd_inequalities)

    s = sub.add_parser("growth", parents=[common, pair], help="length growth under powers of the second twist")
    s.add_argument("--word", action="append", default=[])
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--n-max", type=int, default=50)
    s.set_defaults(func=cmd_growth)

    s = sub.add_parser("converge", parents=[common, pair], help="convergence toward the edge current")
    s.add_argument("--n-list", default="2,4,8,16")
    s.add_argument("--m-max", type=int, default=6)
    s.add_argument("--radius", type=int, default=DEFAULT_RADIUS)
    s.set_defaults(func=cmd_converge)

    s = sub.add_parser("falsify-periodic", parents=[common], help="search for a periodic conjugacy class")
    s.add_argument("--aut", default="identity")
    s.add_argument("--max-len", type=int, default=8)
    s.add_argument("--max-pow", type=int, default=6)
    s.add_argument("--seed-word", action="append", default=[], help="class to test before the scan")
    s.set_defaults(func=cmd_falsify)
    return p


def _echo_config(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    cfg["FG_BUDGET"] = os.environ.get("FG_BUDGET")
    print("# config " + json.dumps(cfg, sort_keys=True), file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"fg: {e}", file=sys.stderr)
        return USAGE
    _echo_config(args)
    try:
        return args.func(args)
    except (BudgetExceeded, ScheduleExhausted) as e:
        print(f"fg: {type(e).__name__}: {e}", file=sys.stderr)
        return EXHAUSTED
    except (UsageError, FreeTwistError, ValueError, KeyError, TypeError, OSError) as e:
        print(f"fg: {type(e).__name__}: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
