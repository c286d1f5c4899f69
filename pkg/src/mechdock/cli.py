"""Command-line surface: generate instances, attack mechanisms, certify
parameter bounds, fuzz for monotonicity violations, verify reports.

All stored numbers are exact grammar strings; decimals are rendered for
display only. Exit codes: 0 success / sound verdict, 1 verification
failure, 2 usage error, 3 incomplete strategy, 4 mechanism failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .adversary import attack, replay_report, verify_report
from .adversary.verdicts import StrategyIncomplete
from .forge import (
    ForgeError,
    MainParams,
    build_main,
    build_small,
    certified_bound,
    feasibility_defect,
    solve_best_a,
)
from .mechlib import make_mechanism
from .schedmodel import MechanismError
from .wmon import FuzzSpec, exhaustive_pairs, fuzz

# Certified reference points: block count -> published ratio (a = ratio - 1).
REFERENCE_RATIOS = {
    3: Fraction(2873, 1000),
    4: Fraction(2911, 1000),
    5: Fraction(2932, 1000),
    10: Fraction(2966, 1000),
    30: Fraction(2988, 1000),
    36: Fraction(2990, 1000),
}


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}: {exc}")


def _decimal(x):
    return f"{float(x):.6f}"


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mechdock",
        description="Adversarial testbed for truthful scheduling mechanisms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write an instance file")
    gen.add_argument(
        "--construction",
        required=True,
        choices=["an", "d2x2", "e3x3", "f3x4", "b_nr", "b_ckv", "c_kv", "b_new"],
    )
    gen.add_argument("--a", type=_fraction)
    gen.add_argument("--b", type=_fraction)
    gen.add_argument("--c", type=_fraction)
    gen.add_argument("--x", type=_fraction)
    gen.add_argument("--b1", type=_fraction)
    gen.add_argument("--r", type=int)
    gen.add_argument("--kc", type=int)
    gen.add_argument("--k", type=int)
    gen.add_argument("--out", required=True)

    atk = sub.add_parser("attack", help="run an adversary strategy")
    atk.add_argument(
        "--strategy", required=True, choices=["main", "s2x2", "s3x3", "s3x4"]
    )
    atk.add_argument("--mechanism", required=True)
    atk.add_argument("--a", type=_fraction)
    atk.add_argument("--b", type=_fraction)
    atk.add_argument("--c", type=_fraction)
    atk.add_argument("--x", type=_fraction)
    atk.add_argument("--r", type=int)
    atk.add_argument("--kc", type=int)
    atk.add_argument("--report")

    bounds = sub.add_parser("bounds", help="certify parameter bounds per r")
    bounds.add_argument("--r-list", default="3,4,5", help="comma-separated r values")
    bounds.add_argument("--kc", type=int, help="chain length (default: r)")
    bounds.add_argument("--optimize", action="store_true")
    bounds.add_argument("--tol", type=_fraction, default=Fraction(1, 10**4))
    bounds.add_argument("--out")

    wm = sub.add_parser("wmon", help="search for monotonicity violations")
    wm.add_argument("--mechanism", required=True)
    wm.add_argument("--trials", type=int, default=10000)
    wm.add_argument("--seed", type=int, default=0)
    wm.add_argument("--n", type=int, default=3)
    wm.add_argument("--m", type=int, default=3)
    wm.add_argument("--grid", default="0,1,2,3,4")
    wm.add_argument("--exhaustive", action="store_true")
    wm.add_argument("--out")

    ver = sub.add_parser("verify", help="re-check a stored attack report")
    ver.add_argument("--report", required=True)
    return parser


def cmd_gen(args):
    try:
        if args.construction == "an":
            if args.a is None or args.r is None:
                print("gen an: --a and --r are required", file=sys.stderr)
                return 2
            p = MainParams.from_alpha(args.a, args.r, args.kc)
            instance = build_main(p)
        else:
            params = {}
            if args.construction == "e3x3":
                params = {
                    "a": args.a if args.a is not None else Fraction(1),
                    "b": args.b if args.b is not None else Fraction(22055, 10000),
                    "c": args.c if args.c is not None else Fraction(26589, 10000),
                }
            elif args.construction == "f3x4":
                params = {
                    "x": args.x if args.x is not None else Fraction(141421, 100000)
                }
            elif args.construction == "c_kv":
                if args.a is None or args.k is None:
                    print("gen c_kv: --a and --k are required", file=sys.stderr)
                    return 2
                params = {"a": args.a, "k": args.k}
            elif args.construction == "b_new":
                if args.a is None:
                    print("gen b_new: --a is required", file=sys.stderr)
                    return 2
                params = {"a": args.a}
                if args.b1 is not None:
                    params["b1"] = args.b1
            instance = build_small(args.construction, **params)
    except ForgeError as exc:
        print(f"cannot build instance: {exc}", file=sys.stderr)
        return 2
    with open(args.out, "w") as fh:
        fh.write(json.dumps(instance.to_json_dict(), sort_keys=True, indent=1))
        fh.write("\n")
    print(f"wrote {instance.n}x{instance.m} instance to {args.out}")
    return 0


def cmd_attack(args):
    params = {}
    if args.strategy == "main":
        if args.a is None or args.r is None:
            print("attack main: --a and --r are required", file=sys.stderr)
            return 2
        params = {"a": args.a, "r": args.r}
        if args.kc is not None:
            params["kc"] = args.kc
    elif args.strategy == "s3x3":
        for name in ("a", "b", "c"):
            val = getattr(args, name)
            if val is not None:
                params[name] = val
    elif args.strategy == "s3x4":
        if args.x is not None:
            params["x"] = args.x
    mech = None
    try:
        mech = make_mechanism(args.mechanism)
        report = attack(args.strategy, mech, params)
    except (MechanismError, ForgeError) as exc:
        print(f"mechanism failure: {exc}", file=sys.stderr)
        return 4
    finally:
        if mech is not None:
            mech.close()
    verdict = report.verdict
    summary = f"verdict {verdict.kind}"
    if verdict.kind == "RatioWitness":
        summary += (
            f" bound {_decimal(verdict.claimed_bound)}"
            f" ({verdict.claimed_bound})"
        )
    elif verdict.kind == "Unbounded":
        summary += f" reason {verdict.reason}"
    summary += f" after {report.transcript.queries} queries"
    print(summary)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.to_json())
            fh.write("\n")
        print(f"wrote report to {args.report}")
    return 3 if isinstance(verdict, StrategyIncomplete) else 0


def _bound_rows(r_values, kc, optimize, tol):
    rows = []
    for r in r_values:
        if r in REFERENCE_RATIOS:
            a = REFERENCE_RATIOS[r] - 1
        else:
            a, _ = solve_best_a(
                r, kc if kc is not None else r, Fraction(17, 10), Fraction(199, 100), tol
            )
        k_c = kc if kc is not None else r
        p = MainParams.from_alpha(a, r, k_c)
        feasible = feasibility_defect(p) is None
        bound = certified_bound(p) if feasible else ""
        rows.append((r, p.n, k_c, a, bound, feasible))
        if optimize:
            a_opt, bound_opt = solve_best_a(
                r, k_c, Fraction(17, 10), Fraction(199, 100), tol
            )
            p_opt = MainParams.from_alpha(a_opt, r, k_c)
            rows.append((r, p_opt.n, k_c, a_opt, bound_opt, True))
    return rows


def cmd_bounds(args):
    try:
        r_values = [int(tok) for tok in args.r_list.split(",") if tok.strip()]
    except ValueError:
        print(f"bad --r-list {args.r_list!r}", file=sys.stderr)
        return 2
    try:
        rows = _bound_rows(r_values, args.kc, args.optimize, args.tol)
    except ForgeError as exc:
        print(f"bounds failed: {exc}", file=sys.stderr)
        return 2
    lines = ["r,n,k_c,a,bound,feasible"]
    for r, n, k_c, a, bound, feasible in rows:
        lines.append(f"{r},{n},{k_c},{a},{bound},{str(feasible).lower()}")
        shown = _decimal(bound) if bound != "" else "-"
        print(f"r={r} n={n} k_c={k_c} a={_decimal(a)} bound={shown}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {args.out}")
    return 0


def cmd_wmon(args):
    try:
        grid = tuple(Fraction(tok) for tok in args.grid.split(",") if tok.strip())
    except (ValueError, ZeroDivisionError):
        print(f"bad --grid {args.grid!r}", file=sys.stderr)
        return 2
    mech = None
    try:
        mech = make_mechanism(args.mechanism)
        if args.exhaustive:
            violations = exhaustive_pairs(mech, 2, 2, grid)
            scope = f"exhaustive 2x2 grid {args.grid}"
        else:
            spec = FuzzSpec(n=args.n, m=args.m, values=grid)
            violations = fuzz(mech, spec, args.trials, args.seed)
            scope = f"{args.trials} seeded trials"
    except MechanismError as exc:
        print(f"mechanism failure: {exc}", file=sys.stderr)
        return 4
    finally:
        if mech is not None:
            mech.close()
    print(f"{len(violations)} violation(s) over {scope}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(
                json.dumps(
                    [v.to_json_dict() for v in violations], sort_keys=True, indent=1
                )
            )
            fh.write("\n")
        print(f"wrote {args.out}")
    return 0


def cmd_verify(args):
    try:
        with open(args.report) as fh:
            report = json.load(fh)
    except (OSError, ValueError) as exc:
        print(f"cannot read report: {exc}", file=sys.stderr)
        return 1
    defects = verify_report(report)
    if not defects and not str(report.get("mechanism", "")).startswith("extern:"):
        try:
            defects = replay_report(report, make_mechanism)
        except (MechanismError, ForgeError, ValueError, KeyError) as exc:
            defects = [f"replay failed: {exc}"]
    if defects:
        print(f"verification failed: {defects[0]}", file=sys.stderr)
        return 1
    print("report verified")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {
        "gen": cmd_gen,
        "attack": cmd_attack,
        "bounds": cmd_bounds,
        "wmon": cmd_wmon,
        "verify": cmd_verify,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
