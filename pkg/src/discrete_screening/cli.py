"""Command-line front end.

Exit codes: 0 success, 1 oracle disagreement, 2 validation failure,
3 capacity error or cap refusal, 4 inconclusive rationalizability verdict.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from contextlib import contextmanager
from functools import partial
from pathlib import Path

from . import __version__
from .beliefs import belief_grid, compositions, format_rational, grid_size, is_log_concave
from .config import ConfigError, Instance, load_instance, load_menu
from .exceptions import CapacityError, CapRefusal, DomainError, PreconditionError
from .oracle import brute_force_optimal, single_type_closed_form
from .rationalizability import INCONCLUSIVE, fixed_point_check, is_delta_o_rationalizable
from .solver import CSV_COLUMNS, AssumptionWarning, check_instance, solve, verify_constraints
from .validation import parallel_map

EXIT_OK, EXIT_DISAGREE, EXIT_INVALID, EXIT_CAPACITY, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
SWEEP_BUDGET = 20_000
SWEEP_COLUMNS = ("belief", "Q", "unique", "principal_payoff", "assignments")


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _need_belief(inst: Instance):
    if inst.p is None:
        raise _Exit(EXIT_INVALID, "config has no 'belief'")
    return inst.p


@contextmanager
def _collect_warnings(err):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AssumptionWarning)
        try:
            yield
        finally:
            seen = []
            for w in caught:
                msg = str(w.message)
                if msg not in seen:
                    seen.append(msg)
                    print(f"warning: {msg}", file=err)


def _emit(text: str, out_path, stdout):
    if out_path:
        Path(out_path).write_text(text)
    else:
        stdout.write(text)


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _json(obj: dict) -> str:
    """One top-level key per line, values compact."""
    body = ",\n".join(f"  {json.dumps(k)}: {json.dumps(v)}" for k, v in obj.items())
    return "{\n" + body + "\n}\n"


def cmd_check(args, out, err) -> int:
    inst = load_instance(args.config)
    v, T = inst.v, inst.T
    rep = v.report
    lines = [f"{name}: {'ok' if ok else 'FAIL'}" for name, ok in rep.as_dict().items()]
    lines.append(f"gamma > b > m ({T.gamma} > {T.b} > {T.m}): {'ok' if T.grid_condition else 'FAIL'}")
    if inst.p is not None:
        lines.append(f"belief log-concave: {'ok' if is_log_concave(inst.p) else 'FAIL'}")
    out.write("\n".join(lines) + "\n")
    if not T.grid_condition:
        print(f"rejected: need gamma > b > m, got gamma = {T.gamma}, b = {T.b}, m = {T.m}", file=err)
        return EXIT_INVALID
    with _collect_warnings(err):
        failed = check_instance(v, T, inst.p, strict=args.strict)
        for name in failed:
            warnings.warn(f"assumption '{name}' does not hold; solve will proceed", AssumptionWarning)
    return EXIT_OK


def cmd_solve(args, out, err) -> int:
    inst = load_instance(args.config)
    p = _need_belief(inst)
    with _collect_warnings(err):
        sol = solve(inst.v, inst.T, p, strict=args.strict)
    for a in sol.assignments:
        rep = verify_constraints(a, inst.T)
        if not rep.all_hold:
            raise AssertionError(f"emitted assignment {a} violates {rep.violations()}")
    _emit(_csv(CSV_COLUMNS, sol.rows()), args.out, out)
    summary = out if args.out else err
    mono = sol.monotonicity
    print(f"optimal assignments: {len(sol.assignments)}", file=summary)
    if sol.unique:
        print("unique: true", file=summary)
    else:
        idx = ", ".join(str(i) for i in sol.uniqueness.certificate)
        sets = "; ".join(
            f"Q^{i} = {{{', '.join(map(str, sorted(sol.quantity_sets[i - 1])))}}}" for i in sol.uniqueness.certificate
        )
        print(f"unique: false (two adjacent optimal quantities at i = {idx}: {sets})", file=summary)
    print(f"monotonicity: weak = {str(mono.weak).lower()}, strict = {str(mono.strict).lower()}", file=summary)
    print(f"bunching: {str(sol.collapsed).lower()}", file=summary)
    print(f"expected principal payoff: {format_rational(sol.expected_payoff)}", file=summary)
    return EXIT_OK


def cmd_oracle_verify(args, out, err) -> int:
    inst = load_instance(args.config)
    p = _need_belief(inst)
    with _collect_warnings(err):
        sol = solve(inst.v, inst.T, p, strict=args.strict)
    res = brute_force_optimal(inst.v, inst.T, p, n_jobs=args.jobs)
    payoff_ok = res.payoff == sol.expected_payoff
    sets_ok = res.argmax == frozenset(sol.assignments)
    lines = [
        f"solver payoff: {format_rational(sol.expected_payoff)}",
        f"oracle payoff: {format_rational(res.payoff)}",
        f"payoff: {'AGREE' if payoff_ok else 'DISAGREE'}",
        f"assignments: {'AGREE' if sets_ok else 'DISAGREE'} "
        f"(solver {len(sol.assignments)}, oracle {len(res.assignments)}; "
        f"{res.n_feasible} feasible of {res.n_enumerated})",
    ]
    for a in res.assignments:
        lines.append(f"oracle argmax: {a}")
    if inst.T.m == 1:
        qs, c = single_type_closed_form(inst.v, inst.T)
        lines.append(f"single type: q in {{{', '.join(map(str, sorted(qs)))}}}, t = {c} q")
    ok = payoff_ok and (sets_ok or not sol.unique)
    lines.append("AGREE" if ok else "DISAGREE")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_DISAGREE


def _sweep_row(v, T, p):
    sol = solve(v, T, p)
    return {
        "belief": " ".join(p.to_strings()),
        "Q": " ".join("|".join(map(str, sorted(Q))) for Q in sol.quantity_sets),
        "unique": str(sol.unique).lower(),
        "principal_payoff": format_rational(sol.expected_payoff),
        "assignments": " ".join(str(a) for a in sol.assignments),
    }, sol.assignments


def cmd_sweep(args, out, err) -> int:
    inst = load_instance(args.config)
    d = args.grid_denominator
    if d is None:
        raise _Exit(EXIT_INVALID, "sweep needs --grid-denominator")
    n = grid_size(d, inst.T.m)
    if n > SWEEP_BUDGET:
        raise CapRefusal(f"grid with denominator {d} has {n} beliefs; budget is {SWEEP_BUDGET}")
    grid = belief_grid(d, inst.T.m)
    with _collect_warnings(err):
        results = parallel_map(partial(_sweep_row, inst.v, inst.T), grid, args.jobs)
    # parallel_map keeps submission order, so rows follow the grid order
    rows = [r for r, _ in results]
    union = sorted({a for _, assignments in results for a in assignments}, key=lambda a: a.contracts)
    _emit(_csv(SWEEP_COLUMNS, rows), args.out, out)
    summary = out if args.out else err
    total = sum(1 for _ in compositions(d, inst.T.m))
    print(f"grid beliefs: {total}, log-concave: {len(grid)}", file=summary)
    print(f"distinct optimal assignments: {len(union)}", file=summary)
    for a in union:
        print(f"  {a}", file=summary)
    return EXIT_OK


def cmd_rationalize(args, out, err) -> int:
    inst = load_instance(args.config)
    result = {}
    code = EXIT_OK
    if args.menu is not None:
        M = load_menu(args.menu)
        verdict = is_delta_o_rationalizable(M, inst.v, inst.T)
        result = verdict.to_json()
        if verdict.verdict == INCONCLUSIVE:
            code = EXIT_INCONCLUSIVE
    elif not args.fixed_point:
        raise _Exit(EXIT_INVALID, "rationalize needs a menu file or --fixed-point")
    if args.fixed_point:
        d = args.grid_denominator or 20
        rep = fixed_point_check(inst.v, inst.T, d)
        fp = {
            "grid_denominator": d,
            "menus": rep.n_menus,
            "levels": [{"level": s.level, "principal_menus": len(s.principal)} for s in rep.levels],
            "stabilization_level": rep.stabilization_level,
            "rationalizable_menus": len(rep.exact_yes),
            "grid_only": len(rep.agreement.grid_only),
            "exact_only": len(rep.agreement.exact_only),
            "summary": rep.summary(),
        }
        if args.menu is not None:
            fp["menu_in_level_2"] = M in rep.principal(2)
        result["fixed_point"] = fp
    _emit(_json(result), args.out, out)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="discrete-screening", description="Integer-contract screening toolkit.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="instance JSON file")
        p.add_argument("--strict", action="store_true", help="treat soft assumption failures as errors")
        p.add_argument("--out", help="write the main output here instead of stdout")
        p.set_defaults(func=func)
        return p

    add("check", cmd_check, "validate an instance")
    add("solve", cmd_solve, "solve and print the per-type CSV")
    p = add("oracle-verify", cmd_oracle_verify, "compare the solver with brute force")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for the enumeration")
    p = add("sweep", cmd_sweep, "solve over a grid of beliefs")
    p.add_argument("--grid-denominator", type=int, help="belief grid denominator d")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p = add("rationalize", cmd_rationalize, "test a menu for rationalizability")
    p.add_argument("menu", nargs="?", help="menu JSON file: a list of [q, t] pairs")
    p.add_argument("--fixed-point", action="store_true", help="also run the literal reduction (tiny instances)")
    p.add_argument("--grid-denominator", type=int, help="belief grid denominator for --fixed-point (default 20)")
    return ap


def main(argv=None, stdout=None, stderr=None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out, err)
    except _Exit as e:
        print(f"error: {e}", file=err)
        return e.code
    except CapacityError as e:
        print(f"capacity error: {e}", file=err)
        return EXIT_CAPACITY
    except CapRefusal as e:
        print(f"refused: {e}", file=err)
        return EXIT_CAPACITY
    except (ConfigError, DomainError, PreconditionError, OSError) as e:
        print(f"invalid: {e}", file=err)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
