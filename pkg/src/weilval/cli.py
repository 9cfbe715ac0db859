"""``weilval`` command line.

Exit codes: 0 all checks pass, 2 usage or precondition error, 3 a bound or
conjecture is violated, 4 internal defect (two independent routes disagree).
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from fractions import Fraction
from functools import partial
from multiprocessing import Pool

from .arith import is_power_of_two, least_odd_prime_divisor, prime_power_decomposition, prime_powers
from .conjectures import bounds, covering
from .cyclotomic import Valuation
from .families import FamilyError, all_families, verify_prediction
from .finite_field import FieldError, FieldSpec, build_field
from .stickelberger import enumerate_exponent_classes, v_stickelberger
from .store import CorruptStore, ScanRecord, ScanStore, dumps
from .weil import DEFAULT_DIRECT_CAP, ExponentError, v_direct, weil_spectrum

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_DEFECT = 0, 2, 3, 4

SUITES = ("cecilia", "ubc", "moments", "subfield")


class OracleDisagreement(RuntimeError):
    pass


class UsageError(ValueError):
    pass


def _env_int(name: str, default: int) -> int:
    return int(os.environ.get(name, default))


# -- output ---------------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return "-"
    return str(v)


def render(rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        for r in rows:
            out.write(dumps(r) + "\n")
        return
    if not rows:
        return
    cols = list(rows[0])
    for r in rows[1:]:
        cols += [c for c in r if c not in cols]
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in cols])
        return
    cells = [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    out.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
    for row in cells:
        out.write("  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() + "\n")


def _spec(args) -> FieldSpec:
    try:
        return FieldSpec(args.p, args.n)
    except FieldError as exc:
        raise UsageError(str(exc)) from exc


# -- valuation / spectrum / families / dorothy ------------------------------------


def cmd_valuation(args, out) -> int:
    spec = _spec(args)
    cap = args.direct_cap
    row = {"p": spec.p, "n": spec.n, "d": args.d}
    results = {}
    if args.method in ("stickelberger", "both"):
        t0 = time.perf_counter()
        results["stickelberger"] = bounds.field_valuation(spec, args.d) if spec.q > 2 \
            else Valuation(1, 1)
        row["stickelberger_seconds"] = round(time.perf_counter() - t0, 6)
    if args.method in ("direct", "both"):
        if spec.q > cap:
            raise UsageError(f"q = {spec.q} exceeds the direct cap {cap}")
        t0 = time.perf_counter()
        results["direct"] = v_direct(build_field(spec), args.d)
        row["direct_seconds"] = round(time.perf_counter() - t0, 6)
    vals = list(results.values())
    if any(v != vals[0] for v in vals):
        raise OracleDisagreement(f"direct {results['direct']} != "
                                 f"stickelberger {results['stickelberger']}")
    v = vals[0]
    row.update({"V": str(v), "m": v.numer, "den": v.denom})
    if args.method != "both":
        row = {k: x for k, x in row.items() if not k.endswith("seconds")}
    render([row], args.format, out)
    return EXIT_OK


def cmd_spectrum(args, out) -> int:
    spec = _spec(args)
    if spec.q > args.direct_cap:
        raise UsageError(f"q = {spec.q} exceeds the direct cap {args.direct_cap}")
    f = build_field(spec)
    sp = weil_spectrum(f, args.d)
    rows = []
    for e in sp.entries:
        row = {"a": e.a, "valuation": str(e.valuation), "value": list(e.value.coeffs)}
        if spec.p == 2:
            row["value"] = e.value.as_int()
        rows.append(row)
    render(rows, args.format, out)
    multiset = sorted(((str(k.as_int()) if spec.p == 2 else str(list(k.coeffs))), c)
                      for k, c in sp.value_multiset().items())
    summary = {"V": str(sp.v_direct), "values": {k: c for k, c in multiset}}
    out.write(dumps(summary) + "\n" if args.format == "json"
              else f"V = {sp.v_direct}; value multiset {dict(multiset)}\n")
    return EXIT_OK


def cmd_families(args, out) -> int:
    spec = _spec(args)
    rows = []
    bad = False
    for pred in all_families(spec):
        chk = verify_prediction(pred)
        rows.append({
            "family": pred.family_name, "applicable": pred.applicable, "d": pred.d,
            "predicted": str(pred.predicted_v) if pred.predicted_v is not None else None,
            "measured": str(chk.measured) if chk.measured is not None else None,
            "match": chk.match if pred.applicable else None, "reason": pred.reason,
        })
        bad |= pred.applicable and not chk.match
    render(rows, args.format, out)
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_dorothy(args, out) -> int:
    spec = _spec(args)
    f = build_field(spec)
    vs = [args.v] if args.v is not None else range(1, f.q)
    rows = []
    for v in vs:
        try:
            w = bounds.dorothy_witness(f, args.d, v)
        except bounds.DorothyFailure as exc:
            raise OracleDisagreement(str(exc)) from exc
        rows.append({"v": w.v, "u": w.u, "x1": w.x1, "x2": w.x2})
    render(rows, args.format, out)
    return EXIT_OK


# -- scans -------------------------------------------------------------------------


def _record(rep: bounds.BoundReport, bound: Fraction, ok: bool) -> dict:
    v = rep.v.value
    return ScanRecord(rep.spec.p, rep.spec.n, rep.d, rep.v.numer, rep.v.denom,
                      rep.degenerate_levels, rep.case_label, bound.numerator,
                      bound.denominator, bool(ok), v == bound).to_dict()


def scan_field(suite: str, direct_cap: int, key: tuple[int, int]) -> list[dict]:
    """Records for one field, ordered by class representative."""
    spec = FieldSpec(*key)
    out = []
    if suite == "cecilia":
        for rep in bounds.theorem_cecilia_check(spec, cap=spec.q):
            out.append(_record(rep, rep.bound, rep.ok))
    elif suite == "ubc":
        ell = least_odd_prime_divisor(spec.n)
        bound = Fraction((ell + 1) * spec.n, 2 * ell)
        for cls in enumerate_exponent_classes(spec):
            if cls.degenerate_over_field:
                continue
            rep = bounds.bound_report(cls)
            out.append(_record(rep, bound, rep.v.value <= bound))
    elif suite == "moments":
        f = build_field(spec)
        for cls in enumerate_exponent_classes(spec):
            sp = weil_spectrum(f, cls.d, direct_cap=direct_cap)
            rep = bounds.bound_report(cls, sp.v_direct)
            if sp.v_direct != v_stickelberger(spec, cls.d):
                raise OracleDisagreement(f"{spec} d={cls.d}: direct and digit-weight differ")
            moment = sp.first_moment()
            out.append(_record(rep, rep.bound, moment.as_int() == spec.q))
    elif suite == "subfield":
        for cls in enumerate_exponent_classes(spec):
            rep = bounds.bound_report(cls)
            ok = all(r[-1] for r in bounds.subfield_sandwich(spec, cls.d))
            ok = ok and bounds.negation_pair_ok(spec, cls.d)
            out.append(_record(rep, rep.bound, ok))
    else:
        raise UsageError(f"unknown suite {suite!r}")
    out.sort(key=lambda r: r["d_canonical"])
    return out


def _scan_fields(args) -> list[tuple[int, int]]:
    if args.fields:
        keys = []
        for q in args.fields:
            pn = prime_power_decomposition(q)
            if pn is None:
                raise UsageError(f"{q} is not a prime power")
            keys.append(pn)
        keys = sorted(set(keys))
    else:
        keys = prime_powers(max(args.q_min, 3), args.q_max)
    keys = [k for k in keys if k[0] ** k[1] >= 3]
    if args.suite == "ubc":
        keys = [k for k in keys if not is_power_of_two(k[1])]
    cap = args.scan_cap if args.suite != "moments" else args.direct_cap
    over = [k[0] ** k[1] for k in keys if k[0] ** k[1] > cap]
    if over:
        raise UsageError(f"q = {over[0]} exceeds the budget {cap}; raise it explicitly")
    return keys


def _run_units(units, worker, jobs):
    if jobs > 1 and len(units) > 1:
        with Pool(jobs) as pool:
            yield from zip(units, pool.imap(worker, units, chunksize=1))
    else:
        for u in units:
            yield u, worker(u)


def _drive(args, command: str, config: dict, units: list, worker, out) -> list:
    """Run units in order; return every unit's records (read back from disk on resume)."""
    path = args.resume or args.out
    store = None
    done: dict = {}
    if path:
        store = ScanStore(path, command, config)
        store.open(resume=bool(args.resume))
        done = dict(store.done)
    todo = [u for u in units if tuple(u) not in done]
    try:
        for unit, records in _run_units(todo, worker, args.jobs):
            if store:
                store.write_unit(unit, records)
            done[tuple(unit)] = records
            if args.stop_after is not None:
                args.stop_after -= 1
                if args.stop_after <= 0 and len(done) < len(units):
                    raise KeyboardInterrupt
    except BaseException:
        if store:
            store.close()
        raise
    records = [r for u in units for r in done[tuple(u)]]
    return records, store


def cmd_scan(args, out) -> int:
    keys = _scan_fields(args)
    config = {"suite": args.suite, "fields": [list(k) for k in keys],
              "direct_cap": args.direct_cap}
    worker = partial(scan_field, args.suite, args.direct_cap)
    records, store = _drive(args, "scan", config, keys, worker, out)
    violations = [[r["p"], r["n"], r["d_canonical"]] for r in records if not r["ok"]]
    tight = [[r["p"], r["n"], r["d_canonical"]] for r in records if r["tight"]]
    summary = {"suite": args.suite, "fields": len(keys), "records": len(records),
               "violations": violations, "tight": tight}
    if store:
        store.finish(summary)
        render([{"kind": "summary", **{k: v for k, v in summary.items()
                                       if k != "tight"}, "tight": len(tight)}], args.format, out)
    else:
        render(records, args.format, out)
        render([{"kind": "summary", **summary}], "json" if args.format == "json" else
               args.format, out)
    if violations:
        sys.stderr.write(f"VIOLATION: {len(violations)} record(s) failed, first {violations[0]}\n")
        return EXIT_VIOLATION
    return EXIT_OK


def covering_unit(include_powers: bool, unit) -> list[dict]:
    blk = covering.run_unit(tuple(unit), include_powers)
    return [{
        "kind": "record", "t": blk.t, "t_hi": blk.t_hi, "n": blk.n, "classes": blk.classes,
        **blk.by_method, "coprime": blk.coprime, "certified": blk.certified,
        "off_slice_brute": blk.off_slice_brute, "failures": list(blk.failures),
        "analytic": blk.analytic,
    }]


def cmd_covering(args, out) -> int:
    if args.d is not None:
        if args.t is None or args.n is None:
            raise UsageError("--d needs --t and --n")
        if not covering.is_eligible(args.t, args.n, args.d):
            render([{"t": args.t, "n": args.n, "d": args.d, "status": "skipped",
                     "reason": "d is zero or a power of t modulo t^n - 1"}], args.format, out)
            return EXIT_OK
        try:
            w = covering.covering_witness(args.t, args.n, args.d)
        except covering.CounterexampleFound as exc:
            sys.stderr.write(f"*** {exc} ***\n")
            return EXIT_VIOLATION
        render([{"t": w.t, "n": w.n, "d": w.d, "a": w.a, "b": w.b, "method": w.method,
                 "status": "certified"}], args.format, out)
        return EXIT_OK

    plan = covering.scan_plan(args.size_bound, args.include_powers, args.n1_exhaustive)
    t_lo = args.t_min if args.t_min is not None else (args.t or 2)
    t_hi = args.t_max if args.t_max is not None else (args.t or args.size_bound)
    units = []
    for kind, x, y in plan:
        if kind == "block":
            if t_lo <= x <= t_hi and (args.n is None or y == args.n):
                units.append([kind, x, y])
        elif args.n in (None, 1):
            lo, hi = max(x, t_lo), min(y, t_hi)
            if lo <= hi:
                units.append([kind, lo, hi])
    config = {"size_bound": args.size_bound, "include_powers": args.include_powers,
              "n1_exhaustive": args.n1_exhaustive, "t_min": t_lo, "t_max": t_hi, "n": args.n}
    worker = partial(covering_unit, args.include_powers)
    records, store = _drive(args, "covering", config, units, worker, out)
    totals = dict.fromkeys(covering.METHODS, 0)
    for r in records:
        for m in covering.METHODS:
            totals[m] += r[m]
    failures = [[r["t"], r["n"], d] for r in records for d in r["failures"]]
    classes = sum(r["classes"] for r in records)
    coprime = sum(r["coprime"] for r in records)
    certified = sum(r["certified"] for r in records)
    summary = {"units": len(units), "classes": classes, **totals, "coprime": coprime,
               "colin_rate": {"num": totals["colin_inverse"], "den": coprime},
               "certified": certified, "failures": failures,
               "off_slice_brute": sum(r["off_slice_brute"] for r in records)}
    if store:
        store.finish(summary)
    else:
        render(records, args.format, out)
    render([{"kind": "summary", **summary}], args.format, out)
    if failures:
        sys.stderr.write(f"*** COUNTEREXAMPLE to the covering conjecture: {failures[:5]} ***\n")
        return EXIT_VIOLATION
    if certified != classes or summary["off_slice_brute"]:
        sys.stderr.write("certificate count mismatch\n")
        return EXIT_DEFECT
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), default="table")
    common.add_argument("--out", metavar="PATH", help="write a resumable store to PATH")
    common.add_argument("--resume", metavar="PATH", help="continue the store at PATH")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    common.add_argument("--q-max", type=int, default=_env_int("WEILVAL_Q_MAX", 100))
    common.add_argument("--q-min", type=int, default=3)
    common.add_argument("--direct-cap", type=int,
                        default=_env_int("WEILVAL_DIRECT_CAP", DEFAULT_DIRECT_CAP))
    common.add_argument("--scan-cap", type=int,
                        default=_env_int("WEILVAL_SCAN_CAP", bounds.DEFAULT_SCAN_CAP))
    common.add_argument("--size-bound", type=int,
                        default=_env_int("WEILVAL_SIZE_BOUND", covering.DEFAULT_SIZE_BOUND))
    # test hook: stop after k units as if interrupted
    common.add_argument("--stop-after", type=int, default=None, help=argparse.SUPPRESS)

    ap = argparse.ArgumentParser(prog="weilval", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def field_args(sp):
        sp.add_argument("p", type=int)
        sp.add_argument("n", type=int)

    sp = sub.add_parser("valuation", parents=[common], help="minimum valuation V for (p, n, d)")
    field_args(sp)
    sp.add_argument("d", type=int)
    sp.add_argument("--method", choices=("direct", "stickelberger", "both"),
                    default="stickelberger")

    sp = sub.add_parser("spectrum", parents=[common], help="every Weil sum for (p, n, d)")
    field_args(sp)
    sp.add_argument("d", type=int)

    sp = sub.add_parser("scan", parents=[common], help="per-class checks over a range of fields")
    sp.add_argument("--suite", choices=SUITES, default="cecilia")
    sp.add_argument("--fields", type=int, nargs="+", metavar="Q",
                    help="explicit field orders instead of --q-min..--q-max")

    sp = sub.add_parser("covering", parents=[common], help="covering witnesses")
    sp.add_argument("--t", type=int)
    sp.add_argument("--t-min", type=int)
    sp.add_argument("--t-max", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--include-powers", action="store_true")
    sp.add_argument("--n1-exhaustive", type=int, default=covering.DEFAULT_N1_EXHAUSTIVE)

    sp = sub.add_parser("families", parents=[common], help="check the named exponent families")
    field_args(sp)

    sp = sub.add_parser("dorothy", parents=[common], help="non-permutation witnesses")
    field_args(sp)
    sp.add_argument("d", type=int)
    sp.add_argument("--v", type=int)
    return ap


COMMANDS = {"valuation": cmd_valuation, "spectrum": cmd_spectrum, "scan": cmd_scan,
            "covering": cmd_covering, "families": cmd_families, "dorothy": cmd_dorothy}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.out and args.resume:
        sys.stderr.write("use either --out or --resume\n")
        return EXIT_USAGE
    args.jobs = max(1, args.jobs)
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, ExponentError, FieldError, bounds.ScanBudgetError,
            covering.CoveringPrecondition, CorruptStore, FamilyError) as exc:
        if isinstance(exc, CorruptStore):
            sys.stderr.write(f"corrupted checkpoint: {exc}\n")
        else:
            sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (OracleDisagreement, covering.CertificateError) as exc:
        sys.stderr.write(f"INTERNAL DEFECT: {exc}\n")
        return EXIT_DEFECT
    except KeyboardInterrupt:
        sys.stderr.write("interrupted; rerun with --resume to continue\n")
        return 130


if __name__ == "__main__":
    sys.exit(main())
