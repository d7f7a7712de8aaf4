"""Command-line interface.  Exit codes: 0 ok, 2 usage, 3 data, 4 internal invariant violated."""

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import mpmath

from . import analytic, census
from .arith import is_fundamental
from .counting import count_relative_characters, count_relative_direct, engine_table
from .quadfield import QuadField
from .selmer import C4, D4, V4

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INVARIANT = 0, 2, 3, 4
TYPE_NAMES = (C4, V4, D4)


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class InvariantError(Exception):
    pass


# ---------------------------------------------------------------------------
# output helpers


def _num(x):
    """JSON-safe number: ints beyond 2^53 become decimal strings."""
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return x if abs(x) <= 2**53 else str(x)
    return x


def _dec(x, digits):
    with mpmath.workdps(analytic.PREC):
        return mpmath.nstr(mpmath.mpf(x), digits, strip_zeros=False)


def _emit_json(obj, out):
    out.write(json.dumps(obj, indent=2, sort_keys=False))
    out.write("\n")


def _emit_csv(header, rows, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)


def _emit_table(args, header, rows, out, extra=None):
    if args.format == "json":
        obj = {"columns": header, "rows": [[_num(v) for v in r] for r in rows]}
        if extra:
            obj.update(extra)
        _emit_json(obj, out)
    else:
        _emit_csv(header, rows, out)


# ---------------------------------------------------------------------------
# argument parsing helpers


def _int_arg(text):
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text}")
    if v.denominator != 1:
        # accept things like 1e5 that Fraction reads exactly
        raise argparse.ArgumentTypeError(f"not an integer: {text}")
    return int(v)


def parse_grid(spec):
    """Grid spec: 'a,b,c', 'lo:hi:step' (linear) or 'lo:hi:log10[:per_decade]'."""
    spec = spec.strip()
    try:
        if ":" not in spec:
            vals = [_int_arg(t) for t in spec.split(",") if t.strip()]
        else:
            parts = spec.split(":")
            lo, hi = _int_arg(parts[0]), _int_arg(parts[1])
            if len(parts) < 3:
                raise ValueError
            mode = parts[2]
            if mode == "log10":
                per = int(parts[3]) if len(parts) > 3 else 1
                if per < 1:
                    raise ValueError
                vals = census.default_scan_grid(lo, hi, per) if hi > lo else [lo]
            else:
                step = _int_arg(mode)
                if step < 1:
                    raise ValueError
                vals = list(range(lo, hi + 1, step))
    except (ValueError, argparse.ArgumentTypeError):
        raise UsageError(f"malformed grid spec '{spec}'")
    vals = sorted(set(vals))
    if not vals or vals[0] < 1:
        raise UsageError("grid values must be positive integers")
    return vals


def _field(d):
    if not is_fundamental(d):
        raise UsageError(f"{d} is not a fundamental discriminant")
    return QuadField(d)


def read_reference(path):
    """Reference table CSV with header abs_disc,galois_type,count; returns {(disc, type): count}."""
    out = {}
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as e:
        raise DataError(f"{path}: {e.strerror}")
    with fh:
        r = csv.reader(fh)
        header = next(r, None)
        if header is None or [h.strip() for h in header] != ["abs_disc", "galois_type", "count"]:
            raise DataError(f"{path}:1: header must be abs_disc,galois_type,count")
        last = None
        for lineno, row in enumerate(r, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                disc, t, c = int(row[0]), row[1].strip(), int(row[2])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-integer field")
            if t not in TYPE_NAMES:
                raise DataError(f"{path}:{lineno}: unknown galois_type '{t}'")
            if disc < 1 or c < 0:
                raise DataError(f"{path}:{lineno}: negative value")
            if (disc, t) in out:
                raise DataError(f"{path}:{lineno}: duplicate row ({disc}, {t})")
            if last is not None and disc < last:
                raise DataError(f"{path}:{lineno}: rows not sorted by abs_disc")
            last = disc
            out[(disc, t)] = c
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_count_relative(args, out):
    k = _field(args.disc)
    Y = args.bound
    if Y < 1:
        raise UsageError("--bound must be at least 1")
    header = ["disc", "bound", "engine", "total", "n_c4", "n_v4", "n_d4"]
    rows = []
    direct = chars = None
    if args.engine in ("direct", "both"):
        r = count_relative_direct(k, Y, keep_descriptors=False)
        direct = r.total
        rows.append([k.d, Y, "direct", r.total] + [r.by_type[t] for t in TYPE_NAMES])
    if args.engine in ("characters", "both"):
        chars = count_relative_characters(k, Y)
        rows.append([k.d, Y, "characters", chars, "", "", ""])
    verdict = None
    if args.engine == "both":
        verdict = "match" if direct == chars else "mismatch"
    if args.format == "json":
        obj = {
            "disc": k.d,
            "bound": _num(Y),
            "counts": [
                {"engine": r[2], "total": _num(r[3]), "by_type": dict(zip(TYPE_NAMES, r[4:])) if r[2] == "direct" else None}
                for r in rows
            ],
        }
        if verdict:
            obj["verdict"] = verdict
        _emit_json(obj, out)
    else:
        _emit_csv(header, rows, out)
        if verdict:
            out.write(verdict + "\n")
    if verdict == "mismatch":
        raise InvariantError(f"engines disagree for disc {k.d}, bound {Y}: direct {direct}, characters {chars}")


def cmd_engine_check(args, out):
    if args.max_disc < 3:
        raise UsageError("--max-disc must be at least 3")
    bounds = parse_grid(args.grid)
    rows = engine_table(args.max_disc, bounds, threads=args.threads)
    bad = [r for r in rows if r[2] != r[3]]
    table = [[d, Y, a, b, "match" if a == b else "mismatch"] for d, Y, a, b in rows]
    _emit_table(args, ["disc", "bound", "direct", "characters", "verdict"], table, out,
                {"mismatches": len(bad)})
    if bad:
        d, Y, a, b = bad[0]
        raise InvariantError(f"{len(bad)} mismatches, first at disc {d}, bound {Y}: direct {a}, characters {b}")


def cmd_census(args, out):
    bounds = args.bound
    if any(X < 1 for X in bounds):
        raise UsageError("--bound must be at least 1")
    ref = read_reference(args.compare) if args.compare else None
    if args.emit_table or ref is not None:
        X = max(bounds)
        try:
            table = census.field_table(X)
        except census.AuditError as e:
            raise InvariantError(str(e))
        if ref is None:
            rows = [[d, t, c] for (d, t), c in sorted(table.items())]
            _emit_table(args, ["abs_disc", "galois_type", "count"], rows, out)
            return
        diffs = []
        keys = sorted(set(table) | {key for key in ref if key[0] <= X})
        for key in keys:
            want, got = ref.get(key, 0), table.get(key, 0)
            if want != got:
                diffs.append([key[0], key[1], want, got])
        _emit_table(args, ["abs_disc", "galois_type", "reference", "observed"], diffs, out,
                    {"X": X, "discrepancies": len(diffs)})
        if diffs:
            raise DataError(f"{len(diffs)} discrepancies against {args.compare}")
        return
    results = []
    for X in bounds:
        try:
            results.append(census.quad_over_quad_total(X, threads=args.threads, audit=not args.no_audit))
        except census.AuditError as e:
            raise InvariantError(str(e))
    if args.breakdown:
        header = ["X", "disc", "bound", "total", "c4_descriptors", "v4_descriptors", "d4_descriptors"]
        rows = []
        for r in results:
            for f in r.per_field_breakdown:
                rows.append([r.X, f.disc, f.bound, f.total] + [f.by_type[t] for t in TYPE_NAMES])
        _emit_table(args, header, rows, out)
    else:
        header = ["X", "total", "n_d4", "n_c4", "n_v4", "identity_check"]
        rows = [[r.X, r.total_quad_over_quad, r.n_d4, r.n_c4, r.n_v4, "ok" if r.identity_holds else "FAIL"]
                for r in results]
        _emit_table(args, header, rows, out)
    if not all(r.identity_holds for r in results):
        raise InvariantError("census identity failed")


def _precision_meta(kind):
    if kind == "double":
        return {"arithmetic": "IEEE double", "relative_rounding_allowance": analytic.BATCH_REL_ERR}
    return {"arithmetic": "mpmath", "working_digits": analytic.PREC}


def cmd_constant_c(args, out):
    B = args.truncation
    if B < 3:
        raise UsageError("--truncation must be at least 3")
    r = analytic.constant_C(B)
    _emit_json({
        "truncation": _num(r.truncation),
        "fields": r.fields,
        "partial_sum": repr(r.partial_sum),
        "tail_bound": repr(r.tail_bound),
        "lo": repr(r.value_interval[0]),
        "hi": repr(r.value_interval[1]),
        "width": repr(r.value_interval[1] - r.value_interval[0]),
        "precision": _precision_meta("double"),
    }, out)


def cmd_error_scan(args, out):
    k = _field(args.disc)
    grid = parse_grid(args.grid)
    s = census.error_scan(k, grid)
    d = args.precision
    rows = [{"Y": _num(Y), "count": _num(N), "main_term": _dec(m, d), "error": _dec(E, d),
             "ratio": repr(float(abs(E)) / census.envelope(k.d, Y))} for Y, N, m, E in s.grid]
    if args.format == "csv":
        _emit_csv(["Y", "count", "main_term", "error", "ratio"], [list(r.values()) for r in rows], out)
        return
    _emit_json({
        "disc": k.d,
        "main_term_constant": _dec(analytic.main_term_constant(k), d),
        "envelope": "|disc|^(1/3) * Y^(1/2) * (1 + log Y)",
        "sup_ratio": repr(s.sup_ratio),
        "rows": rows,
        "precision": dict(_precision_meta("mp"), printed_digits=d),
    }, out)


def cmd_zsplit(args, out):
    X = args.bound
    if X < 16:
        raise UsageError("--bound must be at least 16")
    rep = census.z_split_experiment(X)
    _emit_json({
        "X": _num(X),
        "rows": [{
            "Z": r.label, "Z_value": repr(r.Z),
            "near_measured": repr(r.near_measured), "far_measured": repr(r.far_measured),
            "measured_total": repr(r.measured_total),
            "near_shape": repr(r.near_shape), "far_shape": repr(r.far_shape), "shape_total": repr(r.shape_total),
        } for r in rep.rows],
        "best_measured": rep.best_measured,
        "best_shape": rep.best_shape,
        "tail_sum": repr(rep.tail_sum),
        "tail_horizon": rep.tail_horizon,
        "tail_envelope": repr(rep.tail_envelope),
        "precision": _precision_meta("double"),
    }, out)


def cmd_fit_secondary(args, out):
    grid = parse_grid(args.grid)
    try:
        f = census.secondary_fit(grid)
    except ValueError as e:
        raise UsageError(str(e))
    _emit_json({
        "model": "N(V4, X) = D * X^(1/2) * (log X)^2",
        "fitted_D": repr(f.fitted_D),
        "rows": [{"X": _num(x), "v4_count": _num(c), "residual": repr(r), "relative_residual": repr(q),
                  "conditional_d4_secondary": repr(f.conditional_d4_secondary(x))}
                 for x, c, r, q in zip(f.grid, f.counts, f.residuals, f.relative_residuals)],
        "precision": _precision_meta("double"),
    }, out)


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="d4quartic", description="Counting quartic fields with a quadratic subfield.", allow_abbrev=False)
    p.add_argument("--threads", type=int, default=1, help="worker threads (output does not depend on it)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--precision", type=int, default=30, help="printed digits for high-precision values (>= 30)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("count-relative", help="count K/k with N(disc K/k) <= Y")
    s.add_argument("--disc", type=int, required=True)
    s.add_argument("--bound", type=_int_arg, required=True)
    s.add_argument("--engine", choices=("direct", "characters", "both"), default="both")

    s = sub.add_parser("engine-check", help="compare both counting engines over many fields and bounds")
    s.add_argument("--max-disc", type=_int_arg, required=True)
    s.add_argument("--grid", required=True)

    s = sub.add_parser("census", help="quartic census up to X")
    s.add_argument("--bound", type=lambda t: [_int_arg(x) for x in t.split(",")], required=True)
    s.add_argument("--breakdown", action="store_true")
    s.add_argument("--compare", metavar="CSV")
    s.add_argument("--emit-table", action="store_true", help="print abs_disc,galois_type,count rows")
    s.add_argument("--no-audit", action="store_true", help="skip the D4 conjugation audit")

    s = sub.add_parser("constant-c", help="certified interval for the D4 constant")
    s.add_argument("--truncation", type=_int_arg, required=True)

    s = sub.add_parser("error-scan", help="E_k(Y) on a grid")
    s.add_argument("--disc", type=int, required=True)
    s.add_argument("--grid", required=True)

    s = sub.add_parser("zsplit", help="split point experiment for the error sum")
    s.add_argument("--bound", type=_int_arg, required=True)

    s = sub.add_parser("fit-secondary", help="fit D in N(V4, X) ~ D X^(1/2) (log X)^2")
    s.add_argument("--grid", required=True)
    return p


COMMANDS = {
    "count-relative": (cmd_count_relative, "csv"),
    "engine-check": (cmd_engine_check, "csv"),
    "census": (cmd_census, "csv"),
    "constant-c": (cmd_constant_c, "json"),
    "error-scan": (cmd_error_scan, "json"),
    "zsplit": (cmd_zsplit, "json"),
    "fit-secondary": (cmd_fit_secondary, "json"),
}


def run(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    buf = io.StringIO()
    try:
        args = build_parser().parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads must be positive")
        if args.precision < 30:
            raise UsageError("--precision must be at least 30")
        fn, default_fmt = COMMANDS[args.command]
        if args.format is None:
            args.format = default_fmt
        fn(args, buf)
        code = EXIT_OK
    except UsageError as e:
        err.write(f"usage error: {e}\n")
        code = EXIT_USAGE
    except DataError as e:
        err.write(f"data error: {e}\n")
        code = EXIT_DATA
    except InvariantError as e:
        err.write(f"invariant violated: {e}\n")
        code = EXIT_INVARIANT
    out.write(buf.getvalue())
    return code


def main(argv=None):
    sys.exit(run(argv))
