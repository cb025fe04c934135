"""
Command-line front end.

    dressed-me diagonalize SCENARIO
    dressed-me drift SCENARIO [--me local|global] [--basis bare|dressed]
    dressed-me eliminate SCENARIO --fast K [K ...]
    dressed-me ep-scan SCENARIO [--eliminate K ...] [--param PATH] [--range LO HI N] [--family NAME]
    dressed-me oracle SCENARIO [--cutoff N] [--t T] [--dt DT]

SCENARIO is a JSON file or the name of a bundled preset.  Exit codes: 2 parse
error, 3 instability, 4 oracle deviation above 1e-6, 5 guard rail.
"""

from __future__ import annotations

import argparse
import csv
import inspect
import io
import json
import sys
from contextlib import contextmanager
from typing import Optional

import numpy as np

from .errors import (
    DimensionGuard,
    DressedMEError,
    InstabilityError,
    ScenarioError,
    StepTooLarge,
    TruncationError,
)
from .ep import ep_scan
from .fock import moment_deviation
from .moments import drift, effective_hamiltonian
from .nambu import diagonalize
from .reduction import eliminate
from .scenario import PRESETS, Scenario, resolve

EXIT_PARSE = 2
EXIT_INSTABILITY = 3
EXIT_ORACLE = 4
EXIT_GUARD = 5
ORACLE_LIMIT = 1e-6


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _complex_json(z) -> dict:
    z = complex(z)
    return {"re": float(z.real), "im": float(z.imag)}


def _matrix_json(m) -> list:
    return [[_complex_json(z) for z in row] for row in np.asarray(m)]


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


@contextmanager
def _sink(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _drift_for(sc: Scenario, me: Optional[str], basis: Optional[str]):
    model = sc.model(me)
    basis = basis or sc.basis
    return drift(model, basis=basis, frame=sc.frame_frequencies(basis))


def _effective(sc: Scenario, fast, me=None, basis=None):
    d = _drift_for(sc, me, basis)
    labels = [m["name"] for m in sc.modes]
    if fast:
        h = eliminate(d, fast)
    else:
        h = effective_hamiltonian(d)
    if basis or sc.basis == "bare":
        return h.__class__(h.h, tuple(labels[k] for k in h.mode_labels))
    return h


def cmd_diagonalize(args) -> int:
    sc = resolve(args.scenario)
    bt = diagonalize(sc.system())
    report = {
        "dressed_freq": [float(w) for w in bt.dressed_freq],
        "ground_shift": bt.ground_shift,
        "t": _matrix_json(bt.t),
        "stable": True,
    }
    with _sink(args.output) as out:
        out.write(_dump_json(report))
    return 0


def cmd_drift(args) -> int:
    sc = resolve(args.scenario)
    d = _drift_for(sc, args.me, args.basis)
    rows = []
    for i in range(d.m.shape[0]):
        for j in range(d.m.shape[1]):
            z = d.m[i, j]
            rows.append(["entry", str(i), str(j), fmt(z.real), fmt(z.imag)])
    ev = np.linalg.eigvals(d.m)
    ev = ev[np.lexsort((ev.imag, ev.real))]
    for k, z in enumerate(ev):
        rows.append(["eigenvalue", str(k), "", fmt(z.real), fmt(z.imag)])
    with _sink(args.output) as out:
        out.write(_csv_text(["kind", "row", "col", "re", "im"], rows))
    return 0


def cmd_eliminate(args) -> int:
    sc = resolve(args.scenario)
    fast = args.fast if args.fast is not None else list(sc.eliminate)
    h = _effective(sc, fast, args.me, args.basis)
    ev = np.linalg.eigvals(h.h)
    ev = ev[np.lexsort((ev.imag, ev.real))]
    report = {
        "modes": [str(x) for x in h.mode_labels],
        "h_eff": _matrix_json(h.h),
        "eigenvalues": [_complex_json(z) for z in ev],
    }
    with _sink(args.output) as out:
        out.write(_dump_json(report))
    return 0


def _scan_family(sc: Scenario, args):
    """Return (family, lo, hi, n, parameter label)."""
    use_family = args.family is not None or (sc.family is not None and args.param is None and not args.pipeline)
    if use_family:
        fam = sc.analytic_family(args.family)
        sweep = (sc.family or {}).get("sweep", {})
        lo, hi, n = _range(args, sweep.get("from"), sweep.get("to"), sweep.get("points"))
        free = next(iter(inspect.signature(fam).parameters), "parameter")
        return fam, lo, hi, n, f"{args.family or sc.family['name']}:{free}"
    paths = [args.param] if args.param else (list(sc.sweep.paths) if sc.sweep else None)
    if not paths:
        raise ScenarioError("no sweep parameter: give --param or a sweep block")
    for p in paths:
        sc.get(p)
    default = sc.sweep if sc.sweep and not args.param else None
    lo, hi, n = _range(args, default and default.start, default and default.stop, default and default.points)
    fast = args.eliminate if args.eliminate is not None else list(sc.eliminate)

    def family(p):
        return _effective(sc.with_value(paths, p), fast)

    return family, lo, hi, n, ",".join(paths)


def _range(args, lo, hi, n):
    if args.range is not None:
        lo, hi, n = args.range
    if lo is None or hi is None or n is None:
        raise ScenarioError("no scan range: give --range LO HI N")
    return float(lo), float(hi), int(n)


def cmd_ep_scan(args) -> int:
    sc = resolve(args.scenario)
    family, lo, hi, n, label = _scan_family(sc, args)
    points, reports = ep_scan(family, lo, hi, n)
    dim = len(points[0].eigenvalues)
    header = ["param"]
    for k in range(dim):
        header += [f"eig{k}_re", f"eig{k}_im"]
    header += ["min_gap", "coalescence", "class"]
    rows = []
    for p in points:
        row = [fmt(p.param_value)]
        for z in p.eigenvalues:
            row += [fmt(z.real), fmt(z.imag)]
        row += [fmt(p.min_gap), fmt(p.coalescence), p.classification]
        rows.append(row)
    report = {
        "parameter": label,
        "range": [lo, hi, n],
        "exceptional_points": [
            {"location": r.location, "refined": r.refined, "discriminant_residual": r.discriminant_residual,
             "symmetry_side_low": r.symmetry_side_low, "symmetry_side_high": r.symmetry_side_high,
             "coalescence": r.coalescence}
            for r in reports
        ],
    }
    with _sink(args.output) as out:
        out.write(_csv_text(header, rows))
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(_dump_json(report))
    else:
        sys.stderr.write(_dump_json(report))
    return 0


def cmd_oracle(args) -> int:
    sc = resolve(args.scenario)
    model = sc.model(args.me)
    cutoff = args.cutoff if args.cutoff is not None else sc.oracle.get("cutoff", 6 if sc.n_modes <= 2 else 4)
    horizon = args.t if args.t is not None else sc.oracle.get("horizon")
    dt = args.dt if args.dt is not None else sc.oracle.get("dt")
    rep = moment_deviation(model, cutoff=cutoff, t_final=horizon, dt=dt, richardson=not args.no_richardson)
    report = {
        "cutoff": cutoff,
        "t_final": rep.t_final,
        "dt": rep.dt,
        "max_deviation": rep.max_deviation,
        "richardson_estimate": rep.richardson_estimate,
        "max_top_population": rep.max_top_population,
        "min_eigenvalue": rep.min_eigenvalue,
        "trace_drift": rep.trace_drift,
        "passed": rep.max_deviation <= ORACLE_LIMIT,
    }
    with _sink(args.output) as out:
        out.write(_dump_json(report))
    return 0 if rep.max_deviation <= ORACLE_LIMIT else EXIT_ORACLE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dressed-me", description=__doc__.split("\n\n")[0].strip())
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("scenario", help=f"scenario JSON file or preset ({', '.join(PRESETS)})")
        sp.add_argument("--output", "-o", default=None, help="output path (default stdout)")

    sp = sub.add_parser("diagonalize", help="dressed frequencies and canonical transform")
    common(sp)
    sp.set_defaults(func=cmd_diagonalize)

    sp = sub.add_parser("drift", help="first-moment drift matrix as CSV")
    common(sp)
    sp.add_argument("--me", choices=["local", "global", "global_degenerate"], default=None)
    sp.add_argument("--basis", choices=["bare", "dressed"], default=None)
    sp.set_defaults(func=cmd_drift)

    sp = sub.add_parser("eliminate", help="effective Hamiltonian after adiabatic elimination")
    common(sp)
    sp.add_argument("--fast", type=int, nargs="*", default=None)
    sp.add_argument("--me", choices=["local", "global", "global_degenerate"], default=None)
    sp.add_argument("--basis", choices=["bare", "dressed"], default=None)
    sp.set_defaults(func=cmd_eliminate)

    sp = sub.add_parser("ep-scan", help="exceptional-point scan")
    common(sp)
    sp.add_argument("--eliminate", type=int, nargs="*", default=None, help="fast modes to eliminate")
    sp.add_argument("--param", default=None, help="dotted scenario path to sweep")
    sp.add_argument("--range", type=float, nargs=3, metavar=("LO", "HI", "N"), default=None)
    sp.add_argument("--family", default=None, help="scan a named analytic family instead of the model")
    sp.add_argument("--pipeline", action="store_true", help="ignore the scenario's analytic family")
    sp.add_argument("--report", default=None, help="EP report JSON path (default stderr)")
    sp.set_defaults(func=cmd_ep_scan)

    sp = sub.add_parser("oracle", help="truncated-Fock check of the moment equations")
    common(sp)
    sp.add_argument("--cutoff", type=int, default=None)
    sp.add_argument("--t", type=float, default=None)
    sp.add_argument("--dt", type=float, default=None)
    sp.add_argument("--me", choices=["local", "global", "global_degenerate"], default=None)
    sp.add_argument("--no-richardson", action="store_true")
    sp.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InstabilityError as exc:
        print(f"unstable: {exc}", file=sys.stderr)
        return EXIT_INSTABILITY
    except (DimensionGuard, TruncationError, StepTooLarge) as exc:
        print(f"guard rail: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except DressedMEError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
