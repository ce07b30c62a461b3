"""Command line: ``segfd solve | study | verify | bench list``.

Exit codes: 0 success, 1 invalid input, 2 iteration cap reached without
convergence, 3 property violation found by ``verify``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from segfd.benchmarks import BENCHMARKS
from segfd.config import ConfigError, load_config
from segfd.grid import make_grid
from segfd.output import read_fields, write_outputs
from segfd.solver import solve
from segfd.study import run_study
from segfd.verify import check_scheme_properties, discrete_energy, linf_error, truncation_bound

log = logging.getLogger("segfd")

EXIT_OK, EXIT_INVALID, EXIT_MAXITERS, EXIT_VIOLATION = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="segfd", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one mesh and write fields and report")
    s.add_argument("--config", required=True)
    s.add_argument("--N", type=int)
    s.add_argument("--tol", type=float)
    s.add_argument("--strategy")
    s.add_argument("--out")
    s.add_argument("--format", help="comma list from csv,json,pgm")

    st = sub.add_parser("study", help="mesh-refinement study")
    st.add_argument("--config", required=True)
    st.add_argument("--ladder", help="comma list of N, e.g. 16,32,64")
    st.add_argument("--reference", action="store_true", help="measure against a fine-grid solve")
    st.add_argument("--tol", type=float)
    st.add_argument("--strategy")
    st.add_argument("--out")
    st.add_argument("--format")

    v = sub.add_parser("verify", help="re-check the discrete properties of stored fields")
    v.add_argument("--config", required=True)
    v.add_argument("--field-dir", required=True)

    b = sub.add_parser("bench", help="benchmark catalog")
    b.add_argument("action", choices=["list"])
    return ap


def _overrides(args, *names) -> dict:
    return {name: getattr(args, name, None) for name in names}


def _solve(args) -> int:
    cfg = load_config(args.config, _overrides(args, "N", "tol", "strategy", "out", "format"))
    if cfg.N is None:
        raise ConfigError(["solve needs N (config or --N), not a ladder"])
    p = cfg.problem
    grid = make_grid(p.a, cfg.N)
    state, sr = solve(p, grid, cfg.solver)
    props = check_scheme_properties(state, p, tol=cfg.tol)
    report = {
        "problem": p.name,
        "m": p.m,
        "a": p.a,
        "N": grid.N,
        "h": grid.h,
        "tol": cfg.tol,
        "solve": sr.as_dict(),
        "properties": props.as_dict(),
        "verdicts": props.verdicts(cfg.tol, grid.h),
        "energy": discrete_energy(state, p),
    }
    if p.has_exact:
        report["linf_error"] = [float(e) for e in linf_error(state, p)]
        if p.exact_laplacian is not None:
            report["truncation_bound"] = truncation_bound(p, grid)
    paths = write_outputs(cfg.out, state, cfg.formats, report)
    print(f"{p.name} N={grid.N}: {sr.reason} after {sr.iterations} sweeps, "
          f"residual {sr.residual:.3e}, wall {sr.wall_time:.2f}s", file=sys.stderr)
    for path in paths:
        print(path)
    return EXIT_OK if sr.converged else EXIT_MAXITERS


def _study(args) -> int:
    cfg = load_config(args.config, _overrides(args, "ladder", "tol", "strategy", "out", "format"))
    if cfg.ladder is None:
        raise ConfigError(["study needs a ladder (config or --ladder)"])
    p = cfg.problem
    report = run_study(p, cfg.ladder, cfg.solver, reference=True if args.reference else None)
    doc = report.as_dict()
    doc["tol"] = cfg.tol
    write_outputs(cfg.out, None, cfg.formats, doc, study=report)
    print(f"# {p.name} ({report.reference} reference)")
    print("N,h," + ",".join(f"err_{l + 1}" for l in range(p.m)) + ",bound,iters")
    for r in report.rows:
        bound = "" if r.bound is None else f"{r.bound:.6e}"
        print(f"{r.N},{r.h:.6g}," + ",".join(f"{e:.6e}" for e in r.errors) + f",{bound},{r.iterations}")
    order = "degenerate" if report.degenerate else f"{report.fitted_order:.4f}"
    print(f"# fitted order: {order}")
    return EXIT_OK if all(r.converged for r in report.rows) else EXIT_MAXITERS


def _verify(args) -> int:
    cfg = load_config(args.config, require_resolution=False)
    p = cfg.problem
    state = read_fields(args.field_dir, p.m, a=p.a)
    props = check_scheme_properties(state, p, tol=cfg.tol)
    verdicts = props.verdicts(cfg.tol, state.grid.h)
    print(json.dumps({"N": state.grid.N, "properties": props.as_dict(), "verdicts": verdicts},
                     indent=2, sort_keys=True))
    failed = [k for k, ok in verdicts.items() if not ok]
    if failed:
        print("property violations: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    np.seterr(all="ignore")
    try:
        if args.command == "bench":
            for name, (_, desc) in BENCHMARKS.items():
                print(f"{name}: {desc}")
            return EXIT_OK
        return {"solve": _solve, "study": _study, "verify": _verify}[args.command](args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FloatingPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MAXITERS


if __name__ == "__main__":
    sys.exit(main())
