"""Command line: run protocols, write figure data, sweep parameters, validate.

Exit codes: 0 success, 2 usage error, 3 truncation infeasible, 4 invariant
violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .protocols import (
    PROTOCOLS,
    ProtocolReport,
    analytic_fidelity_case1,
    analytic_fidelity_case2,
    neglected_terms,
    run_case1,
    run_case2,
    run_lossless,
)
from .states import InputCoefficients, SqueezeParam, TruncationError

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_INVARIANT = 0, 2, 3, 4
FIGURE_ETAS = (1.0, 0.95, 0.9, 0.8)
SWEEP_PARAMS = ("eps-minus-sq", "a-theta", "eta", "alpha", "r")


class InvariantViolation(RuntimeError):
    pass


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), ".12g")


# argument handling -------------------------------------------------------------

def _shared() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--r", type=float, default=None, help="squeeze magnitude")
    p.add_argument("--phi", type=float, default=0.0, help="squeeze phase")
    p.add_argument("--alpha", type=float, default=2.0, help="coherent amplitude of the channel")
    p.add_argument("--eta", type=float, nargs="+", default=None, help="transmittance value(s)")
    p.add_argument("--eps-minus-sq", type=float, default=0.5, help="|eps-|^2 of the case-0/1 input")
    p.add_argument("--a-theta", type=float, default=math.pi / 4, help="case-2 input angle")
    p.add_argument("--tail", type=float, default=1e-12, help="truncation tail tolerance")
    p.add_argument("--max-dim", type=int, default=None, help="per-mode truncation cap")
    p.add_argument("--max-n", type=int, default=8, help="largest n in the (n, n+1) outcomes")
    p.add_argument("--out", type=Path, default=None, help="output file")
    p.add_argument("--config", type=Path, default=None, help="key=value defaults file")
    p.add_argument("--simulate", action="store_true", help="add exact-simulation columns")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    return p


def build_parser() -> argparse.ArgumentParser:
    shared = _shared()
    parser = argparse.ArgumentParser(prog="telesqueeze", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("protocol", parents=[shared], help="run one protocol and write a JSON report")
    p.add_argument("protocol_id", choices=PROTOCOLS)

    p = sub.add_parser("figure2", parents=[shared], help="case-1 fidelity versus |eps-|^2 as CSV")
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--sim-points", type=int, default=11)

    p = sub.add_parser("figure3", parents=[shared], help="case-2 fidelity versus theta as CSV")
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--sim-points", type=int, default=11)

    p = sub.add_parser("sweep", parents=[shared], help="sweep one parameter of a protocol as CSV")
    p.add_argument("--protocol", choices=PROTOCOLS, default="case1")
    p.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--points", type=int, default=11)

    p = sub.add_parser("validate", parents=[shared], help="run the invariant suites")
    p.add_argument("--suite", action="append", default=None,
                   help="suite name (repeatable); default runs all")
    return parser


def read_config(path: Path) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    try:
        values = read_config(args.config)
    except (OSError, ValueError) as exc:
        parser.error(f"config: {exc}")
    # re-parse with file values as defaults so explicit flags still win
    extra = []
    for key, value in values.items():
        if not hasattr(args, key):
            parser.error(f"config: unknown key {key!r}")
        flag = "--" + key.replace("_", "-")
        if flag in argv or any(a.startswith(flag + "=") for a in argv):
            continue
        if value.lower() in ("true", "false"):
            if value.lower() == "true":
                extra.append(flag)
            continue
        extra += [flag, *value.replace(",", " ").split()]
    return parser.parse_args(argv + extra)


# commands ------------------------------------------------------------------------

def _etas(args, default=FIGURE_ETAS) -> list[float]:
    etas = list(default) if args.eta is None else args.eta
    if any(not 0.0 <= e <= 1.0 for e in etas):
        raise ValueError("eta values must lie in [0, 1]")
    return etas


def _check_report(rep: ProtocolReport):
    for o in rep.outcomes:
        p, f = o["probability"], o.get("bob_fidelity")
        if not -1e-12 <= p <= 1 + 1e-12 or (f is not None and not -1e-12 <= f <= 1 + 1e-12):
            raise InvariantViolation(f"outcome {o['label']} out of range: p={p}, F={f}")
    if rep.approximation_gap < 0:
        raise InvariantViolation("negative approximation gap")


def run_protocol(protocol: str, r: float, phi: float, alpha: float, eta: float, eps_minus_sq: float,
                 a_theta: float, tail: float, max_dim, max_n: int) -> ProtocolReport:
    xi = SqueezeParam(r, phi)
    if protocol == "lossless":
        c = InputCoefficients.from_eps_minus_sq(eps_minus_sq)
        return run_lossless(c.eps_plus, c.eps_minus, xi, max_n=max_n, tail_tol=tail, max_dim=max_dim)
    if protocol == "case1":
        c = InputCoefficients.from_eps_minus_sq(eps_minus_sq)
        return run_case1(c.eps_plus, c.eps_minus, xi, alpha, eta, tail_tol=tail, max_dim=max_dim)
    c = InputCoefficients.from_theta(a_theta)
    return run_case2(c.a_plus, c.a_minus, xi, alpha, eta, tail_tol=tail, max_dim=max_dim)


def cmd_protocol(args) -> int:
    r = 1.0 if args.r is None else args.r
    eta = 1.0 if args.eta is None else args.eta[0]
    rep = run_protocol(args.protocol_id, r, args.phi, args.alpha, eta, args.eps_minus_sq,
                       args.a_theta, args.tail, args.max_dim, args.max_n)
    _check_report(rep)
    print(rep.summary())
    if args.out is not None:
        args.out.write_text(rep.to_json(indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def write_csv(path: Path | None, meta: dict, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) if not isinstance(x, str) else x for x in row])
    text = buf.getvalue()
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def _parallel_map(fn, tasks, jobs: int):
    if jobs <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, *zip(*tasks)))  # map keeps grid order


def _case1_sim(x, eta, r, phi, alpha, tail, max_dim):
    c = InputCoefficients.from_eps_minus_sq(x)
    return run_case1(c.eps_plus, c.eps_minus, SqueezeParam(r, phi), alpha, eta,
                     tail_tol=tail, max_dim=max_dim).outcomes[0]["bob_fidelity"]


def _case2_sim(theta, eta, r, phi, alpha, tail, max_dim):
    c = InputCoefficients.from_theta(theta)
    return run_case2(c.a_plus, c.a_minus, SqueezeParam(r, phi), alpha, eta,
                     tail_tol=tail, max_dim=max_dim).outcomes[0]["bob_fidelity"]


def _grid_union(fine: np.ndarray, coarse: np.ndarray, span: float) -> np.ndarray:
    merged = np.concatenate([fine, coarse])
    keys = np.round(merged / span, 12)
    _, first = np.unique(keys, return_index=True)
    return merged[np.sort(first)][np.argsort(keys[np.sort(first)])]


def _figure(args, *, fig: str, hi: float, analytic, sim, r_default: float, xname: str) -> int:
    if args.points < 2 or args.sim_points < 2:
        raise ValueError("point counts must be >= 2")
    etas = _etas(args)
    r = r_default if args.r is None else args.r
    fine = np.linspace(0.0, hi, args.points)
    coarse = np.linspace(0.0, hi, args.sim_points)
    grid = _grid_union(fine, coarse, hi) if args.simulate else fine
    sim_keys = set(np.round(coarse / hi, 12)) if args.simulate else set()

    sims = {}
    if args.simulate:
        tasks = [(x, eta, r, args.phi, args.alpha, args.tail, args.max_dim) for eta in etas for x in coarse]
        for t, val in zip(tasks, _parallel_map(sim, tasks, args.jobs)):
            sims[(round(t[0] / hi, 12), t[1])] = val

    header = [xname] + [f"F_eta_{fmt(e)}" for e in etas]
    if args.simulate:
        header += [f"sim_eta_{fmt(e)}" for e in etas]
    rows = []
    for x in grid:
        row = [x] + [analytic(x, e, r) for e in etas]
        if args.simulate:
            key = round(x / hi, 12)
            row += [sims[(key, e)] if key in sim_keys else None for e in etas]
        rows.append(row)
    meta = {"figure": fig, "version": __version__, "alpha": fmt(args.alpha), "r": fmt(r),
            "phi": fmt(args.phi), "etas": " ".join(fmt(e) for e in etas), "tail": fmt(args.tail)}
    if fig == "figure3":
        terms = neglected_terms(r, args.alpha, min(etas))
        meta["neglected_terms"] = " ".join(f"{k}={fmt(v)}" for k, v in terms.items())
        if not args.simulate:
            meta["warning"] = "analytic only; exact simulation at this r is not desk-scale feasible"
    write_csv(args.out, meta, header, rows)
    return EXIT_OK


def cmd_figure2(args) -> int:
    return _figure(args, fig="figure2", hi=1.0, r_default=1.0, xname="eps_minus_sq", sim=_case1_sim,
                   analytic=lambda x, eta, r: analytic_fidelity_case1(x, eta, args.alpha))


def cmd_figure3(args) -> int:
    return _figure(args, fig="figure3", hi=math.pi, r_default=7.0, xname="theta", sim=_case2_sim,
                   analytic=lambda th, eta, r: analytic_fidelity_case2(th, r, eta, args.alpha))


def _sweep_point(protocol, values, tail, max_dim, max_n):
    rep = run_protocol(protocol, values["r"], values["phi"], values["alpha"], values["eta"],
                       values["eps-minus-sq"], values["a-theta"], tail, max_dim, max_n)
    _check_report(rep)
    if protocol == "lossless":
        fids = [o["bob_fidelity"] for o in rep.outcomes if o["kind"] == "success"]
        return [min(fids), None, rep.approximation_gap, rep.success_probability,
                rep.analytic["success_partial_sum"]]
    o = rep.outcomes[0]
    return [o["bob_fidelity"], rep.analytic["fidelity"], rep.approximation_gap, rep.success_probability, None]


def cmd_sweep(args) -> int:
    if args.points < 2 or not args.lo < args.hi:
        raise ValueError("sweep needs points >= 2 and lo < hi")
    etas = [1.0] if args.param == "eta" else _etas(args, default=(1.0,))
    base = {"r": 1.0 if args.r is None else args.r, "phi": args.phi, "alpha": args.alpha,
            "eps-minus-sq": args.eps_minus_sq, "a-theta": args.a_theta}
    tasks = []
    for x in np.linspace(args.lo, args.hi, args.points):
        for eta in etas:
            values = dict(base, eta=eta)
            values[args.param] = float(x)
            tasks.append((args.protocol, values, args.tail, args.max_dim, args.max_n))
    results = _parallel_map(_sweep_point, tasks, args.jobs)
    keys = [args.param] if args.param == "eta" else [args.param, "eta"]
    header = [k.replace("-", "_") for k in keys] + ["exact_fidelity", "analytic_fidelity",
                                                    "gap", "success_probability", "analytic_success"]
    rows = [[t[1][k] for k in keys] + res for t, res in zip(tasks, results)]
    meta = {"sweep": args.protocol, "version": __version__,
            **{k.replace("-", "_"): fmt(v) for k, v in base.items() if k != args.param},
            "tail": fmt(args.tail)}
    write_csv(args.out, meta, header, rows)
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import run_suites

    results = run_suites(args.suite)
    width = max(len(f"{r.suite}/{r.name}") for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {f'{r.suite}/{r.name}':<{width}}  {r.detail}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_INVARIANT


COMMANDS = {"protocol": cmd_protocol, "figure2": cmd_figure2, "figure3": cmd_figure3,
            "sweep": cmd_sweep, "validate": cmd_validate}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = _apply_config(parser, argv)
    try:
        return COMMANDS[args.command](args)
    except TruncationError as exc:
        print(f"infeasible truncation: {exc}", file=sys.stderr)
        print(f"  achievable tail mass {exc.achievable_tail:.3e} at D={exc.max_dim}; "
              "use the analytic path (figure3) or loosen --tail / raise --max-dim", file=sys.stderr)
        return EXIT_INFEASIBLE
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
