"""Command-line front end: point evaluations, sweeps, figure data, validation.

Subcommands
-----------
point      one parameter point, full duality report as JSON
sweep      1D or 2D parameter sweep, CSV or JSON-lines table
fig2b      preset visibility-vs-thermal-Doppler sweep at resonance
validate   self-validation suite (oracle equivalence, duality bounds, ...)

Exit codes: 0 ok, 1 usage or parameter error, 2 convergence flags raised
(point), 3 validation failure. CSV uses '.' decimals and ',' separators,
no locale. Identical flags and seed give byte-identical output; sweep rows
are computed independently, so the worker count (capped by CBS_THREADS)
cannot change results, only wall time.

A config file (`--config`, lines of `key = value`, same names as the long
flags with dashes or underscores) is merged underneath explicit flags.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import math
import os
import sys

from .observables import RECOIL_CONTAMINATION, full_report
from .params import ParameterError, PhysParams, solve_theta_for_xi_sq
from .quadrature import QuadratureSpec
from . import validate as validation

SCHEMA_VERSION = 1

SWEEP_PARAMS = ("delta", "omega_ho", "omega_R", "nbar", "theta", "mu", "xi_cl_sq")

# built-in defaults, applied beneath config-file values and explicit flags
DEFAULTS = {
    "delta": 0.0, "omega_ho": 1e-4, "omega_r": 1e-3, "mu": 0.0,
    "quad_method": "tensor-laguerre", "quad_order": 48,
    "mc_samples": 200_000, "seed": 0, "format": "csv", "count": 17,
    "xi2_min": 1e-2, "xi2_max": 1e2, "cases": 100,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p: _Parser, sweepable: bool = True):
    g = p.add_argument_group("physical parameters (units of Gamma)")
    g.add_argument("--delta", type=float, default=None, help="probe detuning")
    g.add_argument("--omega-ho", type=float, default=None, help="trap frequency")
    g.add_argument("--omega-r", type=float, default=None, help="recoil frequency")
    g.add_argument("--mu", type=float, default=None,
                   help="geometry cosine nhat.khat_in in [-1, 1]")
    g.add_argument("--nbar", type=float, default=None, help="thermal occupation")
    g.add_argument("--theta", type=float, default=None,
                   help="scaled inverse temperature beta*hbar*omega_ho")
    g.add_argument("--xi-cl-sq", type=float, default=None,
                   help="target thermal Doppler parameter xi_cl^2 "
                        "(back-solves theta at fixed omega_R, omega_ho)")
    g.add_argument("--xi-cl", type=float, default=None,
                   help="like --xi-cl-sq but linear in xi_cl")
    q = p.add_argument_group("quadrature")
    q.add_argument("--quad-method", default=None,
                   choices=["tensor-laguerre", "adaptive", "monte-carlo"])
    q.add_argument("--quad-order", type=int, default=None)
    q.add_argument("--mc-samples", type=int, default=None)
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--fock-dim", type=int, default=None,
                   help="Fock truncation override (validate)")
    o = p.add_argument_group("output")
    o.add_argument("--out", default=None, help="output path (default stdout)")
    o.add_argument("--format", default=None, choices=["csv", "json"])
    o.add_argument("--schema", action="store_true",
                   help="print the machine-readable output schema and exit")
    o.add_argument("--config", default=None, help="key = value config file")


def build_parser() -> _Parser:
    parser = _Parser(prog="cbsduality",
                     description="CBS visibility and which-path information "
                                 "for two harmonically trapped atoms")
    sub = parser.add_subparsers(dest="command", required=True)

    p_point = sub.add_parser("point", parents=[], help="single parameter point")
    _add_common(p_point)

    p_sweep = sub.add_parser("sweep", help="1D/2D parameter sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--param", required=True, help=f"axis 1: one of {SWEEP_PARAMS}")
    p_sweep.add_argument("--min", type=float, required=True)
    p_sweep.add_argument("--max", type=float, required=True)
    p_sweep.add_argument("--count", type=int, default=None)
    p_sweep.add_argument("--log", action="store_true", help="log spacing on axis 1")
    p_sweep.add_argument("--param2", default=None)
    p_sweep.add_argument("--min2", type=float, default=None)
    p_sweep.add_argument("--max2", type=float, default=None)
    p_sweep.add_argument("--count2", type=int, default=None)
    p_sweep.add_argument("--log2", action="store_true")
    p_sweep.add_argument("--plot", default=None, help="also render a figure file")

    p_fig = sub.add_parser("fig2b",
                           help="preset: V vs xi_cl^2 at resonance, "
                                "recoil suppressed (chi/xi_cl^2 <= 0.01)")
    _add_common(p_fig)
    p_fig.add_argument("--count", type=int, default=None)
    p_fig.add_argument("--xi2-min", type=float, default=None)
    p_fig.add_argument("--xi2-max", type=float, default=None)
    p_fig.add_argument("--plot", default=None, help="also render a figure file")

    p_val = sub.add_parser("validate", help="run the self-validation suite")
    _add_common(p_val)
    p_val.add_argument("--cases", type=int, default=None,
                       help="random cases for the oracle-equivalence check")
    p_val.add_argument("--quick", action="store_true",
                       help="skip the quadrature-heavy grid checks")
    return parser


def _read_config(path: str) -> dict:
    conf = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"config line not 'key = value': {raw!r}")
            key, val = (x.strip() for x in line.split("=", 1))
            conf[key.replace("-", "_").lower()] = val
    return conf


def _cast_config_value(key: str, raw: str):
    default = DEFAULTS.get(key)
    if isinstance(default, str):
        return raw
    if isinstance(default, int) and not isinstance(default, bool):
        try:
            return int(raw)
        except ValueError:
            return float(raw)
    try:
        return float(raw)
    except ValueError:
        return raw


def _merge_config(args: argparse.Namespace):
    """Fill unset (None) options from config file, then built-in defaults."""
    conf = _read_config(args.config) if args.config else {}
    for key, raw in conf.items():
        if getattr(args, key, None) is None and hasattr(args, key):
            setattr(args, key, _cast_config_value(key, raw))
    for key, val in DEFAULTS.items():
        if getattr(args, key, None) is None and hasattr(args, key):
            setattr(args, key, val)


def _build_params(args, overrides: dict | None = None) -> PhysParams:
    """PhysParams from flags; --xi-cl(-sq) back-solves theta.

    The back-solve keeps omega_R and omega_ho at their (default or given)
    values and chooses theta so that coth(theta/2) zeta^2 equals the
    requested xi^2.
    """
    ov = overrides or {}
    delta = ov.get("delta", args.delta)
    omega_ho = ov.get("omega_ho", args.omega_ho)
    omega_R = ov.get("omega_R", args.omega_r)
    mu = ov.get("mu", args.mu)
    xi2 = args.xi_cl_sq
    if args.xi_cl is not None:
        if xi2 is not None:
            raise ParameterError("give --xi-cl or --xi-cl-sq, not both")
        xi2 = args.xi_cl**2
    if "xi_cl_sq" in ov:
        xi2 = ov["xi_cl_sq"]
    nbar, theta = ov.get("nbar", args.nbar), ov.get("theta", args.theta)
    if xi2 is not None:
        if nbar is not None or theta is not None:
            raise ParameterError(
                "--xi-cl(-sq) back-solves the temperature; do not also "
                "give --nbar/--theta")
        zeta_sq = 4.0 * omega_R * omega_ho / (delta**2 + 0.25)
        theta = solve_theta_for_xi_sq(xi2, zeta_sq)
    if nbar is None and theta is None:
        nbar = 0.0
    return PhysParams(delta=delta, omega_ho=omega_ho, omega_R=omega_R,
                      mu=mu, nbar=nbar, theta=theta)


def _build_quadspec(args, **over) -> QuadratureSpec:
    kw = dict(method=args.quad_method, order=args.quad_order,
              mc_samples=args.mc_samples, seed=args.seed)
    kw.update(over)
    return QuadratureSpec(**kw)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _json_safe(obj):
    """Strict JSON: non-finite floats become strings ('inf', 'nan')."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _write_table(rows: list[dict], columns: list[str], args) -> None:
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        if args.format == "csv":
            out.write(",".join(columns) + "\n")
            for r in rows:
                out.write(",".join(_fmt(r[c]) for c in columns) + "\n")
        else:
            for r in rows:
                out.write(json.dumps(_json_safe({c: r[c] for c in columns}),
                                     sort_keys=True) + "\n")
    finally:
        if args.out:
            out.close()


def _print_schema(command: str, columns: list[str]) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "command": command,
           "columns": columns}
    print(json.dumps(doc, indent=2, sort_keys=True))


def _n_workers() -> int:
    cap = os.environ.get("CBS_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def _row_task(task):
    """Worker-pool entry: one sweep row (picklable plain dicts in/out).

    Swept (requested) axis values in `meta` win over the report's derived
    echo of the same name, so table columns reproduce the grid exactly.
    """
    pkw, qkw, meta = task
    report = full_report(PhysParams(**pkw), QuadratureSpec(**qkw))
    row = report.to_dict()
    row["flags"] = ";".join(report.flags)
    row.update(meta)
    return row


def _run_rows(tasks: list) -> list[dict]:
    workers = min(_n_workers(), len(tasks))
    if workers <= 1 or len(tasks) <= 2:
        return [_row_task(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_row_task, tasks))


POINT_KEYS = ["delta", "omega_ho", "omega_R", "nbar", "theta", "mu",
              "xi_cl_sq", "V", "V_err", "P", "P_err", "D_analytic",
              "D_regime", "duality_sum", "duality_sum_err", "I_A", "I_B",
              "I_err", "flags", "converged"]
SWEEP_COLUMNS = ["V", "V_err", "P", "D_analytic", "duality_sum",
                 "I_A", "I_B", "flags"]
FIG2B_COLUMNS = ["xi_cl_sq", "V", "V_err", "flags"]


def cmd_point(args) -> int:
    if args.schema:
        _print_schema("point", POINT_KEYS)
        return 0
    p = _build_params(args)
    report = full_report(p, _build_quadspec(args))
    doc = _json_safe(report.to_dict())
    text = json.dumps(doc, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if abs(p.delta) > 2.0:
        print("warning: |delta| > 2 degrades the tensor rule; consider "
              "--quad-method adaptive", file=sys.stderr)
    return 2 if not report.converged else 0


def _axis_values(lo: float, hi: float, count: int, log: bool) -> list[float]:
    if count < 2:
        raise ParameterError("sweep axis count must be >= 2")
    if log:
        if lo <= 0 or hi <= 0:
            raise ParameterError("log spacing requires positive bounds")
        step = (math.log(hi) - math.log(lo)) / (count - 1)
        return [math.exp(math.log(lo) + i * step) for i in range(count)]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def _normalize_param(name: str) -> str:
    key = name.replace("-", "_")
    aliases = {"omega_r": "omega_R"}
    key = aliases.get(key, key)
    if key not in SWEEP_PARAMS:
        raise ParameterError(f"unknown sweep parameter {name!r}; "
                             f"choose from {SWEEP_PARAMS}")
    return key


def cmd_sweep(args) -> int:
    ax1 = _normalize_param(args.param)
    columns = [ax1] + SWEEP_COLUMNS
    ax2 = None
    if args.param2:
        ax2 = _normalize_param(args.param2)
        columns = [ax1, ax2] + SWEEP_COLUMNS
    if args.schema:
        _print_schema("sweep", columns)
        return 0
    vals1 = _axis_values(args.min, args.max, args.count, args.log)
    vals2 = [None]
    if ax2:
        if args.min2 is None or args.max2 is None or args.count2 is None:
            raise ParameterError("--param2 requires --min2, --max2, --count2")
        vals2 = _axis_values(args.min2, args.max2, args.count2, args.log2)
    qkw = dataclasses.asdict(_build_quadspec(args))
    tasks = []
    for v1 in vals1:            # axis 2 varies fastest
        for v2 in vals2:
            ov = {ax1: v1}
            meta = {ax1: v1}
            if ax2:
                ov[ax2] = v2
                meta[ax2] = v2
            p = _build_params(args, overrides=ov)
            tasks.append((_params_dict(p), qkw, meta))
    rows = _run_rows(tasks)
    _write_table(rows, columns, args)
    if args.plot:
        from .plotting import render_sweep
        render_sweep(rows, ax1, ax2, args.plot)
    return 0


def _params_dict(p: PhysParams) -> dict:
    return {"delta": p.delta, "omega_ho": p.omega_ho, "omega_R": p.omega_R,
            "mu": p.mu, "nbar": p.nbar}


def cmd_fig2b(args) -> int:
    if args.schema:
        _print_schema("fig2b", FIG2B_COLUMNS)
        return 0
    xi2s = _axis_values(args.xi2_min, args.xi2_max, args.count, log=True)
    explicit_quad = args.quad_method is not None
    args_delta = 0.0
    tasks = []
    for xi2 in xi2s:
        # keep the free-recoil contribution negligible: chi/xi_cl^2 <= 0.01,
        # enforced at half the flag threshold to stay clear of the edge
        gamma_abs = math.hypot(args_delta, 0.5)
        omega_R = min(args.omega_r,
                      0.5 * RECOIL_CONTAMINATION * xi2 * gamma_abs)
        omega_ho = args.omega_ho
        zeta_sq = 4.0 * omega_R * omega_ho / gamma_abs**2
        theta = solve_theta_for_xi_sq(xi2, zeta_sq)
        p = PhysParams(delta=args_delta, omega_ho=omega_ho, omega_R=omega_R,
                       mu=args.mu, theta=theta)
        if explicit_quad:
            qkw = dataclasses.asdict(_build_quadspec(args))
        elif xi2 <= 2.0:
            qkw = dataclasses.asdict(QuadratureSpec(order=args.quad_order))
        else:
            # thermal Gaussian damping makes the integrand a narrow ridge;
            # the adaptive rule resolves it, the global tensor rule does not
            qkw = dataclasses.asdict(QuadratureSpec(
                method="adaptive", target_rel_error=3e-4, max_refine=3000))
        tasks.append((_params_dict(p), qkw, {"xi_cl_sq": xi2}))
    rows = _run_rows(tasks)
    _write_table(rows, FIG2B_COLUMNS, args)
    if args.plot:
        from .plotting import render_fig2b
        render_fig2b(rows, args.plot)
    return 0


def cmd_validate(args) -> int:
    if args.schema:
        _print_schema("validate", ["name", "passed", "measured", "threshold"])
        return 0
    results = validation.run_all(cases=args.cases, seed=args.seed,
                                 fock_dim=args.fock_dim, quick=args.quick)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 3 if failed else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_config(args)
        if args.command == "point":
            return cmd_point(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "fig2b":
            return cmd_fig2b(args)
        return cmd_validate(args)
    except (ParameterError, ValueError, OSError) as exc:
        print(f"cbsduality: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
