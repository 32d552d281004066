"""Command-line interface.

Every subcommand runs one experiment and writes a single report (JSON
object or CSV) containing the resolved configuration, the results, and a
``checks`` map of internal cross-checks. The exit status is 0 when every
check passes, 1 on a numerical failure or a failed check, and 2 for an
invalid configuration.

Symbols map to flags as follows: ``--beta-tilde`` (the inverse
temperature multiplying the path length), ``--alpha`` (frequency ratio of
the quasiperiodic signal), ``--n-max`` (truncation of the chain sums),
``--r-plus``/``--l-ads``/``--g`` (BTZ horizon radius, AdS radius, Newton
constant), ``--diffusion`` (D) and ``--tau``.

The default seed is 0, overridable through the ``QUASIWALK_SEED``
environment variable; ``--seed`` wins over both.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import btz, heat, quasiperiodic as qp, thermo, walk
from .numerics import QuadratureSpec, make_stream

SEED_ENV = "QUASIWALK_SEED"
COMMANDS = ("fib", "word", "walk", "walk2d", "kernel", "pathint", "qp-brownian",
            "thermo", "chain-thermo", "btz", "check")
_COMMON = {"seed", "format", "output", "timestamps", "command", "handler"}


class CheckFailed(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    output_format: str = "json"
    output_path: str = "-"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        schema = _schemas()[self.command]
        unknown = sorted(set(self.parameters) - set(schema))
        if unknown:
            raise ValueError(f"unknown parameters for {self.command}: {', '.join(unknown)}")
        params = dict(self.parameters)
        for key, (required, default) in schema.items():
            if key not in params:
                if required:
                    raise ValueError(f"{self.command} needs parameter {key!r}")
                params[key] = default
        self.parameters = params

    def as_dict(self):
        return {"command": self.command, "parameters": self.parameters, "seed": self.seed,
                "output_format": self.output_format, "output_path": self.output_path}


def _u64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text}")
    return v


def _prob(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {text}")
    return v


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _pos_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _floats(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _plain(obj):
    """Convert numpy scalars/arrays and tuples to JSON-safe Python values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _pmf_rows(pmf):
    rows = []
    for site, p in pmf.items():
        site = list(site) if isinstance(site, tuple) else [site]
        rows.append([*site, float(p)])
    return rows


# -- subcommand handlers: each takes the parameter dict and seed, returns (results, checks)

def _run_fib(a, seed):
    vals = qp.fibonacci_lengths(a["n_max"]).values
    ok = all(vals[i + 1] == vals[i] + vals[i - 1] for i in range(1, len(vals) - 1))
    return {"lengths": list(vals)}, {"recurrence": ok}


def _run_word(a, seed):
    w = qp.fibonacci_word(a["generation"])
    nA, nB = w.count("A"), w.count("B")
    lengths = qp.fibonacci_lengths(a["generation"] + 1)
    return ({"word": w.symbols if len(w) <= 10_000 else None, "length": len(w), "count_A": nA,
             "count_B": nB, "ratio_A_B": nA / nB if nB else None},
            {"length_is_fibonacci": len(w) == lengths[a["generation"] + 1]})


def _run_walk(a, seed):
    n, p = a["n"], a["p"]
    methods = ("binomial", "charfn", "dp", "mc") if a["method"] == "all" else (a["method"],)
    if a["schedule"] == "fibonacci":
        spec = walk.StepDistribution(p, qp.fibonacci_lengths(n))
    else:
        spec = walk.StepDistribution(p, a["length"])
    unit = a["length"] if a["schedule"] == "constant" else None
    pmfs, notes = {}, {}
    if "binomial" in methods:
        if unit is None:
            notes["binomial"] = "closed form needs a constant step length"
        else:
            b = walk.binomial_pmf(n, p)
            pmfs["binomial"] = walk.LatticePMF(n, {m * unit: v for m, v in b.items()})
    if "charfn" in methods:
        if unit is None or p != 0.5:
            notes["charfn"] = "inversion integral assumes a symmetric walk with constant step length"
        else:
            pmfs["charfn"] = walk.LatticePMF(n, {m * unit: walk.char_fn_prob(n, m)
                                                 for m in range(-n, n + 1, 2)})
    dp = walk.dp_pmf(spec, n)
    if "dp" in methods:
        pmfs["dp"] = dp
    mc_info, checks = None, {}
    if "mc" in methods:
        mc = walk.monte_carlo_pmf(spec, n, a["samples"], make_stream(seed))
        pmfs["mc"] = mc
        z = [abs(mc[s] - dp[s]) / math.sqrt(dp[s] * (1 - dp[s]) / mc.samples)
             for s in dp.sites() if dp[s] * mc.samples >= 10 and dp[s] < 1]
        stray = [s for s in mc.sites() if s not in dp]
        mc_info = {"samples": mc.samples, "seed": seed, "max_z": max(z, default=0.0),
                   "max_stderr": max((mc.stderr(s) for s in mc.sites()), default=0.0)}
        checks["mc_within_5_sigma"] = mc_info["max_z"] <= 5.0 and not stray
    names = list(pmfs)
    deviations = {f"{x}_vs_{y}": pmfs[x].max_abs_diff(pmfs[y])
                  for i, x in enumerate(names) for y in names[i + 1:]}
    checks["dp_normalized"] = abs(dp.total() - 1.0) <= 1e-12
    for key, dev in deviations.items():
        if "mc" not in key:
            checks[key] = dev <= 1e-10
    results = {"pmfs": {k: _pmf_rows(v) for k, v in pmfs.items()}, "max_deviation": deviations}
    if mc_info:
        results["monte_carlo"] = mc_info
    if notes:
        results["skipped"] = notes
    return results, checks


def _lengths_for(schedule, n):
    return qp.fibonacci_lengths(n) if schedule == "fibonacci" else 1


def _run_walk2d(a, seed):
    n = a["n"]
    lx = _lengths_for(a["schedule"], n)
    pmf = walk.two_d_dp_pmf(n, lx, lx)
    audit = walk.two_d_audit(n, lx, lx)
    results = {"pmfs": {"dp": _pmf_rows(pmf)}, "audit": audit,
               "closed_formula": {"l": a["l"], "m": a["m"], "value": walk.two_d_paper_pmf(n, a["l"], a["m"])}}
    return results, {"dp_normalized": abs(pmf.total() - 1.0) <= 1e-12}


def _partition(kind, t, segments):
    if kind == "fibonacci":
        gen = 1
        while len(qp.fibonacci_word(gen)) < segments:
            gen += 1
        return qp.quasiperiodic_partition(t, segments, qp.fibonacci_word(gen))
    return qp.uniform_partition(t, segments)


def _run_kernel(a, seed):
    part = _partition(a["partition"], a["t"], a["segments"])
    closed = heat.heat_kernel(heat.HeatKernelParams(1, a["t"]), a["x"], a["y"])
    composed = heat.compose_kernels(part, a["x"], a["y"], 1, QuadratureSpec("gauss_legendre", a["nodes"]))
    return ({"partition": part.times.tolist(), "closed_form": closed, "composed": composed,
             "abs_difference": abs(composed - closed)},
            {"semigroup": abs(composed - closed) <= 1e-6})


def _action(a):
    if a["action"] == "length":
        return heat.ActionFunctional.length(a["beta_tilde"])
    return heat.ActionFunctional.kinetic()


def _run_pathint(a, seed):
    part = _partition(a["partition"], a["t"], a["segments"])
    est = heat.rw_representation_mc(a["x"], a["y"], part, 1, a["samples"], make_stream(seed),
                                    _action(a), a["proposal"])
    results = {"partition": part.times.tolist(), "mean": est.mean, "stderr": est.stderr,
               "samples": est.samples, "seed": est.seed, "proposal": est.proposal,
               "effective_sample_size": est.ess}
    checks = {}
    if a["action"] == "kinetic":
        closed = heat.heat_kernel(heat.HeatKernelParams(1, a["t"]), a["x"], a["y"])
        results["closed_form"] = closed
        # the bridge proposal has zero variance, so allow for summation rounding
        checks["within_4_stderr"] = abs(est.mean - closed) <= 4.0 * est.stderr + 1e-12 * closed
    return results, checks


def _run_qp_brownian(a, seed):
    sig = qp.QuasiperiodicSignal(a["alpha"])
    diff = heat.DiffusionParams(a["diffusion"])
    w = heat.qp_brownian_density(sig, diff, a["tau"])
    bound = 1.0 / math.sqrt(4.0 * math.pi * a["diffusion"] * a["tau"])
    return ({"x": qp.signal_eval(sig, a["tau"]), "W": w, "upper_bound": bound},
            {"positive_and_bounded": 0.0 < w <= bound})


def _run_thermo(a, seed):
    nodes = a["nodes"]
    part = qp.uniform_partition(a["t"], len(nodes) - 1)
    path = heat.PiecewisePath(part, nodes)
    cf = thermo.path_thermo(path, a["beta_tilde"], standard_entropy=a["standard_entropy"])
    fd = thermo.path_thermo(path, a["beta_tilde"], "finite_difference", a["standard_entropy"])
    expected_s = (a["beta_tilde"] * cf.E if a["standard_entropy"] else cf.E) + cf.log_Z
    return ({"closed_form": cf.as_dict(), "finite_difference": fd.as_dict(),
             "length_action": heat.length_action(path, a["beta_tilde"])},
            {"entropy_identity": math.isclose(cf.S, expected_s, rel_tol=1e-15, abs_tol=1e-15),
             "energy_finite_difference": math.isclose(fd.E, cf.E, rel_tol=1e-6, abs_tol=1e-12)})


def _run_chain_thermo(a, seed):
    spec = thermo.ChainThermoSpec(a["l"], a["n_max"], m=a["m"], expectation=a["expectation"])
    lengths = qp.fibonacci_lengths(a["n_max"])
    terms = thermo.chain_terms(a["l"], a["n_max"])
    Z = thermo.chain_partition_function(spec)
    results = {"terms": terms, "Z": Z}
    try:
        results["S"] = thermo.chain_entropy(spec, lengths)
    except ValueError as exc:
        results["S"] = None
        results["S_undefined"] = str(exc)
    try:
        results["S_2d"] = thermo.chain_entropy_2d(spec, lengths, lengths)
    except ValueError as exc:
        results["S_2d"] = None
        results["S_2d_undefined"] = str(exc)
    return results, {"Z_is_sum_of_terms": Z == math.fsum(terms)}


def _run_btz(a, seed):
    rep = btz.entropy_report(btz.BTZParams(a["r_plus"], a["l_ads"], a["g"]))
    checks = rep.pop("checks")
    return rep, checks


def _run_check(a, seed):
    if a.get("report"):
        return _revalidate(a["report"])
    from .checks import run_all
    results = run_all(seed)
    return {"cross_checks": results}, dict(results)


def _revalidate(path):
    with open(path) as fh:
        try:
            report = json.load(fh)
        except json.JSONDecodeError as exc:
            return {"report": path, "parse_error": str(exc)}, {"schema": False}
    if not isinstance(report, dict):
        return {"report": path}, {"schema": False}
    missing = [k for k in ("config", "results", "checks", "ok") if k not in report]
    if missing:
        return {"report": path, "missing_fields": missing}, {"schema": False}
    cfg = report["config"]
    if cfg.get("command") not in COMMANDS or cfg["command"] == "check":
        return {"report": path, "command": cfg.get("command")}, {"schema": False}
    try:
        recorded = RunConfig(cfg["command"], cfg.get("parameters", {}), cfg.get("seed"),
                             cfg.get("output_format", "json"), cfg.get("output_path", "-"))
    except ValueError as exc:
        return {"report": path, "command": cfg["command"], "invalid_config": str(exc)}, {"schema": False}
    fresh = execute(recorded)
    same = fresh["results"] == report["results"] and fresh["checks"] == report["checks"]
    return ({"report": path, "command": cfg["command"]},
            {"schema": True, "reproduced": same, "recorded_checks_pass": bool(report["ok"])})


HANDLERS = {
    "fib": _run_fib, "word": _run_word, "walk": _run_walk, "walk2d": _run_walk2d,
    "kernel": _run_kernel, "pathint": _run_pathint, "qp-brownian": _run_qp_brownian,
    "thermo": _run_thermo, "chain-thermo": _run_chain_thermo, "btz": _run_btz,
    "check": _run_check,
}


def execute(config: RunConfig, timestamps: bool = False) -> dict:
    """Run one configured command and return its report as plain data."""
    t0 = time.perf_counter()
    params = dict(config.parameters)
    if config.command == "thermo":
        params["nodes"] = list(params["nodes"])
    results, checks = HANDLERS[config.command](params, config.seed)
    report = {"config": config.as_dict(), "results": results, "checks": checks,
              "ok": all(checks.values())}
    if timestamps:
        report["elapsed_seconds"] = time.perf_counter() - t0
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    return _plain(report)


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(obj, list):
        out.append((prefix, json.dumps(obj)))
    else:
        out.append((prefix, obj))


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def to_csv(report: dict) -> str:
    """CSV rendering: pmfs become ``site..., probability`` rows sorted by site,
    anything else becomes ``key,value`` rows."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    pmfs = report.get("results", {}).get("pmfs")
    if pmfs is not None:
        names = list(pmfs)
        two_d = any(rows and len(rows[0]) == 3 for rows in pmfs.values())
        head = ["x", "y"] if two_d else ["site"]
        k = len(head)
        table = {}
        for name in names:
            for row in pmfs[name]:
                table.setdefault(tuple(row[:k]), {})[name] = row[k]
        w.writerow(head + (["probability"] if len(names) == 1 else names))
        for site in sorted(table):
            w.writerow([*site, *(_fmt(table[site].get(name)) for name in names)])
        return buf.getvalue()
    rows = []
    _flatten("", {k: v for k, v in report.items() if k != "config"}, rows)
    _flatten("config", report.get("config", {}), rows)
    w.writerow(["key", "value"])
    for key, value in rows:
        w.writerow([key, _fmt(value)])
    return buf.getvalue()


def emit(report: dict, fmt: str = "json", path: str = "-") -> None:
    """Serialise ``report`` as JSON (one object, sorted keys) or CSV to ``path`` ("-" is stdout)."""
    if fmt == "json":
        text = json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
    elif fmt == "csv":
        text = to_csv(report)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=None,
                        help=f"master seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", default="-", help="output file, '-' for stdout")
    common.add_argument("--timestamps", action="store_true",
                        help="add wall-clock time and a timestamp (breaks byte reproducibility)")

    parser = argparse.ArgumentParser(prog="quasiwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fib", parents=[common], help="Fibonacci step lengths l_0..l_nmax")
    p.add_argument("--n-max", type=int, required=True)

    p = sub.add_parser("word", parents=[common], help="Fibonacci substitution word")
    p.add_argument("--generation", type=_pos_int, required=True)

    p = sub.add_parser("walk", parents=[common], help="1D walk law by every available route")
    p.add_argument("--n", type=int, required=True, help="number of steps")
    p.add_argument("--p", type=_prob, default=0.5, help="probability of a right step")
    p.add_argument("--method", choices=("binomial", "charfn", "dp", "mc", "all"), default="all")
    p.add_argument("--samples", type=_pos_int, default=100_000)
    p.add_argument("--schedule", choices=("constant", "fibonacci"), default="constant")
    p.add_argument("--length", type=_pos_int, default=1, help="constant step length")

    p = sub.add_parser("walk2d", parents=[common], help="2D four-point walk and the literal 2D formula")
    p.add_argument("--n", type=_pos_int, required=True)
    p.add_argument("--schedule", choices=("constant", "fibonacci"), default="fibonacci")
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--m", type=int, default=0)

    for name, helptext in (("kernel", "heat kernel vs nested-quadrature composition"),
                           ("pathint", "Monte Carlo random-walk representation of the kernel")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--t", type=_positive, default=1.0)
        p.add_argument("--x", type=float, default=0.0)
        p.add_argument("--y", type=float, default=1.0)
        p.add_argument("--segments", type=_pos_int, default=2 if name == "kernel" else 4)
        p.add_argument("--partition", choices=("uniform", "fibonacci"), default="uniform")
        if name == "kernel":
            p.add_argument("--nodes", type=_pos_int, default=64, help="quadrature nodes per axis")
        else:
            p.add_argument("--samples", type=_pos_int, default=100_000)
            p.add_argument("--action", choices=("kinetic", "length"), default="kinetic")
            p.add_argument("--beta-tilde", type=float, default=1.0)
            p.add_argument("--proposal", choices=("bridge", "free"), default="bridge")

    p = sub.add_parser("qp-brownian", parents=[common], help="diffusion density at the quasiperiodic displacement")
    p.add_argument("--alpha", type=float, default=qp.GOLDEN_RATIO)
    p.add_argument("--diffusion", type=_positive, default=0.5, help="diffusion constant D")
    p.add_argument("--tau", type=_positive, required=True)

    p = sub.add_parser("thermo", parents=[common], help="Z, E, S of the length action on a path")
    p.add_argument("--nodes", type=_floats, required=True, help="comma-separated node positions")
    p.add_argument("--t", type=_positive, default=1.0)
    p.add_argument("--beta-tilde", type=float, required=True)
    p.add_argument("--standard-entropy", action="store_true", help="use S = beta E + ln Z")

    p = sub.add_parser("chain-thermo", parents=[common], help="Fibonacci-chain partition function and entropy")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--n-max", type=_pos_int, required=True)
    p.add_argument("--expectation", choices=("final", "per_term"), default="final")

    p = sub.add_parser("btz", parents=[common], help="BTZ black-hole thermodynamics and identities")
    p.add_argument("--r-plus", type=_positive, required=True)
    p.add_argument("--l-ads", type=_positive, default=1.0)
    p.add_argument("--g", type=_positive, default=0.125)

    p = sub.add_parser("check", parents=[common], help="run the oracle cross-checks, or re-validate a JSON report")
    p.add_argument("--report", default=None, help="JSON report to re-parse and reproduce")
    return parser


@lru_cache(maxsize=None)
def _schemas():
    # per-command {dest: (required, default)} read off the argument parser
    parser = build_parser()
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    return {name: {a.dest: (a.required, a.default) for a in p._actions
                   if a.dest not in _COMMON and a.dest != "help"}
            for name, p in sub.choices.items()}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    seed = args.seed
    if seed is None:
        seed = _u64(os.environ.get(SEED_ENV, "0"))
    params = {k: v for k, v in vars(args).items() if k not in _COMMON}
    return RunConfig(args.command, params, seed, args.format, args.output)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        parser.error(str(exc))
    try:
        report = execute(config, args.timestamps)
    except OverflowError as exc:
        print(f"quasiwalk {config.command}: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"quasiwalk {config.command}: numerical failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, IndexError) as exc:
        print(f"quasiwalk {config.command}: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"quasiwalk {config.command}: {exc}", file=sys.stderr)
        return 1
    try:
        emit(report, config.output_format, config.output_path)
    except OSError as exc:
        print(f"quasiwalk: cannot write report: {exc}", file=sys.stderr)
        return 1
    if not report["ok"]:
        failed = ", ".join(k for k, v in report["checks"].items() if not v)
        print(f"quasiwalk {config.command}: cross-check failed: {failed}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
