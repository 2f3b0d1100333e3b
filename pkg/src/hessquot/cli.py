"""Batch front end: ``hessquot <solve|verify|sweep> CONFIG [--out DIR] [--seed N] [--quiet]``.

Config files are line based, one ``section.key = value`` per line, ``#``
starts a comment and expressions are double-quoted::

    problem.n = 3
    problem.p = 2
    problem.k = 2
    problem.l = 0
    problem.domain = box
    problem.lower = 0, 0, 0
    problem.upper = 1, 1, 1
    problem.psi_tilde = "2*sqrt(3)"
    problem.phi = "nu1*x1 + nu2*x2 + nu3*x3 - u + r^2/2"
    solver.dims = 16, 16, 16

Exit status: 0 success, 1 configuration error, 2 solver failure.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import exprlang
from .compound import OperatorSignature
from .errors import ConfigError, ContinuationError, ExprError, InvalidInputError
from .estimates import Sampler, check_growth, check_structural, refinement_study, verify_solution
from .pde import Ball, Box, ProblemSpec, SolverOptions, StructuralConstants, continuation_solve
from .pde.grid import write_field_csv

SCHEMA = 1

_KEYS = {
    "problem": {"n": int, "p": int, "k": int, "l": int, "domain": str, "lower": "floats",
                "upper": "floats", "radius": float, "center": "floats", "psi_tilde": "expr",
                "psi": "expr", "phi": "expr", "exact": "expr", "u_bound": float,
                "p_bound": float},
    "structural": {"c0": float, "alpha0": float, "gamma": float, "C1": float, "M1": float},
    "solver": {"dims": "ints", "radial_nodes": int, "tol_r": float, "tol_b": float,
               "margin": float, "A0": float, "t_step": float, "t_step_min": float,
               "max_iter": int},
    "sweep": {"levels": "ints"},
    "sampling": {"n_samples": int, "p_max": float, "per_decade": int},
    "output": {"dir": str, "emit_field": bool, "emit_report": bool},
}


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)
    source: str = ""

    def get(self, section, key, default=None):
        return self.values.get(section, {}).get(key, default)

    def require(self, section, key):
        val = self.get(section, key)
        if val is None:
            raise ConfigError(f"{self.source}: missing required key {section}.{key}")
        return val

    def problem(self):
        n = self.require("problem", "n")
        try:
            sig = OperatorSignature(n, self.require("problem", "p"), self.require("problem", "k"),
                                    self.require("problem", "l"))
        except InvalidInputError as exc:
            raise ConfigError(f"{self.source}: invalid operator signature: {exc}") from exc
        kind = self.get("problem", "domain", "box")
        if kind == "box":
            domain = Box(self.get("problem", "lower", (0.0,) * n),
                         self.get("problem", "upper", (1.0,) * n))
        elif kind == "ball":
            domain = Ball(self.get("problem", "radius", 1.0),
                          self.get("problem", "center", (0.0,) * n))
        else:
            raise ConfigError(f"{self.source}: problem.domain must be 'box' or 'ball', got {kind!r}")
        structural = StructuralConstants(**self.values.get("structural", {}))
        extra = {k: self.get("problem", k) for k in ("u_bound", "p_bound")
                 if self.get("problem", k) is not None}
        try:
            return ProblemSpec.from_strings(
                sig, domain, self.require("problem", "phi"),
                psi_tilde=self.get("problem", "psi_tilde"), psi=self.get("problem", "psi"),
                structural=structural, **extra)
        except (InvalidInputError, ExprError) as exc:
            raise ConfigError(f"{self.source}: {exc}") from exc

    def solver_options(self, dims=None):
        kw = dict(self.values.get("solver", {}))
        if "dims" in kw:
            kw["dims"] = tuple(kw["dims"])
        if dims is not None:
            kw["dims"] = tuple(dims)
        return SolverOptions(**kw)

    def sampler(self, seed):
        return Sampler(seed=seed, **self.values.get("sampling", {}))


def _convert(kind, raw, where):
    try:
        if kind == "expr" or kind is str:
            if len(raw) >= 2 and raw[0] == raw[-1] == '"':
                return raw[1:-1]
            if kind == "expr":
                raise ConfigError(f"{where}: expressions must be double-quoted")
            return raw
        if kind is bool:
            if raw.lower() in ("true", "yes", "1"):
                return True
            if raw.lower() in ("false", "no", "0"):
                return False
            raise ValueError(raw)
        if kind == "floats":
            return tuple(float(v) for v in raw.split(","))
        if kind == "ints":
            return tuple(int(v) for v in raw.split(","))
        if kind is int:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse value {raw!r}") from exc


def _strip_comment(line):
    quoted = False
    for i, ch in enumerate(line):
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            return line[:i]
    return line


def parse_config(text, source="<config>"):
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        where = f"{source}:{lineno}"
        stripped = _strip_comment(line).strip()
        if not stripped:
            continue
        key, sep, raw = stripped.partition("=")
        if not sep:
            raise ConfigError(f"{where}: expected 'section.key = value'")
        section, dot, name = key.strip().partition(".")
        if not dot or section not in _KEYS or name not in _KEYS[section]:
            raise ConfigError(f"{where}: unknown key {key.strip()!r}")
        if name in values.get(section, {}):
            raise ConfigError(f"{where}: duplicate key {key.strip()!r}")
        values.setdefault(section, {})[name] = _convert(_KEYS[section][name], raw.strip(), where)
    return RunConfig(values, source)


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def dump_report(report, path):
    with open(path, "w") as fh:
        json.dump(_clean(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _problem_summary(prob):
    sig = prob.sig
    dom = prob.domain
    out = {"n": sig.n, "p": sig.p, "k": sig.k, "l": sig.l, "N": sig.N,
           "theorem_regime": sig.theorem_regime,
           "psi_tilde": exprlang.to_text(prob.psi_tilde), "phi": exprlang.to_text(prob.phi)}
    if isinstance(dom, Box):
        out["domain"] = {"kind": "box", "lower": list(dom.lower), "upper": list(dom.upper)}
    else:
        out["domain"] = {"kind": "ball", "radius": dom.radius, "center": list(dom.center)}
    return out


def _exact_error(cfg, prob, fld):
    text = cfg.get("problem", "exact")
    if text is None:
        return None
    ex = exprlang.parse(text, prob.sig.n)
    x = fld.grid.coords
    ref = exprlang.evaluate_batch(ex, x, np.zeros(len(x)), np.zeros_like(x))
    return float(np.abs(fld.values - ref).max())


def _solve_once(cfg, prob, opts, log):
    fld, rep = continuation_solve(prob, opts)
    bounds = verify_solution(prob, fld, rep)
    log(f"converged in {rep.iterations} Newton iterations over "
        f"{len(rep.continuation)} continuation steps; residuals "
        f"{rep.residual_interior:.2e} / {rep.residual_boundary:.2e}")
    return fld, rep, bounds


def _run(args, log):
    cfg = load_config(args.config)
    prob = cfg.problem()
    opts = cfg.solver_options()
    out_dir = args.out or cfg.get("output", "dir", "out")
    emit_field = cfg.get("output", "emit_field", True)
    emit_report = cfg.get("output", "emit_report", True)
    os.makedirs(out_dir, exist_ok=True)
    report = {"schema": SCHEMA, "command": args.command, "seed": args.seed,
              "problem": _problem_summary(prob)}
    status = 0
    if args.command == "verify":
        sampler = cfg.sampler(args.seed)
        report["structural"] = check_structural(prob, sampler).to_dict()
        report["growth"] = check_growth(prob, sampler).to_dict()
        log(f"structural: c0_ok={report['structural']['c0_ok']} "
            f"alpha0_ok={report['structural']['alpha0_ok']}; growth ok={report['growth']['ok']}")
    elif args.command == "solve":
        try:
            fld, rep, bounds = _solve_once(cfg, prob, opts, log)
            report["solve"] = rep.to_dict()
            report["bounds"] = bounds.to_dict()
            err = _exact_error(cfg, prob, fld)
            if err is not None:
                report["solve"]["error_vs_exact"] = err
            if emit_field:
                write_field_csv(fld, os.path.join(out_dir, "field.csv"))
        except ContinuationError as exc:
            print(f"hessquot: solver failure: {exc}", file=sys.stderr)
            report["solve"] = exc.report.to_dict() if exc.report else {"converged": False}
            status = 2
    else:
        levels = cfg.get("sweep", "levels")
        if not levels:
            raise ConfigError(f"{cfg.source}: sweep needs sweep.levels")
        runs, bound_list, hs, errors = [], [], [], []
        for m in levels:
            if isinstance(prob.domain, Box):
                lopts = cfg.solver_options(dims=(m,) * prob.sig.n)
            else:
                lopts = cfg.solver_options()
                lopts.radial_nodes = m
            try:
                fld, rep, bounds = _solve_once(cfg, prob, lopts, log)
            except ContinuationError as exc:
                print(f"hessquot: solver failure at level {m}: {exc}", file=sys.stderr)
                runs.append({"level": m, "solve": exc.report.to_dict() if exc.report else {}})
                status = 2
                break
            entry = {"level": m, "solve": rep.to_dict(), "bounds": bounds.to_dict()}
            err = _exact_error(cfg, prob, fld)
            if err is not None:
                entry["error_vs_exact"] = err
                errors.append(err)
            runs.append(entry)
            bound_list.append(bounds)
            hs.append(fld.grid.h)
        study = refinement_study(bound_list, hs)
        if len(errors) == len(hs) and len(errors) > 1:
            study["errors"] = errors
            study["observed_order"] = [math.log(e1 / e2) / math.log(h1 / h2)
                                       for e1, e2, h1, h2 in zip(errors, errors[1:], hs, hs[1:])]
        report["sweep"] = {"runs": runs, "study": study}
        if status == 0 and emit_field:
            write_field_csv(fld, os.path.join(out_dir, "field.csv"))
    if emit_report:
        dump_report(report, os.path.join(out_dir, "report.json"))
    return status


def build_parser():
    ap = argparse.ArgumentParser(prog="hessquot", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=["solve", "verify", "sweep"])
    ap.add_argument("config")
    ap.add_argument("--out", default=None, help="output directory (overrides output.dir)")
    ap.add_argument("--seed", type=int, default=0, help="seed for quasi-random sampling")
    ap.add_argument("--quiet", action="store_true", help="suppress progress messages")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)

    def log(msg):
        if not args.quiet:
            print(f"hessquot: {msg}", file=sys.stderr)

    try:
        return _run(args, log)
    except (ConfigError, InvalidInputError) as exc:
        print(f"hessquot: config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
