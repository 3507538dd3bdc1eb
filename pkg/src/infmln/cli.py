"""Command-line interface.

Every command writes one JSON report: tool name and version, the command,
the full configuration (including an ``argv`` that reproduces the run) and
the result payload. Exit codes: 0 success, 1 analysis rejection, 2 usage or
input errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .cnf import compile_program
from .errors import AnalysisError, MLNError, ParseError
from .gibbs import conditional
from .herbrand import check_sigma_determinate, parse_ground_atom, sorted_atoms
from .parser import format_weight, parse_program
from .sampler import (DEFAULT_BURNIN, DEFAULT_SWEEPS, TruncationSpec, boundary_sensitivity,
                      estimate_marginals, truncate)
from .satisfiability import check_entailment, check_satisfiable
from .uniqueness import check_uniqueness

COMMANDS = ("analyze", "uniqueness", "query", "sample", "sensitivity", "sat", "entail")


class UsageError(MLNError):
    pass


def load_mln_file(path: str):
    """Parse and compile a .mln file. Diagnostics carry the path."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror or e}") from e
    p = parse_program(text, source=path)
    try:
        return compile_program(p)
    except AnalysisError as e:
        raise type(e)(f"{path}: {e}") from e


def _num(x):
    if isinstance(x, float) and math.isinf(x):
        return format_weight(x) if x > 0 else "-inf"
    return x


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="infmln", description="Markov logic over infinite Herbrand domains")
    ap.add_argument("--version", action="version", version=f"infmln {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("input", help=".mln file")
        sp.add_argument("-o", "--output", help="write the report here instead of stdout")
        return sp

    cmd("analyze", "sigma-determinacy and local finiteness")
    sp = cmd("uniqueness", "interaction-sum bound for a unique Gibbs measure")
    sp.add_argument("--depth", type=int, default=8)
    sp.add_argument("--window", type=int, default=3)

    def volume_args(sp, policy_default):
        sp.add_argument("--atom", action="append", required=True, dest="atoms",
                        help="query ground atom (repeatable)")
        sp.add_argument("--radius", type=int, default=0)
        sp.add_argument("--assign", action="append", default=[],
                        help="explicit boundary value ATOM=0|1 (repeatable)")
        if policy_default is not None:
            sp.add_argument("--policy", default=policy_default,
                            choices=("free", "zero", "one", "explicit", "all-zero", "all-one"))

    sp = cmd("query", "exact conditional distribution of a volume")
    volume_args(sp, "free")
    sp.add_argument("--cap", type=int, default=20)

    sp = cmd("sample", "Gibbs-sampled marginals on a truncated volume")
    volume_args(sp, "free")
    sp.add_argument("--sweeps", type=int, default=DEFAULT_SWEEPS)
    sp.add_argument("--burnin", type=int, default=DEFAULT_BURNIN)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--trace", help="write per-sweep states (one line per sweep)")

    sp = cmd("sensitivity", "spread of marginals across boundary policies")
    volume_args(sp, None)
    sp.add_argument("--policies", default="one,zero")
    sp.add_argument("--sweeps", type=int, default=DEFAULT_SWEEPS)
    sp.add_argument("--burnin", type=int, default=DEFAULT_BURNIN)
    sp.add_argument("--seed", type=int, required=True)

    sp = cmd("sat", "unsatisfiability by Herbrand truncation (all weights inf)")
    sp.add_argument("--max-depth", type=int, default=6)
    sp = cmd("entail", "entailment of a formula by a hard knowledge base")
    sp.add_argument("--alpha", required=True, help="formula to test")
    sp.add_argument("--max-depth", type=int, default=6)
    return ap


def _canonical_argv(args) -> list[str]:
    out = [args.command, args.input]
    for key, val in _config(args).items():
        if key in ("input",) or val is None:
            continue
        flag = "--" + key.replace("_", "-")
        if key == "atoms":
            for a in val:
                out += ["--atom", a]
        elif key == "assign":
            for a in val:
                out += ["--assign", a]
        else:
            out += [flag, str(val)]
    return out


def _config(args) -> dict:
    cfg = {"input": args.input}
    for key in ("depth", "window", "atoms", "radius", "policy", "policies", "assign", "cap",
                "sweeps", "burnin", "seed", "trace", "max_depth", "alpha"):
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    return cfg


def _atoms(texts, p):
    return [parse_ground_atom(t, p.signature) for t in texts]


def _assignment(items, p):
    out = {}
    for item in items:
        text, sep, val = item.rpartition("=")
        if not sep or val.strip() not in ("0", "1"):
            raise UsageError(f"--assign expects ATOM=0 or ATOM=1, got {item!r}")
        out[parse_ground_atom(text, p.signature)] = int(val)
    return out


def _bits(cfg):
    return "".join(str(b) for b in cfg)


def _boundary_payload(y):
    return {str(a): y[a] for a in sorted_atoms(y)}


def cmd_analyze(args, p):
    rep = check_sigma_determinate(p)
    result = {
        "sigma_determinate": rep.determinate,
        "locally_finite": "true" if rep.determinate else "unknown",
        "formulas": len(p.formulas),
        "clauses": [
            {"index": v.index, "clause": v.clause, "weight": _num(p.clauses[v.index].weight),
             "origin": p.clauses[v.index].origin, "sigma_determinate": v.determinate,
             "violating_variables": list(v.violating)}
            for v in rep.clauses
        ],
        "ground_clauses_per_atom_bound": rep.clause_bound,
        "neighbors_per_atom_bound": rep.neighbor_bound,
    }
    return result, 0 if rep.determinate else 1


def cmd_uniqueness(args, p):
    rep = check_uniqueness(p, args.depth, args.window)
    return {
        "verdict": rep.verdict,
        "supremum": rep.supremum,
        "stabilized": rep.stabilized,
        "per_depth_max": list(rep.per_depth_max),
        "argmax_atoms": list(rep.argmax_atoms),
        "atoms_checked": rep.atoms_checked,
        "threshold": 2.0,
        "note": rep.note,
    }, 0


def _spec(args, p, policy):
    return TruncationSpec(tuple(_atoms(args.atoms, p)), args.radius, policy,
                          _assignment(args.assign, p))


def cmd_query(args, p):
    v, y = truncate(_spec(args, p, args.policy), p)
    cd = conditional(v, y, cap=args.cap)
    return {
        "atoms": [str(a) for a in v.atoms],
        "boundary": _boundary_payload(y),
        "relevant_clauses": len(v.relevant_clauses),
        "log_partition": cd.log_partition,
        "table": [{"x": _bits(c), "p": float(pr)} for c, pr in zip(cd.configurations(), cd.table)],
        "marginals": {str(a): m for a, m in cd.marginals().items()},
    }, 0


def cmd_sample(args, p):
    spec = _spec(args, p, args.policy)
    m = estimate_marginals(spec, args.sweeps, args.burnin, args.seed, p, trace=args.trace)
    return {
        "volume_atoms": len(m.atoms),
        "boundary_atoms": len(m.volume.boundary_atoms),
        "policy": spec.policy,
        "marginals": {
            str(a): {"estimate": m.estimates[a], "std_error": m.std_errors[a],
                     "effective_samples": m.effective_samples[a]}
            for a in spec.query
        },
        "scan_order": [str(a) for a in m.atoms],
    }, 0


def cmd_sensitivity(args, p):
    query = _atoms(args.atoms, p)
    policies = [s.strip() for s in args.policies.split(",") if s.strip()]
    rep = boundary_sensitivity(p, query, args.radius, policies, args.sweeps, args.burnin,
                               args.seed, _assignment(args.assign, p))
    return {
        "policies": list(rep.policies),
        "volume_atoms": rep.volume_size,
        "weights": [_num(w) for w in rep.weights],
        "atoms": {
            str(a): {"spread": rep.spreads[a], "combined_std_error": rep.combined_se[a],
                     "estimates": {pol: rep.estimates[pol][a] for pol in rep.policies}}
            for a in rep.query
        },
        "note": "a large spread is evidence consistent with several Gibbs measures, not a proof",
    }, 0


def _sat_payload(rep):
    return {
        "verdict": rep.verdict,
        "depth": rep.depth,
        "per_depth": [{"depth": d.depth, "result": "SAT" if d.satisfiable else "UNSAT",
                       "ground_clauses": d.clause_count, "atoms": d.atom_count}
                      for d in rep.depths],
        ("unsat_truncation_clauses" if rep.unsatisfiable else "model_true_atoms"): list(rep.certificate),
    }


def cmd_sat(args, p):
    return _sat_payload(check_satisfiable(p, args.max_depth)), 0


def cmd_entail(args, p):
    rep = check_entailment(p, args.alpha, args.max_depth)
    out = {"entailment": "certified" if rep.entailed else "inconclusive"}
    out.update(_sat_payload(rep))
    return out, 0


_HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def _emit(report, output):
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    config = _config(args)
    config["argv"] = _canonical_argv(args)
    report = {"tool": "infmln", "version": __version__, "command": args.command, "config": config}
    try:
        p = load_mln_file(args.input)
        result, code = _HANDLERS[args.command](args, p)
    except AnalysisError as e:
        print(f"infmln: rejected: {e}", file=sys.stderr)
        report["result"] = {"rejected": True, "reason": str(e)}
        _emit(report, args.output)
        return 1
    except (ParseError, MLNError) as e:
        print(f"infmln: error: {e}", file=sys.stderr)
        return 2
    report["result"] = result
    _emit(report, args.output)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
