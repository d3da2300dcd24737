"""Command-line interface.

Verbs: generate, reformulate, solve, export-cbf, bench, profile.
Exit codes: 0 solved/completed, 2 limit reached, 3 infeasible/unbounded,
4 input error.
"""

from __future__ import annotations

import argparse
import sys

from . import bench as bn
from . import cbf as cbfio
from . import instances as ins
from . import reformulate as rf
from . import solver as sv
from . import textio
from .model import validate_gdp

EXIT_OK = 0
EXIT_LIMIT = 2
EXIT_INFEASIBLE = 3
EXIT_INPUT = 4


class CliError(Exception):
    pass


def _load_model(path: str):
    try:
        with open(path) as fh:
            return textio.parse_model(fh.read())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    except textio.ParseError as exc:
        raise CliError(f"{path}: {exc}") from None


def _write(text: str, out: str | None):
    if out and out != "-":
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _gen(args) -> int:
    params = [int(p) for p in args.params.split(",") if p.strip() and p.strip().lstrip("-").isdigit()]
    fam = args.family.lower()
    try:
        if fam in ("kclus", "kmeans"):
            model = ins.gen_kclus(*params[:3], seed=args.seed)
        elif fam == "socp_random":
            model = ins.gen_socp_random(*params[:3], seed=args.seed)
        elif fam == "exp_random":
            model = ins.gen_exp_random(*params[:3], seed=args.seed)
        elif fam == "logreg":
            model = ins.gen_logreg(*params[:3], seed=args.seed)
        elif fam == "process":
            variant = "Boolean" if args.variant.lower().startswith("b") else "Multi"
            model = ins.gen_process(params[0], variant, seed=args.seed)
        elif fam == "clay":
            model = ins.gen_clay(*params[:2], seed=args.seed)
        else:
            raise CliError(f"unknown family {args.family!r}")
    except (ins.GeneratorError, TypeError, IndexError) as exc:
        raise CliError(f"bad generator parameters: {exc}") from None
    _write(textio.serialize_model(model), args.output)
    return EXIT_OK


def _micp_for_method(model, method: str, eps: float, variant: str):
    if method == "bigm":
        return rf.minlp_to_micp(rf.bigm_scalar(model))
    if method == "bigm-cone":
        return rf.bigm_cone(model)
    if method == "hull-eps":
        return rf.minlp_to_micp(rf.hull_eps(model, rf.EpsVariant(variant, eps)))
    if method == "hull-cone":
        return rf.hull_cone(model)
    raise CliError(f"unknown method {method!r}")


def _reformulate(args) -> int:
    model = _load_model(args.model)
    rep = validate_gdp(model)
    if not rep.valid:
        raise CliError("invalid model: " + "; ".join(rep.errors))
    try:
        micp = _micp_for_method(model, args.method, args.eps, args.variant)
    except rf.ReformulationError as exc:
        raise CliError(str(exc)) from None
    _write(cbfio.export_cbf(micp), args.output)
    return EXIT_OK


def _solve(args) -> int:
    model = _load_model(args.model)
    settings = bn.BenchSettings(
        rel_gap=args.rel_gap, node_limit=args.node_limit, time_limit_s=args.time_limit
    )
    if args.oracle:
        sol = sv.enumerate_oracle(model)
    else:
        try:
            micp = _micp_for_method(model, args.method, args.eps, args.variant)
        except rf.ReformulationError as exc:
            raise CliError(str(exc)) from None
        sol = sv.branch_and_bound(
            micp,
            sv.BnbSettings(
                rel_gap=args.rel_gap, node_limit=args.node_limit, time_limit_s=args.time_limit
            ),
        )
    print(f"status    {sol.status}")
    print(f"objective {sol.objective:.12g}")
    print(f"bound     {sol.bound:.12g}")
    print(f"nodes     {sol.nodes}")
    print(f"wall_s    {sol.wall_s:.3f}")
    if sol.detail:
        print(f"detail    {sol.detail}")
    if sol.status == "Optimal":
        return EXIT_OK
    if sol.status in ("NodeLimit", "TimeLimit", "GapLimit"):
        return EXIT_LIMIT
    return EXIT_INFEASIBLE


def _export(args) -> int:
    model = _load_model(args.model)
    micp = _micp_for_method(model, args.method, args.eps, args.variant)
    _write(cbfio.export_cbf(micp), args.output)
    return EXIT_OK


def _bench(args) -> int:
    try:
        with open(args.manifest) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise CliError(f"cannot read {args.manifest}: {exc}") from None
    if not lines or lines[0] != "family,params,seed":
        raise CliError("manifest must start with header 'family,params,seed'")
    instances = []
    for ln in lines[1:]:
        try:
            fam, params, seed = ln.split(",", 2)
            ns = argparse.Namespace(
                family=fam, params=params.replace(";", ","), seed=int(seed), variant="Multi",
                output=None,
            )
            pvals = [int(p) for p in ns.params.split(",")]
            gen = {
                "kclus": ins.gen_kclus,
                "socp_random": ins.gen_socp_random,
                "exp_random": ins.gen_exp_random,
                "logreg": ins.gen_logreg,
                "clay": ins.gen_clay,
            }
            if fam == "process":
                model = ins.gen_process(pvals[0], "Multi" if len(pvals) < 2 or pvals[1] == 0 else "Boolean", int(seed))
            else:
                model = gen[fam](*pvals, int(seed))
            instances.append((model.name, model, int(seed)))
        except Exception as exc:
            raise CliError(f"bad manifest row {ln!r}: {exc}") from None
    formulations = args.formulations.split(",") if args.formulations else None
    settings = bn.BenchSettings(
        rel_gap=args.rel_gap, node_limit=args.node_limit, time_limit_s=args.time_limit
    )
    records = bn.run_benchmark(instances, formulations, settings)
    _write(bn.records_to_csv(records), args.output)
    return EXIT_OK


def _profile(args) -> int:
    try:
        with open(args.records) as fh:
            records = bn.records_from_csv(fh.read())
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read records: {exc}") from None
    _write(bn.performance_profile(records, metric=args.metric, gap_threshold=args.gap), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conegdp", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a seeded instance")
    g.add_argument("family", help="kclus | socp_random | exp_random | logreg | process | clay")
    g.add_argument("params", help="comma-separated integer parameters")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--variant", default="Multi", help="process variant: Multi | Boolean")
    g.add_argument("-o", "--output", default=None)
    g.set_defaults(run=_gen)

    def add_method(p):
        p.add_argument("--method", default="hull-cone",
                       choices=["bigm", "bigm-cone", "hull-eps", "hull-cone"])
        p.add_argument("--eps", type=float, default=1e-4)
        p.add_argument("--variant", default="furman", choices=["lee", "furman"])

    r = sub.add_parser("reformulate", help="reformulate a GDP model to a CBF MICP")
    r.add_argument("model")
    add_method(r)
    r.add_argument("-o", "--output", default=None)
    r.set_defaults(run=_reformulate)

    s = sub.add_parser("solve", help="solve a GDP model")
    s.add_argument("model")
    s.add_argument("--oracle", action="store_true", help="disjunct-enumeration oracle")
    add_method(s)
    s.add_argument("--rel-gap", type=float, default=1e-5)
    s.add_argument("--time-limit", type=float, default=None)
    s.add_argument("--node-limit", type=int, default=None)
    s.set_defaults(run=_solve)

    e = sub.add_parser("export-cbf", help="export the reformulated MICP as CBF")
    e.add_argument("model")
    add_method(e)
    e.add_argument("-o", "--output", default=None)
    e.set_defaults(run=_export)

    b = sub.add_parser("bench", help="run a benchmark manifest")
    b.add_argument("manifest")
    b.add_argument("--formulations", default=None, help="comma list; default all")
    b.add_argument("--rel-gap", type=float, default=1e-5)
    b.add_argument("--time-limit", type=float, default=None)
    b.add_argument("--node-limit", type=int, default=None)
    b.add_argument("-o", "--output", default=None)
    b.set_defaults(run=_bench)

    p = sub.add_parser("profile", help="absolute performance profile from records")
    p.add_argument("records")
    p.add_argument("--metric", default="wall_s", choices=["wall_s", "nodes"])
    p.add_argument("--gap", type=float, default=1e-3)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(run=_profile)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.run(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
