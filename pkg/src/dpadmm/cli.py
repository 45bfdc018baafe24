"""Command-line entry point: ``dpadmm {run,final,tradeoff,audit,bounds,lemmacheck}``.

Reports are written as JSON lines to stdout or to ``--output``.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import experiments
from .analysis import audit as audit_mod
from .analysis import bounds, lemmas


def _emit(records, output):
    lines = "".join(json.dumps(r, sort_keys=True, default=float) + "\n" for r in records)
    if output:
        with open(output, "a") as fh:
            fh.write(lines)
    else:
        sys.stdout.write(lines)


def cmd_run(args):
    config = experiments.ExperimentConfig.from_file(args.config)
    result = experiments.run_convergence_suite(config)
    records = [{"name": experiments._column_name(k), "final_mean_loss": v}
               for k, v in result.final_means().items()]
    records.append({"name": "files", "csv": str(result.csv_path), "svg": str(result.svg_path)})
    return records


def cmd_final(args):
    config = experiments.ExperimentConfig.from_file(args.config)
    result = experiments.run_final_output_suite(config)
    records = [{"name": experiments._column_name((mech, label)), "final_mean_loss": loss,
                "mean_mer": mer} for mech, label, loss, mer in result.rows]
    records.append({"name": "files", "csv": str(result.csv_path), "svg": str(result.svg_path)})
    return records


def cmd_tradeoff(args):
    config = experiments.ExperimentConfig.from_file(args.config)
    result = experiments.run_tradeoff_suite(config, kind=args.kind)
    records = []
    for mech, fit in result.fits.items():
        rec = {"name": f"fit_{mech}", "converged": fit.converged, "degenerate": fit.degenerate,
               "rmse": fit.rmse}
        if fit.model:
            rec.update(c4=fit.model.c4, c5=fit.model.c5, c6=fit.model.c6,
                       chosen_alpha=experiments.choose_alpha(
                           fit.model, (min(config.alphas), max(config.alphas))))
        records.append(rec)
    return records


def cmd_audit(args):
    cfg = audit_mod.AuditConfig(runs=args.runs, bins=args.bins, slack=args.slack)
    inst = audit_mod.default_audit_instance(args.instance_seed)
    replacement = inst.dataset.point(args.index) if args.identical else None
    report = audit_mod.audit_privacy(args.mechanism, inst, args.index, replacement, args.alpha, cfg,
                                     args.seed, args.zeta_rule)
    return [report.as_dict()]


def cmd_bounds(args):
    inputs = bounds.BoundInputs(
        norm_f0=args.norm_f0, alpha_acc=args.alpha_acc, delta=args.delta, c_r=args.c_r,
        rho=args.rho, eta=args.eta, n_p=args.n_p, d=args.d, c1=args.c1, beta=args.beta,
        c_b=args.c_b)
    return [{"name": name, "bound": value}
            for name, value in bounds.all_bounds(inputs, args.alpha_min).items()]


def cmd_lemmacheck(args):
    checks = {"8": lambda: lemmas.check_lemma8(alpha_hat=args.alpha, delta=args.delta,
                                               trials=args.trials, seed=args.seed),
              "11": lambda: lemmas.check_lemma11(alpha=args.alpha, delta=args.delta,
                                                 trials=args.trials, seed=args.seed),
              "12": lambda: lemmas.check_lemma12(alpha=args.alpha, delta=args.delta,
                                                 trials=args.trials, seed=args.seed)}
    return [checks[w]().as_dict() for w in args.which]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dpadmm", description=__doc__)
    parser.add_argument("--output", help="append JSON-lines reports to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="loss-vs-iteration curves for a config")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("final", help="final-round loss and misclassification rate per alpha")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_final)

    p = sub.add_parser("tradeoff", help="loss-vs-alpha with a fitted accuracy model")
    p.add_argument("--config", required=True)
    p.add_argument("--kind", choices=["final", "intermediate"], default="final")
    p.set_defaults(fn=cmd_tradeoff)

    p = sub.add_parser("audit", help="histogram privacy audit on a one-dimensional node")
    p.add_argument("--mechanism", choices=list(audit_mod.MECHANISMS), required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--runs", type=int, default=100_000)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--slack", type=float, default=0.2)
    p.add_argument("--index", type=int, default=0, help="index of the replaced point")
    p.add_argument("--identical", action="store_true", help="audit two identical datasets")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instance-seed", type=int, default=0)
    p.add_argument("--zeta-rule", choices=["proof_half", "algorithm_full"], default="proof_half")
    p.set_defaults(fn=cmd_audit)

    p = sub.add_parser("bounds", help="sample-complexity calculators")
    p.add_argument("--norm-f0", type=float, required=True)
    p.add_argument("--alpha-acc", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--alpha-min", type=float, default=1.0)
    p.add_argument("--c-r", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--n-p", type=int, default=1)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--c1", type=float, default=0.25)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--c-b", type=float, default=None)
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("lemmacheck", help="Monte Carlo objective-gap checks")
    p.add_argument("--which", nargs="+", choices=["8", "11", "12"], default=["8", "11", "12"])
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_lemmacheck)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        records = args.fn(args)
    _emit(records, args.output)
    return 0 if all(r.get("pass", True) for r in records) else 1


if __name__ == "__main__":
    sys.exit(main())
