"""Command line entry points: space checks, operator application, norms, suites."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from ..czd import cz_decompose
from ..geometry import fractional_shell_coefficient, gap_coefficient, shell_coefficient
from ..kernels import KernelSpec
from ..norms import lp_norm, luxemburg_norm, osc_exp_norm, rbmo_norm, weak_lp
from ..operators import apply_operator
from ..space import (
    Ball,
    check_geometric_doubling,
    check_lambda_regularity,
    check_upper_doubling,
    load_space,
)
from .config import load_config
from .report import fmt, write_reports
from .suites import SUITES, run_suites

__all__ = ["main"]


def _load_function(path: str, space) -> np.ndarray:
    """One value per line, or delimited rows 'id<sep>value' keyed by point id."""
    by_id = {}
    plain = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", "\t").split()
            if len(parts) == 1:
                plain.append(float(parts[0]))
            else:
                by_id[parts[0]] = float(parts[1])
    if by_id:
        return np.asarray([by_id[str(i)] for i in space.ids], dtype=float)
    return np.asarray(plain, dtype=float)


def _kernel_from_arg(arg: str, alpha: float | None) -> KernelSpec:
    if arg.endswith(".json"):
        with open(arg) as fh:
            doc = json.load(fh)
    else:
        doc = json.loads(arg)
    matrix = None
    if doc.get("matrix_file"):
        matrix = np.loadtxt(doc["matrix_file"])
    return KernelSpec(
        alpha=float(doc.get("alpha", alpha if alpha is not None else 0.5)),
        variant=doc.get("type", "frac_integral"),
        m=doc.get("m"),
        matrix=matrix,
        diagonal=doc.get("diagonal", "exclude"),
    )


def cmd_check_space(args) -> int:
    space = load_space(args.space)
    upper = check_upper_doubling(space)
    reg, reg_wit = check_lambda_regularity(space)
    n0, _ = check_geometric_doubling(space)
    out = {
        "points": space.n,
        "total_mass": fmt(space.total_mass),
        "upper_doubling_passed": upper.passed,
        "violations": upper.violations[:10],
        "C_lambda": fmt(upper.C_lambda),
        "C_lambda_tilde": fmt(reg),
        "N0": n0,
    }
    print(json.dumps(out, indent=1, sort_keys=True))
    return 0 if upper.passed else 1


def cmd_apply(args) -> int:
    space = load_space(args.space)
    spec = _kernel_from_arg(args.kernel, None)
    f = _load_function(args.f, space)
    out = apply_operator(spec, space, f)
    text = "\n".join(fmt(float(v)) for v in out) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_czd(args) -> int:
    space = load_space(args.space)
    f = _load_function(args.f, space)
    dec = cz_decompose(space, f, p=args.p, t=args.t, gamma0=args.gamma0)
    out = {
        "level": dec.level,
        "p": dec.p,
        "gamma0": fmt(dec.gamma0),
        "balls": [[b.center, fmt(b.radius)] for b in dec.balls],
        "concentration_balls": [[b.center, fmt(b.radius)] for b in dec.concentration_balls],
        "gamma_fit": fmt(dec.report["gamma_fit"]),
        "matching_residuals": [fmt(v) for v in dec.report["matching_residuals"]],
    }
    print(json.dumps(out, indent=1, sort_keys=True))
    return 0


def cmd_norm(args) -> int:
    space = load_space(args.space)
    f = _load_function(args.f, space)
    if args.kind == "lp":
        value = lp_norm(space, f, args.p)
    elif args.kind == "weak":
        value = weak_lp(space, f, args.p)
    elif args.kind == "orlicz":
        from .config import ExperimentConfig

        cfg = ExperimentConfig(orlicz=json.loads(args.orlicz), alpha=0.5, pairs=[], weak={"p": 1, "q": 2, "strict": False})
        value = luxemburg_norm(space, f, cfg.orlicz_fn())
    elif args.kind == "rbmo":
        value = rbmo_norm(space, f, rho=args.rho).value
    elif args.kind == "osc":
        value = osc_exp_norm(space, f, r=args.r)
    else:
        raise SystemExit(f"unknown norm kind {args.kind}")
    print(fmt(float(value)))
    return 0


def cmd_coeff(args) -> int:
    space = load_space(args.space)
    b = Ball(args.b_center, args.b_radius)
    s = Ball(args.s_center, args.s_radius)
    if args.kind == "K":
        coeff = gap_coefficient(space, b, s)
    elif args.kind == "Ktilde":
        coeff = shell_coefficient(space, b, s)
    elif args.kind == "Ktilde-alpha":
        coeff = fractional_shell_coefficient(space, b, s, args.alpha)
    else:
        raise SystemExit(f"unknown coefficient kind {args.kind}")
    print(fmt(coeff.value))
    if args.trace:
        rows = coeff.trace_rows(b, s)
        with open(args.trace, "w") as fh:
            fh.write("b_center\tb_radius\ts_center\ts_radius\tshells\tk\tterm\tvalue\n")
            for r in rows:
                fh.write(
                    "\t".join(
                        fmt(r[k]) if isinstance(r[k], float) else str(r[k])
                        for k in (
                            "b_center",
                            "b_radius",
                            "s_center",
                            "s_radius",
                            "shells",
                            "k",
                            "term",
                            "value",
                        )
                    )
                    + "\n"
                )
    return 0


def _check_baselines(cfg, reports) -> list[str]:
    failures = []
    for entry in cfg.baselines.get("limits", []):
        for rep in reports:
            if rep.suite != entry["suite"]:
                continue
            vals = [v for _, v in rep.values(entry["statistic"])]
            if not vals:
                continue
            limit = float(entry["limit"]) * float(entry.get("tolerance_factor", 1.0))
            if vals[-1] > limit:
                failures.append(
                    f"{rep.suite}/{entry['statistic']}: {vals[-1]:.6g} exceeds baseline {limit:.6g}"
                )
    return failures


def cmd_suite(args) -> int:
    cfg = load_config(args.config)
    if args.name not in SUITES:
        raise SystemExit(f"unknown suite {args.name!r}; known: {sorted(SUITES)}")
    report = SUITES[args.name](cfg)
    sys.stdout.write(report.to_csv_text())
    for note in report.notes:
        print(f"# {note}")
    return 1 if report.failures else 0


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    reports = run_suites(cfg)
    write_reports(reports, args.output_dir or cfg.output_dir)
    failures = [f for rep in reports for f in rep.failures]
    failures += _check_baselines(cfg, reports)
    for f in failures:
        print(f"FAIL {f}", file=sys.stderr)
    print(f"wrote {len(reports)} suite reports to {args.output_dir or cfg.output_dir}")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracspace")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-space", help="validate a space document and fit its constants")
    p.add_argument("space")
    p.set_defaults(func=cmd_check_space)

    p = sub.add_parser("apply", help="apply a kernel operator to a function file")
    p.add_argument("--space", required=True)
    p.add_argument("--kernel", required=True, help="inline JSON or a .json path")
    p.add_argument("--f", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("czd", help="level-set decomposition f = g + h")
    p.add_argument("--space", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--gamma0", type=float, default=None)
    p.set_defaults(func=cmd_czd)

    p = sub.add_parser("norm", help="evaluate a norm of a function file")
    p.add_argument("--kind", required=True, choices=["lp", "weak", "orlicz", "rbmo", "osc"])
    p.add_argument("--space", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--rho", type=float, default=2.0)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--orlicz", default='{"type": "power", "p": 2}')
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("coeff", help="nesting coefficient of two balls")
    p.add_argument("--kind", required=True, choices=["K", "Ktilde", "Ktilde-alpha"])
    p.add_argument("--space", required=True)
    p.add_argument("--b-center", type=int, required=True)
    p.add_argument("--b-radius", type=float, required=True)
    p.add_argument("--s-center", type=int, required=True)
    p.add_argument("--s-radius", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--trace", help="write the per-shell audit rows to this path")
    p.set_defaults(func=cmd_coeff)

    p = sub.add_parser("suite", help="run one suite and print its rows")
    p.add_argument("name")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("run", help="run the configured suites and write reports")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_run)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
