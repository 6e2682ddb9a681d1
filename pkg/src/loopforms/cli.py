"""Command-line entry point: `verify --all --report json -o out.json`.

Exit codes: 0 when every selected check passes, 1 when any fails,
2 for usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import LoopFormsError
from .suite import (
    FD_CLASSES,
    CheckResult,
    RunConfig,
    convergence_study,
    lookup,
    observed_ratios,
    run_all,
)

REPORT_VERSION = "1.0"
THIN_FAMILY_NOTE = ("Thin-family vanishing is sampled on rotations, reparameterizations and their composite only; "
                    "it is not a proof over all thin families.")


def emit_report(results: list[CheckResult], fmt: str = "json", config: dict | None = None) -> str:
    config = config or {}
    if fmt == "json":
        doc = {"version": REPORT_VERSION, "config": config, "results": [r.to_dict() for r in results]}
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if fmt == "md":
        return _markdown(results, config)
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report(text: str) -> tuple[dict, list[CheckResult]]:
    doc = json.loads(text)
    return doc["config"], [CheckResult.from_dict(d) for d in doc["results"]]


def _fmt(v) -> str:
    return f"{v:.2e}" if isinstance(v, float) else str(v)


def _markdown(results: list[CheckResult], config: dict) -> str:
    lines = [f"# Identity check report (v{REPORT_VERSION})", ""]
    if config:
        lines += ["| setting | value |", "|---|---|"]
        lines += [f"| {k} | {v} |" for k, v in config.items()]
        lines.append("")
    lines += ["| check | identity | class | trials | skipped | max rel residual | tolerance | thinness defect | pass |",
              "|---|---|---|---|---|---|---|---|---|"]
    for r in results:
        defect = "" if r.thinness_defect is None else _fmt(r.thinness_defect)
        verdict = "PASS" if r.passed else "FAIL"
        if r.under_resolved:
            verdict += " (under-resolved)"
        lines.append(f"| {r.name} | {r.paper_anchor} | {r.tolerance_class} | {r.trials} | {r.skipped} | "
                     f"{_fmt(r.max_rel_residual)} | {_fmt(r.tolerance)} | {defect} | {verdict} |")
    if any(r.name == "C16" for r in results):
        lines += ["", THIN_FAMILY_NOTE]
    return "\n".join(lines) + "\n"


def _convergence_grid(name: str, cfg: RunConfig):
    _, spec = lookup(name)
    if spec.tolerance_class in FD_CLASSES:
        return [(cfg.N, h) for h in (1e-2, 5e-3, 2.5e-3)]
    return [(N, cfg.h) for N in (64, 128, 256)]


def emit_convergence(name: str, rows: list[dict], fmt: str, config: dict) -> str:
    ratios = observed_ratios(rows)
    if fmt == "json":
        doc = {"version": REPORT_VERSION, "config": config,
               "convergence": {"name": name, "rows": rows, "ratios": ratios}}
        return json.dumps(doc, indent=2) + "\n"
    lines = [f"# Convergence study: {name}", "", "| N | h | max rel residual |", "|---|---|---|"]
    lines += [f"| {r['N']} | {r['h']:g} | {r['max_rel_residual']:.3e} |" for r in rows]
    lines += ["", "ratios: " + ", ".join("-" if q is None else f"{q:.3f}" for q in ratios)]
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="verify", description="Run numerical identity checks on loop-space forms.")
    sel = ap.add_mutually_exclusive_group()
    sel.add_argument("--all", action="store_true", help="run every registered check (default)")
    sel.add_argument("--check", action="append", metavar="NAME", help="run one check; repeatable")
    sel.add_argument("--convergence", metavar="NAME", help="convergence study for one check")
    d = RunConfig()
    ap.add_argument("--group", default=d.group, help="su2 or suN")
    ap.add_argument("--samples", type=int, default=d.N, help="loop samples N (even)")
    ap.add_argument("--steps", type=int, default=d.S, help="family steps S")
    ap.add_argument("--fd-step", type=float, default=d.h, help="finite-difference step h")
    ap.add_argument("--no-richardson", action="store_true", help="plain central differences")
    ap.add_argument("--seed", type=int, default=d.seed, help="master seed")
    ap.add_argument("--level", type=float, default=d.level)
    ap.add_argument("--connection", default=d.connection, help="zero | mc | scaled:ALPHA")
    ap.add_argument("--trials", type=int, default=d.trials)
    ap.add_argument("--x", type=float, default=None, help="transport parameter for C16/C17")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--report", choices=("json", "md"), default="json")
    ap.add_argument("-o", "--output", help="write the report here instead of stdout")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        cfg = RunConfig(group=args.group, N=args.samples, S=args.steps, h=args.fd_step, seed=args.seed,
                        level=args.level, connection=args.connection, trials=args.trials,
                        richardson=not args.no_richardson, x=args.x, checks=tuple(args.check or ()),
                        report=args.report, output=args.output)
        for name in cfg.checks + ((args.convergence,) if args.convergence else ()):
            lookup(name)
    except (ValueError, LoopFormsError) as e:
        print(f"verify: error: {e}", file=sys.stderr)
        return 2

    if args.convergence:
        rows = convergence_study(args.convergence, _convergence_grid(args.convergence, cfg), cfg)
        text, code = emit_convergence(args.convergence, rows, cfg.report, cfg.echo()), 0
    else:
        results = run_all(cfg, workers=args.workers)
        text = emit_report(results, cfg.report, cfg.echo())
        code = 0 if all(r.passed for r in results) else 1

    if cfg.output:
        try:
            with open(cfg.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            print(f"verify: cannot write {cfg.output}: {e}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
