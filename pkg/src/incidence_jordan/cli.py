"""
Command line front-end.

    incjordan verify <config>     ring axioms, Jordan check and lemma suites
    incjordan decompose <config>  Jordan check, classification, near-sum and sum
    incjordan suites              list suite names

Exit codes: 0 every contract passed, 1 some contract failed, 2 the config
could not be parsed or a map precondition failed, 3 the sum decomposition was
requested on a preorder outside its hypothesis.
"""

from __future__ import annotations

import argparse
import sys

from . import suites as S
from .config import InstanceConfig, build_map, load_config
from .errors import (
    BadLabel,
    ConfigError,
    NoDecomposition,
    PreconditionFailed,
    TooLarge,
)
from .jordan import Check, full_sum_decompose, is_antihom, is_hom, is_jordan_hom, near_sum_decompose
from .order import ClassShape, check_class_size_hypothesis

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_HYPOTHESIS = 0, 1, 2, 3

DEFAULT_SUITES = {
    "verify": ["axioms", "restriction-calculus", "jordan", "classify", *S.LEMMA_SUITES],
    "decompose": ["jordan", "classify", "near-sum", "sum"],
}


class Report:
    def __init__(self):
        self.lines: list[str] = []
        self.checks = 0
        self.failed = 0

    def add(self, line: str):
        self.lines.append(line)

    def check(self, c: Check):
        self.checks += 1
        self.failed += not c.passed
        self.lines.append(c.line())

    def extend(self, cs):
        for c in cs:
            self.check(c)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _header(rep: Report, cfg: InstanceConfig, command: str, seed: int):
    rep.add(f"REPORT command={command}")
    rep.add(f"SEED {seed}")


def run(cfg: InstanceConfig, command: str = "verify", seed=None, cap=None, samples=None) -> tuple[int, Report]:
    """Run the suites of ``cfg``; returns the exit code and the report."""
    seed = cfg.seed if seed is None else seed
    cap = cfg.cap if cap is None else cap
    samples = cfg.samples if samples is None else samples
    lsamples = cfg.lemma_samples
    rep = Report()
    _header(rep, cfg, command, seed)
    try:
        ctx = cfg.context()
    except (BadLabel, ValueError) as exc:
        rep.add(f"ERROR parse {exc}")
        return EXIT_PARSE, rep
    cls_txt = " ".join("{" + ",".join(c) + "}" for c in ctx.classes)
    rep.add(f"INSTANCE modulus={ctx.n} dim={ctx.dim} classes={cls_txt.replace(' ', '|')}")
    try:
        phi = build_map(cfg)
    except PreconditionFailed as exc:
        rep.add(f"ERROR PreconditionFailed clause={exc.clause!r} detail={exc.detail!r}")
        return EXIT_PARSE, rep
    except ConfigError as exc:
        rep.add(f"ERROR parse {exc}")
        return EXIT_PARSE, rep
    rep.add(f"MAP kind={cfg.describe_map()}")

    wanted = cfg.suites if cfg.suites is not None else DEFAULT_SUITES[command]
    hypothesis_failed = False
    verdict = None

    def jordan_ok() -> bool:
        nonlocal verdict
        if verdict is None:
            verdict = is_jordan_hom(phi, samples=samples, cap=cap, seed=seed)
            if "jordan" not in wanted:
                rep.extend(verdict.failures)
        return verdict.passed

    for suite in S.ORDER:
        if suite not in wanted:
            continue
        if suite == "axioms":
            rep.extend(S.axioms_suite(ctx, cap=cap, samples=samples, seed=seed))
        elif suite == "restriction-calculus":
            rep.extend(S.restriction_calculus_suite(ctx, samples=lsamples, seed=seed))
        elif suite == "jordan":
            verdict = is_jordan_hom(phi, samples=samples, cap=cap, seed=seed)
            rep.extend(verdict.checks)
        elif suite == "classify":
            for c in (is_hom(phi), is_antihom(phi)):
                rep.add(" ".join(["CLASSIFY", c.name, "PASS" if c.passed else "FAIL", *c.witness]))
        elif not jordan_ok():
            rep.add(f"SKIP {suite} reason=not-a-jordan-isomorphism")
        elif suite == "near-sum":
            r = near_sum_decompose(phi, verdict, samples=samples, cap=cap, seed=seed)
            rep.add(f"MODE near-sum {r.mode}")
            rep.extend(r.checks)
        elif suite == "sum":
            shape = check_class_size_hypothesis(ctx.q)
            if shape is not ClassShape.ALL_NONTRIVIAL_FINITE:
                if cfg.suite_all:
                    rep.add(f"SKIP sum hypothesis={shape.value}")
                else:
                    rep.add(f"HYPOTHESIS sum VIOLATED shape={shape.value} sizes={','.join(map(str, ctx.q.sizes))}")
                    hypothesis_failed = True
                continue
            try:
                r = full_sum_decompose(phi, verdict, samples=samples, cap=cap, seed=seed)
            except NoDecomposition as exc:
                rep.check(Check("sum.local-split", False, 1, (f"class={exc.cls}",)))
                continue
            except (TooLarge, PreconditionFailed) as exc:
                rep.check(Check("sum.local-split", False, 1, (f"reason={type(exc).__name__}",)))
                continue
            rep.add(f"MODE sum {r.mode}")
            rep.extend(r.checks)
            for cls, f, g in r.idempotent_witnesses:
                rep.add(f"WITNESS class={cls} f={f} g={g}")
        else:
            try:
                rep.extend(S.lemma_suite(phi, suite, samples=lsamples, seed=seed, cap=cap))
            except TooLarge:
                rep.add(f"SKIP {suite} reason=enumeration-cap")

    if rep.failed:
        code = EXIT_FAIL
    elif hypothesis_failed:
        code = EXIT_HYPOTHESIS
    else:
        code = EXIT_OK
    rep.add(f"RESULT {'PASS' if code == EXIT_OK else 'FAIL'} checks={rep.checks} failed={rep.failed} exit={code}")
    return code, rep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="incjordan", description="Jordan isomorphisms of finitary incidence rings over Z_n")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("verify", "decompose"):
        sp = sub.add_parser(name)
        sp.add_argument("config")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--cap", type=int, help="enumerate FI exhaustively up to this many elements")
        sp.add_argument("--samples", type=int, help="random samples when FI is too large to enumerate")
        sp.add_argument("--report", help="also write the report to this path")
    sub.add_parser("suites")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    if args.command == "suites":
        for name, text in S.list_suites():
            print(f"{name} -> {text}")
        return EXIT_OK
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"ERROR parse {exc}", file=sys.stderr)
        return EXIT_PARSE
    code, rep = run(cfg, args.command, seed=args.seed, cap=args.cap, samples=args.samples)
    text = rep.text()
    sys.stdout.write(text)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
