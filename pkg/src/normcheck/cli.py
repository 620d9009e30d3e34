"""Command-line entry point: ``check``, ``explain`` and ``fmt``.

Exit codes: 0 compliant (or formatted), 1 non-compliant (or ``fmt --check``
found differences), 2 parse or integrity error, 3 usage error.
"""

from __future__ import annotations

import argparse
import enum
import io
import sys
from pathlib import Path

from .argumentation import TreeNode
from .dsl import ParseError, decode_source, format_source, parse_sources
from .report import ComplianceReport, Verdict, decide, to_dot, to_json


class ExitCode(enum.IntEnum):
    COMPLIANT = 0
    NON_COMPLIANT = 1
    PARSE_ERROR = 2
    USAGE_ERROR = 3


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ExitCode.USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _read(paths: list[str]) -> list[tuple[str, str]]:
    # Sorted so that the order paths are given in never changes the output.
    sources = []
    for p in sorted(set(paths)):
        try:
            data = Path(p).read_bytes()
        except OSError as e:
            raise UsageError(f"cannot read {p}: {e.strerror}") from None
        sources.append((p, decode_source(data, p)))
    return sources


def _load(paths):
    model, warnings = parse_sources(_read(paths))
    for w in warnings:
        print(w, file=sys.stderr)
    return model


def _exit_for(report: ComplianceReport) -> ExitCode:
    return ExitCode.COMPLIANT if report.overall is Verdict.COMPLIANT else ExitCode.NON_COMPLIANT


def cmd_check(args, out) -> ExitCode:
    model = _load(args.paths)
    report = decide(model)
    if args.report:
        Path(args.report).write_text(to_json(report), encoding="utf-8")
    if args.dot:
        Path(args.dot).write_text(to_dot(report), encoding="utf-8")
    for f in report.findings:
        level = "error" if f.blocking else "warning"
        print(f"{level} {f.code} {f.subject}: {f.message}", file=sys.stderr)
    for v in report.np_verdicts:
        print(f"{v.np}: {v.status.value}", file=out)
    print(f"overall: {report.overall.value}", file=out)
    return _exit_for(report)


def render_tree(node: TreeNode, indent: str = "  ", depth: int = 0) -> list[str]:
    rel = "" if depth == 0 else f" ({node.relation.value})"
    lines = [f"{indent * depth}{node.argument} [{node.kind.value}] {node.mark.value}{rel}"]
    for c in node.children:
        lines.extend(render_tree(c, indent, depth + 1))
    return lines


def cmd_explain(args, out) -> ExitCode:
    model = _load(args.paths)
    if args.np not in model.np_index:
        raise UsageError(f"unknown normative proposition {args.np!r}")
    report = decide(model)
    verdict = report.verdict_for(args.np)
    np = model.np_index[args.np]
    print(f"{np.id} ({np.modality.value}, subject {np.subject_role!r}): {verdict.status.value}", file=out)
    print(f"applicable to: {', '.join(verdict.applicable_to) or '-'}", file=out)
    for f in report.findings:
        if f.subject == np.id:
            print(f"finding {f.code}: {f.message}", file=out)
    for r in model.realizations:
        if r.np != np.id:
            continue
        sol = report.specification.per_goal[r.goal]
        tasks = ", ".join(sol.tasks) if sol.operationalized else "not operationalized"
        print(f"realization: {r.goal} -> {r.np}", file=out)
        print(f"  sol({r.goal}) = {{{tasks}}}", file=out)
    for h in verdict.hypotheses:
        print(f"tree {h.hypothesis}: {h.status.value} ({h.outcome})", file=out)
        for line in render_tree(h.tree):
            print("  " + line, file=out)
    for c in verdict.causes:
        print("cause: " + ", ".join(f"{k}={v}" for k, v in sorted(c.items())), file=out)
    return _exit_for(report)


def cmd_fmt(args, out) -> ExitCode:
    sources = _read(args.paths)
    parse_sources(sources)
    changed = []
    for path, text in sources:
        canonical = format_source(text, path)
        if canonical == text:
            continue
        changed.append(path)
        if not args.check:
            Path(path).write_text(canonical, encoding="utf-8")
    for path in changed:
        print(("would reformat " if args.check else "reformatted ") + path, file=out)
    return ExitCode.NON_COMPLIANT if args.check and changed else ExitCode.COMPLIANT


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="normcheck", description="Argumentation-based compliance checking of .nms models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("check", help="verify a model and print per-NP verdicts")
    p.add_argument("paths", nargs="+")
    p.add_argument("--report", metavar="PATH", help="write the JSON report here")
    p.add_argument("--dot", metavar="PATH", help="write dialectical trees as DOT here")
    p.add_argument("--quiet", action="store_true", help="print nothing on standard output")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("explain", help="show the verdict, solution and trees of one NP")
    p.add_argument("paths", nargs="+")
    p.add_argument("--np", required=True)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("fmt", help="rewrite files in canonical form")
    p.add_argument("paths", nargs="+")
    p.add_argument("--check", action="store_true", help="only report files that would change")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_fmt)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    out = io.StringIO() if args.quiet else sys.stdout
    try:
        return int(args.func(args, out))
    except ParseError as e:
        for d in e.diagnostics:
            print(d, file=sys.stderr)
        return int(ExitCode.PARSE_ERROR)
    except UsageError as e:
        print(f"normcheck: error: {e}", file=sys.stderr)
        return int(ExitCode.USAGE_ERROR)


if __name__ == "__main__":
    sys.exit(main())
