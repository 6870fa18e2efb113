"""Command line interface.

Exit codes for ``check``: 0 when every file is CompleteCorrect, 1 when the
worst result is Incomplete, 2 when any file has errors, 3 on parse or usage
problems.  ``--strict`` folds Incomplete into 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .document import print_document
from .errors import DerivError
from .parser import ParseError, parse_document_with_spans
from .report import RESET, render_human, render_summary, report_json
from .rules import DocLine, list_rules, rule_doc
from .systems import get_system
from .verify import verify_document

EXIT_OK = 0
EXIT_INCOMPLETE = 1
EXIT_ERRORS = 2
EXIT_USAGE = 3

_STATUS_EXIT = {"CompleteCorrect": EXIT_OK, "Incomplete": EXIT_INCOMPLETE,
                "HasErrors": EXIT_ERRORS}

# Per-metavariable highlight cycle for rule documentation.
_METAVAR_COLORS = ("\x1b[36m", "\x1b[35m", "\x1b[33m", "\x1b[32m",
                   "\x1b[34m", "\x1b[31m")


def _want_color(stream) -> bool:
    if os.environ.get("DERIVER_NO_COLOR"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _read(path: str) -> Optional[str]:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        print(f"{path}: {e.strerror or e}", file=sys.stderr)
        return None


def _cmd_check(args) -> int:
    color = _want_color(sys.stdout)
    worst = EXIT_OK
    json_out: dict = {}
    for path in args.files:
        text = _read(path)
        if text is None:
            worst = max(worst, EXIT_USAGE)
            continue
        try:
            doc, spans = parse_document_with_spans(text)
        except ParseError as e:
            print(f"{path}:{e.span.line}:{e.span.col}: parse error: {e}", file=sys.stderr)
            worst = max(worst, EXIT_USAGE)
            continue
        report = verify_document(doc)
        if args.json:
            json_out[path] = report_json(doc, report)
        else:
            for line in render_human(doc, report, spans, path, color):
                print(line)
            print(f"{path}: {render_summary(report, color)}")
        code = _STATUS_EXIT[report.tree_status]
        if args.strict and code == EXIT_INCOMPLETE:
            code = EXIT_ERRORS
        worst = max(worst, code)
    if args.json:
        payload = json_out[args.files[0]] if len(args.files) == 1 else json_out
        print(json.dumps(payload, indent=2))
    return worst


def _cmd_fmt(args) -> int:
    status = EXIT_OK
    for path in args.files:
        text = _read(path)
        if text is None:
            status = EXIT_USAGE
            continue
        try:
            doc, _ = parse_document_with_spans(text)
        except ParseError as e:
            print(f"{path}:{e.span.line}:{e.span.col}: parse error: {e}", file=sys.stderr)
            status = EXIT_USAGE
            continue
        out = print_document(doc)
        if args.write:
            if out != text:
                with open(path, "w", encoding="utf-8") as f:
                    f.write(out)
        else:
            sys.stdout.write(out)
    return status


def _cmd_rules(args) -> int:
    try:
        system = get_system(args.system)
        rules = list_rules(system, args.query or "", args.category)
    except DerivError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    for r in rules:
        doc = rule_doc(r)
        print(f"{r.name}  [{r.category}]")
        print(f"  {doc.conclusion.text}")
        for p in doc.premises:
            print(f"    from {p.text}")
        for s in doc.side_conditions:
            print(f"    when {s.text}")
        if r.doc_text:
            print(f"  {r.doc_text}")
    return EXIT_OK


def _color_line(line: DocLine, use_color: bool) -> str:
    if not use_color:
        return line.text
    out = []
    for span in line.spans:
        if span.color is None:
            out.append(span.text)
        else:
            c = _METAVAR_COLORS[span.color % len(_METAVAR_COLORS)]
            out.append(f"{c}{span.text}{RESET}")
    return "".join(out)


def _cmd_doc(args) -> int:
    try:
        system = get_system(args.system)
        rule = system.get(args.rule)
    except DerivError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    color = _want_color(sys.stdout)
    doc = rule_doc(rule)
    print(f"{doc.name}  [{doc.category}]")
    if doc.doc_text:
        print(doc.doc_text)
    print()
    for i, p in enumerate(doc.premises):
        print(f"  premise {i + 1}:  {_color_line(p, color)}")
    for i, s in enumerate(doc.side_conditions):
        print(f"  side {i + 1}:     {_color_line(s, color)}")
    print(f"  concludes:  {_color_line(doc.conclusion, color)}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="derivkit",
                                 description="Derivation tree checker and editor backend.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="verify derivation files")
    p.add_argument("files", nargs="+")
    p.add_argument("--json", action="store_true", help="machine readable report")
    p.add_argument("--strict", action="store_true",
                   help="treat incomplete derivations as failures")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("fmt", help="rewrite files in canonical form")
    p.add_argument("files", nargs="+")
    p.add_argument("--write", action="store_true", help="rewrite in place")
    p.set_defaults(fn=_cmd_fmt)

    p = sub.add_parser("rules", help="list the rules of a system")
    p.add_argument("system")
    p.add_argument("--query", help="substring filter on names and descriptions")
    p.add_argument("--category", help="only rules in this category")
    p.set_defaults(fn=_cmd_rules)

    p = sub.add_parser("doc", help="show one rule with highlighted metavariables")
    p.add_argument("system")
    p.add_argument("rule")
    p.set_defaults(fn=_cmd_doc)

    p = sub.add_parser("serve", help="run the editing service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8750)
    p.set_defaults(fn=_cmd_serve)

    return ap


def run(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    return args.fn(args)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
