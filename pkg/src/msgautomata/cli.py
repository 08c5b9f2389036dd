"""Command line interface.

Exit status is 0 when the requested operation succeeds (for ``check-refines``:
when the verdict holds), 1 on a failed check or a diagnostic, 2 on bad usage.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .refinement import DEFAULT_DEPTH, apply_transcript, check_refines
from .semantics import executions, output_set, truncated_executions
from .streams import Stream
from .textio import (
    SourceDiagnostic,
    export_dot,
    format_execution,
    load_automaton,
    parse_transcript,
    render_automaton,
    save_automaton,
)


def _load(path: str):
    try:
        return load_automaton(path)
    except SourceDiagnostic as exc:
        raise SourceDiagnostic(exc.line, f"{path}: {exc.message}", exc.offending_token) from exc


def cmd_validate(args) -> int:
    a = _load(args.file)
    print(f"ok: {a.name} ({len(a.states)} states, {len(a.transitions)} transitions, {len(a.initials)} initial)")
    return 0


def cmd_info(args) -> int:
    a = _load(args.file)
    missing = sorted(a.missing_pairs())
    print(f"automaton: {a.name}")
    print("states: " + " ".join(a.sorted_states()))
    print("alphabet: " + " ".join(a.sorted_alphabet()))
    print(f"transitions: {len(a.transitions)}")
    print(f"initials: {len(a.initials)}")
    print(f"total: {'yes' if not missing else 'no'}")
    print("missing: " + (" ".join(f"({s},{m})" for s, m in missing) if missing else "none"))
    print("reachable: " + " ".join(sorted(a.reachable())))
    return 0


def cmd_run(args) -> int:
    a = _load(args.file)
    word = Stream(args.word)
    for ex in executions(a, word):
        print(format_execution(ex))
    for ex in truncated_executions(a, word):
        m = word[len(ex.steps)]
        print(f"{format_execution(ex)} ; {ex.final_state} -{m}/*-> chaos")
    return 0


def cmd_outset(args) -> int:
    a = _load(args.file)
    for result in output_set(a, Stream(args.word)):
        print(result)
    return 0


def cmd_refine(args) -> int:
    path = Path(args.transcript)
    transcript = parse_transcript(path.read_text(encoding="utf-8"), base_dir=path.parent)
    final, log = apply_transcript(transcript)
    if args.emit_intermediates:
        out = Path(args.emit_intermediates)
        out.mkdir(parents=True, exist_ok=True)
        for index, a in enumerate(log, start=1):
            save_automaton(a, out / f"step{index}.mpa")
    sys.stdout.write(render_automaton(final))
    return 0


def cmd_check_refines(args) -> int:
    abstract = _load(args.abstract)
    concrete = _load(args.concrete)
    report = check_refines(abstract, concrete, args.depth)
    if report.holds:
        if report.tier == "simulation":
            print(f"holds: simulation found; bounded check passed to depth {args.depth}")
            for s1, s in sorted(report.relation):
                print(f"  {s1} <= {s}")
        else:
            print(f"holds to depth {args.depth} (bounded check only; no simulation found)")
        return 0
    word, result = report.verdict.counterexample
    print(f"does not hold (depth {args.depth})")
    print(f"counterexample input: {word}")
    print(f"uncovered output: {result}")
    return 1


def cmd_export_dot(args) -> int:
    sys.stdout.write(export_dot(_load(args.file)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="msgautomata", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate an automaton file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("info", help="totality, missing pairs and reachable states")
    p.add_argument("file")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("run", help="list executions on an input word")
    p.add_argument("file")
    p.add_argument("word", nargs="*")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("outset", help="list possible outputs on an input word")
    p.add_argument("file")
    p.add_argument("word", nargs="*")
    p.set_defaults(func=cmd_outset)

    p = sub.add_parser("refine", help="replay a refinement transcript")
    p.add_argument("transcript")
    p.add_argument("--emit-intermediates", metavar="DIR")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("check-refines", help="check that CONCRETE refines ABSTRACT")
    p.add_argument("abstract")
    p.add_argument("concrete")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.set_defaults(func=cmd_check_refines)

    p = sub.add_parser("export-dot", help="GraphViz rendering of an automaton")
    p.add_argument("file")
    p.set_defaults(func=cmd_export_dot)
    return parser


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        # SourceDiagnostic, RuleError, ValidationError, ... are all ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
