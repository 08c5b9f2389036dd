"""Text formats for automata (``.mpa``) and transcripts (``.rft``).

Automaton files hold one declaration per line; ``#`` starts a comment::

    automaton parity
    alphabet 0 L ?
    state even odd
    init even /
    trans even ? -> even / 0

Transcript files name a start automaton (``refine <file>``, or inline
declarations as above), optionally extend its alphabet, then list one rule
application per line::

    refine figure_step1.mpa
    add-state Error
    add-trans Selected deselect -> Deselected / ; Deselected deselect -> Error /
    remove-trans Deselected deselect -> Error /
    remove-state Error
    remove-init Deselected /
    refine-state A B map A->Selected B->Selected

Several transitions or initial elements in one step are separated by ``;``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable, Optional

from .automaton import Automaton, InitialElement, Transition, ValidationError
from .refinement import (
    AbstractionMap,
    AddStates,
    AddTransitions,
    RefineStates,
    RemoveInitials,
    RemoveStates,
    RemoveTransitions,
    Transcript,
)
from .semantics import Execution
from .streams import Stream, is_token


class SourceDiagnostic(ValueError):
    """A syntax or validation error at a specific line of a source text."""

    def __init__(self, line: int, message: str, offending_token: str = ""):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message
        self.offending_token = offending_token


def _lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].split()
        if body:
            yield number, body


def _token(line: int, tok: str, what: str) -> str:
    if not is_token(tok):
        raise SourceDiagnostic(line, f"invalid {what} {tok}", tok)
    return tok


def _split_output(line: int, tokens: list, keyword: str) -> tuple:
    """Split ``head... / out...`` at the slash."""
    if "/" not in tokens:
        raise SourceDiagnostic(line, f"{keyword}: expected '/' before the output", keyword)
    cut = tokens.index("/")
    out = tokens[cut + 1:]
    if "/" in out:
        raise SourceDiagnostic(line, f"{keyword}: more than one '/'", "/")
    return tokens[:cut], Stream(_token(line, c, "character") for c in out)


def _parse_transition(line: int, tokens: list, keyword: str) -> Transition:
    head, out = _split_output(line, tokens, keyword)
    if len(head) != 4 or head[2] != "->":
        bad = head[0] if head else keyword
        raise SourceDiagnostic(line, f"{keyword}: expected '<src> <char> -> <dst> / <out>...'", bad)
    src, char, _, dst = head
    return Transition(
        _token(line, src, "state"), _token(line, char, "character"), _token(line, dst, "state"), out
    )


def _parse_initial(line: int, tokens: list, keyword: str) -> InitialElement:
    head, out = _split_output(line, tokens, keyword)
    if len(head) != 1:
        bad = head[1] if len(head) > 1 else keyword
        raise SourceDiagnostic(line, f"{keyword}: expected '<state> / <out>...'", bad)
    return InitialElement(_token(line, head[0], "state"), out)


def _groups(tokens: list) -> list:
    groups, current = [], []
    for tok in tokens:
        if tok == ";":
            groups.append(current)
            current = []
        else:
            current.append(tok)
    groups.append(current)
    return groups


class _AutomatonBuilder:
    """Collects declarations, then validates them with line numbers."""

    def __init__(self):
        self.header: Optional[tuple] = None
        self.alphabet: dict = {}
        self.states: dict = {}
        self.transitions: list = []
        self.initials: list = []

    def feed(self, line: int, keyword: str, args: list) -> bool:
        if keyword == "automaton":
            if self.header is not None:
                raise SourceDiagnostic(line, "duplicate automaton header", keyword)
            if len(args) != 1:
                raise SourceDiagnostic(line, "automaton: expected exactly one name", keyword)
            self.header = (line, _token(line, args[0], "automaton name"))
        elif keyword == "alphabet":
            for tok in args:
                self.alphabet.setdefault(_token(line, tok, "character"), line)
        elif keyword == "state":
            for tok in args:
                self.states.setdefault(_token(line, tok, "state"), line)
        elif keyword == "init":
            self.initials.append((line, _parse_initial(line, args, keyword)))
        elif keyword == "trans":
            self.transitions.append((line, _parse_transition(line, args, keyword)))
        else:
            return False
        return True

    def build(self, last_line: int) -> Automaton:
        if self.header is None:
            raise SourceDiagnostic(max(last_line, 1), "missing automaton header")
        header_line, name = self.header
        for line, t in self.transitions:
            self._check(line, t.source, t.input, t.target, *t.output)
        for line, i in self.initials:
            self._check(line, i.start, None, None, *i.output)
        if not self.states:
            raise SourceDiagnostic(header_line, "no states declared", name)
        if not self.alphabet:
            raise SourceDiagnostic(header_line, "no alphabet declared", name)
        if not self.initials:
            raise SourceDiagnostic(header_line, "no initial element declared", name)
        try:
            return Automaton(
                name,
                self.states,
                self.alphabet,
                [t for _, t in self.transitions],
                [i for _, i in self.initials],
            )
        except ValidationError as exc:
            raise SourceDiagnostic(header_line, str(exc), name) from exc

    def _check(self, line, source, char, target, *out):
        for s in (source, target):
            if s is not None and s not in self.states:
                raise SourceDiagnostic(line, f"unknown state {s}", s)
        for c in (char, *out):
            if c is not None and c not in self.alphabet:
                raise SourceDiagnostic(line, f"unknown character {c}", c)


def parse_automaton(text: str) -> Automaton:
    builder = _AutomatonBuilder()
    last = 0
    for line, (keyword, *args) in _lines(text):
        last = line
        if not builder.feed(line, keyword, args):
            raise SourceDiagnostic(line, f"unknown keyword {keyword}", keyword)
    return builder.build(last or 1)


def load_automaton(path) -> Automaton:
    return parse_automaton(Path(path).read_text(encoding="utf-8"))


def _out(stream) -> str:
    return " ".join(stream)


def _slash(out) -> str:
    return "/ " + _out(out) if out else "/"


def render_automaton(a: Automaton) -> str:
    """Canonical source text; equal automata render byte-identically."""
    lines = [
        f"automaton {a.name}",
        "alphabet " + " ".join(a.sorted_alphabet()),
        "state " + " ".join(a.sorted_states()),
    ]
    for i in a.sorted_initials():
        lines.append(f"init {i.start} {_slash(i.output)}")
    for t in a.sorted_transitions():
        lines.append(f"trans {t.source} {t.input} -> {t.target} {_slash(t.output)}")
    return "\n".join(lines) + "\n"


def save_automaton(a: Automaton, path) -> None:
    Path(path).write_text(render_automaton(a), encoding="utf-8")


# transcripts


def parse_transcript(
    text: str,
    base_dir=None,
    loader: Optional[Callable[[str], str]] = None,
) -> Transcript:
    """Parse a transcript.

    ``refine <file>`` is resolved with ``loader`` when given, otherwise
    relative to ``base_dir`` (default: the working directory). Rule
    conditions are not checked here; see ``apply_transcript``.
    """
    start: Optional[Automaton] = None
    inline = _AutomatonBuilder()
    inline_used = False
    extension: list = []
    steps: list = []
    last = 0
    for line, (keyword, *args) in _lines(text):
        last = line
        if keyword == "refine":
            if start is not None or inline_used:
                raise SourceDiagnostic(line, "start automaton given twice", keyword)
            if len(args) != 1:
                raise SourceDiagnostic(line, "refine: expected one automaton file", keyword)
            start = _load_reference(line, args[0], base_dir, loader)
        elif keyword in ("automaton", "alphabet", "state", "init", "trans"):
            if start is not None:
                raise SourceDiagnostic(line, "start automaton given twice", keyword)
            if steps or extension:
                raise SourceDiagnostic(line, f"{keyword} after the first step", keyword)
            inline_used = True
            inline.feed(line, keyword, args)
        elif keyword == "extend-alphabet":
            if steps:
                raise SourceDiagnostic(line, "extend-alphabet must precede all steps", keyword)
            if not args:
                raise SourceDiagnostic(line, "extend-alphabet: no characters given", keyword)
            extension.extend(_token(line, tok, "character") for tok in args)
        else:
            steps.append(_parse_step(line, keyword, args))
    if start is None:
        if not inline_used:
            raise SourceDiagnostic(max(last, 1), "missing start automaton ('refine <file>' or inline)")
        start = inline.build(last)
    return Transcript(start, steps, extension)


def _load_reference(line: int, name: str, base_dir, loader) -> Automaton:
    try:
        if loader is not None:
            text = loader(name)
        else:
            text = (Path(base_dir or ".") / name).read_text(encoding="utf-8")
    except OSError as exc:
        raise SourceDiagnostic(line, f"cannot read {name}: {exc.strerror or exc}", name) from exc
    try:
        return parse_automaton(text)
    except SourceDiagnostic as exc:
        raise SourceDiagnostic(line, f"in {name}: {exc}", name) from exc


def _parse_step(line: int, keyword: str, args: list):
    if keyword in ("remove-trans", "add-trans"):
        transitions = frozenset(_parse_transition(line, g, keyword) for g in _groups(args))
        cls = RemoveTransitions if keyword == "remove-trans" else AddTransitions
        return cls(transitions, line=line)
    if keyword == "remove-init":
        return RemoveInitials(frozenset(_parse_initial(line, g, keyword) for g in _groups(args)), line=line)
    if keyword in ("remove-state", "add-state"):
        if not args:
            raise SourceDiagnostic(line, f"{keyword}: no states given", keyword)
        names = frozenset(_token(line, tok, "state") for tok in args)
        return (RemoveStates if keyword == "remove-state" else AddStates)(names, line=line)
    if keyword == "refine-state":
        if "map" not in args:
            raise SourceDiagnostic(line, "refine-state: expected 'map'", keyword)
        cut = args.index("map")
        refined = frozenset(_token(line, tok, "state") for tok in args[:cut])
        table = {}
        for entry in args[cut + 1:]:
            new, sep, old = entry.partition("->")
            if not sep or "->" in old:
                raise SourceDiagnostic(line, f"refine-state: bad map entry {entry}", entry)
            new, old = _token(line, new, "state"), _token(line, old, "state")
            if new in table:
                raise SourceDiagnostic(line, f"refine-state: {new} mapped twice", entry)
            table[new] = old
        return RefineStates(refined, AbstractionMap(table), line=line)
    raise SourceDiagnostic(line, f"unknown step keyword {keyword}", keyword)


def render_transcript(t: Transcript, start_ref: Optional[str] = None) -> str:
    """Render a transcript; the start automaton goes inline unless ``start_ref`` names a file."""
    if start_ref is not None:
        lines = [f"refine {start_ref}"]
    else:
        lines = render_automaton(t.start).splitlines()
    if t.extend_alphabet:
        lines.append("extend-alphabet " + " ".join(sorted(t.extend_alphabet)))
    for step in t.steps:
        lines.append(render_step(step))
    return "\n".join(lines) + "\n"


def render_step(step) -> str:
    if isinstance(step, (RemoveTransitions, AddTransitions)):
        keyword = "remove-trans" if isinstance(step, RemoveTransitions) else "add-trans"
        items = step.remove if isinstance(step, RemoveTransitions) else step.extra
        body = " ; ".join(
            f"{t.source} {t.input} -> {t.target} {_slash(t.output)}"
            for t in sorted(items, key=Transition.sort_key)
        )
        return f"{keyword} {body}"
    if isinstance(step, RemoveInitials):
        body = " ; ".join(f"{i.start} {_slash(i.output)}" for i in sorted(step.remove, key=InitialElement.sort_key))
        return f"remove-init {body}"
    if isinstance(step, RemoveStates):
        return "remove-state " + " ".join(sorted(step.remove))
    if isinstance(step, AddStates):
        return "add-state " + " ".join(sorted(step.extra))
    if isinstance(step, RefineStates):
        table = " ".join(f"{k}->{v}" for k, v in sorted(step.alpha.table.items()))
        return "refine-state " + " ".join(sorted(step.refined_states)) + " map " + table
    raise TypeError(f"not a transcript step: {step!r}")


# executions and DOT


def format_execution(ex: Execution) -> str:
    parts = [f"init {ex.initial.start} {_slash(ex.initial.output)}"]
    for t in ex.steps:
        parts.append(f"{t.source} -{t.input}/{_out(t.output)}-> {t.target}")
    return " ; ".join(parts)


def _dot_id(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(a: Automaton) -> str:
    """GraphViz digraph; edges are labelled ``m/out`` and empty output is left blank."""
    lines = [f"digraph {_dot_id(a.name)} {{", "  rankdir=LR;"]
    for s in a.sorted_states():
        lines.append(f"  {_dot_id(s)} [shape=ellipse];")
    for n, i in enumerate(a.sorted_initials()):
        src = _dot_id(f"__init{n}")
        lines.append(f"  {src} [shape=point, style=invis];")
        lines.append(f"  {src} -> {_dot_id(i.start)} [label={_dot_id('/' + _out(i.output))}];")
    for t in a.sorted_transitions():
        label = f"{t.input}/{_out(t.output)}"
        lines.append(f"  {_dot_id(t.source)} -> {_dot_id(t.target)} [label={_dot_id(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
