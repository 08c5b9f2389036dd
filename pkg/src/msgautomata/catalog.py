"""Example automata and refinement developments.

Each entry is built in code and also shipped as a source file under
``msgautomata/examples``; the test suite checks that both agree.
"""

from __future__ import annotations

from importlib import resources
from itertools import product
from typing import Iterable, NamedTuple, Union

from .automaton import Automaton, InitialElement, Transition, new_automaton
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
from .streams import Stream, check_token

EMPTY_STATE = "ε"
QUERY = "?"


class CatalogEntry(NamedTuple):
    name: str
    artifact: Union[Automaton, Transcript]
    provenance: str


def source(filename: str) -> str:
    """Text of a shipped example file."""
    return resources.files(__package__).joinpath("examples", filename).read_text(encoding="utf-8")


def load(filename: str):
    """Parse a shipped ``.mpa`` or ``.rft`` file."""
    from .textio import parse_automaton, parse_transcript

    text = source(filename)
    if filename.endswith(".rft"):
        return parse_transcript(text, loader=source)
    return parse_automaton(text)


def parity() -> Automaton:
    """Parity of the ``L`` inputs seen so far, reported on ``?``."""
    return new_automaton(
        "parity",
        {"even", "odd"},
        {"0", "L", "?"},
        [
            ("even", "0", "even", ()),
            ("even", "L", "odd", ()),
            ("even", "?", "even", ("0",)),
            ("odd", "0", "odd", ()),
            ("odd", "L", "even", ()),
            ("odd", "?", "odd", ("L",)),
        ],
        [("even", ())],
    )


def buffer_state(word: Iterable[str]) -> str:
    """State name for a buffer content.

    Single-letter data are concatenated (``ab``); longer tokens are joined
    with dots so names stay unambiguous. The empty buffer is ``ε``.
    """
    word = tuple(word)
    if not word:
        return EMPTY_STATE
    if all(len(d) == 1 for d in word):
        return "".join(word)
    return ".".join(word)


def bounded_buffer(data: Iterable[str], capacity: int = 3) -> Automaton:
    """A FIFO buffer holding at most ``capacity`` items.

    Data characters are stored; ``?`` emits and drops the oldest item. Querying
    the empty buffer and storing into a full one are left unspecified.
    """
    data = sorted(set(data))
    if not data:
        raise ValueError("data alphabet must be nonempty")
    if capacity < 1:
        raise ValueError("capacity must be at least 1")
    for d in data:
        check_token(d, "data character")
        if d == QUERY:
            raise ValueError("the query character cannot be data")
    words = [w for n in range(capacity + 1) for w in product(data, repeat=n)]
    transitions = []
    for w in words:
        if len(w) < capacity:
            for d in data:
                transitions.append(Transition(buffer_state(w), d, buffer_state(w + (d,)), Stream()))
        if w:
            transitions.append(Transition(buffer_state(w), QUERY, buffer_state(w[1:]), Stream((w[0],))))
    return new_automaton(
        "buffer",
        {buffer_state(w) for w in words},
        set(data) | {QUERY},
        transitions,
        [InitialElement(EMPTY_STATE, Stream())],
    )


def figure_start() -> Automaton:
    """Two states, selecting a deselected figure is all that is specified."""
    return new_automaton(
        "Figure",
        {"Selected", "Deselected"},
        {"select", "deselect"},
        [("Deselected", "select", "Selected", ())],
        [("Selected", ()), ("Deselected", ())],
    )


def figure_transcript() -> Transcript:
    return Transcript(
        figure_start(),
        [
            AddStates(frozenset({"Error"})),
            AddTransitions(
                frozenset(
                    {
                        Transition("Selected", "deselect", "Deselected"),
                        Transition("Deselected", "deselect", "Error"),
                        Transition("Deselected", "deselect", "Deselected"),
                    }
                )
            ),
            RemoveTransitions(frozenset({Transition("Deselected", "deselect", "Error")})),
            RemoveStates(frozenset({"Error"})),
            RemoveInitials(frozenset({InitialElement("Deselected")})),
        ],
    )


def figure_final() -> Automaton:
    return new_automaton(
        "Figure",
        {"Selected", "Deselected"},
        {"select", "deselect"},
        [
            ("Deselected", "select", "Selected", ()),
            ("Selected", "deselect", "Deselected", ()),
            ("Deselected", "deselect", "Deselected", ()),
        ],
        [("Selected", ())],
    )


FIGURE2D_ALPHA = AbstractionMap(
    {"SelFilled": "Selected", "SelEmpty": "Selected", "Deselected": "Deselected"}
)


def figure2d_transcript() -> Transcript:
    return Transcript(
        figure_final(),
        [
            AddTransitions(
                frozenset(
                    {
                        Transition("Selected", "fill", "Selected"),
                        Transition("Selected", "empty", "Selected"),
                    }
                )
            ),
            RefineStates(frozenset(FIGURE2D_ALPHA.table), FIGURE2D_ALPHA),
            RemoveTransitions(
                frozenset(
                    {
                        Transition("SelFilled", "fill", "SelEmpty"),
                        Transition("SelEmpty", "fill", "SelEmpty"),
                        Transition("SelFilled", "empty", "SelFilled"),
                        Transition("SelEmpty", "empty", "SelFilled"),
                    }
                )
            ),
            RemoveInitials(frozenset({InitialElement("SelFilled")})),
        ],
        extend_alphabet={"fill", "empty"},
    )


SHIPPED = {
    "parity.mpa": (parity, "parity automaton, two states over 0, L, ?"),
    "buffer_ab_cap3.mpa": (lambda: bounded_buffer({"a", "b"}, 3), "FIFO buffer over a, b expanded to capacity 3"),
    "figure_step5.mpa": (None, "Figure development after removing the error state"),
    "figure_step6.mpa": (figure_final, "final Figure behaviour"),
    "figure.rft": (figure_transcript, "development of class Figure, six steps"),
    "figure2d.rft": (figure2d_transcript, "subclass 2D-Figure with fill and empty"),
}


def entries() -> list:
    """Every shipped example, parsed from its source file."""
    return [CatalogEntry(name, load(name), note) for name, (_, note) in SHIPPED.items()]


def automata() -> list:
    """All catalog automata, including every intermediate of both developments."""
    from .refinement import apply_transcript, base_automaton

    found = [parity(), bounded_buffer({"a", "b"}, 3)]
    for transcript in (figure_transcript(), figure2d_transcript()):
        _, log = apply_transcript(transcript)
        found.append(base_automaton(transcript))
        found.extend(log)
    unique = []
    for a in found:
        if a not in unique:
            unique.append(a)
    return unique
