"""Finite message streams.

A character is a plain ``str`` token. A :class:`Stream` is an immutable
tuple of characters; the empty stream is ``Stream()``.
"""

from __future__ import annotations

from typing import Iterable, Iterator

Character = str

RESERVED = ("/", "->", "#", ";")


class EmptyStreamError(ValueError):
    """Raised by :func:`first` and :func:`rest` on the empty stream."""


def is_token(name: object) -> bool:
    if not isinstance(name, str) or not name:
        return False
    if any(ch.isspace() for ch in name):
        return False
    return not any(r in name for r in RESERVED)


def check_token(name: object, what: str = "token") -> str:
    if not is_token(name):
        raise ValueError(f"invalid {what} {name!r}")
    return name  # type: ignore[return-value]


class Stream(tuple):
    """An immutable finite sequence of characters.

    Concatenation with ``+`` and slicing both return streams, so the usual
    tuple idioms keep the type.
    """

    __slots__ = ()

    def __new__(cls, items: Iterable[Character] = ()) -> "Stream":
        if isinstance(items, Stream):
            return items
        if isinstance(items, str):
            # a bare string is one character, not a sequence of letters
            items = (items,)
        items = tuple(items)
        for item in items:
            check_token(item, "character")
        return super().__new__(cls, items)

    @classmethod
    def _trusted(cls, items: tuple) -> "Stream":
        return super().__new__(cls, items)

    def __add__(self, other: Iterable[Character]) -> "Stream":  # type: ignore[override]
        return concat(self, Stream(other))

    def __getitem__(self, index):  # type: ignore[override]
        result = tuple.__getitem__(self, index)
        if isinstance(index, slice):
            return Stream._trusted(result)
        return result

    def __repr__(self) -> str:
        return f"Stream({tuple(self)!r})"

    def __str__(self) -> str:
        return "⟨" + ",".join(self) + "⟩"


EMPTY = Stream()


def concat(s: Stream, t: Stream) -> Stream:
    return Stream._trusted(tuple.__add__(s, t))


def length(s: Stream) -> int:
    return len(s)


def filter_stream(keep: Iterable[Character], s: Stream) -> Stream:
    """Drop every item of ``s`` that is not in ``keep``; order is preserved."""
    keep = frozenset(keep)
    return Stream._trusted(tuple(c for c in s if c in keep))


def first(s: Stream) -> Character:
    if not s:
        raise EmptyStreamError("first of the empty stream")
    return s[0]


def rest(s: Stream) -> Stream:
    if not s:
        raise EmptyStreamError("rest of the empty stream")
    return s[1:]


def is_prefix(s: Stream, t: Stream) -> bool:
    return len(s) <= len(t) and tuple(t[: len(s)]) == tuple(s)


def prefixes(s: Stream) -> Iterator[Stream]:
    """All prefixes of ``s``, shortest first, including ``s`` itself."""
    for i in range(len(s) + 1):
        yield s[:i]


def parse_stream(text: str) -> Stream:
    """Whitespace-separated tokens; blank text is the empty stream."""
    return Stream(text.split())


def format_stream(s: Stream) -> str:
    return " ".join(s)
