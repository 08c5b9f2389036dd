"""Operational and (bounded) denotational semantics.

Two independent routes compute what an automaton may output for a finite
input word:

* :func:`output_set` enumerates executions, i.e. chains of an initial element
  followed by transitions whose inputs spell the word;
* :func:`behavior_tree` unrolls the state-parameterised behaviour up to a depth
  bound, and :func:`output_set_from_tree` reads results back off the tree.

A run that meets a missing ``(state, input)`` pair is chaotic: from then on
any continuation of the output produced so far is allowed. Such a run is
reported as an :class:`OutputResult` with ``chaotic=True``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional

from .automaton import Automaton, InitialElement, Transition, ValidationError
from .streams import Stream, concat, is_prefix


@dataclass(frozen=True)
class Execution:
    initial: InitialElement
    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        state = self.initial.start
        for i, step in enumerate(self.steps):
            if step.source != state:
                raise ValueError(
                    f"step {i} starts in {step.source}, previous element ends in {state}"
                )
            state = step.target

    @property
    def final_state(self):
        return self.steps[-1].target if self.steps else self.initial.start

    @property
    def inputs(self) -> Stream:
        return Stream._trusted(tuple(t.input for t in self.steps))

    @property
    def output(self) -> Stream:
        out = self.initial.output
        for t in self.steps:
            out = concat(out, t.output)
        return out

    def sort_key(self) -> tuple:
        return (self.initial.sort_key(), tuple(t.sort_key() for t in self.steps))


class OutputResult(NamedTuple):
    """Output of one run; when chaotic, it denotes ``prefix ^ u`` for every ``u``."""

    prefix: Stream
    chaotic: bool = False

    def sort_key(self) -> tuple:
        return (self.chaotic, tuple(self.prefix))

    def __str__(self) -> str:
        return f"{self.prefix} ^ ..." if self.chaotic else str(self.prefix)


def _check_word(a: Automaton, word) -> Stream:
    word = Stream(word)
    for m in word:
        if m not in a.alphabet:
            raise ValidationError(f"unknown character {m}")
    return word


def _runs(a: Automaton, word: Stream) -> Iterator[tuple]:
    """Yield ``(execution, complete)``; incomplete runs stop before a chaotic pair."""

    def extend(init, steps, state, pos):
        if pos == len(word):
            yield Execution(init, steps), True
            return
        m = word[pos]
        succ = a.successors(state, m)
        if not succ:
            yield Execution(init, steps), False
            return
        for target, out in sorted(succ, key=lambda p: (p[0], tuple(p[1]))):
            yield from extend(init, steps + (Transition(state, m, target, out),), target, pos + 1)

    for init in a.sorted_initials():
        yield from extend(init, (), init.start, 0)


def executions(a: Automaton, word) -> list:
    """All complete executions on ``word``, canonically ordered."""
    word = _check_word(a, word)
    found = {ex for ex, complete in _runs(a, word) if complete}
    return sorted(found, key=Execution.sort_key)


def truncated_executions(a: Automaton, word) -> list:
    """Maximal run prefixes that stop at a missing pair before ``word`` is consumed."""
    word = _check_word(a, word)
    found = {ex for ex, complete in _runs(a, word) if not complete}
    return sorted(found, key=Execution.sort_key)


def canonical_results(results) -> tuple:
    return tuple(sorted(set(results), key=OutputResult.sort_key))


def output_set(a: Automaton, word) -> tuple:
    """Possible outputs on ``word``, computed by enumerating executions."""
    word = _check_word(a, word)
    results = (OutputResult(ex.output, not complete) for ex, complete in _runs(a, word))
    return canonical_results(results)


@dataclass(frozen=True)
class BehaviorNode:
    """One node of the depth-bounded behaviour unrolling.

    ``children`` is a tuple of ``(character, nodes)`` pairs in alphabet order.
    A chaotic node records the state whose transition is missing and has no
    children.
    """

    state: str
    emitted_so_far: Stream
    children: tuple = ()
    chaotic: bool = False

    def child(self, m) -> tuple:
        for char, nodes in self.children:
            if char == m:
                return nodes
        return ()

    def walk(self) -> Iterator["BehaviorNode"]:
        yield self
        for _, nodes in self.children:
            for node in nodes:
                yield from node.walk()


def _unfold(a: Automaton, state, emitted: Stream, depth: int) -> BehaviorNode:
    if depth == 0:
        return BehaviorNode(state, emitted)
    children = []
    for m in a.sorted_alphabet():
        succ = a.successors(state, m)
        if not succ:
            nodes = (BehaviorNode(state, emitted, (), True),)
        else:
            nodes = tuple(
                _unfold(a, t, concat(emitted, out), depth - 1)
                for t, out in sorted(succ, key=lambda p: (p[0], tuple(p[1])))
            )
        children.append((m, nodes))
    return BehaviorNode(state, emitted, tuple(children))


def behavior_tree(a: Automaton, depth: int) -> tuple:
    """One root per initial element, each unrolled ``depth`` input characters deep."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    return tuple(_unfold(a, i.start, i.output, depth) for i in a.sorted_initials())


def output_set_from_tree(roots, word) -> tuple:
    """Read the output set for ``word`` off a behaviour tree deep enough for it."""
    frontier = list(roots)
    for m in word:
        nxt = []
        for node in frontier:
            if node.chaotic:
                nxt.append(node)
                continue
            if not node.children:
                raise ValueError("behaviour tree is too shallow for this word")
            nxt.extend(node.child(m))
        frontier = nxt
    return canonical_results(OutputResult(n.emitted_so_far, n.chaotic) for n in frontier)


class MonotonicityViolation(NamedTuple):
    path: tuple
    parent: Stream
    child: Stream


def check_monotone(a: Automaton, depth: int) -> tuple:
    """Check that emitted output only grows along every branch.

    Returns ``(True, None)`` or ``(False, MonotonicityViolation)``.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")

    def visit(node, path) -> Optional[MonotonicityViolation]:
        for m, kids in node.children:
            for kid in kids:
                if not is_prefix(node.emitted_so_far, kid.emitted_so_far):
                    return MonotonicityViolation(path + (m,), node.emitted_so_far, kid.emitted_so_far)
                bad = visit(kid, path + (m,))
                if bad:
                    return bad
        return None

    for root in behavior_tree(a, depth):
        bad = visit(root, ())
        if bad:
            return False, bad
    return True, None
