"""Message processing automata.

An automaton is the 4-tuple (S, M, delta, I): states, characters, a transition
relation ``delta`` of ``(source, input, target, output)`` quadruples and a set
of initial elements ``(start, initial output)``. A missing ``(state, input)``
pair is left partial on purpose: it stands for chaos, i.e. any behaviour.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

from .streams import Character, Stream, is_token

StateId = str


class ValidationError(ValueError):
    """An automaton (or an input to one of its queries) violates an invariant."""


class Transition(NamedTuple):
    source: StateId
    input: Character
    target: StateId
    output: Stream = Stream()

    def sort_key(self) -> tuple:
        return (self.source, self.input, self.target, tuple(self.output))


class InitialElement(NamedTuple):
    start: StateId
    output: Stream = Stream()

    def sort_key(self) -> tuple:
        return (self.start, tuple(self.output))


def _as_transition(item) -> Transition:
    if isinstance(item, Transition):
        if isinstance(item.output, Stream):
            return item
        return item._replace(output=Stream(item.output))
    source, char, target, *out = item
    return Transition(source, char, target, Stream(out[0] if out else ()))


def _as_initial(item) -> InitialElement:
    if isinstance(item, InitialElement):
        if isinstance(item.output, Stream):
            return item
        return item._replace(output=Stream(item.output))
    if isinstance(item, str):
        return InitialElement(item, Stream())
    start, *out = item
    return InitialElement(start, Stream(out[0] if out else ()))


def _check_name(name, what):
    if not is_token(name):
        raise ValidationError(f"invalid {what} name {name!r}")


@dataclass(frozen=True)
class Automaton:
    """An immutable, validated message processing automaton.

    Construction runs every membership check, so an ``Automaton`` value that
    exists is always well formed. Fields may be given as any iterables;
    transitions and initials also accept plain tuples.
    """

    name: str
    states: frozenset
    alphabet: frozenset
    transitions: frozenset
    initials: frozenset
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        set_ = object.__setattr__
        try:
            set_(self, "states", frozenset(self.states))
            set_(self, "alphabet", frozenset(self.alphabet))
            set_(self, "transitions", frozenset(_as_transition(t) for t in self.transitions))
            set_(self, "initials", frozenset(_as_initial(i) for i in self.initials))
        except ValidationError:
            raise
        except (TypeError, ValueError) as exc:
            raise ValidationError(str(exc)) from exc
        self._validate()
        index: dict = {}
        for t in self.transitions:
            index.setdefault((t.source, t.input), set()).add((t.target, t.output))
        set_(self, "_index", {k: frozenset(v) for k, v in index.items()})

    def _validate(self) -> None:
        _check_name(self.name, "automaton")
        if not self.states:
            raise ValidationError("empty state set")
        if not self.alphabet:
            raise ValidationError("empty alphabet")
        if not self.initials:
            raise ValidationError("empty initial set")
        for s in self.states:
            _check_name(s, "state")
        for m in self.alphabet:
            _check_name(m, "character")
        for t in self.transitions:
            self._check_state(t.source)
            self._check_char(t.input)
            self._check_state(t.target)
            self._check_output(t.output)
        for i in self.initials:
            self._check_state(i.start)
            self._check_output(i.output)

    def _check_state(self, s) -> None:
        if s not in self.states:
            raise ValidationError(f"unknown state {s}")

    def _check_char(self, m) -> None:
        if m not in self.alphabet:
            raise ValidationError(f"unknown character {m}")

    def _check_output(self, out) -> None:
        for c in out:
            self._check_char(c)

    # canonical views (lexicographic on tokens)

    def sorted_states(self) -> list:
        return sorted(self.states)

    def sorted_alphabet(self) -> list:
        return sorted(self.alphabet)

    def sorted_transitions(self) -> list:
        return sorted(self.transitions, key=Transition.sort_key)

    def sorted_initials(self) -> list:
        return sorted(self.initials, key=InitialElement.sort_key)

    # queries

    def enabled(self, s: StateId, m: Character) -> bool:
        self._check_state(s)
        self._check_char(m)
        return (s, m) in self._index

    def successors(self, s: StateId, m: Character) -> frozenset:
        """All ``(target, output)`` pairs for a transition on ``m`` from ``s``."""
        self._check_state(s)
        self._check_char(m)
        return self._index.get((s, m), frozenset())

    def is_total(self) -> bool:
        return not self.missing_pairs()

    def missing_pairs(self) -> frozenset:
        return frozenset(
            (s, m)
            for s in self.states
            for m in self.alphabet
            if (s, m) not in self._index
        )

    def reachable(self) -> frozenset:
        seen = {i.start for i in self.initials}
        queue = deque(seen)
        while queue:
            s = queue.popleft()
            for m in self.alphabet:
                for t, _ in self._index.get((s, m), ()):
                    if t not in seen:
                        seen.add(t)
                        queue.append(t)
        return frozenset(seen)

    def replace(self, **changes) -> "Automaton":
        fields = dict(
            name=self.name,
            states=self.states,
            alphabet=self.alphabet,
            transitions=self.transitions,
            initials=self.initials,
        )
        fields.update(changes)
        return Automaton(**fields)

    def complete_with(self, policy: Mapping) -> "Automaton":
        return complete_with(self, policy)


def new_automaton(
    name: str,
    states: Iterable[StateId],
    alphabet: Iterable[Character],
    transitions: Iterable = (),
    initials: Iterable = (),
) -> Automaton:
    """Create a validated automaton; raises :class:`ValidationError`."""
    return Automaton(name, states, alphabet, transitions, initials)


class PolicyError(ValidationError):
    pass


def complete_with(a: Automaton, policy: Mapping) -> Automaton:
    """Totalize ``a`` by adding one transition per missing pair.

    ``policy`` maps each missing ``(state, character)`` pair to a
    ``(target, output)`` pair; its domain must be exactly the missing pairs.
    """
    from .refinement import add_transitions

    missing = a.missing_pairs()
    domain = frozenset(policy)
    if domain != missing:
        lacking = sorted(missing - domain)
        extra = sorted(domain - missing)
        parts = []
        if lacking:
            parts.append("missing pairs without policy: " + ", ".join(f"({s},{m})" for s, m in lacking))
        if extra:
            parts.append("policy for enabled or unknown pairs: " + ", ".join(f"({s},{m})" for s, m in extra))
        raise PolicyError("policy domain mismatch; " + "; ".join(parts))
    extra_transitions = []
    for (s, m), (t, out) in policy.items():
        extra_transitions.append(Transition(s, m, t, Stream(out)))
    return add_transitions(a, extra_transitions)
