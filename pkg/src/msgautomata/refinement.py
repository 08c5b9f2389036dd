"""Refinement rules, transcripts and refinement oracles.

Each rule takes an automaton and returns a refined one, or raises
:class:`RuleError` when its applicability condition fails. Starting a
development from an arbitrary automaton needs no rule application: the
transcript's start automaton plays that role.

Two oracles cross-check the rules semantically:

* :func:`check_refines_bounded` compares output sets for all input words up
  to a depth. It is a necessary condition for refinement.
* :func:`find_simulation` searches for a chaos-aware simulation relation. It
  is a sufficient condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar, Iterable, Mapping, NamedTuple, Optional

from .automaton import Automaton, InitialElement, Transition, ValidationError, _as_initial, _as_transition
from .semantics import OutputResult
from .streams import Stream, is_token

DEFAULT_DEPTH = 5


class RuleError(ValueError):
    """A refinement rule was applied outside its applicability condition.

    ``rule`` is the rule name (``RemI``, ``AddT``, ...) and ``condition`` a
    short code for the violated condition, e.g. ``already-enabled``.
    """

    def __init__(self, rule: str, condition: str, message: str):
        super().__init__(f"{rule}: {message}")
        self.rule = rule
        self.condition = condition
        self.detail = message


class AlphabetMismatch(ValueError):
    pass


def _fmt_pair(s, m) -> str:
    return f"({s}, {m})"


def _fmt_transition(t: Transition) -> str:
    out = " ".join(t.output)
    return f"{t.source} -{t.input}/{out}-> {t.target}"


def _rebuild(rule: str, a: Automaton, **changes) -> Automaton:
    try:
        return a.replace(**changes)
    except ValidationError as exc:
        raise RuleError(rule, "membership", str(exc)) from exc


# rules


def remove_initials(a: Automaton, keep: Iterable) -> Automaton:
    """(RemI) keep only the given initial elements."""
    keep = frozenset(_as_initial(i) for i in keep)
    stray = keep - a.initials
    if stray:
        names = ", ".join(f"({i.start}, {' '.join(i.output)})" for i in sorted(stray, key=InitialElement.sort_key))
        raise RuleError("RemI", "not-a-subset", f"not initial elements of {a.name}: {names}")
    if not keep:
        raise RuleError("RemI", "empty-keep", "at least one initial element must remain")
    return _rebuild("RemI", a, initials=keep)


def remove_transitions(a: Automaton, remove: Iterable) -> Automaton:
    """(RemT) drop transitions, provided every enabled pair stays enabled."""
    remove = frozenset(_as_transition(t) for t in remove)
    stray = remove - a.transitions
    if stray:
        names = ", ".join(_fmt_transition(t) for t in sorted(stray, key=Transition.sort_key))
        raise RuleError("RemT", "not-a-subset", f"not transitions of {a.name}: {names}")
    kept = a.transitions - remove
    still_enabled = {(t.source, t.input) for t in kept}
    for t in sorted(remove, key=Transition.sort_key):
        if (t.source, t.input) not in still_enabled:
            raise RuleError(
                "RemT",
                "enabledness",
                f"pair {_fmt_pair(t.source, t.input)} would lose its last transition",
            )
    return _rebuild("RemT", a, transitions=kept)


def add_transitions(a: Automaton, extra: Iterable) -> Automaton:
    """(AddT) add transitions on pairs that are disabled before the addition.

    Several new transitions may share one freshly enabled pair.
    """
    try:
        extra = frozenset(_as_transition(t) for t in extra)
    except (TypeError, ValueError) as exc:
        raise RuleError("AddT", "membership", str(exc)) from exc
    for t in sorted(extra, key=Transition.sort_key):
        try:
            a._check_state(t.source)
            a._check_char(t.input)
            a._check_state(t.target)
            a._check_output(t.output)
        except ValidationError as exc:
            raise RuleError("AddT", "membership", str(exc)) from exc
        if a.enabled(t.source, t.input):
            raise RuleError(
                "AddT",
                "already-enabled",
                f"pair {_fmt_pair(t.source, t.input)} is already enabled",
            )
    return _rebuild("AddT", a, transitions=a.transitions | extra)


def remove_states(a: Automaton, keep: Iterable) -> Automaton:
    """(RemS) restrict to ``keep``, which must contain every reachable state."""
    keep = frozenset(keep)
    stray = keep - a.states
    if stray:
        raise RuleError("RemS", "not-a-subset", "unknown states: " + ", ".join(sorted(stray)))
    dropped = a.reachable() - keep
    if dropped:
        raise RuleError(
            "RemS",
            "reachable-state-dropped",
            "reachable states cannot be removed: " + ", ".join(sorted(dropped)),
        )
    transitions = {t for t in a.transitions if t.source in keep and t.target in keep}
    return _rebuild("RemS", a, states=keep, transitions=transitions)


def add_states(a: Automaton, extra: Iterable) -> Automaton:
    """(AddS) add fresh states; they are unreachable and have no transitions."""
    extra = frozenset(extra)
    clash = extra & a.states
    if clash:
        raise RuleError("AddS", "name-collision", "states already exist: " + ", ".join(sorted(clash)))
    return _rebuild("AddS", a, states=a.states | extra)


@dataclass(frozen=True)
class AbstractionMap:
    """A finite table from refined states to original states."""

    table: Mapping

    def __post_init__(self):
        object.__setattr__(self, "table", dict(self.table))

    def __call__(self, state):
        return self.table[state]

    def __hash__(self):
        return hash(frozenset(self.table.items()))

    def preimage(self, state) -> frozenset:
        return frozenset(k for k, v in self.table.items() if v == state)

    def check(self, refined_states: frozenset, original_states: frozenset, rule: str = "RefS") -> None:
        undefined = refined_states - self.table.keys()
        if undefined:
            raise RuleError(rule, "not-total", "map undefined on: " + ", ".join(sorted(undefined)))
        foreign = self.table.keys() - refined_states
        if foreign:
            raise RuleError(rule, "not-total", "map defined outside the refined states: " + ", ".join(sorted(foreign)))
        unknown = set(self.table.values()) - original_states
        if unknown:
            raise RuleError(rule, "membership", "map targets unknown states: " + ", ".join(sorted(unknown)))
        missed = original_states - set(self.table.values())
        if missed:
            raise RuleError(rule, "not-surjective", "states outside the image of the map: " + ", ".join(sorted(missed)))


def refine_states(a: Automaton, refined_states: Iterable, alpha) -> Automaton:
    """(RefS) split states along a total, surjective abstraction map.

    Every original transition from ``s`` to ``t`` is copied between every
    preimage of ``s`` and every preimage of ``t``; initial elements are
    copied to every preimage of their start state.
    """
    refined_states = frozenset(refined_states)
    if not isinstance(alpha, AbstractionMap):
        alpha = AbstractionMap(alpha)
    alpha.check(refined_states, a.states)
    transitions = set()
    for t in a.transitions:
        for s1 in alpha.preimage(t.source):
            for t1 in alpha.preimage(t.target):
                transitions.add(Transition(s1, t.input, t1, t.output))
    initials = {
        InitialElement(s1, i.output) for i in a.initials for s1 in alpha.preimage(i.start)
    }
    return _rebuild("RefS", a, states=refined_states, transitions=transitions, initials=initials)


def extend_alphabet(a: Automaton, chars: Iterable) -> Automaton:
    """Enlarge the alphabet, leaving transitions alone.

    New characters are chaotic in every state. This is not a refinement rule;
    it only serves as a transcript preamble for subclass development.
    """
    chars = frozenset(chars)
    clash = chars & a.alphabet
    if clash:
        raise RuleError("extend-alphabet", "name-collision", "characters already exist: " + ", ".join(sorted(clash)))
    for c in chars:
        if not is_token(c):
            raise RuleError("extend-alphabet", "membership", f"invalid character {c!r}")
    return _rebuild("extend-alphabet", a, alphabet=a.alphabet | chars)


# transcript steps


@dataclass(frozen=True)
class RemoveInitials:
    remove: frozenset
    line: Optional[int] = field(default=None, compare=False)
    kind: ClassVar[str] = "RemI"

    def apply(self, a: Automaton) -> Automaton:
        remove = frozenset(_as_initial(i) for i in self.remove)
        stray = remove - a.initials
        if stray:
            names = ", ".join(f"({i.start}, {' '.join(i.output)})" for i in sorted(stray, key=InitialElement.sort_key))
            raise RuleError("RemI", "not-a-subset", f"not initial elements: {names}")
        return remove_initials(a, a.initials - remove)


@dataclass(frozen=True)
class RemoveTransitions:
    remove: frozenset
    line: Optional[int] = field(default=None, compare=False)
    kind: ClassVar[str] = "RemT"

    def apply(self, a: Automaton) -> Automaton:
        return remove_transitions(a, self.remove)


@dataclass(frozen=True)
class AddTransitions:
    extra: frozenset
    line: Optional[int] = field(default=None, compare=False)
    kind: ClassVar[str] = "AddT"

    def apply(self, a: Automaton) -> Automaton:
        return add_transitions(a, self.extra)


@dataclass(frozen=True)
class RemoveStates:
    remove: frozenset
    line: Optional[int] = field(default=None, compare=False)
    kind: ClassVar[str] = "RemS"

    def apply(self, a: Automaton) -> Automaton:
        stray = frozenset(self.remove) - a.states
        if stray:
            raise RuleError("RemS", "not-a-subset", "unknown states: " + ", ".join(sorted(stray)))
        return remove_states(a, a.states - frozenset(self.remove))


@dataclass(frozen=True)
class AddStates:
    extra: frozenset
    line: Optional[int] = field(default=None, compare=False)
    kind: ClassVar[str] = "AddS"

    def apply(self, a: Automaton) -> Automaton:
        return add_states(a, self.extra)


@dataclass(frozen=True)
class RefineStates:
    refined_states: frozenset
    alpha: AbstractionMap
    line: Optional[int] = field(default=None, compare=False)
    kind: ClassVar[str] = "RefS"

    def apply(self, a: Automaton) -> Automaton:
        return refine_states(a, self.refined_states, self.alpha)


STEP_KINDS = (RemoveInitials, RemoveTransitions, AddTransitions, RemoveStates, AddStates, RefineStates)


@dataclass(frozen=True)
class Transcript:
    """A start automaton, an optional alphabet extension, and rule steps."""

    start: Automaton
    steps: tuple = ()
    extend_alphabet: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "extend_alphabet", frozenset(self.extend_alphabet))


class TranscriptError(RuleError):
    def __init__(self, index: int, cause: RuleError, line: Optional[int] = None):
        where = f"step {index}" + (f" (line {line})" if line else "")
        ValueError.__init__(self, f"{where}: {cause}")
        self.index = index
        self.line = line
        self.rule = cause.rule
        self.condition = cause.condition
        self.detail = cause.detail


def base_automaton(t: Transcript) -> Automaton:
    """The start automaton with the alphabet preamble applied."""
    if t.extend_alphabet:
        try:
            return extend_alphabet(t.start, t.extend_alphabet)
        except RuleError as exc:
            raise TranscriptError(0, exc) from exc
    return t.start


def apply_transcript(t: Transcript) -> tuple:
    """Replay ``t``; returns ``(final, log)`` with one automaton per step.

    Step indices in errors are 1-based; index 0 is the preamble.
    """
    current = base_automaton(t)
    log = []
    for index, step in enumerate(t.steps, start=1):
        try:
            current = step.apply(current)
        except RuleError as exc:
            raise TranscriptError(index, exc, step.line) from exc
        log.append(current)
    return current, log


# tier 1: bounded output-set inclusion


class Counterexample(NamedTuple):
    word: Stream
    result: OutputResult


class InclusionVerdict(NamedTuple):
    holds: bool
    depth: int
    counterexample: Optional[Counterexample] = None


def _check_alphabets(abstract: Automaton, concrete: Automaton) -> None:
    if abstract.alphabet != concrete.alphabet:
        raise AlphabetMismatch(
            f"alphabets differ: {sorted(abstract.alphabet)} vs {sorted(concrete.alphabet)}"
        )


def _start(a: Automaton):
    return frozenset((i.start, tuple(i.output)) for i in a.initials), frozenset()


def _advance(a: Automaton, configs, chaos, m):
    plain, wild = set(), set(chaos)
    index = a._index
    for state, out in configs:
        succ = index.get((state, m))
        if not succ:
            wild.add(out)
        else:
            for target, emitted in succ:
                plain.add((target, out + tuple(emitted)))
    return frozenset(plain), frozenset(wild)


def covers(abstract_results: Iterable, result: OutputResult) -> bool:
    """Whether some abstract result allows ``result``.

    A chaotic abstract result ``p ^ ...`` allows everything that starts with
    ``p``; a plain abstract result allows only the identical plain output.
    """
    abstract_results = set(abstract_results)
    if not result.chaotic and OutputResult(result.prefix, False) in abstract_results:
        return True
    for r in abstract_results:
        if r.chaotic and tuple(result.prefix[: len(r.prefix)]) == tuple(r.prefix):
            return True
    return False


def _uncovered(abs_configs, abs_chaos, con_configs, con_chaos) -> Optional[OutputResult]:
    abs_plain = {out for _, out in abs_configs}

    def allowed_by_chaos(out):
        return any(out[:k] in abs_chaos for k in range(len(out) + 1))

    for out in sorted({out for _, out in con_configs}):
        if out not in abs_plain and not allowed_by_chaos(out):
            return OutputResult(Stream._trusted(out), False)
    for out in sorted(con_chaos):
        if not allowed_by_chaos(out):
            return OutputResult(Stream._trusted(out), True)
    return None


def check_refines_bounded(abstract: Automaton, concrete: Automaton, depth: int = DEFAULT_DEPTH) -> InclusionVerdict:
    """Check output-set coverage for every input word of length <= ``depth``.

    Words are explored shortest first, so a counterexample is a shortest one.
    """
    _check_alphabets(abstract, concrete)
    if depth < 0:
        raise ValueError("depth must be non-negative")
    alphabet = abstract.sorted_alphabet()
    level = [((), _start(abstract), _start(concrete))]
    for n in range(depth + 1):
        for word, (ac, ax), (cc, cx) in level:
            bad = _uncovered(ac, ax, cc, cx)
            if bad is not None:
                return InclusionVerdict(False, depth, Counterexample(Stream._trusted(word), bad))
        if n == depth:
            break
        level = [
            (word + (m,), _advance(abstract, ac, ax, m), _advance(concrete, cc, cx, m))
            for word, (ac, ax), (cc, cx) in level
            for m in alphabet
        ]
    return InclusionVerdict(True, depth)


# tier 2: chaos-aware simulation


def is_simulation(abstract: Automaton, concrete: Automaton, relation) -> bool:
    """Check that ``relation`` (pairs of concrete, abstract state) is a witness."""
    _check_alphabets(abstract, concrete)
    relation = frozenset(relation)
    for s1, s in relation:
        if s1 not in concrete.states or s not in abstract.states:
            return False
        if not _pair_ok(abstract, concrete, s1, s, relation):
            return False
    return _initials_ok(abstract, concrete, relation)


def _pair_ok(abstract, concrete, s1, s, relation) -> bool:
    for m in abstract.alphabet:
        conc = concrete._index.get((s1, m))
        abst = abstract._index.get((s, m))
        if not conc:
            if abst:
                return False
            continue
        if not abst:
            continue
        for t1, out in conc:
            if not any(o == out and (t1, t) in relation for t, o in abst):
                return False
    return True


def _initials_ok(abstract, concrete, relation) -> bool:
    for i1 in concrete.initials:
        if not any(i.output == i1.output and (i1.start, i.start) in relation for i in abstract.initials):
            return False
    return True


def find_simulation(abstract: Automaton, concrete: Automaton) -> Optional[frozenset]:
    """The greatest simulation of ``concrete`` by ``abstract``, or ``None``.

    A pair ``(s1, s)`` relates a concrete state to an abstract one. Where the
    abstract pair ``(s, m)`` is disabled any concrete behaviour is allowed;
    where the concrete pair is disabled, the abstract one must be too.
    """
    _check_alphabets(abstract, concrete)
    relation = {
        (s1, s)
        for s1 in concrete.states
        for s in abstract.states
        if all((s1, m) in concrete._index or (s, m) not in abstract._index for m in abstract.alphabet)
    }
    changed = True
    while changed:
        changed = False
        for pair in sorted(relation):
            if not _pair_ok(abstract, concrete, *pair, relation):
                relation.discard(pair)
                changed = True
    relation = frozenset(relation)
    if not _initials_ok(abstract, concrete, relation):
        return None
    return relation


def compose(inner, outer) -> frozenset:
    """Compose ``inner`` (C to B pairs) with ``outer`` (B to A pairs)."""
    by_mid: dict = {}
    for b, a in outer:
        by_mid.setdefault(b, set()).add(a)
    return frozenset((c, a) for c, b in inner for a in by_mid.get(b, ()))


class RefinementReport(NamedTuple):
    holds: bool
    tier: str
    verdict: InclusionVerdict
    relation: Optional[frozenset] = None


def check_refines(abstract: Automaton, concrete: Automaton, depth: int = DEFAULT_DEPTH) -> RefinementReport:
    """Combine both tiers.

    ``tier`` is ``"simulation"`` when a witness relation was found (refinement
    established) and ``"bounded"`` when only the depth-bounded check decided.
    """
    relation = find_simulation(abstract, concrete)
    verdict = check_refines_bounded(abstract, concrete, depth)
    if relation is not None:
        return RefinementReport(verdict.holds, "simulation", verdict, relation)
    return RefinementReport(verdict.holds, "bounded", verdict)
