"""Acceptance criteria AC1-AC9.

Each criterion is a plain function that raises ``AssertionError`` on failure
and returns a one-line summary. Under pytest a PASS/FAIL line per criterion is
printed in the terminal summary; ``python tests/test_acceptance.py`` prints
the same lines directly.
"""

from __future__ import annotations

import os
import random
import subprocess
import sys
import time
from collections import Counter
from itertools import product
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from msgautomata import catalog  # noqa: E402
from msgautomata.automaton import InitialElement, Transition, new_automaton  # noqa: E402
from msgautomata.refinement import (  # noqa: E402
    RuleError,
    add_states,
    add_transitions,
    apply_transcript,
    check_refines_bounded,
    refine_states,
    remove_initials,
    remove_states,
    remove_transitions,
)
from msgautomata.semantics import OutputResult, behavior_tree, check_monotone, output_set, output_set_from_tree  # noqa: E402
from msgautomata.streams import Stream  # noqa: E402
from msgautomata.textio import parse_automaton, render_automaton  # noqa: E402

from randomgen import random_automaton, random_step  # noqa: E402

S = Stream
T = Transition
RANDOM_SEED = 20240601
RANDOM_AUTOMATA = 100
RULE_APPLICATIONS = 500
ORACLE_DEPTH = 5


def random_corpus():
    rng = random.Random(RANDOM_SEED)
    return [random_automaton(rng) for _ in range(RANDOM_AUTOMATA)]


def all_words(alphabet, max_len, min_len=0):
    for n in range(min_len, max_len + 1):
        yield from product(sorted(alphabet), repeat=n)


def covered(abstract_results, result):
    """Coverage, written out independently of the library's own check."""
    for r in abstract_results:
        if r.chaotic and tuple(result.prefix)[: len(r.prefix)] == tuple(r.prefix):
            return True
        if not r.chaotic and not result.chaotic and r.prefix == result.prefix:
            return True
    return False


# AC1


def criterion_1():
    p = catalog.parity()
    assert p.is_total()
    checked = 0
    for w in all_words({"0", "L"}, 5, min_len=1):
        expected = "0" if w.count("L") % 2 == 0 else "L"
        assert output_set(p, w + ("?",)) == (OutputResult(S([expected]), False),), w
        checked += 1
    assert checked == 62
    return f"parity total; parity law exact on {checked} words"


# AC2


def criterion_2():
    buf = catalog.bounded_buffer({"a", "b"}, 3)
    checked = 0
    for w in all_words({"a", "b"}, 3, min_len=1):
        word = w + ("?",) * len(w)
        assert output_set(buf, word) == (OutputResult(S(w), False),), w
        checked += 1
    assert checked == 14
    assert output_set(buf, ["?"]) == (OutputResult(S(), True),)
    return f"FIFO law exact on {checked} data words; <?> from empty is chaotic"


# AC3


def criterion_3():
    final, log = apply_transcript(catalog.figure_transcript())
    assert (len(final.states), len(final.transitions), len(final.initials)) == (2, 3, 1)
    final2d, log2d = apply_transcript(catalog.figure2d_transcript())
    for shipped in ("figure.rft", "figure2d.rft"):
        apply_transcript(catalog.load(shipped))
    return f"Figure: {len(log)} rule steps, final 2/3/1; 2D-Figure: {len(log2d)} rule steps"


# AC4


def criterion_4():
    rng = random.Random(RANDOM_SEED)
    applied = Counter()
    while sum(applied.values()) < RULE_APPLICATIONS:
        a = random_automaton(rng)
        for _ in range(5):
            step = random_step(rng, a)
            b = step.apply(a)
            verdict = check_refines_bounded(a, b, ORACLE_DEPTH)
            assert verdict.holds, (step, verdict)
            applied[step.kind] += 1
            a = b
    assert set(applied) == {"RemI", "RemT", "AddT", "RemS", "AddS", "RefS"}
    total = sum(applied.values())
    kinds = " ".join(f"{k}={applied[k]}" for k in sorted(applied))
    return f"{total}/{total} random rule applications refine at depth {ORACLE_DEPTH} ({kinds})"


# AC5 and AC8


def _forced(base, **changes):
    """What a rule would produce if its condition were ignored."""
    fields = dict(
        name=base.name,
        states=base.states,
        alphabet=base.alphabet,
        transitions=base.transitions,
        initials=base.initials,
    )
    fields.update(changes)
    return new_automaton(**fields)


def negative_cases():
    p = catalog.parity()
    start = catalog.figure_start()
    return [
        ("RemI", "empty-keep", lambda: remove_initials(start, set()), None),
        (
            "RemI",
            "not-a-subset",
            lambda: remove_initials(p, {InitialElement("odd")}),
            lambda: _forced(p, initials={InitialElement("odd")}),
        ),
        (
            "RemT",
            "enabledness",
            lambda: remove_transitions(p, {T("even", "?", "even", S(["0"]))}),
            lambda: _forced(p, transitions=p.transitions - {T("even", "?", "even", S(["0"]))}),
        ),
        ("RemT", "not-a-subset", lambda: remove_transitions(p, {T("even", "?", "odd")}), lambda: p),
        (
            "AddT",
            "already-enabled",
            lambda: add_transitions(p, {T("even", "?", "even", S(["L"]))}),
            lambda: _forced(p, transitions=p.transitions | {T("even", "?", "even", S(["L"]))}),
        ),
        (
            "AddT",
            "already-enabled",
            lambda: add_transitions(start, {T("Deselected", "select", "Deselected")}),
            lambda: _forced(start, transitions=start.transitions | {T("Deselected", "select", "Deselected")}),
        ),
        (
            "RemS",
            "reachable-state-dropped",
            lambda: remove_states(p, {"even"}),
            lambda: _forced(
                p,
                states={"even"},
                transitions={t for t in p.transitions if t.source == "even" and t.target == "even"},
            ),
        ),
        ("AddS", "name-collision", lambda: add_states(p, {"odd"}), lambda: p),
        (
            "RefS",
            "not-surjective",
            lambda: refine_states(p, {"even"}, {"even": "even"}),
            lambda: _forced(
                p,
                states={"even"},
                transitions={t for t in p.transitions if t.source == "even" and t.target == "even"},
            ),
        ),
        ("RefS", "not-total", lambda: refine_states(p, {"even", "odd", "x"}, {"even": "even", "odd": "odd"}), None),
    ]


def criterion_5():
    kinds = set()
    for rule, condition, attempt, _ in negative_cases():
        try:
            attempt()
        except RuleError as exc:
            assert (exc.rule, exc.condition) == (rule, condition), (rule, condition, exc)
            kinds.add(rule)
        else:
            raise AssertionError(f"{rule} {condition}: application was accepted")
    assert kinds == {"RemI", "RemT", "AddT", "RemS", "AddS", "RefS"}
    return f"{len(negative_cases())} violated conditions rejected across all 6 step kinds"


def criterion_8():
    p_abstract = {"parity": catalog.parity(), "Figure": catalog.figure_start()}
    failing = 0
    for rule, condition, _, force in negative_cases():
        if force is None:
            continue
        forced = force()
        abstract = p_abstract[forced.name]
        verdict = check_refines_bounded(abstract, forced, ORACLE_DEPTH)
        if verdict.holds:
            continue
        failing += 1
        assert verdict.counterexample is not None
        word, result = verdict.counterexample
        replay = output_set(forced, word)
        assert result in replay, (rule, condition, word)
        assert not covered(output_set(abstract, word), result), (rule, condition, word)
    assert failing >= 4
    return f"{failing} failing verdicts, every counterexample replays via output_set"


# AC6


def criterion_6():
    subjects = catalog.automata() + random_corpus()
    compared = 0
    for a in subjects:
        roots = behavior_tree(a, 4)
        for w in all_words(a.alphabet, 4):
            assert output_set_from_tree(roots, w) == output_set(a, w), (a, w)
            compared += 1
    return f"execution and tree routes agree on {compared} (automaton, word) pairs"


# AC7


def criterion_7():
    subjects = catalog.automata() + random_corpus()
    for a in subjects:
        ok, witness = check_monotone(a, 6)
        assert ok, (a, witness)
    return f"monotone at depth 6 on {len(subjects)} automata"


# AC9

_RENDER_SCRIPT = (
    "import sys\n"
    "from msgautomata import catalog\n"
    "from msgautomata.textio import render_automaton\n"
    "sys.stdout.write(''.join(render_automaton(a) for a in catalog.automata()))\n"
)


def criterion_9():
    corpus = catalog.automata()
    for a in corpus:
        text = render_automaton(a)
        assert parse_automaton(text) == a
        assert render_automaton(parse_automaton(text)) == text
    outputs = set()
    for seed in ("0", "1", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        proc = subprocess.run(
            [sys.executable, "-c", _RENDER_SCRIPT], env=env, capture_output=True, check=True
        )
        outputs.add(proc.stdout)
    assert len(outputs) == 1
    return f"round trip on {len(corpus)} catalog automata; renders byte-identical across 3 hash seeds"


CRITERIA = {
    1: ("parity replay", criterion_1),
    2: ("bounded buffer replay", criterion_2),
    3: ("development transcripts replay", criterion_3),
    4: ("rule soundness", criterion_4),
    5: ("negative conditions", criterion_5),
    6: ("semantic correspondence", criterion_6),
    7: ("monotonicity", criterion_7),
    8: ("counterexample soundness", criterion_8),
    9: ("round trip", criterion_9),
}


def run_criterion(number):
    title, check = CRITERIA[number]
    started = time.perf_counter()
    try:
        detail = check()
    except AssertionError as exc:
        return False, f"AC{number} FAIL {title}: {exc!r}"[:300]
    elapsed = time.perf_counter() - started
    return True, f"AC{number} PASS {title}: {detail} [{elapsed:.2f}s]"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, acceptance_log):
    ok, line = run_criterion(number)
    acceptance_log.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
