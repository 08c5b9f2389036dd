"""Message processing automata: semantics and a refinement calculus."""

from .automaton import (
    Automaton,
    InitialElement,
    PolicyError,
    Transition,
    ValidationError,
    complete_with,
    new_automaton,
)
from .refinement import (
    AbstractionMap,
    AlphabetMismatch,
    InclusionVerdict,
    RuleError,
    Transcript,
    TranscriptError,
    add_states,
    add_transitions,
    apply_transcript,
    check_refines,
    check_refines_bounded,
    extend_alphabet,
    find_simulation,
    refine_states,
    remove_initials,
    remove_states,
    remove_transitions,
)
from .semantics import (
    BehaviorNode,
    Execution,
    OutputResult,
    behavior_tree,
    check_monotone,
    executions,
    output_set,
    output_set_from_tree,
)
from .streams import EmptyStreamError, Stream
from .textio import SourceDiagnostic, export_dot, parse_automaton, parse_transcript, render_automaton

__version__ = "0.1.0"
