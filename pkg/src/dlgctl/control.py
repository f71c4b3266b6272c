"""Turn-level control allocation and control phases.

Control is decided from the final utterance of each turn:

* question -> speaker, unless it follows the other party's question or command
* assertion -> speaker, unless it answers the other party's question
* command -> speaker
* prompt -> listener
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .transcript import Dialogue, Role, UtteranceType
from .util import round2


class Rule(str, Enum):
    QUESTION_DEFAULT = "QuestionDefault"
    QUESTION_AFTER_Q_OR_C = "QuestionAfterQorC"
    ASSERTION_DEFAULT = "AssertionDefault"
    ASSERTION_ANSWER = "AssertionAnswer"
    COMMAND = "Command"
    PROMPT = "Prompt"


@dataclass(frozen=True)
class ControlAssignment:
    turn_index: int
    controller: Role
    rule_fired: Rule


@dataclass(frozen=True)
class Phase:
    controller: Role
    start_turn: int
    end_turn: int
    signal_turn: int | None = None

    @property
    def length(self) -> int:
        return self.end_turn - self.start_turn + 1


def control_rule(
    utype: UtteranceType, speaker: Role, prev_type: UtteranceType | None
) -> tuple[Role, Rule]:
    """Controller of one turn given its final type and the previous turn's final type."""
    listener = speaker.other
    if utype is UtteranceType.PROMPT:
        return listener, Rule.PROMPT
    if utype is UtteranceType.COMMAND:
        return speaker, Rule.COMMAND
    if utype is UtteranceType.QUESTION:
        if prev_type in (UtteranceType.QUESTION, UtteranceType.COMMAND):
            return listener, Rule.QUESTION_AFTER_Q_OR_C
        return speaker, Rule.QUESTION_DEFAULT
    if prev_type is UtteranceType.QUESTION:
        return listener, Rule.ASSERTION_ANSWER
    return speaker, Rule.ASSERTION_DEFAULT


def allocate_control(d: Dialogue) -> list[ControlAssignment]:
    out = []
    prev_type = None
    for turn in d.turns:
        utype = turn.final.resolved_type
        if utype is None:
            raise ValueError(f"dialogue {d.id!r} turn {turn.index} is not classified")
        controller, rule = control_rule(utype, turn.speaker, prev_type)
        out.append(ControlAssignment(turn.index, controller, rule))
        prev_type = utype
    return out


def _runs(assignments: Sequence[ControlAssignment]) -> list[tuple[int, int]]:
    runs = []
    start = 0
    for i in range(1, len(assignments)):
        if assignments[i].controller != assignments[i - 1].controller:
            runs.append((start, i - 1))
            start = i
    runs.append((start, len(assignments) - 1))
    return runs


def prompt_triggered(assignments: Sequence[ControlAssignment], start: int) -> bool:
    """Whether the phase starting at `start` began with the old controller's prompt."""
    return start > 0 and assignments[start].rule_fired is Rule.PROMPT


def segment_phases(
    assignments: Sequence[ControlAssignment], mechanical: bool = False
) -> list[Phase]:
    """Maximal same-controller runs.

    By default a prompt-triggered change is displayed with the boundary after
    the prompt turn, so the abdicating prompt closes the outgoing phase (and is
    recorded as its ``signal_turn``).  ``mechanical=True`` keeps the raw
    per-turn controller runs.  A display phase left empty by a prompt in the
    final turn is dropped.
    """
    if not assignments:
        raise ValueError("no control assignments")
    runs = _runs(assignments)
    n = len(assignments)
    starts = [s for s, _ in runs]
    signals: list[int | None] = [None] * len(runs)
    for i in range(1, len(runs)):
        if prompt_triggered(assignments, starts[i]):
            signals[i - 1] = starts[i]
    if mechanical:
        return [Phase(assignments[s].controller, s, e, signals[i]) for i, (s, e) in enumerate(runs)]

    shown = [0] + [s + 1 if signals[i - 1] is not None else s
                   for i, s in enumerate(starts) if i]
    phases = []
    for i, s in enumerate(shown):
        end = shown[i + 1] - 1 if i + 1 < len(shown) else n - 1
        if s > end:
            continue
        phases.append(Phase(assignments[starts[i]].controller, s, end, signals[i]))
    return phases


@dataclass(frozen=True)
class PhaseStats:
    turn_count: int
    shift_count: int
    phase_count: int

    @property
    def mean_turns_per_shift(self) -> float | None:
        if not self.shift_count:
            return None
        return round2(self.turn_count / self.shift_count)

    @property
    def mean_turns_per_phase(self) -> float | None:
        if not self.phase_count:
            return None
        return round2(self.turn_count / self.phase_count)

    def as_dict(self) -> dict:
        return {
            "turn_count": self.turn_count,
            "shift_count": self.shift_count,
            "phase_count": self.phase_count,
            "mean_turns_per_shift": self.mean_turns_per_shift,
            "mean_turns_per_phase": self.mean_turns_per_phase,
        }


def phase_stats(corpus: Sequence[tuple[Dialogue, Sequence[Phase]]]) -> PhaseStats:
    """Corpus turn, shift and phase totals.

    Pass mechanical phases: every controller change is one shift, so the
    shift count per dialogue is ``len(phases) - 1``.
    """
    turns = sum(len(d) for d, _ in corpus)
    phases = sum(len(p) for _, p in corpus)
    shifts = sum(len(p) - 1 for _, p in corpus)
    return PhaseStats(turns, shifts, phases)
