"""Control-shift classification and cue-word auditing.

Each controller change is labelled by how the outgoing controller gave up
control: a prompt, a repetition, a summary, or nothing at all (an
interruption).  Interruptions are further split into vital facts, responses
to vital facts, and clarifications.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

from .classifier import DEFAULT_CONFIG, ClassifierConfig, detect_cue_words, has_marker, tokenize
from .control import ControlAssignment, prompt_triggered
from .transcript import Dialogue, Flag, Role, Turn, Utterance, UtteranceType
from .util import percent


class Signal(str, Enum):
    PROMPT = "Prompt"
    REPETITION = "Repetition"
    SUMMARY = "Summary"
    INTERRUPTION = "Interruption"


class InterruptionSubtype(str, Enum):
    VITAL_FACT = "VitalFact"
    RESPONSE_TO_VITAL_FACT = "ResponseToVitalFact"
    CLARIFICATION = "Clarification"
    UNCLASSIFIED = "Unclassified"


STOP_WORDS = frozenset("""
a an the is are was were be been being am it its it's this that that's these those
i i'm i've i'll i'd you you're you've you'll you'd he she we they me him her us them
my your his our their mine yours of in on at to for with as by from into onto about
and or but so if then than there there's here have has had do does did done not no
yes yeah ok okay er um uh mm uhu hmm just very also all some any what which who whom
whose when where why how can could would should will shall may might must
""".split())

SUMMARY_CUES = frozenset({"and", "now", "but", "so"})


@dataclass(frozen=True)
class ControlShift:
    ordinal: int
    boundary: int  # the shift line is drawn after this turn
    from_role: Role
    to_role: Role
    signal: Signal
    first_turn: int  # first turn the new controller holds mechanically
    signal_turn: int | None = None
    interruption_subtype: InterruptionSubtype | None = None
    cue_words: tuple[str, ...] = ()

    def __post_init__(self):
        if self.from_role is self.to_role:
            raise ValueError("a control shift must change the controller")
        if (self.signal is Signal.INTERRUPTION) != (self.interruption_subtype is not None):
            raise ValueError("interruption_subtype is set iff the signal is Interruption")

    def as_dict(self) -> dict:
        return {
            "ordinal": self.ordinal,
            "boundary_after_turn": self.boundary,
            "from": self.from_role.value,
            "to": self.to_role.value,
            "signal": self.signal.value,
            "interruption_subtype": self.interruption_subtype.value if self.interruption_subtype else None,
            "signal_turn": self.signal_turn,
            "first_turn": self.first_turn,
            "cue_words": list(self.cue_words),
        }


def content_words(text: str, cfg: ClassifierConfig = DEFAULT_CONFIG) -> set[str]:
    cues = cfg.single_cues
    return {t for t in tokenize(text) if t not in STOP_WORDS and t not in cues}


def detect_repetition(
    u: Utterance, prior_assertions: Iterable[Utterance], cfg: ClassifierConfig = DEFAULT_CONFIG
) -> bool:
    """An assertion adding no content words beyond earlier assertions."""
    if u.has(Flag.REPETITION):
        return True
    words = content_words(u.text, cfg)
    if not words:
        return False
    seen: set[str] = set()
    for p in prior_assertions:
        seen |= content_words(p.text, cfg)
    return words <= seen


def looks_like_summary(
    u: Utterance, phase_assertions: Sequence[Utterance], cfg: ClassifierConfig = DEFAULT_CONFIG
) -> bool:
    """Advisory: cue-initial and much shorter than the phase's earlier assertions."""
    tokens = tokenize(u.text)
    if not tokens or tokens[0] not in SUMMARY_CUES or not phase_assertions:
        return False
    mean = sum(len(tokenize(a.text)) for a in phase_assertions) / len(phase_assertions)
    return len(tokens) < cfg.summary_brevity * mean


def _assertions_before(d: Dialogue, turn_index: int, start: int = 0) -> list[Utterance]:
    return [u for t in d.turns[start:turn_index] for u in t.utterances
            if u.resolved_type is UtteranceType.ASSERTION]


def _phase_start(assignments: Sequence[ControlAssignment], turn_index: int) -> int:
    who = assignments[turn_index].controller
    i = turn_index
    while i > 0 and assignments[i - 1].controller is who:
        i -= 1
    return i


def outgoing_signal_turn(
    d: Dialogue, assignments: Sequence[ControlAssignment], first_turn: int
) -> int | None:
    """Last turn spoken by the outgoing controller within its phase."""
    outgoing = assignments[first_turn - 1].controller
    start = _phase_start(assignments, first_turn - 1)
    for t in range(first_turn - 1, start - 1, -1):
        if d.turns[t].speaker is outgoing:
            return t
    return None


def _is_repetition(d: Dialogue, turn: Turn, cfg: ClassifierConfig) -> bool:
    u = turn.final
    if u.has(Flag.REPETITION):
        return True
    if u.resolved_type is not UtteranceType.ASSERTION:
        return False
    prior = _assertions_before(d, turn.index) + [
        x for x in turn.utterances[:-1] if x.resolved_type is UtteranceType.ASSERTION]
    return detect_repetition(u, prior, cfg)


def _is_summary(d: Dialogue, turn: Turn, assignments, cfg: ClassifierConfig) -> bool:
    u = turn.final
    if u.has(Flag.SUMMARY):
        return True
    if not cfg.summary_heuristic or u.resolved_type is not UtteranceType.ASSERTION:
        return False
    start = _phase_start(assignments, turn.index)
    return looks_like_summary(u, _assertions_before(d, turn.index, start), cfg)


def _signal_position(d: Dialogue, shift: ControlShift) -> tuple[int, int] | None:
    """(turn, utterance) index of the utterance carrying the shift's signal."""
    if shift.signal is Signal.INTERRUPTION:
        return shift.first_turn, 0
    if shift.signal_turn is None:
        return None
    return shift.signal_turn, len(d.turns[shift.signal_turn].utterances) - 1


def _signal_utterance(d: Dialogue, shift: ControlShift) -> Utterance | None:
    pos = _signal_position(d, shift)
    return None if pos is None else d.turns[pos[0]].utterances[pos[1]]


def _cues(u: Utterance | None, cfg: ClassifierConfig) -> tuple[str, ...]:
    if u is None or u.has(Flag.CUE_PREFIX):
        return ()
    return tuple(c.word for c in detect_cue_words(u, cfg))


def classify_interruption(
    d: Dialogue,
    first_turn: int,
    prior_shifts: Sequence[ControlShift] = (),
    cfg: ClassifierConfig = DEFAULT_CONFIG,
) -> InterruptionSubtype:
    turn = d.turns[first_turn]
    if turn.final.resolved_type is UtteranceType.QUESTION or any(
            u.has(Flag.CLARIFICATION) for u in turn.utterances):
        return InterruptionSubtype.CLARIFICATION
    previous = prior_shifts[-1] if prior_shifts else None
    if previous is not None and previous.interruption_subtype is InterruptionSubtype.VITAL_FACT:
        return InterruptionSubtype.RESPONSE_TO_VITAL_FACT
    if first_turn > 0 and any(u.has(Flag.VITAL_FACT) for u in d.turns[first_turn - 1].utterances):
        return InterruptionSubtype.RESPONSE_TO_VITAL_FACT
    if any(u.has(Flag.VITAL_FACT) or has_marker(u.text, cfg.contradiction_markers)
           for u in turn.utterances):
        return InterruptionSubtype.VITAL_FACT
    return InterruptionSubtype.UNCLASSIFIED


def classify_shift(
    first_turn: int,
    d: Dialogue,
    assignments: Sequence[ControlAssignment],
    ordinal: int = 0,
    prior_shifts: Sequence[ControlShift] = (),
    cfg: ClassifierConfig = DEFAULT_CONFIG,
) -> ControlShift:
    """Label the controller change that takes effect at turn `first_turn`."""
    if first_turn <= 0 or assignments[first_turn].controller is assignments[first_turn - 1].controller:
        raise ValueError(f"no control shift at turn {first_turn}")
    from_role = assignments[first_turn - 1].controller
    to_role = assignments[first_turn].controller
    last = len(assignments) - 1

    if prompt_triggered(assignments, first_turn):
        boundary = first_turn if first_turn < last else first_turn - 1
        shift = ControlShift(ordinal, boundary, from_role, to_role, Signal.PROMPT,
                             first_turn, signal_turn=first_turn)
    else:
        signal = Signal.INTERRUPTION
        sig_turn = outgoing_signal_turn(d, assignments, first_turn)
        if sig_turn is not None:
            turn = d.turns[sig_turn]
            if _is_repetition(d, turn, cfg):
                signal = Signal.REPETITION
            elif _is_summary(d, turn, assignments, cfg):
                signal = Signal.SUMMARY
        if signal is Signal.INTERRUPTION:
            shift = ControlShift(ordinal, first_turn - 1, from_role, to_role, signal, first_turn,
                                 signal_turn=first_turn,
                                 interruption_subtype=classify_interruption(d, first_turn,
                                                                            prior_shifts, cfg))
        else:
            shift = ControlShift(ordinal, first_turn - 1, from_role, to_role, signal, first_turn,
                                 signal_turn=sig_turn)
    return replace(shift, cue_words=_cues(_signal_utterance(d, shift), cfg))


def shift_points(assignments: Sequence[ControlAssignment]) -> list[int]:
    return [i for i in range(1, len(assignments))
            if assignments[i].controller is not assignments[i - 1].controller]


def analyze_shifts(
    d: Dialogue, assignments: Sequence[ControlAssignment], cfg: ClassifierConfig = DEFAULT_CONFIG
) -> list[ControlShift]:
    shifts: list[ControlShift] = []
    for ordinal, t in enumerate(shift_points(assignments)):
        shifts.append(classify_shift(t, d, assignments, ordinal, shifts, cfg))
    return shifts


@dataclass
class CueAudit:
    cue_with_shift: int = 0
    cue_without_shift: int = 0
    signal_without_uptake: int = 0
    per_word: dict[str, dict[str, int]] = field(default_factory=dict)
    cue_marked_shifts: dict[str, int] = field(default_factory=dict)
    shifts_by_signal: dict[str, int] = field(default_factory=dict)
    failed_uptake_turns: list[int] = field(default_factory=list)

    @property
    def cue_marked_non_prompt(self) -> tuple[int, int]:
        """(cue-marked, total) over repetition, summary and interruption shifts."""
        keys = [s.value for s in Signal if s is not Signal.PROMPT]
        return (sum(self.cue_marked_shifts.get(k, 0) for k in keys),
                sum(self.shifts_by_signal.get(k, 0) for k in keys))

    def _bump(self, word: str, key: str):
        row = self.per_word.setdefault(word, {"with_shift": 0, "without_shift": 0})
        row[key] += 1

    def merge(self, other: "CueAudit") -> "CueAudit":
        out = CueAudit(
            self.cue_with_shift + other.cue_with_shift,
            self.cue_without_shift + other.cue_without_shift,
            self.signal_without_uptake + other.signal_without_uptake,
        )
        for src in (self, other):
            for w, row in src.per_word.items():
                for k, v in row.items():
                    out.per_word.setdefault(w, {"with_shift": 0, "without_shift": 0})[k] += v
            for attr in ("cue_marked_shifts", "shifts_by_signal"):
                tgt = getattr(out, attr)
                for k, v in getattr(src, attr).items():
                    tgt[k] = tgt.get(k, 0) + v
        return out

    def as_dict(self) -> dict:
        marked, total = self.cue_marked_non_prompt
        return {
            "cue_with_shift": self.cue_with_shift,
            "cue_without_shift": self.cue_without_shift,
            "signal_without_uptake": self.signal_without_uptake,
            "cue_marked_shifts": {s.value: self.cue_marked_shifts.get(s.value, 0) for s in Signal},
            "cue_marked_non_prompt": {"marked": marked, "total": total},
            "per_word": {w: dict(self.per_word[w]) for w in sorted(self.per_word)},
        }


def _abdication_signal(d: Dialogue, turn: Turn, cfg: ClassifierConfig) -> bool:
    u = turn.final
    if u.resolved_type is UtteranceType.PROMPT:
        return True
    return u.has(Flag.SUMMARY) or _is_repetition(d, turn, cfg)


def audit_cues(
    d: Dialogue,
    shifts: Sequence[ControlShift],
    assignments: Sequence[ControlAssignment],
    cfg: ClassifierConfig = DEFAULT_CONFIG,
) -> CueAudit:
    audit = CueAudit()
    signal_positions = set()
    for s in shifts:
        audit.shifts_by_signal[s.signal.value] = audit.shifts_by_signal.get(s.signal.value, 0) + 1
        pos = _signal_position(d, s)
        if pos is not None and not d.turns[pos[0]].utterances[pos[1]].has(Flag.CUE_PREFIX):
            signal_positions.add(pos)
            if s.cue_words:
                audit.cue_marked_shifts[s.signal.value] = audit.cue_marked_shifts.get(s.signal.value, 0) + 1
    for turn in d.turns:
        for j, u in enumerate(turn.utterances):
            key = "with_shift" if (turn.index, j) in signal_positions else "without_shift"
            for c in detect_cue_words(u, cfg):
                audit._bump(c.word, key)
                if key == "with_shift":
                    audit.cue_with_shift += 1
                else:
                    audit.cue_without_shift += 1

    # No text-visible pause: a signal counts as failed when the signaller
    # holds control again at the very next turn.
    for t in range(1, len(d) - 1):
        turn = d.turns[t]
        speaker = turn.speaker
        if assignments[t - 1].controller is not speaker:
            continue
        if _abdication_signal(d, turn, cfg) and assignments[t + 1].controller is speaker:
            audit.signal_without_uptake += 1
            audit.failed_uptake_turns.append(t)
    return audit


def shift_distribution(shifts: Iterable[ControlShift]) -> dict:
    shifts = list(shifts)
    total = len(shifts)
    by_signal = Counter(s.signal for s in shifts)
    by_sub = Counter(s.interruption_subtype for s in shifts if s.interruption_subtype)
    rep_sum = by_signal[Signal.REPETITION] + by_signal[Signal.SUMMARY]
    return {
        "total": total,
        "signals": {
            s.value: {"count": by_signal[s], "percent": percent(by_signal[s], total)}
            for s in Signal
        },
        "repetition_or_summary": {"count": rep_sum, "percent": percent(rep_sum, total)},
        "interruption_subtypes": {
            k.value: {"count": by_sub[k], "percent": percent(by_sub[k], total)}
            for k in InterruptionSubtype
        },
    }
