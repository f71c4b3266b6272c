"""Topic shifts from judge votes, topic segmentation and global control structure."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .control import ControlAssignment
from .shifts import ControlShift, Signal
from .transcript import Dialogue, JudgeMatrix, Role
from .util import percent


@dataclass
class Adjudication:
    decisions: list[bool]
    num_judges: int
    # agreement level (size of the larger side) -> number of shifts
    agreement: Counter = field(default_factory=Counter)

    @property
    def unanimous(self) -> int:
        return self.agreement[self.num_judges]

    @property
    def one_dissent(self) -> int:
        return self.agreement[self.num_judges - 1] if self.num_judges > 1 else 0

    def as_dict(self) -> dict:
        return {
            "num_judges": self.num_judges,
            "shifts": len(self.decisions),
            "topic_shifts": sum(self.decisions),
            "unanimous": self.unanimous,
            "one_dissent": self.one_dissent,
            "agreement_levels": {str(k): self.agreement[k] for k in sorted(self.agreement, reverse=True)},
        }

    def merge(self, other: "Adjudication") -> "Adjudication":
        if self.decisions and other.decisions and self.num_judges != other.num_judges:
            raise ValueError("cannot pool adjudications with different judge counts")
        return Adjudication(self.decisions + other.decisions,
                            self.num_judges or other.num_judges,
                            self.agreement + other.agreement)


def adjudicate(matrix: JudgeMatrix, expected_shifts: int | None = None) -> Adjudication:
    """Strict-majority topic-shift decision per shift; ties count as no topic shift."""
    if expected_shifts is not None and len(matrix) != expected_shifts:
        raise ValueError(f"judge matrix has {len(matrix)} rows for {expected_shifts} shifts")
    width = matrix.num_judges
    decisions = []
    agreement: Counter = Counter()
    for row in matrix.votes:
        if len(row) != width:
            raise ValueError("ragged judge matrix")
        yes = sum(row)
        decisions.append(2 * yes > width)
        agreement[max(yes, width - yes)] += 1
    return Adjudication(decisions, width, agreement)


def crosstab(shifts: Sequence[ControlShift], topic_shift: Sequence[bool]) -> dict:
    """Within-topic vs topic-shift counts per signal class."""
    if len(shifts) != len(topic_shift):
        raise ValueError("one topic decision per shift is required")
    rows: dict[str, list[int]] = {s.value: [0, 0] for s in Signal}
    for s, is_topic in zip(shifts, topic_shift):
        rows[s.signal.value][1 if is_topic else 0] += 1
    rep = rows[Signal.REPETITION.value]
    summ = rows[Signal.SUMMARY.value]
    rows["RepetitionOrSummary"] = [rep[0] + summ[0], rep[1] + summ[1]]
    return {
        name: {
            "within_topic": within,
            "topic_shift": shifted,
            "total": within + shifted,
            "percent_within_topic": percent(within, within + shifted),
        }
        for name, (within, shifted) in rows.items()
    }


def merge_crosstabs(tables: Sequence[dict]) -> dict:
    out: dict[str, dict] = {}
    for table in tables:
        for name, row in table.items():
            acc = out.setdefault(name, {"within_topic": 0, "topic_shift": 0, "total": 0})
            for k in acc:
                acc[k] += row[k]
    for row in out.values():
        row["percent_within_topic"] = percent(row["within_topic"], row["total"])
    return out


@dataclass(frozen=True)
class Topic:
    index: int
    start_turn: int
    end_turn: int
    initiator: Role
    control_counts: tuple[tuple[Role, int], ...]

    def count(self, role: Role) -> int:
        return dict(self.control_counts).get(role, 0)

    @property
    def dominant(self) -> Role | None:
        c, e = self.count(Role.CLIENT), self.count(Role.EXPERT)
        if c == e:
            return None
        return Role.CLIENT if c > e else Role.EXPERT

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "start_turn": self.start_turn,
            "end_turn": self.end_turn,
            "initiator": self.initiator.value,
            "control_counts": {r.value: self.count(r) for r in (Role.CLIENT, Role.EXPERT)},
            "dominant": self.dominant.value if self.dominant else None,
        }


def make_topic(index: int, start: int, end: int, initiator: Role, client: int, expert: int) -> Topic:
    return Topic(index, start, end, initiator, ((Role.CLIENT, client), (Role.EXPERT, expert)))


def segment_topics(
    d: Dialogue,
    shifts: Sequence[ControlShift],
    topic_shift: Sequence[bool],
    assignments: Sequence[ControlAssignment],
) -> list[Topic]:
    if len(shifts) != len(topic_shift):
        raise ValueError("one topic decision per shift is required")
    n = len(d)
    starts = [0] + sorted({s.boundary + 1 for s, t in zip(shifts, topic_shift)
                           if t and s.boundary + 1 < n})
    topics = []
    for i, start in enumerate(starts):
        end = starts[i + 1] - 1 if i + 1 < len(starts) else n - 1
        counts = Counter(a.controller for a in assignments[start:end + 1])
        topics.append(make_topic(i, start, end, d.turns[start].speaker,
                                 counts[Role.CLIENT], counts[Role.EXPERT]))
    return topics


@dataclass(frozen=True)
class CentralShiftReport:
    dialogue_id: str
    boundary: int  # number of topics before the central shift
    before: dict[Role, int]
    after: dict[Role, int]
    consistency: int
    topic_count: int

    @property
    def interior(self) -> bool:
        return 0 < self.boundary < self.topic_count

    def as_dict(self) -> dict:
        return {
            "dialogue_id": self.dialogue_id,
            "topics_before": self.boundary,
            "interior": self.interior,
            "before": {r.value: self.before[r] for r in (Role.CLIENT, Role.EXPERT)},
            "after": {r.value: self.after[r] for r in (Role.CLIENT, Role.EXPERT)},
            "consistency": self.consistency,
            "topic_count": self.topic_count,
        }


def central_shift_score(topics: Sequence[Topic], b: int) -> int:
    before = sum(1 for t in topics[:b] if t.count(Role.CLIENT) > t.count(Role.EXPERT))
    after = sum(1 for t in topics[b:] if t.count(Role.EXPERT) > t.count(Role.CLIENT))
    return before + after


def find_central_shift(topics: Sequence[Topic], dialogue_id: str = "") -> CentralShiftReport | None:
    """Split point with client-dominated topics before it and expert-dominated after.

    Candidate splits run from 0 (before the first topic) to len(topics)
    (after the last); ties go to the earliest split.  Returns None for fewer
    than two topics.
    """
    if len(topics) < 2:
        return None
    best_b, best = 0, -1
    score = central_shift_score(topics, 0)
    for b in range(len(topics) + 1):
        if b:
            # moving topic b-1 from "after" to "before"
            t = topics[b - 1]
            c, e = t.count(Role.CLIENT), t.count(Role.EXPERT)
            score += (c > e) - (e > c)
        if score > best:
            best_b, best = b, score

    def total(ts):
        return {r: sum(t.count(r) for t in ts) for r in (Role.CLIENT, Role.EXPERT)}

    return CentralShiftReport(dialogue_id, best_b, total(topics[:best_b]), total(topics[best_b:]),
                              best, len(topics))


@dataclass(frozen=True)
class InitiationDominance:
    dominant: int  # initiator controls strictly more turns
    ties: int
    total: int

    def as_dict(self) -> dict:
        return {"initiator_dominant": self.dominant, "ties": self.ties, "topics": self.total}


def initiation_dominance(topics: Sequence[Topic]) -> InitiationDominance:
    dominant = ties = 0
    for t in topics:
        mine, theirs = t.count(t.initiator), t.count(t.initiator.other)
        if mine > theirs:
            dominant += 1
        elif mine == theirs:
            ties += 1
    return InitiationDominance(dominant, ties, len(topics))
