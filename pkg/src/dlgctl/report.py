"""Whole-pipeline analysis of one or more transcripts and report rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .classifier import DEFAULT_CONFIG, ClassifierConfig, classify_dialogue
from .control import ControlAssignment, Phase, allocate_control, phase_stats, segment_phases
from .shifts import ControlShift, CueAudit, analyze_shifts, audit_cues, shift_distribution
from .topics import (
    Adjudication,
    CentralShiftReport,
    Topic,
    adjudicate,
    crosstab,
    find_central_shift,
    initiation_dominance,
    merge_crosstabs,
    segment_topics,
)
from .transcript import Dialogue, JudgeMatrix, Role, TranscriptError, parse_judges, parse_transcript

SCHEMA_VERSION = "1"


class PipelineError(Exception):
    pass


@dataclass
class DialogueAnalysis:
    dialogue: Dialogue
    assignments: list[ControlAssignment]
    phases: list[Phase]
    mechanical_phases: list[Phase]
    shifts: list[ControlShift]
    audit: CueAudit
    adjudication: Adjudication | None = None
    topics: list[Topic] = field(default_factory=list)
    crosstab: dict | None = None
    central_shift: CentralShiftReport | None = None

    def as_dict(self, mechanical: bool = False) -> dict:
        d = self.dialogue
        out = {
            "id": d.id,
            "turns": len(d),
            "assignments": [
                {"turn": a.turn_index, "speaker": d.turns[a.turn_index].speaker.value,
                 "type": d.turns[a.turn_index].final.resolved_type.name.lower(),
                 "controller": a.controller.value, "rule": a.rule_fired.value}
                for a in self.assignments
            ],
            "phases": [_phase_dict(p) for p in (self.mechanical_phases if mechanical else self.phases)],
            "shifts": [s.as_dict() for s in self.shifts],
            "cue_audit": self.audit.as_dict(),
        }
        if self.adjudication is not None:
            out["adjudication"] = self.adjudication.as_dict()
            out["topics"] = [t.as_dict() for t in self.topics]
            out["crosstab"] = self.crosstab
            out["central_shift"] = self.central_shift.as_dict() if self.central_shift else None
            out["initiation_dominance"] = initiation_dominance(self.topics).as_dict()
        return out


def _phase_dict(p: Phase) -> dict:
    return {"controller": p.controller.value, "start_turn": p.start_turn,
            "end_turn": p.end_turn, "signal_turn": p.signal_turn}


def analyze_dialogue(
    d: Dialogue,
    cfg: ClassifierConfig = DEFAULT_CONFIG,
    judges: JudgeMatrix | None = None,
) -> DialogueAnalysis:
    d = classify_dialogue(d, cfg)
    assignments = allocate_control(d)
    shifts = analyze_shifts(d, assignments, cfg)
    result = DialogueAnalysis(
        dialogue=d,
        assignments=assignments,
        phases=segment_phases(assignments),
        mechanical_phases=segment_phases(assignments, mechanical=True),
        shifts=shifts,
        audit=audit_cues(d, shifts, assignments, cfg),
    )
    if judges is not None:
        adj = adjudicate(judges, len(shifts))
        result.adjudication = adj
        result.topics = segment_topics(d, shifts, adj.decisions, assignments)
        result.crosstab = crosstab(shifts, adj.decisions)
        result.central_shift = find_central_shift(result.topics, d.id)
    return result


@dataclass
class CorpusReport:
    dialogues: list[DialogueAnalysis]
    mechanical: bool = False

    def aggregates(self) -> dict:
        all_shifts = [s for a in self.dialogues for s in a.shifts]
        audit = CueAudit()
        for a in self.dialogues:
            audit = audit.merge(a.audit)
        out = {
            "phase_stats": phase_stats([(a.dialogue, a.mechanical_phases) for a in self.dialogues]).as_dict(),
            "shift_distribution": shift_distribution(all_shifts),
            "cue_audit": audit.as_dict(),
        }
        judged = [a for a in self.dialogues if a.adjudication is not None]
        if judged and len(judged) == len(self.dialogues):
            adj = judged[0].adjudication
            for a in judged[1:]:
                adj = adj.merge(a.adjudication)
            topics = [t for a in judged for t in a.topics]
            out["adjudication"] = adj.as_dict()
            out["crosstab"] = merge_crosstabs([a.crosstab for a in judged])
            out["initiation_dominance"] = initiation_dominance(topics).as_dict()
            out["topic_count"] = len(topics)
        return out

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "dialogues": [a.as_dict(self.mechanical) for a in self.dialogues],
            "corpus": self.aggregates(),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = []
        for a in self.dialogues:
            lines += render_dialogue_text(a, self.mechanical)
            lines.append("")
        agg = self.aggregates()
        st = agg["phase_stats"]
        lines.append("== corpus ==")
        lines.append(f"turns {st['turn_count']}  shifts {st['shift_count']}  phases {st['phase_count']}"
                     f"  turns/shift {_fmt(st['mean_turns_per_shift'])}"
                     f"  turns/phase {_fmt(st['mean_turns_per_phase'])}")
        dist = agg["shift_distribution"]
        for name, row in dist["signals"].items():
            lines.append(f"  {name:<14}{row['count']:>4}  {_pct(row['percent'])}")
        for name, row in dist["interruption_subtypes"].items():
            lines.append(f"    {name:<22}{row['count']:>4}  {_pct(row['percent'])}")
        cues = agg["cue_audit"]
        marked = cues["cue_marked_non_prompt"]
        lines.append(f"cues: with shift {cues['cue_with_shift']}, without shift {cues['cue_without_shift']}, "
                     f"failed uptake {cues['signal_without_uptake']}, "
                     f"cue-marked non-prompt shifts {marked['marked']}/{marked['total']}")
        if "crosstab" in agg:
            lines.append("within-topic by signal:")
            for name, row in agg["crosstab"].items():
                lines.append(f"  {name:<20}{row['within_topic']:>4}/{row['total']:<4} {_pct(row['percent_within_topic'])}")
            ini = agg["initiation_dominance"]
            lines.append(f"initiator dominant in {ini['initiator_dominant']}/{ini['topics']} topics"
                         f" ({ini['ties']} ties)")
        return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    return "-" if x is None else f"{x:.2f}"


def _pct(x) -> str:
    return "-" if x is None else f"{x}%"


def render_dialogue_text(a: DialogueAnalysis, mechanical: bool = False) -> list[str]:
    d = a.dialogue
    boundaries: dict[int, list[ControlShift]] = {}
    for s in a.shifts:
        boundaries.setdefault(s.first_turn - 1 if mechanical else s.boundary, []).append(s)
    lines = [f"== {d.id} =="]
    for turn, assign in zip(d.turns, a.assignments):
        text = " / ".join(u.text for u in turn.utterances)
        if len(text) > 60:
            text = text[:57] + "..."
        types = "".join(u.resolved_type.value for u in turn.utterances)
        lines.append(f"{turn.index:>4} {d.tag(turn.speaker):<3}{types:<3}"
                     f"{d.tag(assign.controller)} ctrl  {text}")
        for s in boundaries.get(turn.index, ()):
            label = s.signal.value
            if s.interruption_subtype:
                label += f"/{s.interruption_subtype.value}"
            if s.cue_words:
                label += f" cues={','.join(s.cue_words)}"
            lines.append(f"     ---- shift {s.ordinal}: {d.tag(s.from_role)}->{d.tag(s.to_role)} {label}")
    if a.topics:
        for t in a.topics:
            lines.append(f"topic {t.index}: turns {t.start_turn}-{t.end_turn} initiator "
                         f"{d.tag(t.initiator)} control client={t.count(Role.CLIENT)} "
                         f"expert={t.count(Role.EXPERT)}")
        if a.central_shift:
            cs = a.central_shift
            lines.append(f"central shift: {cs.boundary} of {cs.topic_count} topics before it, "
                         f"consistency {cs.consistency}")
    return lines


def load_dialogue(path: str | Path) -> Dialogue:
    try:
        with open(path, encoding="utf-8") as f:
            return parse_transcript(f, name=str(path))
    except FileNotFoundError:
        raise PipelineError(f"{path}: file not found") from None
    except UnicodeDecodeError as exc:
        raise PipelineError(f"{path}: not UTF-8 ({exc.reason})") from None


def load_judges(path: str | Path, d: Dialogue, expected: int, num_judges: int | None = 5) -> JudgeMatrix:
    try:
        with open(path, encoding="utf-8") as f:
            return parse_judges(f, expected, d.id, num_judges, name=str(path))
    except FileNotFoundError:
        raise PipelineError(f"{path}: file not found") from None


def run_pipeline(
    paths: Sequence[str | Path],
    judge_paths: Sequence[str | Path] | None = None,
    cfg: ClassifierConfig = DEFAULT_CONFIG,
    mechanical: bool = False,
    num_judges: int | None = 5,
) -> CorpusReport:
    """Analyze transcripts (judge files pair with transcripts by position)."""
    if not paths:
        raise PipelineError("no transcript files given")
    if judge_paths and len(judge_paths) != len(paths):
        raise PipelineError(f"{len(judge_paths)} judge files for {len(paths)} transcripts")
    analyses = []
    for i, path in enumerate(paths):
        d = load_dialogue(path)
        judges = None
        if judge_paths:
            # shift count is needed to validate the vote file
            shifts = len(analyze_dialogue(d, cfg).shifts)
            judges = load_judges(judge_paths[i], d, shifts, num_judges)
        analyses.append(analyze_dialogue(d, cfg, judges))
    ids = [a.dialogue.id for a in analyses]
    if len(set(ids)) != len(ids):
        raise PipelineError("duplicate dialogue ids in corpus")
    analyses.sort(key=lambda a: a.dialogue.id)
    return CorpusReport(analyses, mechanical)


__all__ = [
    "CorpusReport", "DialogueAnalysis", "PipelineError", "TranscriptError",
    "analyze_dialogue", "run_pipeline", "load_dialogue", "load_judges",
]
