"""Control-based discourse segmentation for expert/client dialogues."""

__version__ = "0.1.0"

from .classifier import ClassifierConfig, classify_dialogue, classify_one, detect_cue_words
from .control import allocate_control, phase_stats, segment_phases
from .report import analyze_dialogue, run_pipeline
from .shifts import Signal, InterruptionSubtype, analyze_shifts, audit_cues, shift_distribution
from .topics import adjudicate, crosstab, find_central_shift, initiation_dominance, segment_topics
from .transcript import (
    Dialogue, Flag, Role, Turn, Utterance, UtteranceType,
    parse_judges, parse_transcript, serialize_transcript,
)

__all__ = [
    "ClassifierConfig", "classify_dialogue", "classify_one", "detect_cue_words",
    "allocate_control", "phase_stats", "segment_phases",
    "analyze_dialogue", "run_pipeline",
    "Signal", "InterruptionSubtype", "analyze_shifts", "audit_cues", "shift_distribution",
    "adjudicate", "crosstab", "find_central_shift", "initiation_dominance", "segment_topics",
    "Dialogue", "Flag", "Role", "Turn", "Utterance", "UtteranceType",
    "parse_judges", "parse_transcript", "serialize_transcript",
]
