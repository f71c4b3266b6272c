"""Utterance-type resolution: Assertion, Command, Question or Prompt.

Gold labels always win.  Unlabelled (``?``) utterances go through a small
ordered rule set that looks only at the utterance text and at the final
utterance of the previous turn.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

import yaml

from .transcript import Dialogue, Role, Utterance, UtteranceType

_TOKEN = re.compile(r"[a-z0-9]+(?:['’.\-][a-z0-9]+)*")

DEFAULT_PROMPTS = (
    "yes", "yeah", "uhu", "uh-huh", "mm", "mhm", "ok", "okay", "right", "fine",
    "that's right", "er", "um", "well",
)
DEFAULT_QUESTION_MARKERS = (
    "so my question is", "my question is", "do you", "did you", "does it", "does that",
    "can you", "could you", "would you", "will you", "have you", "has it", "is it",
    "is that", "is there", "are you", "are there", "what's", "what is", "what are",
    "what does", "what do", "how do", "how does", "how can", "why", "where", "which",
    "who", "when did", "when does", "you mean",
)
DEFAULT_COMMAND_MARKERS = (
    "what i would do", "i would", "you should", "you need to", "you'll need to",
    "try", "please", "make sure", "let's",
)
DEFAULT_CUES = (
    "now", "and", "so", "but", "well", "anyway",
    "as well", "well actually", "in any case", "yeah but",
)
DEFAULT_IMPERATIVES = (
    "initialise", "initialize", "relink", "link", "type", "run", "enter", "put",
    "delete", "remove", "copy", "press", "check", "set", "use", "load", "restart",
    "reboot", "install", "save", "open", "close", "select", "change", "rename", "edit",
)
DEFAULT_YES_NO = ("yes", "yeah", "yep", "no", "nope")
DEFAULT_CONTRADICTION_MARKERS = ("though", "well actually", "actually", "as well")

# Leading fillers skipped before marker matching ("OK. Did you ...").
_SKIPPABLE = {"then", "oh", "ah"}


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower().replace("’", "'"))


def _phrases(entries: Iterable[str]) -> frozenset[tuple[str, ...]]:
    out = set()
    for e in entries:
        toks = tuple(tokenize(e))
        if toks:
            out.add(toks)
    return frozenset(out)


@dataclass(frozen=True)
class ClassifierConfig:
    prompt_lexicon: frozenset[tuple[str, ...]] = field(default_factory=lambda: _phrases(DEFAULT_PROMPTS))
    question_markers: frozenset[tuple[str, ...]] = field(
        default_factory=lambda: _phrases(DEFAULT_QUESTION_MARKERS))
    command_markers: frozenset[tuple[str, ...]] = field(
        default_factory=lambda: _phrases(DEFAULT_COMMAND_MARKERS))
    cue_lexicon: frozenset[tuple[str, ...]] = field(default_factory=lambda: _phrases(DEFAULT_CUES))
    imperative_verbs: frozenset[str] = frozenset(DEFAULT_IMPERATIVES)
    yes_no_tokens: frozenset[str] = frozenset(DEFAULT_YES_NO)
    contradiction_markers: frozenset[tuple[str, ...]] = field(
        default_factory=lambda: _phrases(DEFAULT_CONTRADICTION_MARKERS))
    # Advisory summary heuristic; off unless enabled in the config file.
    summary_heuristic: bool = False
    summary_brevity: float = 0.5

    def __post_init__(self):
        for name in ("prompt_lexicon", "question_markers", "command_markers", "cue_lexicon"):
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")

    @classmethod
    def from_mapping(cls, data: dict) -> "ClassifierConfig":
        kwargs = {}
        for key in ("prompt_lexicon", "question_markers", "command_markers", "cue_lexicon",
                    "contradiction_markers"):
            if key in data:
                kwargs[key] = _phrases(data[key])
        for key in ("imperative_verbs", "yes_no_tokens"):
            if key in data:
                kwargs[key] = frozenset(str(v).lower() for v in data[key])
        if "summary_heuristic" in data:
            kwargs["summary_heuristic"] = bool(data["summary_heuristic"])
        if "summary_brevity" in data:
            kwargs["summary_brevity"] = float(data["summary_brevity"])
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> "ClassifierConfig":
        with open(path, encoding="utf-8") as f:
            try:
                data = yaml.safe_load(f) or {}
            except yaml.YAMLError as exc:
                raise ValueError(f"{path}: not valid YAML/JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ValueError(f"{path}: config must be a mapping of lexicon names to lists")
        return cls.from_mapping(data)

    @property
    def single_cues(self) -> set[str]:
        return {p[0] for p in self.cue_lexicon if len(p) == 1}


DEFAULT_CONFIG = ClassifierConfig()


@dataclass(frozen=True)
class Context:
    """Final utterance of the previous turn, as seen by the classifier."""
    prev_type: UtteranceType
    prev_speaker: Role


def _covers(tokens: list[str], lexicon: frozenset[tuple[str, ...]]) -> bool:
    """True iff `tokens` splits entirely into lexicon entries."""
    if not tokens:
        return False
    n = len(tokens)
    ok = [False] * (n + 1)
    ok[0] = True
    lengths = {len(p) for p in lexicon}
    for i in range(n):
        if not ok[i]:
            continue
        for k in lengths:
            if i + k <= n and tuple(tokens[i:i + k]) in lexicon:
                ok[i + k] = True
    return ok[n]


def _starts_with(tokens: list[str], markers: frozenset[tuple[str, ...]]) -> bool:
    return any(tuple(tokens[:len(m)]) == m for m in markers)


def _strip_leading(tokens: list[str], cfg: ClassifierConfig) -> list[str]:
    skip = {p[0] for p in cfg.prompt_lexicon if len(p) == 1} | cfg.single_cues | _SKIPPABLE
    i = 0
    while i < len(tokens) and tokens[i] in skip:
        i += 1
    return tokens[i:]


def is_prompt_text(text: str, cfg: ClassifierConfig = DEFAULT_CONFIG) -> bool:
    return _covers(tokenize(text), cfg.prompt_lexicon)


def classify_one(
    u: Utterance,
    context: Context | None,
    cfg: ClassifierConfig = DEFAULT_CONFIG,
    speaker: Role | None = None,
) -> UtteranceType:
    """Heuristic type for an unlabelled utterance.

    `context` is the previous turn's final utterance (None at dialogue start).
    `speaker` is only needed to confirm the yes/no-answer rule applies to the
    other party's question; turns alternate, so it defaults to "other".
    """
    tokens = tokenize(u.text)
    after_other_question = (
        context is not None
        and context.prev_type is UtteranceType.QUESTION
        and (speaker is None or context.prev_speaker is not speaker)
    )
    if _covers(tokens, cfg.prompt_lexicon):
        if after_other_question and cfg.yes_no_tokens.intersection(tokens):
            return UtteranceType.ASSERTION
        return UtteranceType.PROMPT

    head = _strip_leading(tokens, cfg)
    if u.text.rstrip().endswith("?") or _starts_with(tokens, cfg.question_markers) \
            or _starts_with(head, cfg.question_markers):
        return UtteranceType.QUESTION
    if _starts_with(tokens, cfg.command_markers) or _starts_with(head, cfg.command_markers):
        return UtteranceType.COMMAND
    if head and head[0] in cfg.imperative_verbs:
        return UtteranceType.COMMAND
    return UtteranceType.ASSERTION


def classify_dialogue(d: Dialogue, cfg: ClassifierConfig = DEFAULT_CONFIG) -> Dialogue:
    turns = []
    context: Context | None = None
    for turn in d.turns:
        resolved = []
        for u in turn.utterances:
            if u.gold_type is not None:
                t = u.gold_type
            else:
                t = classify_one(u, context, cfg, turn.speaker)
            resolved.append(replace(u, resolved_type=t))
        turns.append(replace(turn, utterances=tuple(resolved)))
        context = Context(resolved[-1].resolved_type, turn.speaker)
    return replace(d, turns=tuple(turns))


@dataclass(frozen=True)
class CueOccurrence:
    word: str
    position: int


def _find_phrase(tokens: list[str], phrase: tuple[str, ...]) -> list[int]:
    k = len(phrase)
    return [i for i in range(len(tokens) - k + 1) if tuple(tokens[i:i + k]) == phrase]


def detect_cue_words(u: Utterance | str, cfg: ClassifierConfig = DEFAULT_CONFIG) -> list[CueOccurrence]:
    """Cue words in an utterance, in order of position.

    Single-word cues count only utterance-initially; multi-word phrases count
    anywhere.  At a given position the longest phrase wins.
    """
    text = u if isinstance(u, str) else u.text
    tokens = tokenize(text)
    found: dict[int, tuple[str, ...]] = {}
    for phrase in cfg.cue_lexicon:
        positions = _find_phrase(tokens, phrase) if len(phrase) > 1 else (
            [0] if tokens[:1] == [phrase[0]] else [])
        for pos in positions:
            if pos not in found or len(phrase) > len(found[pos]):
                found[pos] = phrase
    occurrences = []
    covered_until = -1
    for pos in sorted(found):
        if pos <= covered_until:
            continue
        phrase = found[pos]
        occurrences.append(CueOccurrence(" ".join(phrase), pos))
        covered_until = pos + len(phrase) - 1
    return occurrences


def has_marker(text: str, markers: frozenset[tuple[str, ...]]) -> bool:
    tokens = tokenize(text)
    return any(_find_phrase(tokens, m) for m in markers)
