"""Dialogue data model and the `.dlg` / judge-vote file formats.

A `.dlg` file holds one expert/client dialogue::

    # comment
    !dialogue C-ex1
    !roles E=expert C=client
    E	A	-	And they are, in your gen you'll find ...
    C	P	-	That's right.

Utterance lines are ``tag<TAB>type<TAB>flags<TAB>text``.  Consecutive lines
from the same speaker are merged into one multi-utterance turn.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, TextIO


class Role(str, Enum):
    EXPERT = "expert"
    CLIENT = "client"

    @property
    def other(self) -> "Role":
        return Role.CLIENT if self is Role.EXPERT else Role.EXPERT


class UtteranceType(str, Enum):
    ASSERTION = "A"
    COMMAND = "C"
    QUESTION = "Q"
    PROMPT = "P"


class Flag(str, Enum):
    REPETITION = "rep"
    SUMMARY = "sum"
    VITAL_FACT = "vital"
    CLARIFICATION = "clar"
    CUE_PREFIX = "cue"


UNCLASSIFIED_CODE = "?"
_FLAG_ORDER = list(Flag)


class TranscriptError(ValueError):
    """Malformed transcript or judge file; carries the offending line number."""

    def __init__(self, reason: str, line: int | None = None, source: str | None = None):
        self.reason = reason
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {reason}" if where else reason)


@dataclass(frozen=True)
class Participant:
    role: Role
    display_tag: str


@dataclass(frozen=True)
class Utterance:
    text: str
    gold_type: UtteranceType | None = None
    flags: frozenset[Flag] = frozenset()
    resolved_type: UtteranceType | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("utterance text is empty")
        if Flag.REPETITION in self.flags and Flag.SUMMARY in self.flags:
            raise ValueError("an utterance cannot be both a repetition and a summary")

    @property
    def type(self) -> UtteranceType | None:
        return self.resolved_type or self.gold_type

    def has(self, flag: Flag) -> bool:
        return flag in self.flags


@dataclass(frozen=True)
class Turn:
    index: int
    speaker: Role
    utterances: tuple[Utterance, ...]

    def __post_init__(self):
        if not self.utterances:
            raise ValueError(f"turn {self.index} has no utterances")

    @property
    def final(self) -> Utterance:
        return self.utterances[-1]


@dataclass(frozen=True)
class Dialogue:
    id: str
    participants: tuple[Participant, Participant]
    turns: tuple[Turn, ...]

    def __post_init__(self):
        if not self.turns:
            raise ValueError(f"dialogue {self.id!r} has no turns")
        roles = {p.role for p in self.participants}
        tags = {p.display_tag for p in self.participants}
        if len(self.participants) != 2 or len(roles) != 2 or len(tags) != 2:
            raise ValueError("a dialogue needs exactly one expert and one client with distinct tags")
        for i, turn in enumerate(self.turns):
            if turn.index != i:
                raise ValueError(f"turn indices must be contiguous from 0 (got {turn.index} at {i})")
            if i and turn.speaker == self.turns[i - 1].speaker:
                raise ValueError(f"turns {i - 1} and {i} share a speaker")

    def tag(self, role: Role) -> str:
        for p in self.participants:
            if p.role is role:
                return p.display_tag
        raise KeyError(role)

    def utterances(self) -> Iterable[tuple[Turn, Utterance]]:
        for turn in self.turns:
            for u in turn.utterances:
                yield turn, u

    def __len__(self) -> int:
        return len(self.turns)


def build_dialogue(
    dialogue_id: str,
    lines: Iterable[tuple[Role, Utterance]],
    tags: dict[Role, str] | None = None,
) -> Dialogue:
    """Assemble a dialogue from (speaker, utterance) pairs, merging same-speaker runs."""
    tags = tags or {Role.EXPERT: "E", Role.CLIENT: "C"}
    grouped: list[tuple[Role, list[Utterance]]] = []
    for role, utt in lines:
        if grouped and grouped[-1][0] is role:
            grouped[-1][1].append(utt)
        else:
            grouped.append((role, [utt]))
    turns = tuple(Turn(i, role, tuple(us)) for i, (role, us) in enumerate(grouped))
    participants = (
        Participant(Role.EXPERT, tags[Role.EXPERT]),
        Participant(Role.CLIENT, tags[Role.CLIENT]),
    )
    return Dialogue(dialogue_id, participants, turns)


def _read(source: str | TextIO) -> str:
    if isinstance(source, str):
        return source
    return source.read()


def _parse_flags(raw: str, lineno: int, name: str | None) -> frozenset[Flag]:
    if raw == "-" or raw == "":
        return frozenset()
    flags = set()
    for item in raw.split(","):
        item = item.strip()
        try:
            flags.add(Flag(item))
        except ValueError:
            raise TranscriptError(f"unknown flag {item!r}", lineno, name) from None
    return frozenset(flags)


def parse_transcript(source: str | TextIO, name: str | None = None) -> Dialogue:
    """Parse `.dlg` text (or an open text stream) into a Dialogue."""
    text = _read(source)
    dialogue_id = None
    tags: dict[str, Role] = {}
    lines: list[tuple[Role, Utterance]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("!"):
            directive, _, rest = line.partition(" ")
            rest = rest.strip()
            if directive == "!dialogue":
                if not rest:
                    raise TranscriptError("!dialogue needs an id", lineno, name)
                if dialogue_id is not None:
                    raise TranscriptError("duplicate !dialogue header", lineno, name)
                dialogue_id = rest
            elif directive == "!roles":
                if tags:
                    raise TranscriptError("duplicate !roles header", lineno, name)
                tags = _parse_roles(rest, lineno, name)
            else:
                raise TranscriptError(f"unknown directive {directive!r}", lineno, name)
            continue

        if dialogue_id is None or not tags:
            raise TranscriptError("utterance before !dialogue and !roles headers", lineno, name)
        fields = raw.split("\t", 3)
        if len(fields) != 4:
            raise TranscriptError("expected 4 tab-separated fields: tag, type, flags, text",
                                  lineno, name)
        tag, code, flag_field, utt_text = (f.strip() for f in fields)
        if tag not in tags:
            raise TranscriptError(f"unknown speaker tag {tag!r}", lineno, name)
        if code == UNCLASSIFIED_CODE:
            gold = None
        else:
            try:
                gold = UtteranceType(code)
            except ValueError:
                raise TranscriptError(f"unknown type code {code!r}", lineno, name) from None
        flags = _parse_flags(flag_field, lineno, name)
        if not utt_text:
            raise TranscriptError("empty utterance text", lineno, name)
        try:
            utt = Utterance(utt_text, gold, flags)
        except ValueError as exc:
            raise TranscriptError(str(exc), lineno, name) from None
        lines.append((tags[tag], utt))

    if dialogue_id is None:
        raise TranscriptError("empty file: missing !dialogue header", None, name)
    if not lines:
        raise TranscriptError("dialogue has no utterances", None, name)
    role_tags = {role: tag for tag, role in tags.items()}
    return build_dialogue(dialogue_id, lines, role_tags)


def _parse_roles(rest: str, lineno: int, name: str | None) -> dict[str, Role]:
    tags: dict[str, Role] = {}
    parts = rest.split()
    if len(parts) != 2:
        raise TranscriptError("!roles needs exactly two tag=role entries", lineno, name)
    for part in parts:
        tag, eq, role = part.partition("=")
        if not eq or not tag:
            raise TranscriptError(f"bad role entry {part!r}", lineno, name)
        try:
            r = Role(role.lower())
        except ValueError:
            raise TranscriptError(f"unknown role {role!r}", lineno, name) from None
        if tag in tags:
            raise TranscriptError(f"duplicate tag {tag!r}", lineno, name)
        tags[tag] = r
    if set(tags.values()) != {Role.EXPERT, Role.CLIENT}:
        raise TranscriptError("!roles must name one expert and one client", lineno, name)
    return tags


def serialize_transcript(d: Dialogue) -> str:
    out = io.StringIO()
    out.write(f"!dialogue {d.id}\n")
    out.write(f"!roles {d.tag(Role.EXPERT)}=expert {d.tag(Role.CLIENT)}=client\n")
    for turn, utt in d.utterances():
        code = utt.gold_type.value if utt.gold_type else UNCLASSIFIED_CODE
        flags = ",".join(f.value for f in _FLAG_ORDER if f in utt.flags) or "-"
        out.write(f"{d.tag(turn.speaker)}\t{code}\t{flags}\t{utt.text}\n")
    return out.getvalue()


def strip_resolved(d: Dialogue) -> Dialogue:
    """Copy of `d` with classifier output removed (what serialization preserves)."""
    turns = tuple(
        replace(t, utterances=tuple(replace(u, resolved_type=None) for u in t.utterances))
        for t in d.turns
    )
    return replace(d, turns=turns)


@dataclass
class JudgeMatrix:
    dialogue_id: str
    votes: list[list[bool]] = field(default_factory=list)

    @property
    def num_judges(self) -> int:
        return len(self.votes[0]) if self.votes else 0

    def __len__(self) -> int:
        return len(self.votes)


_VOTE = {"y": True, "n": False}


def parse_judges(
    source: str | TextIO,
    expected_shifts: int,
    dialogue_id: str = "",
    num_judges: int | None = 5,
    name: str | None = None,
) -> JudgeMatrix:
    """Read a topic-shift vote file: ``ordinal<TAB>v1 ... vJ`` with v in {y, n}.

    Ordinals must be 0, 1, 2, ... (one row per control shift).  Pass
    ``num_judges=None`` to accept any consistent row width.
    """
    rows: list[list[bool]] = []
    width = num_judges
    for lineno, raw in enumerate(_read(source).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        try:
            ordinal = int(fields[0])
        except ValueError:
            raise TranscriptError(f"bad shift ordinal {fields[0]!r}", lineno, name) from None
        if ordinal != len(rows):
            raise TranscriptError(
                f"shift ordinals must run 0,1,2,... (expected {len(rows)}, got {ordinal})",
                lineno, name)
        votes = fields[1:]
        if not votes:
            raise TranscriptError("row has no votes", lineno, name)
        if width is None:
            width = len(votes)
        if len(votes) != width:
            raise TranscriptError(f"ragged row: {len(votes)} votes, expected {width}", lineno, name)
        try:
            rows.append([_VOTE[v.lower()] for v in votes])
        except KeyError as exc:
            raise TranscriptError(f"invalid vote {exc.args[0]!r} (use y or n)", lineno, name) from None
    if len(rows) != expected_shifts:
        raise TranscriptError(
            f"judge file has {len(rows)} rows but the dialogue has {expected_shifts} control shifts",
            None, name)
    return JudgeMatrix(dialogue_id, rows)


def serialize_judges(m: JudgeMatrix) -> str:
    return "".join(
        f"{i}\t" + "\t".join("y" if v else "n" for v in row) + "\n"
        for i, row in enumerate(m.votes)
    )
