import pytest
from hypothesis import given, settings

from dlgctl.transcript import (
    Flag, JudgeMatrix, Role, TranscriptError, Utterance, UtteranceType,
    parse_judges, parse_transcript, serialize_judges, serialize_transcript, strip_resolved,
)

from conftest import load_example
from gen import dialogues

HEADER = "!dialogue d1\n!roles E=expert C=client\n"


def test_example1_has_eleven_alternating_turns():
    d = load_example(1)
    assert len(d) == 11
    assert [t.speaker for t in d.turns] == [Role.EXPERT, Role.CLIENT] * 5 + [Role.EXPERT]
    assert d.turns[0].utterances[0].gold_type is UtteranceType.ASSERTION
    assert d.turns[9].final.text == "Mm"


def test_same_speaker_lines_merge_into_one_turn():
    d = parse_transcript(HEADER + "E\tA\t-\tFirst part.\nE\tQ\t-\tSecond part?\nC\tA\t-\tAnswer\n")
    assert len(d) == 2
    assert [u.text for u in d.turns[0].utterances] == ["First part.", "Second part?"]


def test_comments_blank_lines_and_whitespace():
    text = "# header comment\n\n" + HEADER + "  E \t ? \t rep, cue \t  Hello there  \n\n# end\n"
    d = parse_transcript(text)
    u = d.turns[0].final
    assert u.text == "Hello there"
    assert u.gold_type is None
    assert u.flags == {Flag.REPETITION, Flag.CUE_PREFIX}


def test_roles_may_be_listed_in_either_order():
    d = parse_transcript("!dialogue x\n!roles K=client X=expert\nX\tA\t-\thi\n")
    assert d.tag(Role.EXPERT) == "X" and d.tag(Role.CLIENT) == "K"


@pytest.mark.parametrize("body, reason, line", [
    ("E\tA\t-\n", "4 tab-separated", 3),
    ("Z\tA\t-\thello\n", "unknown speaker tag", 3),
    ("E\tX\t-\thello\n", "unknown type code", 3),
    ("E\tA\tfoo\thello\n", "unknown flag", 3),
    ("E\tA\trep,sum\thello\n", "both a repetition and a summary", 3),
    ("E\tA\t-\t   \n", "empty utterance", 3),
    ("!speaker E\n", "unknown directive", 3),
])
def test_malformed_lines_report_line_numbers(body, reason, line):
    with pytest.raises(TranscriptError) as exc:
        parse_transcript(HEADER + body)
    assert reason in str(exc.value)
    assert exc.value.line == line


def test_empty_file_is_an_error():
    with pytest.raises(TranscriptError, match="empty file"):
        parse_transcript("")
    with pytest.raises(TranscriptError, match="no utterances"):
        parse_transcript(HEADER)


def test_utterance_before_headers():
    with pytest.raises(TranscriptError) as exc:
        parse_transcript("E\tA\t-\thi\n")
    assert exc.value.line == 1


def test_bad_roles_header():
    with pytest.raises(TranscriptError, match="one expert and one client"):
        parse_transcript("!dialogue x\n!roles E=expert C=expert\nE\tA\t-\thi\n")


def test_single_turn_serializes_to_three_lines():
    d = parse_transcript(HEADER + "E\tA\t-\tThe disc is full.\n")
    text = serialize_transcript(d)
    assert text.splitlines() == ["!dialogue d1", "!roles E=expert C=client",
                                 "E\tA\t-\tThe disc is full."]


def test_example2_round_trips():
    d = load_example(2)
    assert parse_transcript(serialize_transcript(d)) == d


@settings(max_examples=300, deadline=None)
@given(dialogues())
def test_round_trip_property(d):
    again = parse_transcript(serialize_transcript(d))
    assert again == d
    assert all(a.speaker != b.speaker for a, b in zip(again.turns, again.turns[1:]))


def test_strip_resolved_drops_classifier_output():
    from dlgctl.classifier import classify_dialogue
    d = load_example(3)
    assert strip_resolved(classify_dialogue(d)) == d


# -- judge files -------------------------------------------------------------

def test_parse_judges_all_yes():
    m = parse_judges("0\ty\ty\ty\ty\ty\n1\ty y y y y\n2\ty\ty\ty\ty\ty\n", 3)
    assert m.votes == [[True] * 5] * 3


def test_judge_row_count_mismatch():
    text = "".join(f"{i}\ty\ty\ty\ty\ty\n" for i in range(55))
    with pytest.raises(TranscriptError, match="55 rows"):
        parse_judges(text, 56)


@pytest.mark.parametrize("text, reason", [
    ("0\ty\ty\ty\ty\n", "ragged"),
    ("0\ty\ty\ty\ty\tq\n", "invalid vote"),
    ("1\ty\ty\ty\ty\ty\n", "ordinals"),
    ("0\n", "no votes"),
    ("x\ty\n", "bad shift ordinal"),
])
def test_bad_judge_rows(text, reason):
    with pytest.raises(TranscriptError, match=reason):
        parse_judges(text, 1)


def test_judge_count_is_configurable():
    m = parse_judges("0\ty\tn\ty\n", 1, num_judges=3)
    assert m.num_judges == 3
    m = parse_judges("0\ty\tn\n1\tn\tn\n", 2, num_judges=None)
    assert m.num_judges == 2


def test_judges_round_trip():
    m = JudgeMatrix("d", [[True, False, True, True, False], [False] * 5])
    assert parse_judges(serialize_judges(m), 2, "d").votes == m.votes


def test_utterance_invariants():
    with pytest.raises(ValueError):
        Utterance("  ")
    with pytest.raises(ValueError):
        Utterance("x", flags=frozenset({Flag.REPETITION, Flag.SUMMARY}))
