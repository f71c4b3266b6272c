"""``dlgctl`` command line: segment, shifts, audit, topics, simulate, report."""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .classifier import DEFAULT_CONFIG, ClassifierConfig
from .interruption import ScenarioError, load_scenario, run_scenario
from .report import CorpusReport, PipelineError, render_dialogue_text, run_pipeline
from .transcript import TranscriptError


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dlgctl", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="lexicon config file (YAML or JSON)")
    common.add_argument("--text", action="store_true", help="human-readable tables instead of JSON")
    common.add_argument("--mechanical", action="store_true",
                        help="show raw per-turn controller runs instead of display phases")

    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in [("segment", "control assignments and phases"),
                        ("shifts", "classified control shifts"),
                        ("audit", "cue-word reliability audit")]:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("transcript")

    p = sub.add_parser("topics", parents=[common], help="topic structure from judge votes")
    p.add_argument("transcript")
    p.add_argument("--judges", required=True, help="judge vote TSV for the transcript")
    p.add_argument("--num-judges", type=int, default=5)

    p = sub.add_parser("report", parents=[common], help="full pipeline over a corpus")
    p.add_argument("transcripts", nargs="+")
    p.add_argument("--judges", action="append", default=[],
                   help="judge vote TSV; repeat once per transcript, in the same order")
    p.add_argument("--num-judges", type=int, default=5)

    p = sub.add_parser("simulate", help="run the interruption rules over a scenario file")
    p.add_argument("scenario")
    p.add_argument("--text", action="store_true")
    return ap


def _simulate(args) -> str:
    sc = load_scenario(args.scenario)
    transcript = run_scenario(sc)
    if args.text:
        lines = []
        for i, (ev, trig) in enumerate(transcript):
            what = f"{ev.speaker.value} asserts {ev.proposition}={ev.asserted_stance.value}"
            lines.append(f"{i:>3} {what:<44} {trig.rule.value + ': ' + trig.rationale if trig else '-'}")
        return "\n".join(lines) + "\n"
    return _dump({
        "schema_version": "1",
        "events": [
            {"index": i, "speaker": ev.speaker.value, "proposition": ev.proposition,
             "stance": ev.asserted_stance.value, "trigger": trig.as_dict() if trig else None}
            for i, (ev, trig) in enumerate(transcript)
        ],
    })


def _single(args, cfg) -> str:
    judges = [args.judges] if args.command == "topics" else None
    report: CorpusReport = run_pipeline([args.transcript], judges, cfg, args.mechanical,
                                        getattr(args, "num_judges", 5))
    a = report.dialogues[0]
    if args.text:
        if args.command == "audit":
            return report.to_text().split("== corpus ==\n", 1)[1]
        return "\n".join(render_dialogue_text(a, args.mechanical)) + "\n"
    full = a.as_dict(args.mechanical)
    if args.command == "segment":
        out = {k: full[k] for k in ("id", "assignments", "phases")}
        out["stats"] = report.aggregates()["phase_stats"]
    elif args.command == "shifts":
        out = {"id": full["id"], "shifts": full["shifts"]}
    elif args.command == "audit":
        out = {"id": full["id"], "cue_audit": full["cue_audit"]}
    else:
        out = {k: full[k] for k in ("id", "adjudication", "topics", "crosstab",
                                     "central_shift", "initiation_dominance")}
    return _dump({"schema_version": "1", **out})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            sys.stdout.write(_simulate(args))
            return 0
        cfg = ClassifierConfig.load(args.config) if args.config else DEFAULT_CONFIG
        if args.command == "report":
            report = run_pipeline(args.transcripts, args.judges or None, cfg, args.mechanical,
                                  args.num_judges)
            sys.stdout.write(report.to_text() if args.text else report.to_json())
        else:
            sys.stdout.write(_single(args, cfg))
    except (PipelineError, TranscriptError, ScenarioError, ValueError, OSError) as exc:
        print(f"dlgctl: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
