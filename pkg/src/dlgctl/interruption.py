"""Belief-state rules for when a listener interrupts.

Information quality:
  A1  the listener holds a relevant, definite belief about P and the speaker
      asserts the opposite (or is modelled as not knowing P)
  A2  the assertion is relevant but ambiguous
Plan quality:
  B1  the listener believes an obstacle to the proposed step, or believes the
      step is already satisfied
  B2  an assertion about the plan is ambiguous

At most one trigger fires per event, in the order A1, A2, B1, B2.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import yaml

from .transcript import Role


class Stance(str, Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    @property
    def definite(self) -> bool:
        return self is not Stance.UNKNOWN

    @property
    def opposite(self) -> "Stance":
        if self is Stance.TRUE:
            return Stance.FALSE
        if self is Stance.FALSE:
            return Stance.TRUE
        return Stance.UNKNOWN


class Trigger(str, Enum):
    A1 = "A1"
    A2 = "A2"
    B1_OBSTACLE = "B1_Obstacle"
    B1_ALREADY_SATISFIED = "B1_AlreadySatisfied"
    B2 = "B2"


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Proposition:
    id: str
    about_plan: bool = False


@dataclass
class BeliefStore:
    """One participant's beliefs, including a model of the other party."""
    stance: dict[str, Stance] = field(default_factory=dict)
    relevant: dict[str, bool] = field(default_factory=dict)
    perceived_ambiguous: dict[str, bool] = field(default_factory=dict)
    # What this participant thinks the other party believes; absent = no view.
    speaker_model: dict[str, Stance] = field(default_factory=dict)
    satisfied_steps: set[str] = field(default_factory=set)

    def stance_of(self, prop: str) -> Stance:
        return self.stance.get(prop, Stance.UNKNOWN)

    def is_relevant(self, prop: str) -> bool:
        return self.relevant.get(prop, False)


@dataclass(frozen=True)
class PlanStep:
    id: str
    satisfied: bool = False
    obstacle_props: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Plan:
    steps: tuple[PlanStep, ...] = ()

    def __post_init__(self):
        ids = [s.id for s in self.steps]
        if len(ids) != len(set(ids)):
            raise ScenarioError("plan step ids must be unique")

    def step(self, step_id: str) -> PlanStep:
        for s in self.steps:
            if s.id == step_id:
                return s
        raise ScenarioError(f"unknown plan step {step_id!r}")


@dataclass(frozen=True)
class AssertionEvent:
    speaker: Role
    proposition: str
    asserted_stance: Stance
    relevant: bool = False
    ambiguous: bool = False
    about_plan: bool = False
    step: str | None = None  # plan step the assertion proposes, if any


@dataclass(frozen=True)
class InterruptTrigger:
    rule: Trigger
    proposition: str
    rationale: str

    def as_dict(self) -> dict:
        return {"rule": self.rule.value, "proposition": self.proposition, "rationale": self.rationale}


def _check_prop(prop: str, known: set[str] | None):
    if known is not None and prop not in known:
        raise ScenarioError(f"unknown proposition {prop!r}")


def evaluate_information_quality(
    listener: BeliefStore, ev: AssertionEvent, propositions: set[str] | None = None
) -> InterruptTrigger | None:
    _check_prop(ev.proposition, propositions)
    p = ev.proposition
    held = listener.stance_of(p)
    if held.definite and listener.is_relevant(p):
        if ev.asserted_stance is held.opposite:
            return InterruptTrigger(Trigger.A1, p, f"listener believes {p} is {held.value}; speaker asserts otherwise")
        if listener.speaker_model.get(p) is Stance.UNKNOWN:
            return InterruptTrigger(Trigger.A1, p, f"listener believes {p} is {held.value}; speaker does not know it")
    if ev.relevant and ev.ambiguous:
        return InterruptTrigger(Trigger.A2, p, "relevant assertion is ambiguous")
    return None


def _steps_in_scope(plan: Plan, ev: AssertionEvent) -> list[PlanStep]:
    if ev.step is not None:
        return [plan.step(ev.step)]
    return list(plan.steps) if ev.about_plan else []


def evaluate_plan_quality(
    listener: BeliefStore, plan: Plan, ev: AssertionEvent, propositions: set[str] | None = None
) -> InterruptTrigger | None:
    _check_prop(ev.proposition, propositions)
    steps = _steps_in_scope(plan, ev)
    for step in steps:
        for p in sorted(step.obstacle_props):
            _check_prop(p, propositions)
            if listener.stance_of(p) is Stance.TRUE:
                return InterruptTrigger(Trigger.B1_OBSTACLE, p, f"{p} blocks step {step.id}")
    if ev.step is not None:
        step = steps[0]
        if step.satisfied or step.id in listener.satisfied_steps:
            return InterruptTrigger(Trigger.B1_ALREADY_SATISFIED, ev.proposition,
                                    f"step {step.id} is already satisfied")
    if ev.about_plan and ev.ambiguous:
        return InterruptTrigger(Trigger.B2, ev.proposition, "assertion about the plan is ambiguous")
    return None


def evaluate(
    listener: BeliefStore, plan: Plan, ev: AssertionEvent, propositions: set[str] | None = None
) -> InterruptTrigger | None:
    return (evaluate_information_quality(listener, ev, propositions)
            or evaluate_plan_quality(listener, plan, ev, propositions))


@dataclass
class Scenario:
    propositions: dict[str, Proposition]
    beliefs: dict[Role, BeliefStore]
    plan: Plan = field(default_factory=Plan)
    script: list[AssertionEvent] = field(default_factory=list)


def _update(listener: BeliefStore, ev: AssertionEvent):
    # Credulous: the listener adopts whatever was asserted.
    listener.stance[ev.proposition] = ev.asserted_stance
    listener.speaker_model[ev.proposition] = ev.asserted_stance
    listener.perceived_ambiguous[ev.proposition] = ev.ambiguous


def step_scenario(
    beliefs: dict[Role, BeliefStore],
    plan: Plan,
    script: Sequence[AssertionEvent],
    propositions: set[str] | None = None,
) -> list[tuple[AssertionEvent, InterruptTrigger | None]]:
    """Replay `script`, evaluating each event against the listener's pre-event state.

    The belief stores passed in are not modified.
    """
    if not script:
        raise ScenarioError("script is empty")
    state = {role: copy.deepcopy(store) for role, store in beliefs.items()}
    transcript = []
    for ev in script:
        listener = state[ev.speaker.other]
        trig = evaluate(listener, plan, ev, propositions)
        transcript.append((ev, trig))
        _update(listener, ev)
    return transcript


def run_scenario(sc: Scenario) -> list[tuple[AssertionEvent, InterruptTrigger | None]]:
    return step_scenario(sc.beliefs, sc.plan, sc.script, set(sc.propositions))


# -- scenario files --------------------------------------------------------

def _stance(value) -> Stance:
    if isinstance(value, bool):
        return Stance.TRUE if value else Stance.FALSE
    if value is None:
        return Stance.UNKNOWN
    try:
        return Stance(str(value).lower())
    except ValueError:
        raise ScenarioError(f"bad stance {value!r} (use true, false or unknown)") from None


def _role(value) -> Role:
    try:
        return Role(str(value).lower())
    except ValueError:
        raise ScenarioError(f"bad role {value!r} (use expert or client)") from None


def scenario_from_mapping(data: dict) -> Scenario:
    """Build a Scenario from a parsed YAML/JSON document.

    Layout::

        propositions: [{id: new_feature, about_plan: false}, ...]
        beliefs:
          client:
            new_feature: {stance: true, relevant: true}
            speaker_model: {new_feature: unknown}
            satisfied_steps: [...]
          expert: {...}
        plan: [{id: take_backup, satisfied: false, obstacles: [takes_long]}]
        script:
          - {speaker: expert, proposition: new_feature, stance: false,
             relevant: true, ambiguous: false, about_plan: false, step: null}
    """
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a mapping")
    props: dict[str, Proposition] = {}
    for entry in data.get("propositions") or []:
        if isinstance(entry, str):
            entry = {"id": entry}
        pid = str(entry["id"])
        if pid in props:
            raise ScenarioError(f"duplicate proposition {pid!r}")
        props[pid] = Proposition(pid, bool(entry.get("about_plan", False)))
    known = set(props)

    steps = []
    for entry in data.get("plan") or []:
        obstacles = frozenset(str(p) for p in entry.get("obstacles", []))
        for p in obstacles:
            _check_prop(p, known)
        steps.append(PlanStep(str(entry["id"]), bool(entry.get("satisfied", False)), obstacles))
    plan = Plan(tuple(steps))
    step_ids = {s.id for s in plan.steps}

    beliefs = {Role.EXPERT: BeliefStore(), Role.CLIENT: BeliefStore()}
    for role_name, entry in (data.get("beliefs") or {}).items():
        store = beliefs[_role(role_name)]
        for key, val in (entry or {}).items():
            if key == "speaker_model":
                for p, st in (val or {}).items():
                    _check_prop(str(p), known)
                    store.speaker_model[str(p)] = _stance(st)
            elif key == "satisfied_steps":
                for sid in val or []:
                    if sid not in step_ids:
                        raise ScenarioError(f"unknown plan step {sid!r}")
                    store.satisfied_steps.add(str(sid))
            else:
                _check_prop(str(key), known)
                val = val if isinstance(val, dict) else {"stance": val}
                store.stance[str(key)] = _stance(val.get("stance"))
                store.relevant[str(key)] = bool(val.get("relevant", False))

    script = []
    for i, entry in enumerate(data.get("script") or []):
        pid = str(entry["proposition"])
        _check_prop(pid, known)
        step = entry.get("step")
        if step is not None and step not in step_ids:
            raise ScenarioError(f"event {i}: unknown plan step {step!r}")
        script.append(AssertionEvent(
            speaker=_role(entry["speaker"]),
            proposition=pid,
            asserted_stance=_stance(entry.get("stance", True)),
            relevant=bool(entry.get("relevant", False)),
            ambiguous=bool(entry.get("ambiguous", False)),
            about_plan=bool(entry.get("about_plan", props[pid].about_plan)),
            step=step,
        ))
    return Scenario(props, beliefs, plan, script)


def load_scenario(path: str | Path) -> Scenario:
    with open(path, encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as exc:
            raise ScenarioError(f"{path}: not valid YAML/JSON ({exc})") from None
    try:
        return scenario_from_mapping(data)
    except KeyError as exc:
        raise ScenarioError(f"{path}: missing field {exc.args[0]!r}") from None
    except (TypeError, AttributeError):
        raise ScenarioError(f"{path}: malformed scenario (see the layout in scenario_from_mapping)") from None
