import random
import time

import pytest

from dlgctl.interruption import (
    AssertionEvent, BeliefStore, Plan, PlanStep, ScenarioError, Stance, Trigger, evaluate,
    evaluate_information_quality, evaluate_plan_quality, load_scenario, run_scenario,
    scenario_from_mapping, step_scenario,
)
from dlgctl.transcript import Role

from oracles import (
    PLANS, PROPS, STANCES, exhaustive_interrupt_cases, interrupt_oracle, replay_oracle, to_event,
    to_plan, to_store,
)

E, CL = Role.EXPERT, Role.CLIENT
T, F, U = Stance.TRUE, Stance.FALSE, Stance.UNKNOWN


def test_a1_opposite_assertion():
    listener = BeliefStore(stance={"p": T}, relevant={"p": True})
    trig = evaluate_information_quality(listener, AssertionEvent(E, "p", F))
    assert trig.rule is Trigger.A1 and trig.proposition == "p"


def test_a1_needs_relevance():
    listener = BeliefStore(stance={"p": T}, relevant={"p": False})
    assert evaluate_information_quality(listener, AssertionEvent(E, "p", F)) is None


def test_a1_speaker_does_not_know():
    listener = BeliefStore(stance={"p": F}, relevant={"p": True}, speaker_model={"p": U})
    assert evaluate_information_quality(listener, AssertionEvent(E, "p", F)).rule is Trigger.A1


def test_a2_relevant_ambiguous():
    trig = evaluate_information_quality(BeliefStore(), AssertionEvent(E, "p", T, relevant=True, ambiguous=True))
    assert trig.rule is Trigger.A2


def test_irrelevant_unambiguous_is_silent():
    assert evaluate(BeliefStore(), Plan(), AssertionEvent(E, "p", T)) is None


def test_b1_obstacle():
    plan = Plan((PlanStep("take_backup", obstacle_props=frozenset({"backup_takes_long"})),))
    listener = BeliefStore(stance={"backup_takes_long": T})
    ev = AssertionEvent(E, "take_backup_first", T, about_plan=True, step="take_backup")
    trig = evaluate_plan_quality(listener, plan, ev)
    assert trig.rule is Trigger.B1_OBSTACLE and trig.proposition == "backup_takes_long"


def test_b1_already_satisfied():
    plan = Plan((PlanStep("relink"),))
    listener = BeliefStore(satisfied_steps={"relink"})
    trig = evaluate_plan_quality(listener, plan, AssertionEvent(E, "q", T, step="relink"))
    assert trig.rule is Trigger.B1_ALREADY_SATISFIED


def test_b2_ambiguous_plan_assertion():
    trig = evaluate_plan_quality(BeliefStore(), Plan(), AssertionEvent(E, "q", T, ambiguous=True, about_plan=True))
    assert trig.rule is Trigger.B2


def test_empty_plan_not_about_plan():
    assert evaluate_plan_quality(BeliefStore(stance={"q": T}), Plan(), AssertionEvent(E, "q", T)) is None


def test_precedence_a1_before_b1():
    plan = Plan((PlanStep("s", obstacle_props=frozenset({"p"})),))
    listener = BeliefStore(stance={"p": T}, relevant={"p": True})
    ev = AssertionEvent(E, "p", F, relevant=True, ambiguous=True, about_plan=True, step="s")
    assert evaluate(listener, plan, ev).rule is Trigger.A1


def test_unknown_ids_are_errors():
    with pytest.raises(ScenarioError):
        evaluate(BeliefStore(), Plan(), AssertionEvent(E, "zz", T), propositions={"p"})
    with pytest.raises(ScenarioError):
        evaluate(BeliefStore(), Plan(), AssertionEvent(E, "p", T, step="nope"))
    with pytest.raises(ScenarioError):
        Plan((PlanStep("a"), PlanStep("a")))


def test_example4_scenario_fires_a1(fixtures_dir):
    out = run_scenario(load_scenario(fixtures_dir / "example4.yaml"))
    assert out[0][1].rule is Trigger.A1
    assert out[1][1] is None


def test_example5_scenario_fires_b1(fixtures_dir):
    out = run_scenario(load_scenario(fixtures_dir / "example5.yaml"))
    assert [t.rule for _, t in out] == [Trigger.B1_OBSTACLE]


def test_single_irrelevant_assertion_no_triggers():
    out = step_scenario({E: BeliefStore(), CL: BeliefStore()}, Plan(), [AssertionEvent(E, "p", T)])
    assert out[0][1] is None


def test_empty_script_rejected():
    with pytest.raises(ScenarioError):
        step_scenario({E: BeliefStore(), CL: BeliefStore()}, Plan(), [])


def test_update_happens_after_evaluation():
    # Updating first would make the listener already agree with the
    # assertion, so A1 could never fire on the first event.
    beliefs = {E: BeliefStore(), CL: BeliefStore(stance={"p": T}, relevant={"p": True})}
    script = [AssertionEvent(E, "p", F), AssertionEvent(E, "p", F)]
    out = step_scenario(beliefs, Plan(), script)
    assert [t.rule if t else None for _, t in out] == [Trigger.A1, None]
    assert beliefs[CL].stance["p"] is T  # inputs untouched


def test_determinism():
    rng = random.Random(4)
    for _ in range(50):
        script = [AssertionEvent(rng.choice([E, CL]), rng.choice(PROPS), rng.choice([T, F, U]),
                                 rng.random() < .5, rng.random() < .5) for _ in range(6)]
        beliefs = {E: BeliefStore(stance={"p0": T}, relevant={"p0": True}), CL: BeliefStore()}
        assert step_scenario(beliefs, Plan(), script) == step_scenario(beliefs, Plan(), script)


def run_exhaustive():
    """(cases, mismatches, rules seen) of engine vs oracle over the bounded space."""
    n = 0
    bad = []
    seen = set()
    for stance, relevant, models, sat, steps, events in exhaustive_interrupt_cases():
        store, plan = to_store(stance, relevant, models, sat), to_plan(steps)
        for ev in events:
            trig = evaluate(store, plan, to_event(ev))
            got = None if trig is None else (trig.rule.value, trig.proposition)
            if got != interrupt_oracle(stance, relevant, models, sat, steps, ev):
                bad.append((stance, relevant, models, steps, ev))
            seen.add(got[0] if got else None)
            n += 1
    return n, bad, seen


def test_engine_matches_truth_table_oracle():
    start = time.perf_counter()
    n, bad, seen = run_exhaustive()
    assert bad == []
    assert seen == {t.value for t in Trigger} | {None}
    assert n >= 3 ** 4 * 24
    assert time.perf_counter() - start < 10


def test_randomized_replay_matches_oracle():
    rng = random.Random(12)
    for _ in range(500):
        steps, sat = rng.choice(PLANS)
        stances = {r: {p: rng.choice(STANCES) for p in PROPS} for r in (E, CL)}
        relevant = {r: {p: rng.random() < 0.6 for p in PROPS} for r in (E, CL)}
        models = {r: {p: rng.choice(STANCES) for p in PROPS if rng.random() < 0.4} for r in (E, CL)}
        sats = {E: set(), CL: set(sat)}
        script = []
        for _ in range(6):
            step = rng.choice([None] + [s[0] for s in steps])
            script.append((rng.choice([E, CL]), {
                "prop": rng.choice(PROPS), "stance": rng.choice(STANCES),
                "relevant": rng.random() < .5, "ambiguous": rng.random() < .5,
                "about_plan": rng.random() < .5, "step": step}))
        beliefs = {r: to_store(stances[r], relevant[r], models[r], sats[r]) for r in (E, CL)}
        got = step_scenario(beliefs, to_plan(steps), [to_event(ev, sp) for sp, ev in script])
        got = [None if t is None else (t.rule.value, t.proposition) for _, t in got]
        assert got == replay_oracle(stances, relevant, models, sats, steps, script)


def test_scenario_mapping_errors():
    with pytest.raises(ScenarioError, match="unknown proposition"):
        scenario_from_mapping({"propositions": ["a"], "script": [{"speaker": "expert", "proposition": "b"}]})
    with pytest.raises(ScenarioError, match="bad role"):
        scenario_from_mapping({"propositions": ["a"], "script": [{"speaker": "judge", "proposition": "a"}]})
    with pytest.raises(ScenarioError, match="bad stance"):
        scenario_from_mapping({"propositions": ["a"], "beliefs": {"client": {"a": "maybe"}}})
    with pytest.raises(ScenarioError, match="duplicate"):
        scenario_from_mapping({"propositions": ["a", "a"]})


def test_scenario_file_missing_field(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text("propositions: [a]\nscript:\n  - {proposition: a}\n")
    with pytest.raises(ScenarioError, match="missing field 'speaker'"):
        load_scenario(path)
