import pytest

from blockmate.actions import default_catalog, load_catalog, serialize_catalog
from blockmate.comfort import ComfortConfig, apply_offset, init_comfort
from blockmate.game import Board, Color, apply_move, is_complete_valid, new_board
from blockmate.personality import PersonalityVector, Trait, TraitPole, archetypes
from blockmate.planner import (
    NoPlan,
    Plan,
    PlanState,
    format_plan,
    plan,
    replan,
    simulate,
    validate_plan,
)

CATALOG = default_catalog()


def state_for(p, board=None, turn="robot", cfg=ComfortConfig(), **kw):
    return PlanState(
        board=board if board is not None else new_board(),
        turn=turn,
        comfort=init_comfort(p, cfg),
        **kw,
    )


def count_motivates(pl: Plan, pole=None):
    return sum(1 for s in pl.steps if s.is_motivate and (pole is None or s.pole is pole))


def placements(pl: Plan):
    return [s for s in pl.steps if s.action_id in
            ("pick_place_precisely", "pick_place_wrongly", "replace_human", "wait_human")]


def test_neutral_plan_nine_placements_no_motivates():
    p = PersonalityVector(0, 0, 0)
    pl = plan(state_for(p, turn="human"), CATALOG, p, speaking=True, horizon=40)
    assert count_motivates(pl) == 0
    assert len(placements(pl)) == 9
    res = validate_plan(pl, state_for(p, turn="human"), CATALOG, p, True)
    assert res.ok, res.reason


def test_small_horizon_no_plan():
    p = PersonalityVector(0, 0, 0)
    with pytest.raises(NoPlan):
        plan(state_for(p), CATALOG, p, speaking=True, horizon=3)


def test_disagreeable_prefers_replacing():
    """The complementary choice follows the pole the offsets credit."""
    p = PersonalityVector(0, 0, -1)
    pl = plan(state_for(p), CATALOG, p, speaking=True, horizon=40)
    ids = [s.action_id for s in pl.steps]
    assert "replace_human" in ids
    assert "cue_human_turn" not in ids and "wait_human" not in ids


def test_disagreeable_motivates_when_replacing_pays_less():
    """With a small replace offset, decay wins and Motivate(LA) appears before
    the predicted magnitude would cross the threshold."""
    doc = serialize_catalog(CATALOG).replace("offset LA 0.2", "offset LA 0.04")
    catalog = load_catalog(doc)
    p = PersonalityVector(0, 0, -1)
    pl = plan(state_for(p), catalog, p, speaking=True, horizon=40)
    assert any(s.action_id == "replace_human" for s in pl.steps)
    assert count_motivates(pl, TraitPole.LA) >= 1
    # every trace point keeps |signed| >= Th
    for vals in pl.expected_trace:
        assert abs(vals[Trait.AGREEABLENESS]) >= 0.3 - 1e-9
    res = validate_plan(pl, state_for(p), catalog, p, True)
    assert res.ok, res.reason


def test_agreeable_cues_instead_of_replacing():
    p = PersonalityVector(0, 0, 1)
    pl = plan(state_for(p, turn="human"), CATALOG, p, speaking=True, horizon=40)
    ids = [s.action_id for s in pl.steps]
    assert "cue_human_turn" in ids
    assert "replace_human" not in ids


def test_unscrupulous_plans_wrong_placements_with_corrections():
    p = PersonalityVector(-1, 0, 0)
    pl = plan(state_for(p, turn="human"), CATALOG, p, speaking=False, horizon=40)
    ids = [s.action_id for s in pl.steps]
    assert "pick_place_wrongly" in ids
    wrong_idx = ids.index("pick_place_wrongly")
    assert ids[wrong_idx + 1] == "remove_misplaced"
    assert ids[wrong_idx + 2] == "pick_place_precisely"
    res = validate_plan(pl, state_for(p, turn="human"), CATALOG, p, False)
    assert res.ok, res.reason


def test_simulate_decay_trace():
    p = PersonalityVector(0, 1, 0)
    st = state_for(p, turn="human")
    steps = plan(st, CATALOG, p, speaking=False, horizon=40)
    trace = simulate(steps, st, CATALOG, p)
    assert trace == list(steps.expected_trace)
    # first three sound-cue/wait/place steps only decay: 0.9, 0.8, ...
    assert trace[0][Trait.EXTROVERSION] == pytest.approx(0.9)


def test_empty_plan_trace_is_initial():
    p = PersonalityVector(0, 1, 0)
    st = state_for(p)
    pl = Plan((), init_comfort(p, ComfortConfig()).signed_values(), ())
    assert simulate(pl, st, CATALOG, p) == []


def test_replan_after_misplacement_starts_with_removal():
    p = PersonalityVector(-1, 0, 0)
    b = apply_move(new_board(), (1, 1), Color.RED)           # target: Red center
    b = apply_move(b, (0, 1), Color.RED, allow_wrong=True)   # tagged misplacement
    st = state_for(p, board=b, turn="robot")
    pl = replan(st, CATALOG, p, speaking=False, horizon=40)
    assert pl.steps[0].action_id == "remove_misplaced"
    assert pl.steps[0].cell == (0, 1)
    assert pl.steps[1].action_id == "pick_place_precisely"


def test_replan_below_threshold_starts_with_motivate():
    p = PersonalityVector(0, 0, 1)
    st = state_for(p, turn="human")
    low = apply_offset(st.comfort, Trait.AGREEABLENESS, -0.85)  # 0.15 < Th
    st = PlanState(board=st.board, turn=st.turn, comfort=low)
    pl = replan(st, CATALOG, p, speaking=True, horizon=40)
    assert pl.steps[0].is_motivate
    assert pl.steps[0].pole is TraitPole.HA


def test_replan_from_unchanged_state_is_suffix():
    p = PersonalityVector(0, 0, 1)
    st = state_for(p, turn="human")
    pl = plan(st, CATALOG, p, speaking=True, horizon=40)
    # execute the first two steps exactly as predicted
    from blockmate.planner import _predict_task

    mid = _predict_task(st, CATALOG.get(pl.steps[0].action_id), pl.steps[0].cell, p)
    mid = _predict_task(mid, CATALOG.get(pl.steps[1].action_id), pl.steps[1].cell, p)
    again = replan(mid, CATALOG, p, speaking=True, horizon=40)
    assert list(again.steps) == list(pl.steps[2:])


def test_completeness_all_archetypes_both_conditions():
    for name, p in archetypes().items():
        for speaking in (True, False):
            turn = "robot" if (p.w_a < 0 or p.w_e > 0) else "human"
            pl = plan(state_for(p, turn=turn), CATALOG, p, speaking, horizon=40)
            res = validate_plan(pl, state_for(p, turn=turn), CATALOG, p, speaking)
            assert res.ok, f"{name} speaking={speaking}: {res.reason}"


def test_motivate_count_nondecreasing_in_weight():
    for mk in (lambda m: PersonalityVector(0, m, 0),
               lambda m: PersonalityVector(0, 0, m),
               lambda m: PersonalityVector(-m, 0, 0)):
        counts = []
        for mag in (0.5, 1.0):
            p = mk(mag)
            turn = "robot" if (p.w_a < 0 or p.w_e > 0) else "human"
            pl = plan(state_for(p, turn=turn), CATALOG, p, speaking=False, horizon=40)
            counts.append(count_motivates(pl))
        assert counts[1] >= counts[0]


def test_determinism_identical_plans():
    p = PersonalityVector(0.5, -0.5, 0.5)
    a = plan(state_for(p, turn="human"), CATALOG, p, True, 40)
    b = plan(state_for(p, turn="human"), CATALOG, p, True, 40)
    assert list(a.steps) == list(b.steps)
    assert a.expected_trace == b.expected_trace


def test_validator_rejects_corrupted_plan():
    p = PersonalityVector(0, 0, 0)
    st = state_for(p, turn="human")
    pl = plan(st, CATALOG, p, True, 40)
    # drop a step: the goal can no longer be reached
    broken = Plan(pl.steps[:-1], pl.initial_values, pl.expected_trace[:-1])
    assert not validate_plan(broken, st, CATALOG, p, True).ok


def test_validator_rejects_verbal_in_not_speaking():
    p = PersonalityVector(0, 0, 1)
    st = state_for(p, turn="human")
    pl = plan(st, CATALOG, p, speaking=True, horizon=40)
    assert any(s.action_id == "cue_human_turn" for s in pl.steps)
    assert not validate_plan(pl, st, CATALOG, p, speaking=False).ok


def test_format_plan_lists_numbered_steps():
    p = PersonalityVector(0, 1, 0)
    pl = plan(state_for(p), CATALOG, p, True, 40)
    text = format_plan(pl)
    assert "1." in text and "E=" in text
