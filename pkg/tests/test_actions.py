import pytest

from blockmate.actions import (
    ActionSpec,
    BoardEffect,
    Kind,
    Modality,
    SchemaError,
    available,
    catalogs_equal,
    default_catalog,
    load_catalog,
    serialize_catalog,
    validate_coverage,
)
from blockmate.memory import Emotion
from blockmate.personality import PersonalityVector, Trait, TraitPole
from blockmate.textconf import ParseError


@pytest.fixture(scope="module")
def catalog():
    return default_catalog()


def test_default_catalog_loads_with_table_entries(catalog):
    a = catalog.get("make_visible_movement_horizontal")
    assert a.kind is Kind.MOTIVATIONAL
    assert a.pole is TraitPole.HE
    assert a.modality is Modality.NONVERBAL
    validate_coverage(catalog)


def test_motivational_without_expected_emotion_rejected():
    doc = "action x\n kind motivational\n modality verbal\n pole HE\nend\n"
    with pytest.raises(SchemaError):
        load_catalog(doc)


def test_duplicate_id_rejected():
    doc = (
        "action x\n kind standard\n modality sound\nend\n"
        "action x\n kind standard\n modality sound\nend\n"
    )
    with pytest.raises(SchemaError):
        load_catalog(doc)


def test_standard_with_offsets_rejected():
    doc = "action x\n kind standard\n modality sound\n offset HE 0.1\nend\n"
    with pytest.raises(SchemaError) as err:
        load_catalog(doc)
    assert "offsets" in str(err.value)


def test_parse_error_carries_line_position():
    doc = "action x\n kind standard\n modality telepathy\nend\n"
    with pytest.raises(ParseError) as err:
        load_catalog(doc)
    assert err.value.line == 3


def test_unclosed_block_reported():
    with pytest.raises(ParseError):
        load_catalog("action x\n kind standard\n modality sound\n")


def test_available_he_not_speaking_only_movements(catalog):
    acts = available(catalog, speaking=False, kind=Kind.MOTIVATIONAL, pole=TraitPole.HE)
    assert sorted(a.id for a in acts) == [
        "make_visible_movement_horizontal",
        "make_visible_movement_vertical",
    ]


def test_available_he_speaking_union(catalog):
    acts = available(catalog, speaking=True, kind=Kind.MOTIVATIONAL, pole=TraitPole.HE)
    ids = {a.id for a in acts}
    assert {
        "say_enthusiastic_sentence", "tell_a_joke", "ask_a_question",
        "capture_attention", "tell_personal_story",
        "make_visible_movement_horizontal", "make_visible_movement_vertical",
    } == ids


def test_turn_cue_in_not_speaking_is_the_sound_variant(catalog):
    cues = [
        a for a in available(catalog, speaking=False, kind=Kind.COMPLEMENTARY)
        if a.id.startswith("cue_human_turn")
    ]
    assert [a.id for a in cues] == ["cue_human_turn_sound"]
    assert cues[0].modality is Modality.SOUND


def test_sound_allowed_in_both_conditions(catalog):
    for speaking in (True, False):
        ids = {a.id for a in available(catalog, speaking, Kind.COMPLEMENTARY)}
        assert "cue_human_turn_sound" in ids


def test_coverage_every_pole_both_conditions(catalog):
    for pole in TraitPole:
        for speaking in (True, False):
            assert available(catalog, speaking, Kind.MOTIVATIONAL, pole)


def test_serialize_roundtrip(catalog):
    text = serialize_catalog(catalog)
    again = load_catalog(text)
    assert catalogs_equal(catalog, again)


def test_complementary_pairing_offsets(catalog):
    precise = catalog.get("pick_place_precisely")
    wrongly = catalog.get("pick_place_wrongly")
    cue = catalog.get("cue_human_turn")
    replace = catalog.get("replace_human")
    assert precise.pole_offsets == {TraitPole.HC: 0.2}
    assert wrongly.pole_offsets == {TraitPole.LC: 0.2}
    assert cue.pole_offsets == {TraitPole.HA: 0.15, TraitPole.HE: 0.15}
    assert replace.pole_offsets == {TraitPole.LA: 0.2}


def test_applied_offsets_flip_for_opposite_pole(catalog):
    wrongly = catalog.get("pick_place_wrongly")
    lc_agent = PersonalityVector(-1, 0, 0)
    hc_agent = PersonalityVector(1, 0, 0)
    neutral = PersonalityVector(0, 0, 0)
    assert wrongly.applied_offsets(lc_agent) == {Trait.CONSCIENTIOUSNESS: 0.2}
    assert wrongly.applied_offsets(hc_agent) == {Trait.CONSCIENTIOUSNESS: -0.2}
    assert wrongly.applied_offsets(neutral) == {}


def test_cue_credits_both_social_poles(catalog):
    cue = catalog.get("cue_human_turn")
    agent = PersonalityVector(0, 1, -1)  # extroverted, disagreeable
    applied = cue.applied_offsets(agent)
    assert applied[Trait.EXTROVERSION] == 0.15
    assert applied[Trait.AGREEABLENESS] == -0.15


def test_motivational_entries_have_pole_and_emotion(catalog):
    for a in catalog.actions:
        if a.kind is Kind.MOTIVATIONAL:
            assert a.pole is not None
            assert isinstance(a.expected_emotion, Emotion)


def test_provocative_question_expects_anger(catalog):
    assert catalog.get("ask_provocative_question").expected_emotion is Emotion.ANGER
    assert catalog.get("tell_a_joke").expected_emotion is Emotion.HAPPY


def test_board_effects(catalog):
    assert catalog.get("pick_place_precisely").board_effect is BoardEffect.PLACE_OWN_CORRECT
    assert catalog.get("pick_place_wrongly").board_effect is BoardEffect.PLACE_OWN_WRONG
    assert catalog.get("replace_human").board_effect is BoardEffect.PLACE_HUMANS_BLOCK
    assert catalog.get("wait_human").board_effect is BoardEffect.NONE


def test_missing_task_action_fails_coverage():
    doc = "action only_one\n kind standard\n modality sound\nend\n"
    cat = load_catalog(doc)
    with pytest.raises(SchemaError):
        validate_coverage(cat)
