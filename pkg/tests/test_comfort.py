import pytest

from blockmate.comfort import (
    BadConfig,
    ComfortConfig,
    InactiveChannel,
    SensitivityTable,
    apply_offset,
    apply_perception,
    apply_recovery,
    apply_standard_decay,
    default_sensitivity,
    init_comfort,
    load_sensitivity,
    needs_motivation,
    trace_csv,
    TRACE_HEADER,
)
from blockmate.memory import Emotion, encode_world_state
from blockmate.personality import PersonalityVector, Trait, TraitPole


def make(p=PersonalityVector(0, 1, 0), th=0.3, c0=1.0, k=0.1, g=0.5):
    return init_comfort(p, ComfortConfig(th, c0, k, g))


def test_init_positive_pole():
    s = make()
    assert s.magnitude(Trait.EXTROVERSION) == 1.0
    assert s.signed(Trait.EXTROVERSION) == 1.0


def test_init_negative_pole_sign_convention():
    s = make(PersonalityVector(0, -1, 0))
    assert s.magnitude(Trait.EXTROVERSION) == 1.0
    assert s.signed(Trait.EXTROVERSION) == -1.0


def test_neutral_has_no_channels():
    s = make(PersonalityVector(0, 0, 0))
    assert s.active_traits == ()
    assert needs_motivation(s) == []


def test_bad_config_rejected():
    with pytest.raises(BadConfig):
        ComfortConfig(threshold=1.0, initial=1.0)
    with pytest.raises(BadConfig):
        ComfortConfig(decay_rate=0)
    with pytest.raises(BadConfig):
        ComfortConfig(decay_rate=-0.1)


def test_decay_scales_with_weight():
    s = make(PersonalityVector(0, 0.8, 0))
    s = apply_standard_decay(s)
    assert s.magnitude(Trait.EXTROVERSION) == pytest.approx(0.92)
    assert s.tick == 1


def test_nine_decays_arithmetic():
    s = make(PersonalityVector(0, 1.0, 0))
    for _ in range(9):
        s = apply_standard_decay(s)
    assert s.magnitude(Trait.EXTROVERSION) == pytest.approx(0.10)


def test_decay_clamps_at_zero():
    s = make(PersonalityVector(0, 1.0, 0))
    s = apply_offset(s, Trait.EXTROVERSION, -0.95)
    s = apply_standard_decay(s)
    assert s.magnitude(Trait.EXTROVERSION) == 0.0


def test_offsets_and_clamps():
    s = make()
    s = apply_offset(s, Trait.EXTROVERSION, -0.5)
    assert s.magnitude(Trait.EXTROVERSION) == 0.5
    s2 = apply_offset(s, Trait.EXTROVERSION, 0.2)
    assert s2.magnitude(Trait.EXTROVERSION) == 0.7
    s3 = apply_offset(s, Trait.EXTROVERSION, -0.2)
    assert s3.magnitude(Trait.EXTROVERSION) == 0.3
    s4 = apply_offset(s2, Trait.EXTROVERSION, 0.4)
    assert s4.magnitude(Trait.EXTROVERSION) == 1.0  # clamp at C0


def test_offset_on_inactive_channel():
    s = make(PersonalityVector(0, 0, 0))
    with pytest.raises(InactiveChannel):
        apply_offset(s, Trait.EXTROVERSION, 0.1)


def test_perception_lookup_he_inattentive():
    s = make()
    s = apply_offset(s, Trait.EXTROVERSION, -0.5)  # m=0.5
    w = encode_world_state(Emotion.NEUTRAL, attentive=False)
    s = apply_perception(s, [TraitPole.HE], w, default_sensitivity())
    assert s.magnitude(Trait.EXTROVERSION) == pytest.approx(0.35)


def test_perception_ha_sad_can_trigger_motivation():
    s = make(PersonalityVector(0, 0, 1))
    s = apply_offset(s, Trait.AGREEABLENESS, -0.6)  # m=0.4
    w = encode_world_state(Emotion.SAD, attentive=True)
    s = apply_perception(s, [TraitPole.HA], w, default_sensitivity())
    assert s.magnitude(Trait.AGREEABLENESS) == pytest.approx(0.2)
    assert needs_motivation(s) == [Trait.AGREEABLENESS]


def test_perception_zero_table_is_identity():
    table = SensitivityTable({}, {})
    s = make()
    w = encode_world_state(Emotion.ANGER, attentive=False)
    assert apply_perception(s, [TraitPole.HE], w, table) == s


def test_needs_motivation_below_threshold():
    s = make()
    s = apply_offset(s, Trait.EXTROVERSION, -0.72)  # m = 0.28 < 0.3
    assert s.magnitude(Trait.EXTROVERSION) == pytest.approx(0.28)
    assert needs_motivation(s) == [Trait.EXTROVERSION]


def test_needs_motivation_equality_does_not_trigger():
    s = make()
    s = apply_offset(s, Trait.EXTROVERSION, -0.7)  # exactly 0.30
    assert s.magnitude(Trait.EXTROVERSION) == pytest.approx(0.30)
    assert needs_motivation(s) == []


def test_recovery_arithmetic_and_clamp():
    s = make()
    s = apply_offset(s, Trait.EXTROVERSION, -0.8)  # 0.2
    assert apply_recovery(s, Trait.EXTROVERSION, 1.6).magnitude(Trait.EXTROVERSION) == 1.0
    assert apply_recovery(s, Trait.EXTROVERSION, 0.8).magnitude(Trait.EXTROVERSION) == pytest.approx(0.6)
    assert apply_recovery(s, Trait.EXTROVERSION, 0.0).magnitude(Trait.EXTROVERSION) == pytest.approx(0.2)


def test_recovery_rejects_negative_reward():
    with pytest.raises(ValueError):
        apply_recovery(make(), Trait.EXTROVERSION, -1.0)


def test_channel_independence():
    s = make(PersonalityVector(1, 1, 1))
    before_c = s.magnitude(Trait.CONSCIENTIOUSNESS)
    before_a = s.magnitude(Trait.AGREEABLENESS)
    s = apply_offset(s, Trait.EXTROVERSION, -0.4)
    assert s.magnitude(Trait.CONSCIENTIOUSNESS) == before_c
    assert s.magnitude(Trait.AGREEABLENESS) == before_a


def test_decay_monotone_and_strictly_decreasing_until_zero():
    s = make(PersonalityVector(0, 0.7, 0))
    values = [s.magnitude(Trait.EXTROVERSION)]
    for _ in range(20):
        s = apply_standard_decay(s)
        values.append(s.magnitude(Trait.EXTROVERSION))
    for a, b in zip(values, values[1:]):
        assert b <= a
        if a > 0:
            assert b < a


def test_slope_ordering_first_trigger():
    def first_trigger(w):
        s = make(PersonalityVector(0, w, 0))
        tick = 0
        while not needs_motivation(s):
            s = apply_standard_decay(s)
            tick += 1
            if tick > 100:
                raise AssertionError("never triggered")
        return tick

    assert first_trigger(1.0) < first_trigger(0.5)


def test_trigger_after_exactly_nine_decays():
    s = make(PersonalityVector(0, 0.8, 0))
    for i in range(8):
        s = apply_standard_decay(s)
    assert s.magnitude(Trait.EXTROVERSION) == pytest.approx(0.36)
    assert needs_motivation(s) == []
    s = apply_standard_decay(s)
    assert s.magnitude(Trait.EXTROVERSION) == pytest.approx(0.28)
    assert needs_motivation(s) == [Trait.EXTROVERSION]


def test_signed_display_tracks_weight_sign():
    s = make(PersonalityVector(0.5, 0, -0.5))
    s = apply_standard_decay(s)
    assert s.signed(Trait.CONSCIENTIOUSNESS) == pytest.approx(0.95)
    assert s.signed(Trait.AGREEABLENESS) == pytest.approx(-0.95)


def test_sensitivity_load_and_errors():
    table = load_sensitivity("HE inattentive -0.15\nHA sad -0.2\n")
    assert table.delta(TraitPole.HE, Emotion.NEUTRAL, False) == -0.15
    assert table.delta(TraitPole.HA, Emotion.SAD, True) == -0.2
    from blockmate.textconf import ParseError

    with pytest.raises(ParseError):
        load_sensitivity("XX sad -0.2\n")
    with pytest.raises(BadConfig):
        SensitivityTable({(TraitPole.HE, Emotion.SAD): -2.0}, {})


def test_trace_csv_layout():
    rows = [(3, "wait_human", Trait.EXTROVERSION, 0.9, 0.85, 0.3)]
    text = trace_csv(rows)
    lines = text.splitlines()
    assert lines[0] == TRACE_HEADER
    assert lines[1] == "3,wait_human,E,0.9,0.85,0.3"
