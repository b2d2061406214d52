"""Personality vector and the deterministic mapping to behavioral parameters.

A personality is a point in [-1, 1]^3 over Conscientiousness, Extroversion
and Agreeableness; 0 on an axis means the trait is inactive. The mapping to
movement/speech parameters follows the documented trait correlations:
Extroversion drives gesture speed, amplitude and vocal volume; Agreeableness
drives acceleration and contributes to trajectory linearity; Conscientiousness
drives trajectory directness. Weights bucket into three levels at a
configurable threshold (default 0.5), matching the arm's three speed settings.

The correlation source lists four movement parameters (velocity, speed,
acceleration, linearity) without ever distinguishing velocity from speed; a
single velocity_level is exposed here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .textconf import Directive, ParseError, require_args, tokenize


class OutOfRange(ValueError):
    """A trait weight outside [-1, +1]."""


class Trait(enum.Enum):
    CONSCIENTIOUSNESS = "C"
    EXTROVERSION = "E"
    AGREEABLENESS = "A"

    @property
    def letter(self) -> str:
        return self.value


class TraitPole(enum.Enum):
    """One signed extreme of a trait (HE = high extroversion, LA = disagreeable...)."""

    HC = (Trait.CONSCIENTIOUSNESS, True)
    LC = (Trait.CONSCIENTIOUSNESS, False)
    HE = (Trait.EXTROVERSION, True)
    LE = (Trait.EXTROVERSION, False)
    HA = (Trait.AGREEABLENESS, True)
    LA = (Trait.AGREEABLENESS, False)

    @property
    def trait(self) -> Trait:
        return self.value[0]

    @property
    def high(self) -> bool:
        return self.value[1]

    @property
    def opposite(self) -> "TraitPole":
        return _OPPOSITE[self]


_OPPOSITE = {
    TraitPole.HC: TraitPole.LC, TraitPole.LC: TraitPole.HC,
    TraitPole.HE: TraitPole.LE, TraitPole.LE: TraitPole.HE,
    TraitPole.HA: TraitPole.LA, TraitPole.LA: TraitPole.HA,
}


class SpeedLevel(enum.Enum):
    SLOW = "Slow"
    MIDDLE = "Middle"
    HIGH = "High"


class GradeLevel(enum.Enum):
    LOW = "Low"
    MID = "Mid"
    HIGH = "High"


# Closed style vocabulary, one list per pole.
STYLE_TAGS: dict[TraitPole, tuple[str, ...]] = {
    TraitPole.HE: ("Verbose", "Friendly", "Talkative", "Enthusiastic", "Excited"),
    TraitPole.LE: ("Reserved", "Quiet", "Neutral"),
    TraitPole.HA: ("Cooperative", "Friendly", "Empathic", "Forgiving", "Reliable", "Polite"),
    TraitPole.LA: ("Competitive", "Aggressive", "Provocative", "Selfish", "Rude"),
    TraitPole.HC: ("Scrupulous", "Precise"),
    TraitPole.LC: ("Thoughtless", "Distracted", "Lazy", "Disordered"),
}

STYLE_VOCABULARY: frozenset[str] = frozenset(t for tags in STYLE_TAGS.values() for t in tags)


@dataclass(frozen=True)
class PersonalityVector:
    """Trait weights (w_c, w_e, w_a), each in [-1, +1]; 0 = trait inactive."""

    w_c: float
    w_e: float
    w_a: float

    def __post_init__(self):
        for name, w in (("w_c", self.w_c), ("w_e", self.w_e), ("w_a", self.w_a)):
            if not -1.0 <= w <= 1.0:
                raise OutOfRange(f"{name}={w} outside [-1, +1]")

    def weight(self, trait: Trait) -> float:
        return {
            Trait.CONSCIENTIOUSNESS: self.w_c,
            Trait.EXTROVERSION: self.w_e,
            Trait.AGREEABLENESS: self.w_a,
        }[trait]

    def pole(self, trait: Trait) -> TraitPole | None:
        w = self.weight(trait)
        if w == 0:
            return None
        high = w > 0
        for p in TraitPole:
            if p.trait is trait and p.high is high:
                return p
        raise AssertionError


def new_personality(w_c: float, w_e: float, w_a: float) -> PersonalityVector:
    """Build a personality vector; weights are stored exactly, no normalization."""
    return PersonalityVector(w_c, w_e, w_a)


def dominant_poles(p: PersonalityVector) -> list[TraitPole]:
    """One pole per nonzero weight, in C, E, A order; empty for neutral."""
    out = []
    for trait in Trait:
        pole = p.pole(trait)
        if pole is not None:
            out.append(pole)
    return out


class ActionClass(enum.Enum):
    PICK_PLACE = "PickPlace"
    COMMUNICATIVE_GESTURE = "CommunicativeGesture"
    SPEECH = "Speech"


@dataclass(frozen=True)
class BehavioralParameters:
    volume: GradeLevel
    language_style: frozenset[str]
    velocity_level: SpeedLevel
    acceleration_level: SpeedLevel
    amplitude_level: GradeLevel
    straightness_level: GradeLevel


@dataclass(frozen=True)
class ParameterMap:
    """Tunable bucketing config for the parameter generator.

    bucket_threshold t splits a weight into three levels: w >= t high,
    w <= -t low, else middle.
    """

    bucket_threshold: float = 0.5
    style_tags: dict[TraitPole, tuple[str, ...]] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.style_tags is None:
            object.__setattr__(self, "style_tags", dict(STYLE_TAGS))
        if not 0 < self.bucket_threshold <= 1:
            raise OutOfRange(f"bucket_threshold={self.bucket_threshold} outside (0, 1]")

    def speed_bucket(self, w: float) -> SpeedLevel:
        if w >= self.bucket_threshold:
            return SpeedLevel.HIGH
        if w <= -self.bucket_threshold:
            return SpeedLevel.SLOW
        return SpeedLevel.MIDDLE

    def grade_bucket(self, w: float) -> GradeLevel:
        if w >= self.bucket_threshold:
            return GradeLevel.HIGH
        if w <= -self.bucket_threshold:
            return GradeLevel.LOW
        return GradeLevel.MID


DEFAULT_PARAMETER_MAP = ParameterMap()


def generate_parameters(
    p: PersonalityVector,
    action_class: ActionClass,
    pmap: ParameterMap = DEFAULT_PARAMETER_MAP,
) -> BehavioralParameters:
    """Map a personality to concrete behavioral parameters for one action class.

    Pure and deterministic. Extroversion sets velocity, amplitude and volume;
    Agreeableness sets acceleration; straightness comes from Conscientiousness,
    with Agreeableness averaged in when both traits are active.
    """
    del action_class  # the default map is class-independent; kept for the call contract
    if p.w_c != 0 and p.w_a != 0:
        straight_w = (p.w_c + p.w_a) / 2.0
    elif p.w_c != 0:
        straight_w = p.w_c
    else:
        straight_w = p.w_a

    tags: set[str] = set()
    for pole in dominant_poles(p):
        tags.update(pmap.style_tags[pole])

    return BehavioralParameters(
        volume=pmap.grade_bucket(p.w_e),
        language_style=frozenset(tags),
        velocity_level=pmap.speed_bucket(p.w_e),
        acceleration_level=pmap.speed_bucket(p.w_a),
        amplitude_level=pmap.grade_bucket(p.w_e),
        straightness_level=pmap.grade_bucket(straight_w),
    )


def load_parameter_map(text: str) -> ParameterMap:
    """Parse a parameter-map config document.

    Recognized directives:
      bucket_threshold <float>
      style <pole> <tag> [<tag> ...]
    """
    threshold = 0.5
    tags: dict[TraitPole, tuple[str, ...]] = dict(STYLE_TAGS)
    for d in tokenize(text):
        if d.key == "bucket_threshold":
            require_args(d, 1)
            threshold = _parse_float_arg(d, 0)
        elif d.key == "style":
            require_args(d, 2)
            pole = parse_pole(d, 0)
            tags[pole] = d.args[1:]
        else:
            raise ParseError(d.line, 1, f"unknown parameter-map directive '{d.key}'")
    return ParameterMap(bucket_threshold=threshold, style_tags=tags)


def parse_pole(d: Directive, index: int) -> TraitPole:
    try:
        return TraitPole[d.args[index]]
    except (KeyError, IndexError):
        got = d.args[index] if index < len(d.args) else "<missing>"
        raise ParseError(d.line, 1, f"unknown pole '{got}' (expected HC/LC/HE/LE/HA/LA)") from None


def _parse_float_arg(d: Directive, index: int) -> float:
    try:
        return float(d.args[index])
    except ValueError:
        raise ParseError(d.line, 1, f"'{d.key}' expects a number, got '{d.args[index]}'") from None


def archetypes() -> dict[str, PersonalityVector]:
    """The 12 two-trait pole combinations at full magnitude.

    Every pair of distinct traits contributes four sign combinations; the
    third trait stays neutral.
    """
    out: dict[str, PersonalityVector] = {}
    pairs = [
        (Trait.CONSCIENTIOUSNESS, Trait.EXTROVERSION),
        (Trait.CONSCIENTIOUSNESS, Trait.AGREEABLENESS),
        (Trait.EXTROVERSION, Trait.AGREEABLENESS),
    ]
    for t1, t2 in pairs:
        for s1 in (1.0, -1.0):
            for s2 in (1.0, -1.0):
                w = {Trait.CONSCIENTIOUSNESS: 0.0, Trait.EXTROVERSION: 0.0, Trait.AGREEABLENESS: 0.0}
                w[t1] = s1
                w[t2] = s2
                vec = PersonalityVector(
                    w[Trait.CONSCIENTIOUSNESS], w[Trait.EXTROVERSION], w[Trait.AGREEABLENESS]
                )
                name = "".join(("H" if s > 0 else "L") + t.letter for t, s in ((t1, s1), (t2, s2)))
                out[name] = vec
    return out
