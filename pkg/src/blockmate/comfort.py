"""Allostatic comfort controller: one independent channel per active trait.

Each channel holds a magnitude in [0, C0] that decays linearly with every
executed task action (slope k*|w|), shifts by action offsets and perception
deltas, and recovers through motivational actions. The signed display value
carries the trait pole's sign. Channels never interact.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .memory import Emotion, WorldState
from .personality import PersonalityVector, Trait, TraitPole

# magnitudes are quantized to keep repeated 0.1-step arithmetic exact
_QUANT = 9


class BadConfig(ValueError):
    """Invalid comfort configuration (threshold/decay out of range)."""


class InactiveChannel(KeyError):
    """Operation addressed a trait with zero weight."""


@dataclass(frozen=True)
class ComfortConfig:
    threshold: float = 0.3       # Th: channels below it need motivation
    initial: float = 1.0         # C0: starting and maximum magnitude
    decay_rate: float = 0.1      # k: per-action slope factor
    recovery_gain: float = 0.5   # g: magnitude gained per unit reward

    def __post_init__(self):
        if not 0 < self.threshold < self.initial:
            raise BadConfig(f"need 0 < Th ({self.threshold}) < C0 ({self.initial})")
        if self.decay_rate <= 0:
            raise BadConfig(f"decay rate must be positive, got {self.decay_rate}")


@dataclass(frozen=True)
class ComfortState:
    """Immutable snapshot: per-trait magnitudes plus the shared config."""

    magnitudes: tuple[tuple[Trait, float], ...]
    weights: tuple[tuple[Trait, float], ...]
    config: ComfortConfig
    tick: int = 0

    def magnitude(self, trait: Trait) -> float:
        for t, m in self.magnitudes:
            if t is trait:
                return m
        raise InactiveChannel(f"trait {trait.letter} has no comfort channel")

    def weight(self, trait: Trait) -> float:
        for t, w in self.weights:
            if t is trait:
                return w
        raise InactiveChannel(f"trait {trait.letter} has no comfort channel")

    @property
    def active_traits(self) -> tuple[Trait, ...]:
        return tuple(t for t, _ in self.magnitudes)

    def signed(self, trait: Trait) -> float:
        """Display value: magnitude carrying the pole's sign."""
        w = self.weight(trait)
        m = self.magnitude(trait)
        return m if w > 0 else -m

    def signed_values(self) -> dict[Trait, float]:
        return {t: self.signed(t) for t in self.active_traits}

    def _with_magnitude(self, trait: Trait, value: float) -> "ComfortState":
        clamped = round(min(self.config.initial, max(0.0, value)), _QUANT)
        mags = tuple((t, clamped if t is trait else m) for t, m in self.magnitudes)
        return replace(self, magnitudes=mags)


@dataclass(frozen=True)
class SensitivityTable:
    """Perception deltas: (pole, emotion or attention flag) -> magnitude shift."""

    emotion_deltas: dict[tuple[TraitPole, Emotion], float]
    attention_deltas: dict[tuple[TraitPole, bool], float]

    def __post_init__(self):
        for delta in list(self.emotion_deltas.values()) + list(self.attention_deltas.values()):
            if abs(delta) > 1.0:
                raise BadConfig(f"sensitivity delta {delta} outside [-C0, +C0]")

    def delta(self, pole: TraitPole, emotion: Emotion, attentive: bool) -> float:
        return self.emotion_deltas.get((pole, emotion), 0.0) + self.attention_deltas.get(
            (pole, attentive), 0.0
        )


def default_sensitivity() -> SensitivityTable:
    """Shipped defaults; the mechanism comes from the design, the numbers are config."""
    return SensitivityTable(
        emotion_deltas={
            (TraitPole.HE, Emotion.HAPPY): 0.1,
            (TraitPole.HE, Emotion.SURPRISE): 0.1,
            (TraitPole.HA, Emotion.SAD): -0.2,
            (TraitPole.HA, Emotion.ANGER): -0.2,
            (TraitPole.LA, Emotion.ANGER): 0.1,
        },
        attention_deltas={
            (TraitPole.HE, False): -0.15,
            (TraitPole.LE, True): -0.10,
            (TraitPole.HC, False): -0.10,
        },
    )


def load_sensitivity(text: str) -> SensitivityTable:
    """Parse `<pole> <emotion|attentive|inattentive> <delta>` lines."""
    from .textconf import ParseError, require_args, tokenize

    emotions: dict[tuple[TraitPole, Emotion], float] = {}
    attention: dict[tuple[TraitPole, bool], float] = {}
    for d in tokenize(text):
        require_args(d, 2)
        try:
            pole = TraitPole[d.key]
        except KeyError:
            raise ParseError(d.line, 1, f"unknown pole '{d.key}'") from None
        try:
            delta = float(d.args[1])
        except ValueError:
            raise ParseError(d.line, 1, f"bad delta '{d.args[1]}'") from None
        stim = d.args[0]
        if stim in ("attentive", "inattentive"):
            attention[(pole, stim == "attentive")] = delta
        else:
            try:
                emotions[(pole, Emotion.parse(stim))] = delta
            except ValueError as e:
                raise ParseError(d.line, 1, str(e)) from None
    return SensitivityTable(emotions, attention)


def init_comfort(p: PersonalityVector, config: ComfortConfig = ComfortConfig()) -> ComfortState:
    """Open one full channel per nonzero trait weight."""
    mags = []
    weights = []
    for trait in Trait:
        w = p.weight(trait)
        if w != 0:
            mags.append((trait, config.initial))
            weights.append((trait, w))
    return ComfortState(tuple(mags), tuple(weights), config)


def apply_standard_decay(s: ComfortState) -> ComfortState:
    """One action tick: every channel loses k*|w|, floored at zero."""
    mags = tuple(
        (t, round(max(0.0, m - s.config.decay_rate * abs(s.weight(t))), _QUANT))
        for t, m in s.magnitudes
    )
    return replace(s, magnitudes=mags, tick=s.tick + 1)


def apply_offset(s: ComfortState, trait: Trait, delta: float) -> ComfortState:
    return s._with_magnitude(trait, s.magnitude(trait) + delta)


def apply_perception(
    s: ComfortState,
    poles: list[TraitPole],
    world: WorldState,
    table: SensitivityTable,
) -> ComfortState:
    """Shift channels by the table's deltas for the perceived emotion/attention."""
    out = s
    for pole in poles:
        if pole.trait not in s.active_traits:
            continue
        d = table.delta(pole, world.emotion, world.attentive)
        if d:
            out = out._with_magnitude(pole.trait, out.magnitude(pole.trait) + d)
    return out


def needs_motivation(s: ComfortState) -> list[Trait]:
    """Traits whose magnitude fell strictly below the threshold."""
    return [t for t, m in s.magnitudes if m < s.config.threshold]


def apply_recovery(s: ComfortState, trait: Trait, reward: float) -> ComfortState:
    if reward < 0:
        raise ValueError("recovery reward must be nonnegative")
    return s._with_magnitude(trait, s.magnitude(trait) + s.config.recovery_gain * reward)


# -- trace export ---------------------------------------------------------

TRACE_HEADER = "tick,action_id,trait,expected_signed_value,actual_signed_value,threshold"


def trace_csv(rows: list[tuple[int, str, Trait, float, float, float]]) -> str:
    """Render comfort-trace rows in the documented CSV layout."""
    lines = [TRACE_HEADER]
    for tick, action_id, trait, expected, actual, threshold in rows:
        lines.append(f"{tick},{action_id},{trait.letter},{expected!r},{actual!r},{threshold!r}")
    return "\n".join(lines) + "\n"
