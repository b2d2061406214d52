"""Episodic memory and a minimal semantic fact store.

The episodic table links a world state (user emotion + attention, packed in
an 8-bit array) and a motivational action to a reward made of a fixed
appropriateness part and a dynamic outcome part. Selection is a weighted
random draw over total rewards; matching the action's expected emotion
raises the outcome, a mismatch lowers it down to a floor that keeps
exploration alive.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterable, Protocol

from .textconf import ParseError, require_args, tokenize


class Emotion(enum.Enum):
    # bit positions 0..6; the order doubles as the mode-filter tie-break order
    HAPPY = 0
    SAD = 1
    SURPRISE = 2
    DISGUST = 3
    FEAR = 4
    ANGER = 5
    NEUTRAL = 6

    @classmethod
    def parse(cls, name: str) -> "Emotion":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown emotion '{name}'") from None

    @property
    def label(self) -> str:
        return self.name.capitalize()


ATTENTION_BIT = 7


@dataclass(frozen=True)
class WorldState:
    """8-bit context key: one-hot emotion in bits 0..6, attention flag in bit 7."""

    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < 256:
            raise ValueError("world state is 8 bits wide")
        emotion_bits = self.bits & 0x7F
        if bin(emotion_bits).count("1") != 1:
            raise ValueError("exactly one emotion bit must be set")

    @property
    def emotion(self) -> Emotion:
        return Emotion((self.bits & 0x7F).bit_length() - 1)

    @property
    def attentive(self) -> bool:
        return bool(self.bits >> ATTENTION_BIT)

    def serialize(self) -> str:
        return format(self.bits, "08b")

    @classmethod
    def deserialize(cls, s: str) -> "WorldState":
        if len(s) != 8 or set(s) - {"0", "1"}:
            raise ValueError(f"bad world-state bit string '{s}'")
        return cls(int(s, 2))


def encode_world_state(emotion: Emotion, attentive: bool) -> WorldState:
    bits = 1 << emotion.value
    if attentive:
        bits |= 1 << ATTENTION_BIT
    return WorldState(bits)


def decode_world_state(w: WorldState) -> tuple[Emotion, bool]:
    return w.emotion, w.attentive


def all_world_states() -> list[WorldState]:
    return [encode_world_state(e, a) for e in Emotion for a in (False, True)]


class MotivationalAction(Protocol):
    """What the memory needs to know about a candidate action."""

    id: str
    expected_emotion: Emotion | None


class NoCandidates(ValueError):
    """select_motivational called with an empty candidate list."""


class MissingEntry(KeyError):
    """No reward entry for the given (world state, action) pair."""


@dataclass
class RewardEntry:
    appropriateness: float  # fixed at init
    outcome: float          # dynamic, never below the floor

    @property
    def total(self) -> float:
        return self.appropriateness + self.outcome


@dataclass(frozen=True)
class MemoryConfig:
    delta: float = 0.25            # outcome step per observation
    floor: float = 0.05            # outcome never drops below this
    init_appropriateness: float = 1.0
    init_outcome: float = 1.0
    # (action id, emotion) pairs judged inappropriate in that context
    appropriateness_overrides: dict[tuple[str, Emotion], float] = field(default_factory=dict)


def load_memory_config(text: str) -> MemoryConfig:
    """Parse the memory config document.

    Directives: delta <f>, floor <f>, init_outcome <f>, init_appropriateness <f>,
    inappropriate <action_id> <emotion> <value>.
    """
    kwargs: dict = {}
    overrides: dict[tuple[str, Emotion], float] = {}
    for d in tokenize(text):
        if d.key in ("delta", "floor", "init_outcome", "init_appropriateness"):
            require_args(d, 1)
            try:
                kwargs[d.key] = float(d.args[0])
            except ValueError:
                raise ParseError(d.line, 1, f"'{d.key}' expects a number") from None
        elif d.key == "inappropriate":
            require_args(d, 3)
            try:
                emotion = Emotion.parse(d.args[1])
                value = float(d.args[2])
            except ValueError as e:
                raise ParseError(d.line, 1, str(e)) from None
            overrides[(d.args[0], emotion)] = value
        else:
            raise ParseError(d.line, 1, f"unknown memory directive '{d.key}'")
    return MemoryConfig(appropriateness_overrides=overrides, **kwargs)


class EpisodicMemory:
    """Reward table keyed by (world state, action id)."""

    def __init__(self, actions: Iterable[MotivationalAction], config: MemoryConfig = MemoryConfig()):
        self.config = config
        self.expected_emotion: dict[str, Emotion | None] = {}
        self.entries: dict[tuple[WorldState, str], RewardEntry] = {}
        for a in actions:
            self.expected_emotion[a.id] = a.expected_emotion
            for w in all_world_states():
                appr = config.appropriateness_overrides.get(
                    (a.id, w.emotion), config.init_appropriateness
                )
                self.entries[(w, a.id)] = RewardEntry(appr, config.init_outcome)

    def entry(self, w: WorldState, action_id: str) -> RewardEntry:
        try:
            return self.entries[(w, action_id)]
        except KeyError:
            raise MissingEntry(f"no entry for {w.serialize()}/{action_id}") from None

    def total(self, w: WorldState, action_id: str) -> float:
        return self.entry(w, action_id).total

    def mean_total(self, w: WorldState, action_ids: Iterable[str]) -> float:
        totals = [self.total(w, a) for a in action_ids]
        return sum(totals) / len(totals) if totals else 0.0

    def select_motivational(
        self,
        w: WorldState,
        candidates: list[MotivationalAction],
        rng: random.Random,
    ) -> MotivationalAction:
        """Draw a candidate with probability proportional to its total reward."""
        if not candidates:
            raise NoCandidates("no motivational candidates")
        totals = [self.total(w, a.id) for a in candidates]
        pick = rng.random() * sum(totals)
        acc = 0.0
        for a, t in zip(candidates, totals):
            acc += t
            if pick < acc:
                return a
        return candidates[-1]

    def update_reward(self, w: WorldState, action: MotivationalAction, observed: Emotion) -> float:
        """Raise or lower the outcome part by whether the observation matched."""
        e = self.entry(w, action.id)
        if observed is self.expected_emotion.get(action.id):
            e.outcome += self.config.delta
        else:
            e.outcome = max(self.config.floor, e.outcome - self.config.delta)
        return e.total

    # -- persistence ------------------------------------------------------

    def dump(self) -> str:
        lines = ["# episodic memory dump: <bits> <action_id> <appropriateness> <outcome>"]
        for (w, aid), e in sorted(self.entries.items(), key=lambda kv: (kv[0][0].bits, kv[0][1])):
            lines.append(f"entry {w.serialize()} {aid} {e.appropriateness!r} {e.outcome!r}")
        return "\n".join(lines) + "\n"

    def load(self, text: str) -> None:
        for d in tokenize(text):
            if d.key != "entry":
                raise ParseError(d.line, 1, f"unknown memory-dump directive '{d.key}'")
            require_args(d, 4)
            try:
                w = WorldState.deserialize(d.args[0])
                appr, outcome = float(d.args[2]), float(d.args[3])
            except ValueError as e:
                raise ParseError(d.line, 1, str(e)) from None
            key = (w, d.args[1])
            if key in self.entries:
                self.entries[key] = RewardEntry(appr, outcome)


class FactStore:
    """Set of ground predicate literals like `turn(human)`."""

    def __init__(self, facts: Iterable[str] = ()):
        self.facts: set[str] = set(facts)

    def assert_fact(self, literal: str) -> "FactStore":
        self.facts.add(literal)
        return self

    def retract(self, literal: str) -> "FactStore":
        self.facts.discard(literal)
        return self

    def query(self, pattern: str) -> list[str]:
        """Exact predicate name match; `?` matches any single argument."""
        name, args = _split_literal(pattern)
        out = []
        for lit in sorted(self.facts):
            n, a = _split_literal(lit)
            if n != name or len(a) != len(args):
                continue
            if all(p == "?" or p == v for p, v in zip(args, a)):
                out.append(lit)
        return out

    def snapshot(self) -> "FactStore":
        return FactStore(self.facts)


def _split_literal(lit: str) -> tuple[str, list[str]]:
    lit = lit.strip()
    if "(" not in lit:
        return lit, []
    name, rest = lit.split("(", 1)
    rest = rest.rstrip(")")
    args = [a.strip() for a in rest.split(",")] if rest else []
    return name.strip(), args
