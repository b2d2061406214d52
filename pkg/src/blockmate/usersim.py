"""Simulated human collaborator and the sliding-window emotion filter.

A user profile maps agent-action categories to emotion distributions plus a
base attention probability; reactions are sampled per executed agent action.
Perception samples land in a 3-second (virtual time) window whose mode is
the filtered emotion. Live sessions bypass the simulator and accept manual
perception injections through the same window.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .game import Board, CenterColor, Color, cell_parity_color, infer_target
from .memory import Emotion
from .textconf import ParseError, blocks, require_args, tokenize

WINDOW_SECONDS = 3.0

# action id -> reaction category; profiles key their tables on these
CATEGORY_BY_ACTION: dict[str, str] = {
    "pick_place_precisely": "place",
    "pick_place_wrongly": "mistake",
    "replace_human": "replace",
    "remove_misplaced": "place",
    "cue_human_turn": "cue",
    "cue_human_turn_sound": "cue",
    "wait_human": "wait",
    "say_enthusiastic_sentence": "cheer",
    "tell_a_joke": "joke",
    "ask_a_question": "chat",
    "capture_attention": "attention_bid",
    "tell_personal_story": "chat",
    "make_visible_movement_horizontal": "attention_bid",
    "make_visible_movement_vertical": "attention_bid",
    "ask_if_useful": "chat",
    "ask_reflective_question": "chat",
    "say_prefer_private_conversation": "retreat",
    "make_retracting_movement": "retreat",
    "hide_gripper_behind_arm": "retreat",
    "express_empathy": "kindness",
    "give_compliment": "kindness",
    "ask_if_can_help": "kindness",
    "declare_no_reason_to_be_angry": "kindness",
    "move_closer_to_human": "kindness",
    "make_contrastive_statement": "provocation",
    "express_disapproval": "provocation",
    "ask_provocative_question": "provocation",
    "insist_always_right": "provocation",
    "make_threatening_move_horizontal": "threat",
    "make_threatening_move_sagittal": "threat",
    "open_close_gripper_tease": "provocation",
    "remind_human_focused": "guidance",
    "offer_guidance": "guidance",
    "promote_ethical_behavior": "guidance",
    "gesture_keep_attention_on_task": "attention_bid",
    "distract_random_questions": "random",
    "make_thoughtless_remarks": "random",
    "say_inconsistent_things": "random",
    "make_random_movement": "random",
    "wait_some_seconds": "wait",
}


class NotLiveSession(RuntimeError):
    """Manual perception injection is only valid in live mode."""


class NoLegalCell(RuntimeError):
    pass


Distribution = tuple[tuple[Emotion, float], ...]


def _validate_distribution(name: str, dist: Distribution) -> None:
    total = sum(p for _, p in dist)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"distribution '{name}' sums to {total}, not 1")


@dataclass(frozen=True)
class UserModel:
    """Reaction tables for one simulated collaborator."""

    name: str
    attention_p: float
    default: Distribution
    reactions: dict[str, Distribution] = field(default_factory=dict)
    think_time: float = 4.0  # virtual seconds per human placement

    def __post_init__(self):
        if not 0.0 <= self.attention_p <= 1.0:
            raise ValueError("attention probability must be in [0, 1]")
        _validate_distribution(f"{self.name}.default", self.default)
        for cat, dist in self.reactions.items():
            _validate_distribution(f"{self.name}.{cat}", dist)


def react(u: UserModel, category: str, rng: random.Random) -> tuple[Emotion, bool]:
    """Sample (emotion, attentive) for one agent action; unknown categories fall
    back to the default distribution (Neutral-dominated by convention)."""
    dist = u.reactions.get(category, u.default)
    pick = rng.random()
    acc = 0.0
    emotion = dist[-1][0]
    for e, p in dist:
        acc += p
        if pick < acc:
            emotion = e
            break
    attentive = rng.random() < u.attention_p
    return emotion, attentive


def choose_human_move(
    u: UserModel, board: Board, target: CenterColor, rng: random.Random
) -> tuple[int, int]:
    """Uniform draw over cells the human may legally fill with their color."""
    if target is CenterColor.UNKNOWN:
        legal = board.empty_cells()
    else:
        center = Color(target.value)
        legal = [
            cell for cell in board.empty_cells()
            if cell_parity_color(cell, center) is Color.BLUE
        ]
    if not legal:
        raise NoLegalCell("no legal cell for the human")
    return legal[rng.randrange(len(legal))]


@dataclass
class PerceptionWindow:
    """Ring buffer of timed emotion samples; reads evict samples older than 3 s."""

    samples: deque = field(default_factory=deque)
    last_attentive: bool = True

    def push(self, t: float, emotion: Emotion, attentive: bool) -> None:
        self.samples.append((t, emotion))
        self.last_attentive = attentive

    def _evict(self, now: float) -> None:
        while self.samples and self.samples[0][0] <= now - WINDOW_SECONDS:
            self.samples.popleft()

    def filter_emotion(self, now: float) -> Emotion:
        """Mode of samples in (now - 3 s, now]; Neutral when empty; ties break
        by enum order."""
        self._evict(now)
        counts: dict[Emotion, int] = {}
        for t, e in self.samples:
            if t <= now:
                counts[e] = counts.get(e, 0) + 1
        if not counts:
            return Emotion.NEUTRAL
        best = max(counts.values())
        return min((e for e, n in counts.items() if n == best), key=lambda e: e.value)

    def __len__(self) -> int:
        return len(self.samples)


# -- profile loading -------------------------------------------------------

def load_profiles(text: str) -> dict[str, UserModel]:
    """Parse profile blocks:

    profile <name>
      attention <p>
      think_time <seconds>
      default <Emotion> <p> [<Emotion> <p> ...]
      react <category> <Emotion> <p> [...]
    end
    """
    out: dict[str, UserModel] = {}
    for head, body in blocks(tokenize(text), "profile"):
        require_args(head, 1)
        name = head.args[0]
        attention = 0.7
        think_time = 4.0
        default: Distribution | None = None
        reactions: dict[str, Distribution] = {}
        for d in body:
            if d.key == "attention":
                require_args(d, 1)
                attention = _parse_p(d, 0)
            elif d.key == "think_time":
                require_args(d, 1)
                think_time = _parse_p(d, 0, limit=1e9)
            elif d.key == "default":
                default = _parse_dist(d, 0)
            elif d.key == "react":
                require_args(d, 3)
                reactions[d.args[0]] = _parse_dist(d, 1)
            else:
                raise ParseError(d.line, 1, f"unknown profile directive '{d.key}'")
        if default is None:
            raise ParseError(head.line, 1, f"profile '{name}' has no default distribution")
        try:
            out[name] = UserModel(name, attention, default, reactions, think_time)
        except ValueError as e:
            raise ParseError(head.line, 1, str(e)) from None
    return out


def _parse_p(d, index: int, limit: float = 1.0) -> float:
    try:
        v = float(d.args[index])
    except ValueError:
        raise ParseError(d.line, 1, f"'{d.key}' expects a number") from None
    if not 0 <= v <= limit:
        raise ParseError(d.line, 1, f"'{d.key}' value {v} out of range")
    return v


def _parse_dist(d, start: int) -> Distribution:
    args = d.args[start:]
    if len(args) % 2 != 0 or not args:
        raise ParseError(d.line, 1, "distribution needs emotion/probability pairs")
    pairs = []
    for i in range(0, len(args), 2):
        try:
            e = Emotion.parse(args[i])
            p = float(args[i + 1])
        except ValueError as err:
            raise ParseError(d.line, 1, str(err)) from None
        pairs.append((e, p))
    return tuple(pairs)


def default_profiles() -> dict[str, UserModel]:
    from .textconf import default_data

    return load_profiles(default_data("profiles.txt"))
