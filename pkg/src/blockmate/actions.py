"""Declarative action catalogue: the planning domain as data.

Actions come in three kinds. Standard actions serve the task and only incur
comfort decay. Complementary actions are alternative routes to the same task
effect and carry pole-keyed comfort offsets (the same magnitude credits the
matching pole and debits the opposite one). Motivational actions exist purely
to restore comfort and predict the user emotion they aim to provoke.

The catalogue loads from a small block-structured text format; parse errors
carry line positions, schema errors name the violated rule.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .memory import Emotion
from .personality import PersonalityVector, Trait, TraitPole, parse_pole
from .textconf import Directive, ParseError, blocks, require_args, tokenize


class SchemaError(ValueError):
    """Catalogue violates a structural invariant."""


class Kind(enum.Enum):
    STANDARD = "standard"
    COMPLEMENTARY = "complementary"
    MOTIVATIONAL = "motivational"


class Modality(enum.Enum):
    VERBAL = "verbal"
    NONVERBAL = "nonverbal"
    SOUND = "sound"


class BoardEffect(enum.Enum):
    PLACE_OWN_CORRECT = "own_correct"
    PLACE_OWN_WRONG = "own_wrong"
    PLACE_HUMANS_BLOCK = "humans_block"
    NONE = "none"


@dataclass(frozen=True)
class ActionSpec:
    id: str
    kind: Kind
    modality: Modality
    pole: TraitPole | None = None
    pole_offsets: dict[TraitPole, float] = field(default_factory=dict)
    preconditions: tuple[str, ...] = ()
    effects: tuple[str, ...] = ()
    board_effect: BoardEffect = BoardEffect.NONE
    expected_emotion: Emotion | None = None
    announce: bool = False  # Speaking sessions attach an utterance to this action

    def applied_offsets(self, p: PersonalityVector) -> dict[Trait, float]:
        """Per-agent trait offsets: same pole adds, opposite pole subtracts."""
        out: dict[Trait, float] = {}
        for pole, mag in self.pole_offsets.items():
            agent_pole = p.pole(pole.trait)
            if agent_pole is None:
                continue
            delta = mag if agent_pole is pole else -mag
            out[pole.trait] = out.get(pole.trait, 0.0) + delta
        return out


@dataclass(frozen=True)
class ActionCatalog:
    actions: tuple[ActionSpec, ...]

    def __post_init__(self):
        by_id: dict[str, ActionSpec] = {}
        for a in self.actions:
            if a.id in by_id:
                raise SchemaError(f"duplicate action id '{a.id}'")
            by_id[a.id] = a
        object.__setattr__(self, "_by_id", by_id)

    def get(self, action_id: str) -> ActionSpec:
        try:
            return self._by_id[action_id]
        except KeyError:
            raise KeyError(f"unknown action id '{action_id}'") from None

    def __contains__(self, action_id: str) -> bool:
        return action_id in self._by_id

    def order_index(self, action_id: str) -> int:
        for i, a in enumerate(self.actions):
            if a.id == action_id:
                return i
        raise KeyError(action_id)


def available(
    catalog: ActionCatalog,
    speaking: bool,
    kind: Kind,
    pole: TraitPole | None = None,
) -> list[ActionSpec]:
    """Filter the catalogue for one query; Verbal drops out of Not-Speaking."""
    out = []
    for a in catalog.actions:
        if a.kind is not kind:
            continue
        if pole is not None and a.pole is not pole:
            continue
        if not speaking and a.modality is Modality.VERBAL:
            continue
        out.append(a)
    return out


_EMOTION_NAMES = {e.name.lower() for e in Emotion}


def load_catalog(source: str) -> ActionCatalog:
    """Parse and validate a catalogue document."""
    actions: list[ActionSpec] = []
    for head, body in blocks(tokenize(source), "action"):
        require_args(head, 1)
        actions.append(_parse_action(head, body))
    try:
        catalog = ActionCatalog(tuple(actions))
    except SchemaError:
        raise
    for a in catalog.actions:
        _validate_action(a)
    return catalog


def _parse_action(head: Directive, body: list[Directive]) -> ActionSpec:
    fields: dict = {
        "id": head.args[0],
        "pole_offsets": {},
        "preconditions": [],
        "effects": [],
    }
    for d in body:
        if d.key == "kind":
            require_args(d, 1)
            fields["kind"] = _parse_enum(d, Kind)
        elif d.key == "modality":
            require_args(d, 1)
            fields["modality"] = _parse_enum(d, Modality)
        elif d.key == "pole":
            require_args(d, 1)
            fields["pole"] = parse_pole(d, 0)
        elif d.key == "offset":
            require_args(d, 2)
            pole = parse_pole(d, 0)
            try:
                fields["pole_offsets"][pole] = float(d.args[1])
            except ValueError:
                raise ParseError(d.line, 1, f"bad offset value '{d.args[1]}'") from None
        elif d.key == "board_effect":
            require_args(d, 1)
            fields["board_effect"] = _parse_enum(d, BoardEffect)
        elif d.key == "expected_emotion":
            require_args(d, 1)
            if d.args[0].lower() not in _EMOTION_NAMES:
                raise ParseError(d.line, 1, f"unknown emotion '{d.args[0]}'")
            fields["expected_emotion"] = Emotion.parse(d.args[0])
        elif d.key == "pre":
            require_args(d, 1)
            fields["preconditions"].append(" ".join(d.args))
        elif d.key == "eff":
            require_args(d, 1)
            fields["effects"].append(" ".join(d.args))
        elif d.key == "announce":
            require_args(d, 1)
            fields["announce"] = d.args[0] == "true"
        else:
            raise ParseError(d.line, 1, f"unknown action directive '{d.key}'")
    for required in ("kind", "modality"):
        if required not in fields:
            raise ParseError(head.line, 1, f"action '{fields['id']}' missing '{required}'")
    fields["preconditions"] = tuple(fields["preconditions"])
    fields["effects"] = tuple(fields["effects"])
    return ActionSpec(**fields)


def _parse_enum(d: Directive, enum_cls):
    try:
        return enum_cls(d.args[0])
    except ValueError:
        options = "/".join(e.value for e in enum_cls)
        raise ParseError(d.line, 1, f"'{d.key}' must be one of {options}, got '{d.args[0]}'") from None


def _validate_action(a: ActionSpec) -> None:
    if a.kind is Kind.STANDARD and a.pole_offsets:
        raise SchemaError(f"standard action '{a.id}' must not carry comfort offsets")
    if a.kind is Kind.MOTIVATIONAL:
        if a.pole is None:
            raise SchemaError(f"motivational action '{a.id}' needs a pole")
        if a.expected_emotion is None:
            raise SchemaError(f"motivational action '{a.id}' needs an expected_emotion")


TASK_ACTION_IDS = (
    "pick_place_precisely",
    "pick_place_wrongly",
    "replace_human",
)


def validate_coverage(catalog: ActionCatalog) -> None:
    """Invariants of a playable catalogue: task actions + motivation for all poles."""
    for aid in TASK_ACTION_IDS:
        if aid not in catalog:
            raise SchemaError(f"catalogue is missing task action '{aid}'")
    for pole in TraitPole:
        for speaking in (True, False):
            if not available(catalog, speaking, Kind.MOTIVATIONAL, pole):
                cond = "Speaking" if speaking else "Not-Speaking"
                raise SchemaError(f"no motivational actions for pole {pole.name} ({cond})")


def serialize_catalog(catalog: ActionCatalog) -> str:
    """Emit a document that load_catalog parses back to an equal catalogue."""
    lines: list[str] = []
    for a in catalog.actions:
        lines.append(f"action {a.id}")
        lines.append(f"  kind {a.kind.value}")
        lines.append(f"  modality {a.modality.value}")
        if a.pole is not None:
            lines.append(f"  pole {a.pole.name}")
        for pole, mag in a.pole_offsets.items():
            lines.append(f"  offset {pole.name} {mag!r}")
        if a.board_effect is not BoardEffect.NONE:
            lines.append(f"  board_effect {a.board_effect.value}")
        if a.expected_emotion is not None:
            lines.append(f"  expected_emotion {a.expected_emotion.name.lower()}")
        if a.announce:
            lines.append("  announce true")
        for lit in a.preconditions:
            lines.append(f"  pre {lit}")
        for lit in a.effects:
            lines.append(f"  eff {lit}")
        lines.append("end")
    return "\n".join(lines) + "\n"


def catalogs_equal(a: ActionCatalog, b: ActionCatalog) -> bool:
    if len(a.actions) != len(b.actions):
        return False
    return all(x == y for x, y in zip(a.actions, b.actions))


def default_catalog() -> ActionCatalog:
    from .textconf import default_data

    return load_catalog(default_data("actions.txt"))
