"""Sentence realization from templates, plus the optional external-generator seam.

Templates are keyed by action id and tagged with style words; rendering picks
among the entries sharing the best overlap with the requested style tags
(seeded-random within ties) and fills the {emotion} and {last_move} slots.
Sound actions produce cue-only utterances. When an external language model is
configured, build_llm_request packages the same inputs as a structured
document for it; nothing in the default path touches the network.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field

from .memory import Emotion
from .personality import GradeLevel, TraitPole
from .textconf import ParseError, blocks, require_args, tokenize


class MissingTemplate(KeyError):
    pass


SOUND_CUES: dict[str, str] = {
    "cue_human_turn_sound": "turn_chime",
}


@dataclass(frozen=True)
class UtteranceRequest:
    action_id: str
    style_tags: frozenset[str]
    poles: tuple[TraitPole, ...]
    user_emotion: Emotion
    user_attentive: bool
    history: tuple[str, ...] = ()
    last_move: str = ""


@dataclass(frozen=True)
class Utterance:
    text: str
    volume: GradeLevel
    cue: str | None = None


@dataclass(frozen=True)
class Template:
    action_id: str
    tags: frozenset[str]
    text: str


@dataclass(frozen=True)
class TemplateStore:
    templates: tuple[Template, ...]

    def for_action(self, action_id: str) -> list[Template]:
        return [t for t in self.templates if t.action_id == action_id]


def render(
    req: UtteranceRequest,
    store: TemplateStore,
    rng: random.Random,
    volume: GradeLevel = GradeLevel.MID,
) -> Utterance:
    """Realize one utterance; sound actions return a cue with empty text."""
    if req.action_id in SOUND_CUES:
        return Utterance("", volume, cue=SOUND_CUES[req.action_id])
    candidates = store.for_action(req.action_id)
    if not candidates:
        raise MissingTemplate(f"no templates for action '{req.action_id}'")
    best = max(len(t.tags & req.style_tags) for t in candidates)
    pool = [t for t in candidates if len(t.tags & req.style_tags) == best]
    chosen = pool[rng.randrange(len(pool))]
    text = chosen.text.replace("{emotion}", req.user_emotion.label).replace(
        "{last_move}", req.last_move or "the last move"
    )
    return Utterance(text, volume)


GENERATOR_PROMPT = (
    "You write the voice lines for a robotic arm that is placing colored "
    "blocks on a 3x3 board together with a person. Produce one short sentence "
    "in the text field, matching the requested action and tone. The emotion "
    "and attention fields describe the person right now; the personality and "
    "language style fields set the speaking manner; the action field names "
    "what the sentence must accomplish."
)


def build_llm_request(req: UtteranceRequest) -> str:
    """Package the prompt and the five input fields as a JSON document."""
    doc = {
        "prompt": GENERATOR_PROMPT,
        "emotion": req.user_emotion.label,
        "attention": req.user_attentive,
        "personality": [p.name for p in req.poles],
        "language style": sorted(req.style_tags),
        "action": req.action_id,
        "history": list(req.history),
    }
    return json.dumps(doc, sort_keys=True)


class ExternalSpeechClient:
    """HTTP adapter for an external sentence generator.

    Disabled unless an endpoint is configured; the API key is read from the
    environment variable named in `key_env`. One POST per request, expecting
    {"text": ...} back.
    """

    def __init__(self, endpoint: str, key_env: str = "BLOCKMATE_SPEECH_KEY", timeout: float = 10.0):
        self.endpoint = endpoint
        self.key_env = key_env
        self.timeout = timeout

    def generate(self, req: UtteranceRequest) -> str:
        import httpx

        headers = {}
        key = os.environ.get(self.key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        resp = httpx.post(
            self.endpoint,
            content=build_llm_request(req),
            headers={"Content-Type": "application/json", **headers},
            timeout=self.timeout,
        )
        resp.raise_for_status()
        return resp.json()["text"]


# -- template loading ------------------------------------------------------

def load_templates(text: str) -> TemplateStore:
    """Parse template blocks:

    template <action_id>
      tags <Tag> [<Tag> ...]
      text <sentence, may contain {emotion} and {last_move}>
    end
    """
    out: list[Template] = []
    for head, body in blocks(tokenize(text), "template"):
        require_args(head, 1)
        tags: frozenset[str] = frozenset()
        sentence: str | None = None
        for d in body:
            if d.key == "tags":
                tags = frozenset(d.args)
            elif d.key == "text":
                require_args(d, 1)
                sentence = " ".join(d.args)
            else:
                raise ParseError(d.line, 1, f"unknown template directive '{d.key}'")
        if sentence is None:
            raise ParseError(head.line, 1, f"template for '{head.args[0]}' has no text")
        out.append(Template(head.args[0], tags, sentence))
    return TemplateStore(tuple(out))


def default_templates() -> TemplateStore:
    from .textconf import default_data

    return load_templates(default_data("templates.txt"))
