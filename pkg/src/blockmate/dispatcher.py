"""Session engine: perceive, update comfort, (re)plan, concretize, execute,
observe, learn — in batch mode against a simulated user or live mode driven
through the service API.

Each step() call runs exactly one decision cycle and appends the events it
produced to the session log. Everything random flows through one seeded
generator, so a (config, seed) pair fully determines the event log.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from . import arm as arm_mod
from . import comfort as cf
from . import game
from . import memory as mem_mod
from . import planner as plan_mod
from . import speech as speech_mod
from . import usersim
from .actions import ActionCatalog, ActionSpec, BoardEffect, Kind, Modality, available, default_catalog, load_catalog, validate_coverage
from .memory import Emotion, EpisodicMemory, FactStore, encode_world_state, load_memory_config
from .personality import (
    ActionClass,
    ParameterMap,
    PersonalityVector,
    Trait,
    TraitPole,
    dominant_poles,
    generate_parameters,
    load_parameter_map,
)
from .textconf import default_data

VERBAL_SECONDS = 2.5
SOUND_SECONDS = 1.0


class SessionEnded(RuntimeError):
    pass


class StepLimitExceeded(RuntimeError):
    pass


class Mode(enum.Enum):
    BATCH = "batch"
    LIVE = "live"


@dataclass(frozen=True)
class SessionConfig:
    personality: PersonalityVector
    speaking: bool = True
    mode: Mode = Mode.BATCH
    seed: int | None = None
    comfort: cf.ComfortConfig = cf.ComfortConfig()
    profile: str = "reactive"
    horizon: int = 40
    step_limit: int = 500
    failure_probability: float = 0.0
    force_fail_at: int | None = None
    # None -> packaged defaults
    catalog_path: str | None = None
    templates_path: str | None = None
    profiles_path: str | None = None
    geometry_path: str | None = None
    sensitivity_path: str | None = None
    params_path: str | None = None
    memory_config_path: str | None = None
    memory_load_path: str | None = None

    def __post_init__(self):
        if self.mode is Mode.BATCH and self.seed is None:
            raise ValueError("batch sessions require a seed")


@dataclass(frozen=True)
class SessionEvent:
    tick: int
    kind: str
    t: float
    payload: dict

    def to_json(self) -> str:
        doc = {"tick": self.tick, "kind": self.kind, "t": round(self.t, 6), **self.payload}
        return json.dumps(doc, sort_keys=True)


def _read(path: str | None, default_name: str) -> str:
    if path is None:
        return default_data(default_name)
    return Path(path).read_text(encoding="utf-8")


def first_mover(p: PersonalityVector) -> str:
    """Robot starts iff disagreeable or extroverted; otherwise it cues the human."""
    return "robot" if (p.w_a < 0 or p.w_e > 0) else "human"


_ACTION_CLASS: dict[str, ActionClass] = {
    "pick_place_precisely": ActionClass.PICK_PLACE,
    "pick_place_wrongly": ActionClass.PICK_PLACE,
    "replace_human": ActionClass.PICK_PLACE,
    "remove_misplaced": ActionClass.PICK_PLACE,
}


def action_class_for(action: ActionSpec) -> ActionClass:
    if action.id in _ACTION_CLASS:
        return _ACTION_CLASS[action.id]
    if action.modality is Modality.NONVERBAL:
        return ActionClass.COMMUNICATIVE_GESTURE
    return ActionClass.SPEECH


class Session:
    """One collaborative game run by a single decision loop."""

    def __init__(self, cfg: SessionConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed if cfg.seed is not None else 0)
        self.clock = arm_mod.VirtualClock()

        self.catalog: ActionCatalog = (
            default_catalog() if cfg.catalog_path is None else load_catalog(_read(cfg.catalog_path, "actions.txt"))
        )
        validate_coverage(self.catalog)
        self.templates = speech_mod.load_templates(_read(cfg.templates_path, "templates.txt"))
        profiles = usersim.load_profiles(_read(cfg.profiles_path, "profiles.txt"))
        if cfg.profile not in profiles:
            raise ValueError(f"unknown user profile '{cfg.profile}'")
        self.user = profiles[cfg.profile]
        self.geometry = arm_mod.load_geometry(_read(cfg.geometry_path, "geometry.txt"))
        self.sensitivity = cf.load_sensitivity(_read(cfg.sensitivity_path, "sensitivity.txt"))
        self.pmap: ParameterMap = load_parameter_map(_read(cfg.params_path, "params.txt"))
        memcfg = load_memory_config(_read(cfg.memory_config_path, "memory.txt"))

        motivational = [a for a in self.catalog.actions if a.kind is Kind.MOTIVATIONAL]
        self.memory = EpisodicMemory(motivational, memcfg)
        if cfg.memory_load_path:
            self.memory.load(Path(cfg.memory_load_path).read_text(encoding="utf-8"))

        self.personality = cfg.personality
        self.comfort = cf.init_comfort(cfg.personality, cfg.comfort)
        self.board = game.new_board()
        self.turn = first_mover(cfg.personality)
        self.cued = False
        self.must_place_precisely = False
        self.facts = FactStore()
        self.facts.assert_fact(f"turn({self.turn})")

        self.window = usersim.PerceptionWindow()
        self.world = encode_world_state(Emotion.NEUTRAL, True)

        self.events: list[SessionEvent] = []
        self.trajectories: list[arm_mod.Trajectory] = []
        self.comfort_rows: list[tuple[int, str, Trait, float, float, float]] = []
        self.utterances: list[str] = []
        self.ended = False
        self.waiting_for_human = False
        self.pending_human_cell: tuple[int, int] | None = None
        self.red_placed = 0
        self.blue_placed = 0
        self._tick = 0

        self.plan: plan_mod.Plan | None = None
        self.plan_index = 0
        self.expected_state: plan_mod.PlanState | None = None
        self.need_replan = True  # build the initial plan on first step
        self._plan_event_kind = "Planned"
        # (plan, state it was computed from, recovery estimates) for auditing
        self.plan_history: list[tuple[plan_mod.Plan, plan_mod.PlanState, dict]] = []
        self._make_plan()

    # -- plumbing ----------------------------------------------------------

    def emit(self, kind: str, **payload) -> SessionEvent:
        ev = SessionEvent(self._tick, kind, self.clock.now, payload)
        self._tick += 1
        self.events.append(ev)
        return ev

    def _plan_state(self) -> plan_mod.PlanState:
        return plan_mod.PlanState(
            board=self.board,
            turn=self.turn,
            comfort=self.comfort,
            facts=self.facts.snapshot(),
            cued=self.cued,
            must_place_precisely=self.must_place_precisely,
        )

    def _recovery_estimates(self) -> dict[TraitPole, float]:
        out: dict[TraitPole, float] = {}
        for pole in TraitPole:
            ids = [a.id for a in available(self.catalog, self.cfg.speaking, Kind.MOTIVATIONAL, pole)]
            out[pole] = self.memory.mean_total(self.world, ids) if ids else 0.0
        return out

    def _make_plan(self) -> None:
        state = self._plan_state()
        estimates = self._recovery_estimates()
        self.plan = plan_mod.plan(
            state,
            self.catalog,
            self.personality,
            self.cfg.speaking,
            self.cfg.horizon,
            estimates,
        )
        self.plan_history.append((self.plan, state, estimates))
        self.plan_index = 0
        self.expected_state = state
        self.need_replan = False
        self.emit(
            self._plan_event_kind,
            steps=[s.describe() for s in self.plan.steps],
            length=len(self.plan.steps),
            expected=[{t.letter: v for t, v in vals.items()} for vals in self.plan.expected_trace],
        )
        self._plan_event_kind = "Replanned"

    def _signed(self) -> dict[str, float]:
        return {t.letter: v for t, v in self.comfort.signed_values().items()}

    def _expected_signed(self) -> dict[Trait, float]:
        if self.plan is None or self.plan_index == 0:
            return dict(self.plan.initial_values) if self.plan else {}
        idx = min(self.plan_index - 1, len(self.plan.expected_trace) - 1)
        return dict(self.plan.expected_trace[idx])

    def _record_comfort(self, action_id: str) -> None:
        expected = self._expected_signed()
        th = self.cfg.comfort.threshold
        for trait in self.comfort.active_traits:
            signed_th = th if self.personality.weight(trait) > 0 else -th
            self.comfort_rows.append(
                (
                    self._tick,
                    action_id,
                    trait,
                    round(expected.get(trait, 0.0), 9),
                    self.comfort.signed(trait),
                    signed_th,
                )
            )

    # -- one decision cycle --------------------------------------------------

    def step(self) -> list[SessionEvent]:
        if self.ended:
            raise SessionEnded("session already ended")
        start = len(self.events)

        self._consume_perception()
        self._maybe_replan()

        assert self.plan is not None
        if self.plan_index >= len(self.plan.steps):
            self._finish_or_replan()
            return self.events[start:]

        step = self.plan.steps[self.plan_index]
        if step.is_motivate:
            self.plan_index += 1
            self._advance_expected(step)
            self._execute_motivational(step.pole)
        else:
            action = self.catalog.get(step.action_id)
            if action.id == "wait_human" and self.cfg.mode is Mode.LIVE and self.pending_human_cell is None:
                self.waiting_for_human = True
                return self.events[start:]
            self.waiting_for_human = False
            self.plan_index += 1
            self._advance_expected(step)
            self._execute_task(action, step.cell)

        if (
            game.is_complete_valid(self.board)
            and not self.board.has_misplacement
            and self.plan_index >= len(self.plan.steps)
        ):
            self._end_session()
        return self.events[start:]

    def _finish_or_replan(self) -> None:
        if game.is_complete_valid(self.board) and not self.board.has_misplacement:
            self._end_session()
        else:
            self.need_replan = True
            self._make_plan()

    def _end_session(self) -> None:
        self.emit("SessionEnded", board=self.board.serialize(), moves=self.red_placed + self.blue_placed)
        self.ended = True

    def _consume_perception(self) -> None:
        if len(self.window) == 0:
            return
        emotion = self.window.filter_emotion(self.clock.now)
        attentive = self.window.last_attentive
        self.world = encode_world_state(emotion, attentive)
        self.emit("Perceived", emotion=emotion.label, attentive=attentive)
        before = {t: self.comfort.magnitude(t) for t in self.comfort.active_traits}
        self.comfort = cf.apply_perception(
            self.comfort, dominant_poles(self.personality), self.world, self.sensitivity
        )
        deltas = {
            t.letter: round(self.comfort.magnitude(t) - before[t], 9)
            for t in self.comfort.active_traits
            if self.comfort.magnitude(t) != before[t]
        }
        if deltas:
            self.emit("ComfortUpdated", cause="perception", values=self._signed(), deltas=deltas)

    def _maybe_replan(self) -> None:
        if self.plan is None or self.need_replan:
            self._make_plan()
            return
        if self.plan_index >= len(self.plan.steps):
            return  # handled by the caller
        violated = cf.needs_motivation(self.comfort)
        if violated:
            nxt = self.plan.steps[self.plan_index]
            if not (nxt.is_motivate and nxt.pole.trait in violated):
                self._make_plan()

    def _advance_expected(self, step: plan_mod.PlanStep) -> None:
        assert self.expected_state is not None
        if step.is_motivate:
            est = self._recovery_estimates()[step.pole]
            self.expected_state = plan_mod._recover(self.expected_state, step.pole.trait, est)
        else:
            self.expected_state = plan_mod._predict_task(
                self.expected_state, self.catalog.get(step.action_id), step.cell, self.personality
            )

    # -- execution -----------------------------------------------------------

    def _execute_motivational(self, pole: TraitPole) -> None:
        candidates = available(self.catalog, self.cfg.speaking, Kind.MOTIVATIONAL, pole)
        selected = self.memory.select_motivational(self.world, candidates, self.rng)
        world_at_selection = self.world
        self.emit("ActionStarted", action=selected.id, action_kind="motivational", pole=pole.name)

        ok = True
        if selected.modality is Modality.NONVERBAL:
            params = generate_parameters(self.personality, ActionClass.COMMUNICATIVE_GESTURE, self.pmap)
            traj = arm_mod.synth_gesture(self.geometry, selected.id, params)
            ok = self._run_trajectory(traj, selected.id)
        else:
            self._speak(selected.id, verbal=True)

        if not ok:
            self.need_replan = True
            return

        observed = self._observe(selected.id)
        matched = observed is selected.expected_emotion
        new_total = self.memory.update_reward(world_at_selection, selected, observed)
        self.emit(
            "RewardUpdated",
            action=selected.id,
            observed=observed.label,
            expected=selected.expected_emotion.label,
            matched=matched,
            total=round(new_total, 9),
            world=world_at_selection.serialize(),
        )
        self.comfort = cf.apply_recovery(self.comfort, pole.trait, new_total)
        self.emit(
            "ComfortUpdated",
            cause="recovery",
            values=self._signed(),
            trait=pole.trait.letter,
            expected={t.letter: round(v, 9) for t, v in self._expected_signed().items()},
        )
        self._record_comfort(selected.id)
        self.emit("ActionCompleted", action=selected.id)

    def _execute_task(self, action: ActionSpec, cell) -> None:
        self.emit("ActionStarted", action=action.id, action_kind=action.kind.value)
        ok = True

        if action.board_effect is BoardEffect.PLACE_OWN_CORRECT:
            ok = self._pick_place(action, cell, game.Color.RED, allow_wrong=False)
        elif action.board_effect is BoardEffect.PLACE_OWN_WRONG:
            ok = self._pick_place(action, cell, game.Color.RED, allow_wrong=True)
        elif action.board_effect is BoardEffect.PLACE_HUMANS_BLOCK:
            ok = self._pick_place(action, cell, game.Color.BLUE, allow_wrong=False)
            if ok and action.announce and self.cfg.speaking:
                self._speak(action.id, verbal=True)
        elif action.id == "wait_human":
            self._wait_human(cell)
        elif action.id == "remove_misplaced":
            ok = self._remove(cell)
        elif action.id in ("cue_human_turn", "cue_human_turn_sound"):
            self._speak(action.id, verbal=action.modality is Modality.VERBAL)
            self.cued = True
            self.facts.assert_fact("cued")
        else:
            params = generate_parameters(self.personality, action_class_for(action), self.pmap)
            traj = arm_mod.synth_gesture(self.geometry, action.id, params)
            ok = self._run_trajectory(traj, action.id)

        # decay + offsets apply whether or not the motion completed; a failed
        # action still consumed a tick of effort
        self.comfort = cf.apply_standard_decay(self.comfort)
        if ok:
            for trait, delta in action.applied_offsets(self.personality).items():
                self.comfort = cf.apply_offset(self.comfort, trait, delta)
        self.emit(
            "ComfortUpdated",
            cause="action",
            values=self._signed(),
            action=action.id,
            expected={t.letter: round(v, 9) for t, v in self._expected_signed().items()},
        )
        self._record_comfort(action.id)

        if not ok:
            self.need_replan = True
            return
        self.emit("ActionCompleted", action=action.id, board=self.board.serialize())

        if self.cfg.mode is Mode.BATCH:
            emotion, attentive = usersim.react(
                self.user, usersim.CATEGORY_BY_ACTION.get(action.id, "default"), self.rng
            )
            self.window.push(self.clock.now, emotion, attentive)

        self._check_drift()

    def _pick_place(self, action: ActionSpec, cell, color: game.Color, allow_wrong: bool) -> bool:
        params = generate_parameters(self.personality, ActionClass.PICK_PLACE, self.pmap)
        slot_index = self.red_placed if color is game.Color.RED else self.blue_placed
        slot = self.geometry.slot(color is game.Color.RED, slot_index)
        traj = arm_mod.synth_pick_place(
            self.geometry, slot, self.geometry.cell_center(cell), params, action_id=action.id
        )
        if not self._run_trajectory(traj, action.id):
            return False
        self.board = game.apply_move(self.board, cell, color, allow_wrong=allow_wrong)
        if color is game.Color.RED:
            self.red_placed += 1
        else:
            self.blue_placed += 1
        if action.board_effect is BoardEffect.PLACE_OWN_CORRECT:
            self.turn = "human"
            self.must_place_precisely = False
        elif action.board_effect is BoardEffect.PLACE_HUMANS_BLOCK:
            self.turn = "robot"
            self.cued = False
            self.emit("HumanMoved", cell=list(cell), by="robot", board=self.board.serialize())
        self._sync_turn_facts()
        return True

    def _remove(self, cell) -> bool:
        params = generate_parameters(self.personality, ActionClass.PICK_PLACE, self.pmap)
        slot = self.geometry.slot(True, max(0, self.red_placed - 1))
        traj = arm_mod.synth_pick_place(
            self.geometry, self.geometry.cell_center(cell), slot, params, action_id="remove_misplaced"
        )
        if not self._run_trajectory(traj, "remove_misplaced"):
            return False
        self.board = game.remove_block(self.board, cell)
        self.red_placed = max(0, self.red_placed - 1)
        self.must_place_precisely = True
        return True

    def _wait_human(self, predicted_cell) -> None:
        del predicted_cell  # the plan's guess; the actual cell decides
        if self.cfg.mode is Mode.BATCH:
            target = game.infer_target(self.board)
            cell = usersim.choose_human_move(self.user, self.board, target, self.rng)
        else:
            cell = self.pending_human_cell
            self.pending_human_cell = None
        self.clock.advance(self.user.think_time)
        try:
            self.board = game.apply_move(self.board, cell, game.Color.BLUE)
        except (game.CellOccupied, game.IllegalPlacement) as e:
            self.emit("ActionFailed", action="wait_human", reason=str(e))
            self.need_replan = True
            return
        self.blue_placed += 1
        self.turn = "robot"
        self.cued = False
        self._sync_turn_facts()
        self.emit("HumanMoved", cell=list(cell), by="human", board=self.board.serialize())

    def _run_trajectory(self, traj: arm_mod.Trajectory, action_id: str) -> bool:
        failure = arm_mod.FailureModel(self.cfg.failure_probability, self.cfg.force_fail_at)
        outcome = arm_mod.execute(traj, self.clock, failure, self.rng)
        self.trajectories.append(traj)
        if outcome.outcome is arm_mod.Outcome.FAILED:
            self.emit("ActionFailed", action=action_id, waypoint=outcome.failed_at_waypoint)
            return False
        return True

    def _speak(self, action_id: str, verbal: bool) -> None:
        params = generate_parameters(self.personality, ActionClass.SPEECH, self.pmap)
        req = speech_mod.UtteranceRequest(
            action_id=action_id,
            style_tags=params.language_style,
            poles=tuple(dominant_poles(self.personality)),
            user_emotion=self.world.emotion,
            user_attentive=self.world.attentive,
            history=tuple(self.utterances),
        )
        utt = speech_mod.render(req, self.templates, self.rng, volume=params.volume)
        if verbal and not self.cfg.speaking:
            raise AssertionError("verbal rendering attempted in a Not-Speaking session")
        self.clock.advance(VERBAL_SECONDS if verbal else SOUND_SECONDS)
        if utt.text:
            self.utterances.append(utt.text)
        self.emit(
            "Utterance",
            action=action_id,
            text=utt.text,
            cue=utt.cue,
            volume=utt.volume.value,
            modality="Verbal" if verbal else "Sound",
        )

    def _observe(self, action_id: str) -> Emotion:
        if self.cfg.mode is Mode.BATCH:
            emotion, attentive = usersim.react(
                self.user, usersim.CATEGORY_BY_ACTION.get(action_id, "default"), self.rng
            )
            self.window.push(self.clock.now, emotion, attentive)
            return emotion
        return self.window.filter_emotion(self.clock.now)

    def _check_drift(self) -> None:
        if self.board.has_misplacement:
            self.need_replan = True
            return
        assert self.expected_state is not None
        if self.board.serialize() != self.expected_state.board.serialize():
            self.need_replan = True

    def _sync_turn_facts(self) -> None:
        self.facts.retract("turn(robot)")
        self.facts.retract("turn(human)")
        self.facts.assert_fact(f"turn({self.turn})")
        if not self.cued:
            self.facts.retract("cued")

    # -- live-mode inputs ------------------------------------------------------

    def queue_human_move(self, cell: tuple[int, int]) -> None:
        if self.cfg.mode is not Mode.LIVE:
            raise usersim.NotLiveSession("batch sessions simulate their own human")
        game.apply_move(self.board, cell, game.Color.BLUE)  # raises if illegal; board unchanged
        self.pending_human_cell = cell

    def inject_perception(self, emotion: Emotion, attentive: bool) -> None:
        if self.cfg.mode is not Mode.LIVE:
            raise usersim.NotLiveSession("perception injection needs a live session")
        self.window.push(self.clock.now, emotion, attentive)


@dataclass
class SessionLog:
    config: SessionConfig
    events: list[SessionEvent]
    comfort_rows: list
    trajectories: list
    summary: dict


def run_to_completion(s: Session) -> SessionLog:
    if s.cfg.mode is not Mode.BATCH:
        raise ValueError("run_to_completion requires a batch session")
    steps = 0
    while not s.ended:
        s.step()
        steps += 1
        if steps > s.cfg.step_limit:
            raise StepLimitExceeded(f"no termination within {s.cfg.step_limit} steps")
    return make_log(s)


def make_log(s: Session) -> SessionLog:
    return SessionLog(
        config=s.cfg,
        events=list(s.events),
        comfort_rows=list(s.comfort_rows),
        trajectories=list(s.trajectories),
        summary=summarize(s),
    )


def summarize(s: Session) -> dict:
    by_action: dict[str, int] = {}
    by_kind: dict[str, int] = {}
    motivate_by_pole: dict[str, int] = {}
    robot_placements = 0
    for ev in s.events:
        if ev.kind == "ActionStarted":
            aid = ev.payload["action"]
            by_action[aid] = by_action.get(aid, 0) + 1
            k = ev.payload["action_kind"]
            by_kind[k] = by_kind.get(k, 0) + 1
            if k == "motivational":
                pole = ev.payload["pole"]
                motivate_by_pole[pole] = motivate_by_pole.get(pole, 0) + 1
        if ev.kind == "ActionCompleted" and ev.payload["action"] in (
            "pick_place_precisely",
            "pick_place_wrongly",
            "replace_human",
        ):
            robot_placements += 1
    return {
        "actions": dict(sorted(by_action.items())),
        "kinds": dict(sorted(by_kind.items())),
        "motivational_by_pole": dict(sorted(motivate_by_pole.items())),
        "robot_placements": robot_placements,
        "human_placements": s.blue_placed - sum(
            1 for ev in s.events
            if ev.kind == "ActionCompleted" and ev.payload["action"] == "replace_human"
        ),
        "board": s.board.serialize(),
        "ticks": s._tick,
        "virtual_seconds": round(s.clock.now, 6),
    }


# -- exports -----------------------------------------------------------------

def export_events_jsonl(log: SessionLog) -> str:
    return "\n".join(ev.to_json() for ev in log.events) + "\n"


def export_comfort_csv(log: SessionLog) -> str:
    return cf.trace_csv(log.comfort_rows)


def export_trajectory_csv(log: SessionLog) -> str:
    lines = ["t,x,y,z,action_id"]
    t0 = 0.0
    for traj in log.trajectories:
        for t, (x, y, z) in arm_mod.sample_path(traj):
            lines.append(f"{t0 + t:.6f},{x:.6f},{y:.6f},{z:.6f},{traj.action_id}")
        t0 += traj.duration
    return "\n".join(lines) + "\n"


def export_summary(log: SessionLog) -> str:
    return json.dumps(log.summary, sort_keys=True, indent=2) + "\n"


EXPORTERS = {
    "events-jsonl": export_events_jsonl,
    "comfort-csv": export_comfort_csv,
    "trajectory-csv": export_trajectory_csv,
    "summary": export_summary,
}


def export_trace(log: SessionLog, fmt: str) -> str:
    try:
        return EXPORTERS[fmt](log)
    except KeyError:
        raise ValueError(f"unknown export format '{fmt}'") from None


def read_events_jsonl(text: str) -> list[SessionEvent]:
    """Parse an events-jsonl document back into SessionEvent objects."""
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        payload = {k: v for k, v in doc.items() if k not in ("tick", "kind", "t")}
        out.append(SessionEvent(doc["tick"], doc["kind"], doc["t"], payload))
    return out


def new_session(cfg: SessionConfig) -> Session:
    return Session(cfg)
