"""Forward planning over board state plus numeric comfort fluents.

The search is a deterministic comfort-greedy constructive pass: at every
decision point the task candidates are ordered by the comfort offset they
would credit the agent (ties broken by catalogue order), abstract
Motivate(pole) steps are inserted wherever the predicted magnitude would
fall below the threshold, and the whole plan is bounded by the horizon.
Correctness rests on the independent validator, which replays preconditions,
board legality, the comfort constraint and the goal test without sharing the
search's code path.

Motivational steps stay abstract in the plan; the episodic memory picks the
concrete action at execution time. Predicted recovery uses the configured
gain times the mean total reward of the pole's candidates.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import comfort as cf
from .actions import ActionCatalog, ActionSpec, BoardEffect, Kind, Modality
from .game import (
    Board,
    CenterColor,
    Color,
    cell_parity_color,
    infer_target,
    is_complete_valid,
)
from .memory import FactStore
from .personality import PersonalityVector, Trait, TraitPole

MOTIVATE = "motivate"

ROBOT_COLOR = Color.RED
HUMAN_COLOR = Color.BLUE


class NoPlan(RuntimeError):
    pass


@dataclass(frozen=True)
class PlanStep:
    action_id: str
    cell: tuple[int, int] | None = None
    pole: TraitPole | None = None

    @property
    def is_motivate(self) -> bool:
        return self.action_id == MOTIVATE

    def describe(self) -> str:
        if self.is_motivate:
            return f"{MOTIVATE}({self.pole.name})"
        return f"{self.action_id}{'' if self.cell is None else self.cell}"


@dataclass(frozen=True)
class PlanState:
    board: Board
    turn: str  # "robot" | "human"
    comfort: cf.ComfortState
    facts: FactStore = field(default_factory=FactStore)
    cued: bool = False
    must_place_precisely: bool = False  # set after a corrective removal
    step: int = 0


@dataclass(frozen=True)
class Plan:
    steps: tuple[PlanStep, ...]
    initial_values: dict[Trait, float]
    expected_trace: tuple[dict[Trait, float], ...]  # signed values after each step

    def __len__(self) -> int:
        return len(self.steps)


def default_recovery_estimates() -> dict[TraitPole, float]:
    # appropriateness 1.0 + outcome 1.0 at init
    return {pole: 2.0 for pole in TraitPole}


# -- effect prediction -----------------------------------------------------

def _predict_task(state: PlanState, action: ActionSpec, cell, p: PersonalityVector) -> PlanState:
    """Predicted successor for a standard/complementary step."""
    board = state.board
    turn = state.turn
    cued = state.cued
    must_precise = state.must_place_precisely

    if action.board_effect is BoardEffect.PLACE_OWN_CORRECT:
        board = _place(board, cell, ROBOT_COLOR, allow_wrong=False)
        turn = "human"
        must_precise = False
    elif action.board_effect is BoardEffect.PLACE_OWN_WRONG:
        board = _place(board, cell, ROBOT_COLOR, allow_wrong=True)
    elif action.board_effect is BoardEffect.PLACE_HUMANS_BLOCK:
        board = _place(board, cell, HUMAN_COLOR, allow_wrong=False)
        turn = "robot"
        cued = False
    elif action.id == "wait_human":
        board = _place(board, cell, HUMAN_COLOR, allow_wrong=False)
        turn = "robot"
        cued = False
    elif action.id == "remove_misplaced":
        from .game import remove_block

        board = remove_block(board, cell)
        must_precise = True
    elif action.id in ("cue_human_turn", "cue_human_turn_sound"):
        cued = True

    c = cf.apply_standard_decay(state.comfort)
    for trait, delta in action.applied_offsets(p).items():
        c = cf.apply_offset(c, trait, delta)
    return replace(state, board=board, turn=turn, comfort=c, cued=cued,
                   must_place_precisely=must_precise, step=state.step + 1)


def _place(board: Board, cell, color: Color, allow_wrong: bool) -> Board:
    from .game import apply_move

    return apply_move(board, cell, color, allow_wrong=allow_wrong)


def _recover(state: PlanState, trait: Trait, estimate: float) -> PlanState:
    c = cf.apply_recovery(state.comfort, trait, estimate)
    return replace(state, comfort=c, step=state.step + 1)


# -- candidate generation --------------------------------------------------

def _offset_sum(action: ActionSpec, p: PersonalityVector, state: PlanState) -> float:
    total = 0.0
    for trait, delta in action.applied_offsets(p).items():
        if trait in state.comfort.active_traits:
            total += delta
    return total


def _cells_for(board: Board, color: Color) -> list[tuple[int, int]]:
    """Empty cells this color may legally occupy, lowest index first."""
    target = infer_target(board)
    if target is CenterColor.UNKNOWN:
        return board.empty_cells()
    center = Color(target.value)
    return [c for c in board.empty_cells() if cell_parity_color(c, center) is color]


def _wrong_cells_for(board: Board, color: Color) -> list[tuple[int, int]]:
    target = infer_target(board)
    if target is CenterColor.UNKNOWN:
        return []
    center = Color(target.value)
    return [c for c in board.empty_cells() if cell_parity_color(c, center) is not color]


def _effective_turn(state: PlanState) -> str:
    """Turn with forced skips: a side with no legal cell passes."""
    if is_complete_valid(state.board) and not state.board.has_misplacement:
        return "done"
    if state.board.has_misplacement:
        return "robot"
    robot_cells = bool(_cells_for(state.board, ROBOT_COLOR))
    human_cells = bool(_cells_for(state.board, HUMAN_COLOR))
    if state.turn == "human" and not human_cells and robot_cells:
        return "robot"
    if state.turn == "robot" and not robot_cells and human_cells:
        return "human"
    return state.turn


def task_candidates(
    state: PlanState,
    catalog: ActionCatalog,
    p: PersonalityVector,
    speaking: bool,
) -> list[tuple[ActionSpec, tuple[int, int] | None]]:
    """Progressing actions at this state, best comfort offset first."""
    out: list[tuple[ActionSpec, tuple[int, int] | None]] = []

    if state.board.has_misplacement:
        idx = min(state.board.misplaced)
        return [(catalog.get("remove_misplaced"), (idx // 3, idx % 3))]

    turn = _effective_turn(state)
    if turn == "done":
        return []

    if turn == "robot":
        cells = _cells_for(state.board, ROBOT_COLOR)
        if cells:
            out.append((catalog.get("pick_place_precisely"), cells[0]))
        if not state.must_place_precisely:
            wrong = _wrong_cells_for(state.board, ROBOT_COLOR)
            if wrong and "pick_place_wrongly" in catalog:
                out.append((catalog.get("pick_place_wrongly"), wrong[0]))
    else:
        if state.cued:
            cells = _cells_for(state.board, HUMAN_COLOR)
            out.append((catalog.get("wait_human"), cells[0]))
        else:
            for cue_id in ("cue_human_turn", "cue_human_turn_sound"):
                if cue_id in catalog:
                    a = catalog.get(cue_id)
                    if speaking or a.modality is not Modality.VERBAL:
                        out.append((a, None))
            cells = _cells_for(state.board, HUMAN_COLOR)
            if cells and "replace_human" in catalog:
                out.append((catalog.get("replace_human"), cells[0]))

    out.sort(key=lambda ac: (-_offset_sum(ac[0], p, state), catalog.order_index(ac[0].id)))
    return out


# -- planning --------------------------------------------------------------

def _violated(state: PlanState) -> list[Trait]:
    return cf.needs_motivation(state.comfort)


def _motivate_step(p: PersonalityVector, trait: Trait) -> PlanStep:
    pole = p.pole(trait)
    assert pole is not None
    return PlanStep(MOTIVATE, pole=pole)


def plan(
    init: PlanState,
    catalog: ActionCatalog,
    p: PersonalityVector,
    speaking: bool,
    horizon: int,
    recovery_estimates: dict[TraitPole, float] | None = None,
) -> Plan:
    """Build a plan that completes the board and keeps comfort above threshold."""
    estimates = recovery_estimates or default_recovery_estimates()

    steps: list[PlanStep] = []
    state = init
    trace: list[dict[Trait, float]] = []

    def recover_in_place(trait: Trait) -> None:
        nonlocal state
        pole = p.pole(trait)
        if pole is None:
            raise NoPlan(f"comfort channel {trait.letter} active without a pole")
        steps.append(_motivate_step(p, trait))
        state = _recover(state, trait, estimates[pole])
        trace.append(state.comfort.signed_values())

    while True:
        if len(steps) > horizon:
            raise NoPlan(f"horizon {horizon} exhausted after {len(steps)} steps")
        # emergency recovery if the current state is already uncomfortable
        guard = 0
        while _violated(state):
            recover_in_place(_violated(state)[0])
            guard += 1
            if guard > 4:
                raise NoPlan("comfort cannot be recovered above threshold")

        candidates = task_candidates(state, catalog, p, speaking)
        if not candidates:
            if is_complete_valid(state.board) and not state.board.has_misplacement:
                break
            raise NoPlan("no applicable task action and the board is incomplete")

        action, cell = candidates[0]
        nxt = _predict_task(state, action, cell, p)
        inserts = 0
        while _violated(nxt):
            recover_in_place(_violated(nxt)[0])
            inserts += 1
            if inserts > 4:
                raise NoPlan("motivational recovery cannot keep comfort above threshold")
            nxt = _predict_task(state, action, cell, p)
        if len(steps) >= horizon:
            raise NoPlan(f"horizon {horizon} exhausted")
        steps.append(PlanStep(action.id, cell=cell))
        state = nxt
        trace.append(state.comfort.signed_values())

    return Plan(tuple(steps), init.comfort.signed_values(), tuple(trace))


def replan(
    current: PlanState,
    catalog: ActionCatalog,
    p: PersonalityVector,
    speaking: bool,
    horizon: int,
    recovery_estimates: dict[TraitPole, float] | None = None,
) -> Plan:
    """Fresh plan from executed actuals; same contract as plan()."""
    return plan(current, catalog, p, speaking, horizon, recovery_estimates)


def simulate(
    p_obj: Plan,
    init: PlanState,
    catalog: ActionCatalog,
    personality: PersonalityVector,
    recovery_estimates: dict[TraitPole, float] | None = None,
) -> list[dict[Trait, float]]:
    """Expected signed comfort after each plan step, replayed from the start."""
    estimates = recovery_estimates or default_recovery_estimates()
    state = init
    out: list[dict[Trait, float]] = []
    for step in p_obj.steps:
        if step.is_motivate:
            state = _recover(state, step.pole.trait, estimates[step.pole])
        else:
            state = _predict_task(state, catalog.get(step.action_id), step.cell, personality)
        out.append(state.comfort.signed_values())
    return out


# -- independent validation -------------------------------------------------

@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    reason: str = ""


def validate_plan(
    p_obj: Plan,
    init: PlanState,
    catalog: ActionCatalog,
    personality: PersonalityVector,
    speaking: bool,
    recovery_estimates: dict[TraitPole, float] | None = None,
) -> ValidationResult:
    """Replay the plan against preconditions, comfort and the goal.

    Written as a straight checker, separate from the search: literal
    preconditions come from the catalogue, board changes go through the game
    ops, and the comfort constraint is m >= Th at every step. One exception:
    a replan may start from a state where several channels already sit below
    the threshold, and each Motivate step recovers a single pole, so inside
    the plan's leading run of Motivate steps a channel may stay low while its
    own recovery is still pending later in that run.
    """
    estimates = recovery_estimates or default_recovery_estimates()
    board = init.board
    turn = init.turn
    cued = init.cued
    must_precise = init.must_place_precisely
    c = init.comfort
    th = c.config.threshold

    from .game import apply_move, remove_block

    prefix_end = 0
    while prefix_end < len(p_obj.steps) and p_obj.steps[prefix_end].is_motivate:
        prefix_end += 1

    def comfort_ok(step_index: int) -> str | None:
        for t in c.active_traits:
            if c.magnitude(t) >= th:
                continue
            pending = any(
                s.is_motivate and s.pole.trait is t
                for s in p_obj.steps[step_index + 1 : prefix_end]
            )
            if not pending:
                return t.letter
        return None

    for i, step in enumerate(p_obj.steps):
        where = f"step {i} ({step.describe()})"
        # forced pass: a side with no remaining legal cell skips its turn
        if not board.has_misplacement:
            if turn == "human" and not _cells_for(board, HUMAN_COLOR) and _cells_for(board, ROBOT_COLOR):
                turn = "robot"
            elif turn == "robot" and not _cells_for(board, ROBOT_COLOR) and _cells_for(board, HUMAN_COLOR):
                turn = "human"
        if step.is_motivate:
            if personality.pole(step.pole.trait) is not step.pole:
                return ValidationResult(False, f"{where}: pole not held by the agent")
            c = cf.apply_recovery(c, step.pole.trait, estimates[step.pole])
        else:
            try:
                action = catalog.get(step.action_id)
            except KeyError:
                return ValidationResult(False, f"{where}: unknown action")
            if not speaking and action.modality is Modality.VERBAL:
                return ValidationResult(False, f"{where}: verbal action in Not-Speaking plan")
            # literal preconditions
            for lit in action.preconditions:
                if lit == "turn(robot)" and turn != "robot":
                    return ValidationResult(False, f"{where}: not the robot's turn")
                if lit == "turn(human)" and turn != "human":
                    return ValidationResult(False, f"{where}: not the human's turn")
                if lit == "cued" and not cued:
                    return ValidationResult(False, f"{where}: human was never cued")
                if lit == "misplaced" and not board.has_misplacement:
                    return ValidationResult(False, f"{where}: nothing to remove")
                if lit == "target_known" and infer_target(board) is CenterColor.UNKNOWN:
                    return ValidationResult(False, f"{where}: wrong placement before target known")
            if board.has_misplacement and step.action_id != "remove_misplaced":
                return ValidationResult(False, f"{where}: misplacement left uncorrected")
            try:
                if action.board_effect is BoardEffect.PLACE_OWN_CORRECT:
                    board = apply_move(board, step.cell, ROBOT_COLOR)
                    turn, must_precise = "human", False
                elif action.board_effect is BoardEffect.PLACE_OWN_WRONG:
                    if must_precise:
                        return ValidationResult(False, f"{where}: wrong placement while a correction is due")
                    board = apply_move(board, step.cell, ROBOT_COLOR, allow_wrong=True)
                elif action.board_effect is BoardEffect.PLACE_HUMANS_BLOCK:
                    board = apply_move(board, step.cell, HUMAN_COLOR)
                    turn, cued = "robot", False
                elif step.action_id == "wait_human":
                    board = apply_move(board, step.cell, HUMAN_COLOR)
                    turn, cued = "robot", False
                elif step.action_id == "remove_misplaced":
                    board = remove_block(board, step.cell)
                    must_precise = True
                elif step.action_id in ("cue_human_turn", "cue_human_turn_sound"):
                    cued = True
            except Exception as e:  # game-rule violation
                return ValidationResult(False, f"{where}: {e}")
            c = cf.apply_standard_decay(c)
            for trait, delta in action.applied_offsets(personality).items():
                c = cf.apply_offset(c, trait, delta)
        low = comfort_ok(i)
        if low is not None:
            return ValidationResult(False, f"{where}: comfort {low} fell below threshold")

    if not is_complete_valid(board):
        return ValidationResult(False, "final board incomplete or invalid")
    if board.has_misplacement:
        return ValidationResult(False, "final board still tagged misplaced")
    return ValidationResult(True)


def format_plan(p_obj: Plan) -> str:
    """Numbered steps with expected comfort values, for verbose CLI output."""
    lines = []
    values = " ".join(f"{t.letter}={v:+.2f}" for t, v in p_obj.initial_values.items())
    lines.append(f"  init: {values}")
    for i, (step, vals) in enumerate(zip(p_obj.steps, p_obj.expected_trace), start=1):
        values = " ".join(f"{t.letter}={v:+.2f}" for t, v in vals.items())
        lines.append(f"  {i:3d}. {step.describe():42s} {values}")
    return "\n".join(lines)
