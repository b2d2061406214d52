/** Pure event fold: the rendered view derives only from service snapshots and
 * streamed events, never from optimistic client-side game logic. */

import type { ChartState, SessionEvent, UiSessionView } from './types.js';

const GESTURE_NARRATION: Record<string, string> = {
  pick_place_precisely: 'places one of its red blocks, carefully',
  pick_place_wrongly: 'drops a red block somewhere it should not go',
  replace_human: 'grabs a blue block and takes your turn',
  remove_misplaced: 'picks the stray block back up',
  make_visible_movement_horizontal: 'sweeps its arm wide, side to side',
  make_visible_movement_vertical: 'raises and lowers its arm in a big arc',
  make_retracting_movement: 'pulls its arm back toward itself',
  hide_gripper_behind_arm: 'tucks the gripper away behind its arm',
  move_closer_to_human: 'leans its gripper gently toward you',
  make_threatening_move_horizontal: 'slices the air in front of you',
  make_threatening_move_sagittal: 'jabs straight toward you',
  open_close_gripper_tease: 'snaps its gripper open and shut at you',
  gesture_keep_attention_on_task: 'points firmly at the board',
  make_random_movement: 'wanders aimlessly through the air',
  wait_some_seconds: 'just sits there for a moment',
  wait_human: 'waits for you to place a block',
};

export function initialView(): UiSessionView {
  return {
    board: '.........',
    turn: 'human',
    status: 'running',
    comfort: {},
    thresholds: {},
    utterances: [],
    narration: [],
    chart: { actual: {}, expected: {}, planned: {} },
    cursor: -1,
    ended: false,
  };
}

function pushPoint(series: Record<string, { tick: number; value: number }[]>,
                   letter: string, tick: number, value: number): void {
  (series[letter] ??= []).push({ tick, value });
}

function foldChart(chart: ChartState, ev: SessionEvent): void {
  if (ev.kind === 'Planned' || ev.kind === 'Replanned') {
    const trace = ev.expected as Record<string, number>[] | undefined;
    if (trace) {
      const planned: Record<string, number[]> = {};
      for (const step of trace) {
        for (const [letter, value] of Object.entries(step)) {
          (planned[letter] ??= []).push(value);
        }
      }
      chart.planned = planned;
    }
    return;
  }
  if (ev.kind !== 'ComfortUpdated') return;
  const cause = ev.cause as string;
  const values = ev.values as Record<string, number>;
  for (const [letter, value] of Object.entries(values)) {
    pushPoint(chart.actual, letter, ev.tick, value);
  }
  if (cause === 'action' || cause === 'recovery') {
    const expected = ev.expected as Record<string, number> | undefined;
    if (expected) {
      for (const [letter, value] of Object.entries(expected)) {
        pushPoint(chart.expected, letter, ev.tick, value);
      }
    }
  }
}

/** Fold one event into the view (mutating creates subtle aliasing bugs in
 * tests, so the fold returns a structurally fresh view). */
export function applyEvent(view: UiSessionView, ev: SessionEvent): UiSessionView {
  if (ev.tick <= view.cursor) return view; // replay overlap: already folded
  const next: UiSessionView = {
    ...view,
    comfort: { ...view.comfort },
    utterances: [...view.utterances],
    narration: [...view.narration],
    chart: {
      actual: Object.fromEntries(Object.entries(view.chart.actual).map(([k, v]) => [k, [...v]])),
      expected: Object.fromEntries(Object.entries(view.chart.expected).map(([k, v]) => [k, [...v]])),
      planned: view.chart.planned,
    },
    cursor: ev.tick,
  };
  switch (ev.kind) {
    case 'ActionCompleted': {
      if (typeof ev.board === 'string') next.board = ev.board;
      break;
    }
    case 'HumanMoved': {
      if (typeof ev.board === 'string') next.board = ev.board;
      next.turn = 'robot';
      break;
    }
    case 'ActionStarted': {
      const action = ev.action as string;
      const line = GESTURE_NARRATION[action];
      if (line) next.narration.push(`The arm ${line}.`);
      if (action === 'wait_human') next.turn = 'human';
      break;
    }
    case 'Utterance': {
      next.utterances.push({
        tick: ev.tick,
        action: ev.action as string,
        text: ev.text as string,
        cue: (ev.cue as string | null) ?? null,
        volume: ev.volume as string,
      });
      break;
    }
    case 'ComfortUpdated': {
      next.comfort = { ...(ev.values as Record<string, number>) };
      break;
    }
    case 'SessionEnded': {
      if (typeof ev.board === 'string') next.board = ev.board;
      next.ended = true;
      next.status = 'ended';
      break;
    }
  }
  foldChart(next.chart, ev);
  return next;
}

export function applyEvents(view: UiSessionView, events: SessionEvent[]): UiSessionView {
  return events.reduce(applyEvent, view);
}

/** Reconstruct a full view from a replayed stream (page reload path). */
export function replay(events: SessionEvent[]): UiSessionView {
  return applyEvents(initialView(), events);
}

export function parseJsonl(text: string): SessionEvent[] {
  return text
    .split('\n')
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as SessionEvent);
}
