/** Wire types mirrored from the session service. */

export interface SessionEvent {
  tick: number;
  kind: string;
  t: number;
  [key: string]: unknown;
}

export interface Snapshot {
  id: string;
  board: string;
  turn: 'robot' | 'human';
  comfort: Record<string, number>;
  thresholds: Record<string, number>;
  last_utterance: string | null;
  status: 'running' | 'waiting_human' | 'ended';
  speaking: boolean;
  tick: number;
}

export interface UtteranceLine {
  tick: number;
  action: string;
  text: string;
  cue: string | null;
  volume: string;
}

export interface ChartPoint {
  tick: number;
  value: number;
}

export interface ChartState {
  /** Executed signed comfort per trait letter. */
  actual: Record<string, ChartPoint[]>;
  /** Expected signed comfort per trait letter, realigned on every (re)plan. */
  expected: Record<string, ChartPoint[]>;
  /** Current plan's forward trace (dashed extension beyond the last tick). */
  planned: Record<string, number[]>;
}

export interface UiSessionView {
  board: string;
  turn: 'robot' | 'human';
  status: 'running' | 'waiting_human' | 'ended';
  comfort: Record<string, number>;
  thresholds: Record<string, number>;
  utterances: UtteranceLine[];
  narration: string[];
  chart: ChartState;
  /** Tick of the last folded event; the stream cursor. */
  cursor: number;
  ended: boolean;
}
