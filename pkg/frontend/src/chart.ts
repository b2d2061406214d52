/** Expected-vs-actual comfort chart: a pure fold into polyline series plus a
 * small canvas renderer. Solid lines are executed values, dashed lines the
 * expected trace (past from events, future from the current plan). */

import type { ChartState } from './types.js';

export interface Polyline {
  letter: string;
  dashed: boolean;
  points: { x: number; y: number }[]; // x = tick index, y = signed comfort
}

export const TRAIT_COLORS: Record<string, string> = {
  C: '#2e6fd8', // blue, as in the conscientiousness trace
  E: '#d88a2e',
  A: '#8a2ed8', // purple, negative for disagreeable agents
};

export function buildSeries(chart: ChartState): Polyline[] {
  const out: Polyline[] = [];
  for (const [letter, points] of Object.entries(chart.actual)) {
    out.push({ letter, dashed: false, points: points.map((p) => ({ x: p.tick, y: p.value })) });
  }
  for (const [letter, points] of Object.entries(chart.expected)) {
    const line: Polyline = {
      letter,
      dashed: true,
      points: points.map((p) => ({ x: p.tick, y: p.value })),
    };
    // extend with the current plan's forward trace, spaced after the last tick
    const planned = chart.planned[letter] ?? [];
    const lastTick = line.points.length ? line.points[line.points.length - 1].x : 0;
    planned.forEach((value, i) => {
      line.points.push({ x: lastTick + (i + 1), y: value });
    });
    out.push(line);
  }
  return out;
}

export function drawChart(canvas: HTMLCanvasElement, chart: ChartState,
                          thresholds: Record<string, number>): void {
  const ctx = canvas.getContext('2d');
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const series = buildSeries(chart);
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const maxX = Math.max(10, ...xs);
  const sx = (x: number) => 30 + (x / maxX) * (width - 40);
  const sy = (y: number) => height / 2 - y * (height / 2 - 10);

  ctx.strokeStyle = '#888';
  ctx.beginPath();
  ctx.moveTo(30, sy(0));
  ctx.lineTo(width - 10, sy(0));
  ctx.stroke();

  for (const [letter, th] of Object.entries(thresholds)) {
    ctx.strokeStyle = TRAIT_COLORS[letter] ?? '#999';
    ctx.setLineDash([2, 6]);
    ctx.beginPath();
    ctx.moveTo(30, sy(th));
    ctx.lineTo(width - 10, sy(th));
    ctx.stroke();
    ctx.setLineDash([]);
  }

  for (const line of series) {
    if (line.points.length === 0) continue;
    ctx.strokeStyle = TRAIT_COLORS[line.letter] ?? '#555';
    ctx.setLineDash(line.dashed ? [6, 4] : []);
    ctx.beginPath();
    line.points.forEach((p, i) => {
      if (i === 0) ctx.moveTo(sx(p.x), sy(p.y));
      else ctx.lineTo(sx(p.x), sy(p.y));
    });
    ctx.stroke();
    ctx.setLineDash([]);
  }
}
